#pragma once

#include <functional>
#include <string>
#include <vector>

namespace conjnet {

// A delay between a conjugation event and a downstream observable (RFP
// threshold crossing or maturation), described by a CDF with bounded
// support [lower, upper] minutes. cdf(lower) >= 0, cdf(upper) = 1,
// monotone non-decreasing.
struct DelayModel {
    double lower = 0.0;
    double upper = 0.0;
    std::function<double(double)> cdf;
    std::string label;  // e.g. "R(30,150)"

    double operator()(double t) const { return cdf(t); }

    // Continuous uniform on [l, u]; degenerate point mass when l == u.
    static DelayModel uniform(double l, double u, char symbol);
};

// Frame-grid binding of a DelayModel: the frame times t_1..t_n inside the
// support and the per-frame Noisy-OR weights alpha_k satisfying the
// survival identity prod_{i<=k}(1 - alpha_i) = 1 - cdf(t_k).
struct BoundDelay {
    std::vector<double> times;
    std::vector<double> alphas;
};

// alpha_1 = f(t_1); alpha_k = 1 - (1 - f(t_k)) / prod_{i<k}(1 - alpha_i).
// Throws Error::Kind::DegenerateCdf when the recurrence divides by zero with
// mass still outstanding, or when the cdf is not monotone on the grid.
std::vector<double> delay_edge_weights(const DelayModel& delay,
                                       const std::vector<double>& frame_times);

// Frame times k*frame_interval falling inside [lower, upper], plus alphas.
BoundDelay bind_delay(const DelayModel& delay, double frame_interval);

// Per-frame probability mass at delay d: cdf(d + dt/2) - cdf(d - dt/2).
double frame_pmf(const DelayModel& delay, double d, double frame_interval);

}  // namespace conjnet
