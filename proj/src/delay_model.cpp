#include "conjnet/delay_model.hpp"

#include <algorithm>
#include <cmath>

#include "conjnet/errors.hpp"

namespace conjnet {

DelayModel DelayModel::uniform(double l, double u, char symbol) {
    if (u < l) throw Error(Error::Kind::DegenerateCdf, "delay support upper < lower");
    DelayModel m;
    m.lower = l;
    m.upper = u;
    if (u == l) {
        m.cdf = [l](double t) { return t >= l ? 1.0 : 0.0; };
    } else {
        m.cdf = [l, u](double t) { return std::clamp((t - l) / (u - l), 0.0, 1.0); };
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "%c(%g,%g)", symbol, l, u);
    m.label = buf;
    return m;
}

std::vector<double> delay_edge_weights(const DelayModel& delay,
                                       const std::vector<double>& frame_times) {
    std::vector<double> alphas;
    alphas.reserve(frame_times.size());
    double prev_f = -1.0;
    double survival = 1.0;  // prod (1 - alpha_i) so far
    for (double t : frame_times) {
        const double f = delay.cdf(t);
        if (f < prev_f - 1e-12 || f < -1e-12 || f > 1.0 + 1e-12)
            throw Error(Error::Kind::DegenerateCdf, "cdf not monotone into [0,1]");
        prev_f = f;
        double alpha;
        if (survival == 0.0) {
            if (1.0 - f > 1e-12)
                throw Error(Error::Kind::DegenerateCdf,
                            "cdf mass outstanding after survival reached zero");
            alpha = 1.0;
        } else {
            alpha = 1.0 - (1.0 - f) / survival;
            alpha = std::clamp(alpha, 0.0, 1.0);
        }
        alphas.push_back(alpha);
        survival *= (1.0 - alpha);
    }
    return alphas;
}

BoundDelay bind_delay(const DelayModel& delay, double frame_interval) {
    BoundDelay bound;
    const long k_lo = static_cast<long>(std::ceil(delay.lower / frame_interval - 1e-9));
    const long k_hi = static_cast<long>(std::floor(delay.upper / frame_interval + 1e-9));
    for (long k = std::max(k_lo, 1L); k <= k_hi; ++k)
        bound.times.push_back(static_cast<double>(k) * frame_interval);
    bound.alphas = delay_edge_weights(delay, bound.times);
    return bound;
}

double frame_pmf(const DelayModel& delay, double d, double frame_interval) {
    const double half = 0.5 * frame_interval;
    return std::max(delay.cdf(d + half) - delay.cdf(d - half), 0.0);
}

}  // namespace conjnet
