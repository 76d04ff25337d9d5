#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace conjnet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - exp(x)) for x <= 0, stable near both ends.
inline double log1mexp(double x) {
    if (x >= 0.0) return kNegInf;  // 1 - exp(x) <= 0
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

// log(exp(a) + exp(b))
inline double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

inline double logsumexp(const std::vector<double>& xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - hi);
    return hi + std::log(s);
}

// Deterministic float formatting used by every artifact writer, so that
// identical runs produce identical bytes.
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (x == kNegInf) return "-inf";
    if (x == std::numeric_limits<double>::infinity()) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace conjnet
