#pragma once

#include <cmath>
#include <limits>

namespace betheperm {

// Signed scalar carried in the natural-log domain: value = sign * exp(log_magnitude).
// sign == 0 means exactly zero and log_magnitude is then meaningless.
struct LogValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogValue zero() { return {}; }

    static LogValue positive(double log_mag) { return {log_mag, 1}; }

    static LogValue from_value(double v) {
        if (v == 0.0) return zero();
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }

    bool is_zero() const { return sign == 0; }

    // Linear-domain value; overflows to +-inf when the magnitude does not fit.
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

// Total order agreeing with the order of the represented reals.
inline int compare(const LogValue& a, const LogValue& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0) return 0;
    if (a.log_magnitude == b.log_magnitude) return 0;
    const bool a_less = (a.log_magnitude < b.log_magnitude) == (a.sign > 0);
    return a_less ? -1 : 1;
}

inline bool operator<(const LogValue& a, const LogValue& b) { return compare(a, b) < 0; }

// |a/b - 1| for same-sign nonzero values; +inf otherwise.
inline double relative_error(const LogValue& a, const LogValue& b) {
    if (a.sign == 0 && b.sign == 0) return 0.0;
    if (a.sign != b.sign || a.sign == 0 || b.sign == 0)
        return std::numeric_limits<double>::infinity();
    return std::fabs(std::expm1(a.log_magnitude - b.log_magnitude));
}

}  // namespace betheperm
