#pragma once

#include <cmath>
#include <limits>

namespace betaint {

// Signed log-domain value: sign * exp(log_abs). Products of many gamma
// factors overflow doubles quickly, so everything that multiplies gammas or
// Pochhammer symbols is carried in this representation.
struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;  // -1, 0, +1

    static SignedLog zero() { return {}; }
    static SignedLog one() { return {0.0, 1}; }

    static SignedLog from_value(double v) {
        if (v == 0.0) return zero();
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }
    static SignedLog from_log(double log_value, int sign = 1) {
        if (sign == 0) return zero();
        return {log_value, sign};
    }

    bool is_zero() const { return sign == 0; }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

    SignedLog operator*(const SignedLog& o) const {
        if (sign == 0 || o.sign == 0) return zero();
        return {log_abs + o.log_abs, sign * o.sign};
    }
    SignedLog operator/(const SignedLog& o) const {
        // Division by an exact zero yields +-inf magnitude; callers guard.
        return {log_abs - o.log_abs, sign * o.sign};
    }
    SignedLog operator-() const { return {log_abs, -sign}; }

    // log-sum-exp with sign tracking.
    SignedLog operator+(const SignedLog& o) const {
        if (sign == 0) return o;
        if (o.sign == 0) return *this;
        const SignedLog& big = (log_abs >= o.log_abs) ? *this : o;
        const SignedLog& small = (log_abs >= o.log_abs) ? o : *this;
        double r = std::exp(small.log_abs - big.log_abs);  // in [0, 1]
        double s = (big.sign == small.sign) ? 1.0 + r : 1.0 - r;
        if (s == 0.0) return zero();
        return {big.log_abs + std::log(s), big.sign};
    }
    SignedLog& operator+=(const SignedLog& o) { return *this = *this + o; }
    SignedLog& operator*=(const SignedLog& o) { return *this = *this * o; }

    SignedLog pow(double e) const {
        if (sign == 0) return zero();
        // Negative base with non-integer exponent is a caller bug; integer
        // exponents keep an exact sign.
        int s = sign;
        if (sign < 0) {
            double r = std::round(e);
            s = (static_cast<long long>(r) % 2 == 0) ? 1 : -1;
        }
        return {log_abs * e, s};
    }
};

}  // namespace betaint
