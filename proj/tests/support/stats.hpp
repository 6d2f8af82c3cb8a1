#pragma once

// Test-side statistical oracles: Kolmogorov-Smirnov and chi-square machinery
// kept independent of the library paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace teststats {

// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} e^{-2 k^2 x^2}.
inline double kolmogorov_q(double x) {
    if (x < 1e-8) return 1.0;
    double s = 0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
        s += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, s));
}

// One-sample KS p-value against a CDF evaluated at the sorted sample.
inline double ks_test_pvalue(std::vector<double> sample,
                             const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0;
    for (size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    double en = std::sqrt(n);
    return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

// Two-sample KS p-value.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                                  static_cast<double>(j) / b.size()));
    }
    double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    double en = std::sqrt(ne);
    return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

// Tabulated CDF on a fine grid, built by per-cell Gauss-Legendre so KS tests
// do not depend on the library's quadrature wrapper. Log-spaced knots keep
// the interpolation bias below KS resolution when the support is wide and
// the density is steep near the lower endpoint.
class GridCdf {
public:
    GridCdf(const std::function<double(double)>& pdf, double lo, double hi, int cells = 4000,
            bool log_spaced = false)
        : lo_(lo), hi_(hi) {
        static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
        static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
        x_.resize(cells + 1);
        f_.resize(cells + 1);
        x_[0] = lo;
        if (log_spaced) {
            double start = (hi - lo) * 1e-9;
            double ratio = std::log((hi - lo) / start);
            for (int c = 1; c <= cells; ++c)
                x_[c] = lo + start * std::exp(ratio * static_cast<double>(c - 1) / (cells - 1));
        } else {
            for (int c = 1; c <= cells; ++c) x_[c] = lo + (hi - lo) * c / cells;
        }
        f_[0] = 0;
        for (int c = 0; c < cells; ++c) {
            double a = x_[c], h = x_[c + 1] - x_[c], m = a + 0.5 * h;
            double s = 0;
            for (int g = 0; g < 5; ++g) s += gw[g] * pdf(m + 0.5 * h * gx[g]);
            f_[c + 1] = f_[c] + 0.5 * h * s;
        }
        total_ = f_.back();
    }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        size_t i = static_cast<size_t>(it - x_.begin()) - 1;
        double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
        return (f_[i] + t * (f_[i + 1] - f_[i])) / total_;
    }

    double mass() const { return total_; }

private:
    double lo_, hi_, total_;
    std::vector<double> x_, f_;
};

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
}

inline double stderr_of_mean(const std::vector<double>& v) {
    double m = mean(v), s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    return std::sqrt(s2 / (v.size() - 1.0) / v.size());
}

}  // namespace teststats
