#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "betaint/algebra.hpp"
#include "betaint/errors.hpp"
#include "betaint/logval.hpp"

namespace betaint {

// Non-increasing integer weight vector kappa = (k1 >= k2 >= ... >= 0).
// Trailing zeros are normalized away; the empty partition has weight 0.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
        for (size_t i = 0; i + 1 < parts_.size(); ++i)
            if (parts_[i] < parts_[i + 1])
                throw DomainError("partition parts must be non-increasing");
        if (!parts_.empty() && parts_.back() < 0)
            throw DomainError("partition parts must be non-negative");
    }

    int weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
    int length() const { return static_cast<int>(parts_.size()); }
    // part() is zero-padded beyond the stored length.
    int part(int i) const { return i < length() ? parts_[i] : 0; }
    const std::vector<int>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }
    bool operator!=(const Partition& o) const { return parts_ != o.parts_; }

    std::string to_string() const {
        std::string s = "(";
        for (size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts_[i]);
        }
        return s + ")";
    }

    // Dominance order on partitions of equal weight: prefix sums of *this
    // all >= those of o.
    bool dominates(const Partition& o) const {
        int sa = 0, sb = 0;
        int m = std::max(length(), o.length());
        for (int i = 0; i < m; ++i) {
            sa += part(i);
            sb += o.part(i);
            if (sa < sb) return false;
        }
        return true;
    }

private:
    std::vector<int> parts_;
};

namespace detail {

inline void partitions_rec(int remaining, int max_part, int max_parts,
                           std::vector<int>& cur, std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    if (max_parts == 0) return;
    for (int next = std::min(remaining, max_part); next >= 1; --next) {
        cur.push_back(next);
        partitions_rec(remaining - next, next, max_parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

// All partitions of k into at most max_parts parts, reverse-lexicographic:
// (k), (k-1,1), ..., so the series summation order is deterministic.
inline std::vector<Partition> partitions_of(int k, int max_parts) {
    if (k < 0) throw DomainError("cannot partition a negative integer");
    if (max_parts < 1) throw DomainError("max_parts must be positive");
    std::vector<Partition> out;
    std::vector<int> cur;
    detail::partitions_rec(k, k, max_parts, cur, out);
    if (k == 0) return {Partition{}};
    return out;
}

// Generalized Pochhammer symbol (a)_kappa^beta = prod_i (a - (i-1) beta/2)_{k_i},
// as a signed log value (factors may be negative or zero).
inline SignedLog pochhammer(double a, const Partition& kappa, int beta) {
    check_beta(beta);
    SignedLog r = SignedLog::one();
    for (int i = 0; i < kappa.length(); ++i) {
        double base = a - 0.5 * beta * i;
        for (int m = 0; m < kappa.part(i); ++m) {
            double f = base + m;
            if (f == 0.0) return SignedLog::zero();
            r *= SignedLog::from_value(f);
        }
    }
    return r;
}

// log Gamma_p^beta(a) = (p(p-1)beta/4) log pi + sum_i log Gamma(a - (i-1)beta/2).
inline double mv_gamma_log(int p, int beta, double a) {
    check_beta(beta);
    if (p < 1) throw DomainError("dimension p must be positive");
    if (!(a > 0.5 * beta * (p - 1)))
        throw DomainError("multivariate gamma needs a > (p-1)beta/2");
    double r = 0.25 * p * (p - 1) * beta * std::log(M_PI);
    for (int i = 0; i < p; ++i) r += std::lgamma(a - 0.5 * beta * i);
    return r;
}

// log Gamma_p^beta(a, kappa) = log (a)_kappa^beta + log Gamma_p^beta(a).
inline double mv_gamma_weighted_log(int p, int beta, double a, const Partition& kappa) {
    check_beta(beta);
    if (p < 1) throw DomainError("dimension p must be positive");
    if (kappa.length() > p)
        throw DomainError("weight kappa has more parts than the dimension");
    if (!(a > 0.5 * beta * (p - 1) - kappa.part(p - 1)))
        throw DomainError("weighted multivariate gamma needs a > (p-1)beta/2 - k_p");
    SignedLog poch = pochhammer(a, kappa, beta);
    if (poch.sign <= 0)
        throw DomainError("weighted multivariate gamma is not positive here");
    return poch.log_abs + mv_gamma_log(p, beta, a);
}

// log B_p^beta(a, b) via the gamma-ratio form; symmetric in (a, b).
inline double mv_beta_log(int p, int beta, double a, double b) {
    return mv_gamma_log(p, beta, a) + mv_gamma_log(p, beta, b) - mv_gamma_log(p, beta, a + b);
}

// log Vol(V_{p,n}^beta) = p log 2 + (n p beta/2) log pi - log Gamma_p^beta(n beta/2).
inline double stiefel_log_volume(int n, int p, int beta) {
    if (n < p || p < 1) throw DomainError("Stiefel volume needs n >= p >= 1");
    return p * std::log(2.0) + 0.5 * n * p * beta * std::log(M_PI) -
           mv_gamma_log(p, beta, 0.5 * n * beta);
}

// The pi-power shift in the eigenvalue decomposition constant.
inline int rho(int p, int beta) {
    check_beta(beta);
    if (p < 1) throw DomainError("dimension p must be positive");
    switch (beta) {
        case 1: return 0;
        case 2: return -p;
        case 4: return -2 * p;
        default: return -4 * p;
    }
}

// log of pi^{p^2 beta/2 + rho} / Gamma_p^beta(p beta/2): the constant that
// converts integrals of invariant functions over the cone into ordered
// eigenvalue integrals against the Vandermonde weight.
inline double eigen_measure_log_const(int p, int beta) {
    return (0.5 * p * p * beta + rho(p, beta)) * std::log(M_PI) -
           mv_gamma_log(p, beta, 0.5 * p * beta);
}

// Highest weight vector q_kappa(A) = |A_p|^{k_p} prod_i |A_i|^{k_i - k_{i+1}},
// a product over leading principal minors.
inline double q_kappa(const HermitianMatrix& a, const Partition& kappa) {
    const int p = a.p();
    if (kappa.length() > p)
        throw DomainError("q_kappa weight has more parts than the dimension");
    if (kappa.empty()) return 1.0;

    // log |A_m| for the leading m x m blocks, via their spectra.
    std::vector<double> log_minor(p + 1, 0.0);
    for (int m = 1; m <= p; ++m) {
        DAMatrix sub(a.beta(), m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sub.set(i, j, a.at(i, j));
        HermitianMatrix block(sub);
        std::vector<double> ev = hermitian_eigenvalues(block);
        double s = 0;
        for (double v : ev) {
            if (v <= 0) throw SingularMinor("leading principal minor is not positive");
            s += std::log(v);
        }
        log_minor[m] = s;
    }
    double acc = kappa.part(p - 1) * log_minor[p];
    for (int i = 0; i < p - 1; ++i)
        acc += (kappa.part(i) - kappa.part(i + 1)) * log_minor[i + 1];
    return std::exp(acc);
}

}  // namespace betaint
