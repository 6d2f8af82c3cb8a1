#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "betaint/algebra.hpp"
#include "betaint/errors.hpp"
#include "betaint/jack.hpp"
#include "betaint/logval.hpp"
#include "betaint/quadrature.hpp"
#include "betaint/rng.hpp"
#include "betaint/specfun.hpp"

namespace betaint {

struct HypSeriesResult {
    SignedLog value;
    int degree_used = 0;
    double tail_estimate = 0.0;  // magnitude of the last included degree's contribution
    bool converged = false;

    double value_linear() const { return value.value(); }
};

namespace detail {

inline void check_lower_parameters(const std::vector<double>& lower, int p, int beta) {
    for (double b : lower)
        for (int j = 1; j <= p; ++j) {
            double v = -b + 0.5 * beta * (j - 1);
            if (v > -1e-9 && std::fabs(v - std::round(v)) < 1e-9)
                throw PoleParameter("lower parameter " + std::to_string(b) +
                                    " hits the excluded lattice at row " + std::to_string(j));
        }
}

}  // namespace detail

// Truncated hypergeometric function of one matrix argument, evaluated at the
// eigenvalue vector x. Degrees are summed in the fixed reverse-lex partition
// order; the run stops once three consecutive degrees each contribute less
// than tol * |partial sum|, or at max_degree. Non-convergence is a flag,
// never an exception.
inline HypSeriesResult hyp_pq(const std::vector<double>& upper, const std::vector<double>& lower,
                              int beta, const std::vector<double>& x, int max_degree = 30,
                              double tol = 1e-12) {
    check_beta(beta);
    const int p = static_cast<int>(x.size());
    if (p < 1) throw DomainError("hypergeometric series needs at least one eigenvalue");
    detail::check_lower_parameters(lower, p, beta);

    auto table = jack_table_cached(p, beta, max_degree);
    HypSeriesResult res;
    res.value = SignedLog::zero();
    int consecutive_small = 0;
    double log_kfact = 0.0;
    for (int k = 0; k <= max_degree; ++k) {
        if (k > 0) log_kfact += std::log(static_cast<double>(k));
        const auto& parts = table->partitions(k);
        std::vector<double> cvals = table->eval_degree(k, x);
        SignedLog contrib = SignedLog::zero();
        for (size_t i = 0; i < parts.size(); ++i) {
            if (cvals[i] == 0.0) continue;
            SignedLog term = SignedLog::from_value(cvals[i]);
            for (double a : upper) term *= pochhammer(a, parts[i], beta);
            for (double b : lower) {
                SignedLog d = pochhammer(b, parts[i], beta);
                if (d.is_zero())
                    throw PoleParameter("lower-parameter Pochhammer vanished at " +
                                        parts[i].to_string());
                term = term / d;
            }
            contrib += term;
        }
        contrib = contrib * SignedLog::from_log(-log_kfact);
        res.value += contrib;
        res.degree_used = k;
        res.tail_estimate = contrib.is_zero() ? 0.0 : std::exp(contrib.log_abs);

        double partial_mag = res.value.is_zero() ? 0.0 : std::exp(res.value.log_abs);
        if (res.tail_estimate <= tol * std::max(partial_mag, 1e-300)) {
            if (++consecutive_small >= 3) {
                res.converged = true;
                break;
            }
        } else {
            consecutive_small = 0;
        }
    }
    if (!res.converged && res.value.sign != 0) {
        double partial_mag = std::exp(res.value.log_abs);
        res.converged = res.tail_estimate <= tol * partial_mag;
    }
    return res;
}

// ----------------------------------------------------------------------------
// Confluent hypergeometric function Psi^beta(a, c; X) of Definition-1, by
// numerical integration of the defining cone integral.
// ----------------------------------------------------------------------------

enum class PsiMethod {
    auto_pick,
    scalar_quadrature,  // p = 1, deterministic
    cone_mc,            // importance sampling with a Wishart-type proposal (concrete beta)
    eigen_quadrature,   // p <= 2, scalar argument, any beta (ordered-eigenvalue reduction)
    eigen_mc            // any p, scalar argument, any beta
};

struct PsiBudget {
    std::size_t samples = 100000;
    std::uint64_t seed = 42;
    int workers = 1;
};

struct PsiResult {
    double log_value = 0.0;
    double rel_stderr = 0.0;  // 0 for deterministic methods
    PsiMethod method = PsiMethod::scalar_quadrature;
};

namespace detail {

inline bool all_equal(const std::vector<double>& v) {
    for (double x : v)
        if (std::fabs(x - v[0]) > 1e-12 * std::max(1.0, std::fabs(v[0]))) return false;
    return true;
}

// Triangular-factor sample of W_p^beta(n, I) under the etr(-(beta/2) S)
// convention; real degrees of freedom n > p - 1 are allowed.
inline DAMatrix wishart_chol_factor(int p, int beta, double n, Rng& rng) {
    require_concrete(beta);
    if (!(n > p - 1)) throw DomainError("Wishart factor needs n > p - 1");
    DAMatrix t(beta, p, p);
    double sd = 1.0 / std::sqrt(static_cast<double>(beta));
    for (int i = 0; i < p; ++i) {
        double shape = 0.5 * beta * (n - i);
        t.set(i, i, Quat(std::sqrt(draw_gamma(rng, shape, 0.5 * beta))));
        for (int j = 0; j < i; ++j) {
            Quat q;
            q.w = draw_normal(rng, sd);
            if (beta >= 2) q.x = draw_normal(rng, sd);
            if (beta >= 4) { q.y = draw_normal(rng, sd); q.z = draw_normal(rng, sd); }
            t.set(i, j, q);
        }
    }
    return t;
}

inline HermitianMatrix wishart_sample_real_dof(double n, const HermitianMatrix& sigma, Rng& rng) {
    DAMatrix t = wishart_chol_factor(sigma.p(), sigma.beta(), n, rng);
    DAMatrix c = sqrt_pd(sigma).matrix();
    DAMatrix y = c * t;
    return HermitianMatrix(y * y.conj_transpose());
}

struct LogMeanResult {
    double log_mean;
    double rel_stderr;
    double ess;
};

// Mean and relative stderr of exp(log_w) without leaving the log domain.
inline LogMeanResult log_mean_exp(const std::vector<double>& log_w) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_w) m = std::max(m, v);
    if (!std::isfinite(m)) return {-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    double s = 0, s2 = 0;
    for (double v : log_w) {
        double r = std::exp(v - m);
        s += r;
        s2 += r * r;
    }
    const double n = static_cast<double>(log_w.size());
    double mean = s / n;
    double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    double rel = std::sqrt(var / n) / mean;
    double ess = s * s / std::max(s2, 1e-300);
    return {m + std::log(mean), rel, ess};
}

}  // namespace detail

// Psi at a concrete matrix argument. For beta = 8 use the eigenvalue
// overload below with a scalar argument.
inline PsiResult kummer_psi(double a, double c, const HermitianMatrix& x,
                            PsiMethod method = PsiMethod::auto_pick, PsiBudget budget = {});

// Psi as a function of the (sorted) eigenvalues of the matrix argument.
// Methods other than cone_mc live here; cone_mc needs a concrete matrix.
inline PsiResult kummer_psi_eig(double a, double c, int beta, const std::vector<double>& x_eigs,
                                PsiMethod method = PsiMethod::auto_pick, PsiBudget budget = {}) {
    check_beta(beta);
    const int p = static_cast<int>(x_eigs.size());
    if (p < 1) throw DomainError("kummer_psi needs a positive dimension");
    if (!(a > 0.5 * beta * (p - 1))) throw DomainError("kummer_psi needs a > (p-1)beta/2");
    for (double v : x_eigs)
        if (!(v > 0)) throw DomainError("kummer_psi needs a positive definite argument");

    if (method == PsiMethod::auto_pick) {
        if (p == 1) method = PsiMethod::scalar_quadrature;
        else if (detail::all_equal(x_eigs))
            method = (p <= 2) ? PsiMethod::eigen_quadrature : PsiMethod::eigen_mc;
        else if (beta != 8)
            method = PsiMethod::cone_mc;
        else
            throw DomainError("beta = 8 Psi needs a scalar matrix argument");
    }

    const double s_exp = a - 0.5 * beta * (p - 1) - 1.0;        // |Y| exponent
    const double t_exp = c - a - 0.5 * beta * (p - 1) - 1.0;    // |I+Y| exponent
    const double log_gamma_a = mv_gamma_log(p, beta, a);

    switch (method) {
        case PsiMethod::scalar_quadrature: {
            if (p != 1) throw DomainError("scalar_quadrature requires p = 1");
            const double x = x_eigs[0];
            double v = integrate_0inf(
                [&](double y) {
                    double lg = -x * y + s_exp * std::log(y) + t_exp * std::log1p(y);
                    return std::exp(lg);
                },
                1e-11);
            return {std::log(v) - log_gamma_a, 0.0, method};
        }
        case PsiMethod::eigen_quadrature: {
            if (p > 2 || !detail::all_equal(x_eigs))
                throw DomainError("eigen_quadrature requires p <= 2 and a scalar argument");
            const double x = x_eigs[0];
            double log_const = eigen_measure_log_const(p, beta) - log_gamma_a;
            if (p == 1) return kummer_psi_eig(a, c, beta, x_eigs, PsiMethod::scalar_quadrature, budget);
            auto f = [&](double l1, double l2) {
                double lg = -x * (l1 + l2) + s_exp * (std::log(l1) + std::log(l2)) +
                            t_exp * (std::log1p(l1) + std::log1p(l2)) +
                            beta * std::log(l1 - l2);
                return std::exp(lg);
            };
            double v = integrate_ordered2_0inf(f, 1e-10);
            return {std::log(v) + log_const, 0.0, method};
        }
        case PsiMethod::eigen_mc: {
            if (!detail::all_equal(x_eigs))
                throw DomainError("eigen_mc requires a scalar argument");
            const double x = x_eigs[0];
            const double shape = s_exp + 1.0;  // gamma proposal matches the |Y| power
            double log_prop_norm = shape * std::log(x) - std::lgamma(shape);
            std::vector<double> log_w(budget.samples);
            std::size_t done = 0;
            for (int w = 0; w < budget.workers; ++w) {
                std::size_t count = budget.samples / budget.workers +
                                    (static_cast<std::size_t>(w) < budget.samples % budget.workers ? 1 : 0);
                Rng rng = make_stream(budget.seed, 0x9a0 + w);
                for (std::size_t i = 0; i < count; ++i) {
                    std::vector<double> lam(p);
                    for (double& v : lam) v = draw_gamma(rng, shape, x);
                    std::sort(lam.begin(), lam.end(), std::greater<double>());
                    double lw = -std::lgamma(p + 1.0);
                    for (int j = 0; j < p; ++j) {
                        lw += t_exp * std::log1p(lam[j]) - log_prop_norm;
                        for (int l = j + 1; l < p; ++l)
                            lw += beta * std::log(lam[j] - lam[l]);
                    }
                    log_w[done + i] = lw;
                }
                done += count;
            }
            auto m = detail::log_mean_exp(log_w);
            double log_const = eigen_measure_log_const(p, beta) - log_gamma_a;
            return {m.log_mean + log_const, m.rel_stderr, method};
        }
        case PsiMethod::cone_mc:
            throw DomainError("cone_mc needs the concrete-matrix overload of kummer_psi");
        default:
            throw DomainError("unresolved Psi method");
    }
}

inline PsiResult kummer_psi(double a, double c, const HermitianMatrix& x, PsiMethod method,
                            PsiBudget budget) {
    const int p = x.p();
    const int beta = x.beta();
    std::vector<double> eigs = hermitian_eigenvalues(x);
    if (method == PsiMethod::auto_pick) {
        if (p == 1) method = PsiMethod::scalar_quadrature;
        else if (detail::all_equal(eigs) && p <= 2) method = PsiMethod::eigen_quadrature;
        else method = PsiMethod::cone_mc;
    }
    if (method != PsiMethod::cone_mc) return kummer_psi_eig(a, c, beta, eigs, method, budget);

    if (!(a > 0.5 * beta * (p - 1))) throw DomainError("kummer_psi needs a > (p-1)beta/2");
    if (!is_positive_definite(x)) throw DomainError("kummer_psi needs a PD argument");

    // etr(-XY)|Y|^{a - (p-1)beta/2 - 1} is the kernel of W_p^beta(2a/beta,
    // (beta/2) X^{-1}); sampling it leaves |I+Y|^{t} as a bounded weight
    // whenever t <= 0 and as an integrable one otherwise.
    const double dof = 2.0 * a / beta;
    const double t_exp = c - a - 0.5 * beta * (p - 1) - 1.0;
    HermitianMatrix scale = HermitianMatrix(inv_pd(x).matrix() * (0.5 * beta));
    double log_det_x = log_det_pd(x);

    std::vector<double> log_w(budget.samples);
    std::size_t done = 0;
    for (int w = 0; w < budget.workers; ++w) {
        std::size_t count = budget.samples / budget.workers +
                            (static_cast<std::size_t>(w) < budget.samples % budget.workers ? 1 : 0);
        Rng rng = make_stream(budget.seed, 0x5c0 + w);
        for (std::size_t i = 0; i < count; ++i) {
            HermitianMatrix y = detail::wishart_sample_real_dof(dof, scale, rng);
            HermitianMatrix iy = HermitianMatrix(y.matrix() + DAMatrix::identity(beta, p));
            log_w[done + i] = t_exp * log_det_pd(iy);
        }
        done += count;
    }
    auto m = detail::log_mean_exp(log_w);
    return {m.log_mean - a * log_det_x, m.rel_stderr, PsiMethod::cone_mc};
}

}  // namespace betaint
