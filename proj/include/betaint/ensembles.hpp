#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "betaint/algebra.hpp"
#include "betaint/errors.hpp"
#include "betaint/hypergeom.hpp"
#include "betaint/quadrature.hpp"
#include "betaint/rng.hpp"
#include "betaint/specfun.hpp"

namespace betaint {

enum class EnsembleKind {
    normal,
    wishart,
    t_type2,
    gegenbauer2,
    t_laguerre,
    gegenbauer_laguerre,
    kb1,
    kb2,
    gkb1,
    gkb2
};

inline const char* ensemble_name(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::normal: return "normal";
        case EnsembleKind::wishart: return "wishart";
        case EnsembleKind::t_type2: return "t-type2";
        case EnsembleKind::gegenbauer2: return "gegenbauer2";
        case EnsembleKind::t_laguerre: return "t-laguerre";
        case EnsembleKind::gegenbauer_laguerre: return "gegenbauer-laguerre";
        case EnsembleKind::kb1: return "kb1";
        case EnsembleKind::kb2: return "kb2";
        case EnsembleKind::gkb1: return "gkb1";
        case EnsembleKind::gkb2: return "gkb2";
    }
    return "?";
}

inline const std::vector<EnsembleKind>& all_ensemble_kinds() {
    static const std::vector<EnsembleKind> kinds = {
        EnsembleKind::normal,      EnsembleKind::wishart,
        EnsembleKind::t_type2,     EnsembleKind::gegenbauer2,
        EnsembleKind::t_laguerre,  EnsembleKind::gegenbauer_laguerre,
        EnsembleKind::kb1,         EnsembleKind::kb2,
        EnsembleKind::gkb1,        EnsembleKind::gkb2};
    return kinds;
}

inline EnsembleKind ensemble_from_name(const std::string& s) {
    for (EnsembleKind k : all_ensemble_kinds())
        if (s == ensemble_name(k)) return k;
    throw DomainError("unknown ensemble name: " + s);
}

// Matrix-valued parameter: either sigma * I (usable for every beta, including
// the formula-only beta = 8) or a concrete Hermitian matrix.
class MatrixParam {
public:
    MatrixParam() = default;

    static MatrixParam scalar_matrix(int beta, int dim, double s) {
        check_beta(beta);
        MatrixParam m;
        m.beta_ = beta;
        m.dim_ = dim;
        m.scalar_ = s;
        return m;
    }

    static MatrixParam concrete(const HermitianMatrix& h) {
        MatrixParam m;
        m.beta_ = h.beta();
        m.dim_ = h.p();
        m.mat_ = h;
        return m;
    }

    bool is_set() const { return dim_ > 0; }
    bool is_scalar() const { return !mat_.has_value(); }
    double scalar() const {
        if (!is_scalar()) throw DomainError("matrix parameter is not scalar");
        return scalar_;
    }
    int dim() const { return dim_; }
    int beta() const { return beta_; }

    std::vector<double> eigenvalues() const {
        if (is_scalar()) return std::vector<double>(dim_, scalar_);
        return hermitian_eigenvalues(*mat_);
    }

    HermitianMatrix materialize() const {
        if (mat_) return *mat_;
        require_concrete(beta_);
        return HermitianMatrix::diagonal(beta_, std::vector<double>(dim_, scalar_));
    }

    bool positive_definite() const {
        if (is_scalar()) return scalar_ > 0;
        return is_positive_definite(*mat_);
    }

private:
    int beta_ = 0, dim_ = 0;
    double scalar_ = 0.0;
    std::optional<HermitianMatrix> mat_;
};

enum class SupportRegion { cone, unit_interval, band, shifted_cone, full };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::wishart;
    int p = 1;
    int beta = 1;
    double n = 0, nu = 0, alpha1 = 0, alpha2 = 0;
    MatrixParam sigma, theta, omega, psi;
    int n_rows = 0;                 // normal: row dimension
    std::optional<DAMatrix> mu;     // normal: zero when absent

    void validate() const;
};

inline EnsembleSpec make_wishart(int p, int beta, double n, MatrixParam sigma) {
    EnsembleSpec s;
    s.kind = EnsembleKind::wishart;
    s.p = p; s.beta = beta; s.n = n; s.sigma = std::move(sigma);
    s.validate();
    return s;
}

inline EnsembleSpec make_quadratic_form(EnsembleKind kind, int p, int beta, double n, double nu) {
    EnsembleSpec s;
    s.kind = kind;
    s.p = p; s.beta = beta; s.n = n; s.nu = nu;
    s.validate();
    return s;
}

inline EnsembleSpec make_kb(EnsembleKind kind, int p, int beta, double a1, double a2,
                            MatrixParam sigma) {
    EnsembleSpec s;
    s.kind = kind;
    s.p = p; s.beta = beta; s.alpha1 = a1; s.alpha2 = a2; s.sigma = std::move(sigma);
    s.validate();
    return s;
}

inline EnsembleSpec make_gkb(EnsembleKind kind, int p, int beta, double a1, double a2,
                             MatrixParam theta, MatrixParam omega, MatrixParam psi) {
    EnsembleSpec s;
    s.kind = kind;
    s.p = p; s.beta = beta; s.alpha1 = a1; s.alpha2 = a2;
    s.theta = std::move(theta); s.omega = std::move(omega); s.psi = std::move(psi);
    s.validate();
    return s;
}

inline EnsembleSpec make_normal(int n_rows, int p, int beta, std::optional<DAMatrix> mu,
                                MatrixParam sigma, MatrixParam theta) {
    EnsembleSpec s;
    s.kind = EnsembleKind::normal;
    s.p = p; s.beta = beta; s.n_rows = n_rows;
    s.mu = std::move(mu); s.sigma = std::move(sigma); s.theta = std::move(theta);
    s.validate();
    return s;
}

namespace detail {

// A = omega - psi for GKB1, omega + psi for GKB2 (scalar form).
inline double gkb_scalar_a(const EnsembleSpec& s) {
    double sign = (s.kind == EnsembleKind::gkb1) ? -1.0 : 1.0;
    return s.omega.scalar() + sign * s.psi.scalar();
}

inline HermitianMatrix gkb_a_matrix(const EnsembleSpec& s) {
    HermitianMatrix om = s.omega.materialize();
    HermitianMatrix ps = s.psi.materialize();
    return (s.kind == EnsembleKind::gkb1) ? om - ps : om + ps;
}

inline bool gkb_all_scalar(const EnsembleSpec& s) {
    return s.theta.is_scalar() && s.omega.is_scalar() && s.psi.is_scalar();
}

}  // namespace detail

inline void EnsembleSpec::validate() const {
    check_beta(beta);
    if (p < 1) throw DomainError("ensemble dimension p must be positive");
    const double gamma_wall = 0.5 * beta * (p - 1);
    switch (kind) {
        case EnsembleKind::normal:
            if (n_rows < 1) throw DomainError("normal ensemble needs n >= 1 rows");
            if (!sigma.is_set() || sigma.dim() != p || !sigma.positive_definite())
                throw DomainError("normal ensemble needs a PD p x p Sigma");
            if (!theta.is_set() || theta.dim() != n_rows || !theta.positive_definite())
                throw DomainError("normal ensemble needs a PD n x n Theta");
            if (mu && (mu->rows() != n_rows || mu->cols() != p || mu->beta() != beta))
                throw DomainError("normal ensemble mean has the wrong shape");
            break;
        case EnsembleKind::wishart:
            if (!(n >= p - 1)) throw DomainError("Wishart needs n >= p - 1");
            if (!sigma.is_set() || sigma.dim() != p || !sigma.positive_definite())
                throw DomainError("Wishart needs a PD p x p Sigma");
            break;
        case EnsembleKind::t_type2:
            // The quadratic-form density is integrable on nu > p - 1; the
            // rectangular definition's stricter nu > p is not needed here.
            if (!(nu > p - 1)) throw DomainError("T type II needs nu > p - 1");
            if (!(n > p - 1)) throw DomainError("T type II needs n > p - 1");
            break;
        case EnsembleKind::gegenbauer2:
            if (!(nu > p - 1)) throw DomainError("Gegenbauer II needs nu > p - 1");
            if (!(n > p - 1)) throw DomainError("Gegenbauer II needs n > p - 1");
            break;
        case EnsembleKind::t_laguerre:
        case EnsembleKind::gegenbauer_laguerre:
            if (!(nu >= p - 1) || !(n >= p - 1))
                throw DomainError("Laguerre-type ensembles need nu, n >= p - 1");
            break;
        case EnsembleKind::kb1:
        case EnsembleKind::kb2:
            if (!(alpha1 >= gamma_wall) || !(alpha2 >= gamma_wall))
                throw DomainError("Kummer-beta needs alpha1, alpha2 >= (p-1)beta/2");
            if (!sigma.is_set() || sigma.dim() != p || !sigma.positive_definite())
                throw DomainError("Kummer-beta needs a PD p x p Sigma");
            break;
        case EnsembleKind::gkb1:
        case EnsembleKind::gkb2: {
            if (!(alpha1 >= gamma_wall) || !(alpha2 >= gamma_wall))
                throw DomainError("generalized Kummer-beta needs alpha1, alpha2 >= (p-1)beta/2");
            if (!theta.is_set() || !omega.is_set() || !psi.is_set() || theta.dim() != p ||
                omega.dim() != p || psi.dim() != p)
                throw DomainError("generalized Kummer-beta needs p x p Theta, Omega, Psi");
            if (!omega.positive_definite())
                throw DomainError("generalized Kummer-beta needs PD Omega");
            if (detail::gkb_all_scalar(*this)) {
                if (!(detail::gkb_scalar_a(*this) > 0))
                    throw DomainError(kind == EnsembleKind::gkb1 ? "GKB1 needs Omega - Psi PD"
                                                                 : "GKB2 needs Omega + Psi PD");
            } else {
                if (!is_positive_definite(detail::gkb_a_matrix(*this)))
                    throw DomainError(kind == EnsembleKind::gkb1 ? "GKB1 needs Omega - Psi PD"
                                                                 : "GKB2 needs Omega + Psi PD");
            }
            break;
        }
    }
}

inline SupportRegion support_of(const EnsembleSpec& s) {
    switch (s.kind) {
        case EnsembleKind::normal: return SupportRegion::full;
        case EnsembleKind::wishart:
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre:
        case EnsembleKind::kb2: return SupportRegion::cone;
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre:
        case EnsembleKind::kb1: return SupportRegion::unit_interval;
        case EnsembleKind::gkb1: return SupportRegion::band;
        case EnsembleKind::gkb2: return SupportRegion::shifted_cone;
    }
    return SupportRegion::full;
}

// Exact membership test via eigenvalues of the appropriate differences.
inline bool in_support(const EnsembleSpec& s, const HermitianMatrix& x) {
    auto pd = [](const HermitianMatrix& m) { return hermitian_eigenvalues(m).back() > 0; };
    switch (support_of(s)) {
        case SupportRegion::full: return true;
        case SupportRegion::cone: return pd(x);
        case SupportRegion::unit_interval:
            return pd(x) && pd(HermitianMatrix(DAMatrix::identity(x.beta(), x.p()) - x.matrix()));
        case SupportRegion::band:
            return pd(HermitianMatrix(x.matrix() - s.psi.materialize().matrix())) &&
                   pd(HermitianMatrix(s.omega.materialize().matrix() - x.matrix()));
        case SupportRegion::shifted_cone:
            return pd(HermitianMatrix(x.matrix() - s.psi.materialize().matrix()));
    }
    return false;
}

// Eigenvalue-domain support interval for specs with scalar matrix
// parameters. second = +inf for unbounded regions.
inline std::pair<double, double> support_interval(const EnsembleSpec& s) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (support_of(s)) {
        case SupportRegion::cone: return {0.0, inf};
        case SupportRegion::unit_interval: return {0.0, 1.0};
        case SupportRegion::band: return {s.psi.scalar(), s.omega.scalar()};
        case SupportRegion::shifted_cone: return {s.psi.scalar(), inf};
        case SupportRegion::full: return {-inf, inf};
    }
    return {-inf, inf};
}

struct NormalizerOptions {
    int max_degree = 30;
    double tol = 1e-12;
    PsiBudget psi_budget = {};
};

// Resolution of the paper's ambiguous second Psi argument in the KB2
// normalizer: forced by matching the |I+Y| exponent in Psi's defining
// integral to -alpha2.
inline double kb2_psi_c(int p, int beta, double a1, double a2) {
    return a1 - a2 + 0.5 * beta * (p - 1) + 1.0;
}

// log of the constant multiplying the density kernel; closed-form in
// specfun/hypergeom terms, so it accepts beta = 8.
inline double log_normalizer(const EnsembleSpec& s, const NormalizerOptions& opt = {}) {
    const int p = s.p, beta = s.beta;
    switch (s.kind) {
        case EnsembleKind::normal: {
            double ld_sigma = s.sigma.is_scalar() ? p * std::log(s.sigma.scalar())
                                                  : log_det_pd(s.sigma.materialize());
            double ld_theta = s.theta.is_scalar() ? s.n_rows * std::log(s.theta.scalar())
                                                  : log_det_pd(s.theta.materialize());
            double pn = 0.5 * beta * p * s.n_rows;
            return pn * std::log(beta) - pn * std::log(2.0 * M_PI) -
                   0.5 * beta * s.n_rows * ld_sigma - 0.5 * beta * p * ld_theta;
        }
        case EnsembleKind::wishart: {
            double ld_sigma = s.sigma.is_scalar() ? p * std::log(s.sigma.scalar())
                                                  : log_det_pd(s.sigma.materialize());
            double pn = 0.5 * beta * p * s.n;
            return pn * std::log(0.5 * beta) - mv_gamma_log(p, beta, 0.5 * beta * s.n) -
                   0.5 * beta * s.n * ld_sigma;
        }
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre:
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre:
            return -mv_beta_log(p, beta, 0.5 * beta * s.nu, 0.5 * beta * s.n);
        case EnsembleKind::kb1: {
            std::vector<double> neg_sig = s.sigma.eigenvalues();
            for (double& v : neg_sig) v = -v;
            HypSeriesResult f =
                hyp_pq({s.alpha1}, {s.alpha1 + s.alpha2}, beta, neg_sig, opt.max_degree, opt.tol);
            return -(mv_beta_log(p, beta, s.alpha1, s.alpha2) + f.value.log_abs);
        }
        case EnsembleKind::kb2: {
            double c = kb2_psi_c(p, beta, s.alpha1, s.alpha2);
            PsiResult psi = kummer_psi_eig(s.alpha1, c, beta, s.sigma.eigenvalues(),
                                           PsiMethod::auto_pick, opt.psi_budget);
            return -(mv_gamma_log(p, beta, s.alpha1) + psi.log_value);
        }
        case EnsembleKind::gkb1:
        case EnsembleKind::gkb2: {
            // Composed programmatically from the KB normalizer, the affine
            // map's Jacobian |A|^{beta(p-1)/2 + 1}, and the kernel factors
            // that the substitution pulls out; A = Omega -+ Psi.
            EnsembleSpec kb;
            kb.kind = (s.kind == EnsembleKind::gkb1) ? EnsembleKind::kb1 : EnsembleKind::kb2;
            kb.p = p;
            kb.beta = beta;
            kb.alpha1 = s.alpha1;
            kb.alpha2 = s.alpha2;
            double tr_theta_psi, ld_a;
            if (detail::gkb_all_scalar(s)) {
                double a = detail::gkb_scalar_a(s);
                kb.sigma = MatrixParam::scalar_matrix(beta, p, a * s.theta.scalar());
                tr_theta_psi = p * s.theta.scalar() * s.psi.scalar();
                ld_a = p * std::log(a);
            } else {
                HermitianMatrix a = detail::gkb_a_matrix(s);
                HermitianMatrix ra = sqrt_pd(a);
                kb.sigma = MatrixParam::concrete(
                    HermitianMatrix(ra.matrix() * s.theta.materialize().matrix() * ra.matrix()));
                tr_theta_psi = trace_prod_re(s.theta.materialize(), s.psi.materialize());
                ld_a = log_det_pd(a);
            }
            double gamma1 = 0.5 * beta * (p - 1) + 1.0;
            double kexp = (s.kind == EnsembleKind::gkb1) ? (gamma1 - s.alpha1 - s.alpha2)
                                                         : (s.alpha2 - s.alpha1);
            return log_normalizer(kb, opt) + tr_theta_psi + kexp * ld_a;
        }
    }
    throw DomainError("unhandled ensemble kind");
}

// log of the unnormalized kernel at Lambda = diag(lam), valid as a pure
// formula for every beta when the matrix parameters are scalar. Returns
// -inf outside the support.
inline double log_kernel_eig(const EnsembleSpec& s, const std::vector<double>& lam) {
    const int p = s.p, beta = s.beta;
    if (static_cast<int>(lam.size()) != p)
        throw DimensionMismatch("eigenvalue count must match the ensemble dimension");
    const double gm1 = 0.5 * beta * (p - 1) + 1.0;  // (p-1)beta/2 + 1
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double acc = 0;
    switch (s.kind) {
        case EnsembleKind::normal:
            throw DomainError("the normal ensemble has no eigenvalue kernel on the cone");
        case EnsembleKind::wishart: {
            if (!s.sigma.is_scalar())
                throw DomainError("eigenvalue kernel needs scalar Sigma");
            double rate = 0.5 * beta / s.sigma.scalar();
            double e = 0.5 * beta * (s.n - p + 1) - 1.0;
            for (double l : lam) {
                if (!(l > 0)) return neg_inf;
                acc += e * std::log(l) - rate * l;
            }
            return acc;
        }
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre: {
            double e = 0.5 * beta * (s.n - p + 1) - 1.0;
            for (double l : lam) {
                if (!(l > 0)) return neg_inf;
                acc += e * std::log(l) - 0.5 * beta * (s.n + s.nu) * std::log1p(l);
            }
            return acc;
        }
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre: {
            double e = 0.5 * beta * (s.n - p + 1) - 1.0;
            double f = 0.5 * beta * (s.nu - p + 1) - 1.0;
            for (double l : lam) {
                if (!(l > 0 && l < 1)) return neg_inf;
                acc += e * std::log(l) + f * std::log1p(-l);
            }
            return acc;
        }
        case EnsembleKind::kb1: {
            if (!s.sigma.is_scalar()) throw DomainError("eigenvalue kernel needs scalar Sigma");
            double sg = s.sigma.scalar();
            for (double l : lam) {
                if (!(l > 0 && l < 1)) return neg_inf;
                acc += -sg * l + (s.alpha1 - gm1) * std::log(l) +
                       (s.alpha2 - gm1) * std::log1p(-l);
            }
            return acc;
        }
        case EnsembleKind::kb2: {
            if (!s.sigma.is_scalar()) throw DomainError("eigenvalue kernel needs scalar Sigma");
            double sg = s.sigma.scalar();
            for (double l : lam) {
                if (!(l > 0)) return neg_inf;
                acc += -sg * l + (s.alpha1 - gm1) * std::log(l) - s.alpha2 * std::log1p(l);
            }
            return acc;
        }
        case EnsembleKind::gkb1: {
            if (!detail::gkb_all_scalar(s))
                throw DomainError("eigenvalue kernel needs scalar Theta, Omega, Psi");
            double th = s.theta.scalar(), om = s.omega.scalar(), ps = s.psi.scalar();
            for (double l : lam) {
                if (!(l > ps && l < om)) return neg_inf;
                acc += -th * l + (s.alpha1 - gm1) * std::log(l - ps) +
                       (s.alpha2 - gm1) * std::log(om - l);
            }
            return acc;
        }
        case EnsembleKind::gkb2: {
            if (!detail::gkb_all_scalar(s))
                throw DomainError("eigenvalue kernel needs scalar Theta, Omega, Psi");
            double th = s.theta.scalar(), om = s.omega.scalar(), ps = s.psi.scalar();
            for (double l : lam) {
                if (!(l > ps)) return neg_inf;
                acc += -th * l + (s.alpha1 - gm1) * std::log(l - ps) -
                       s.alpha2 * std::log(om + l);
            }
            return acc;
        }
    }
    throw DomainError("unhandled ensemble kind");
}

// log kernel at a concrete Hermitian matrix; -inf outside the support.
inline double log_kernel(const EnsembleSpec& s, const HermitianMatrix& x) {
    const int p = s.p, beta = s.beta;
    if (x.p() != p || x.beta() != beta)
        throw DimensionMismatch("sample has the wrong shape for this ensemble");
    const double gm1 = 0.5 * beta * (p - 1) + 1.0;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (!in_support(s, x)) return neg_inf;
    auto ident = DAMatrix::identity(beta, p);
    switch (s.kind) {
        case EnsembleKind::wishart: {
            HermitianMatrix si = inv_pd(s.sigma.materialize());
            return (0.5 * beta * (s.n - p + 1) - 1.0) * log_det_pd(x) -
                   0.5 * beta * trace_prod_re(si, x);
        }
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre:
            return (0.5 * beta * (s.n - p + 1) - 1.0) * log_det_pd(x) -
                   0.5 * beta * (s.n + s.nu) * log_det_pd(HermitianMatrix(ident + x.matrix()));
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre:
            return (0.5 * beta * (s.n - p + 1) - 1.0) * log_det_pd(x) +
                   (0.5 * beta * (s.nu - p + 1) - 1.0) *
                       log_det_pd(HermitianMatrix(ident - x.matrix()));
        case EnsembleKind::kb1:
            return -trace_prod_re(s.sigma.materialize(), x) +
                   (s.alpha1 - gm1) * log_det_pd(x) +
                   (s.alpha2 - gm1) * log_det_pd(HermitianMatrix(ident - x.matrix()));
        case EnsembleKind::kb2:
            return -trace_prod_re(s.sigma.materialize(), x) +
                   (s.alpha1 - gm1) * log_det_pd(x) -
                   s.alpha2 * log_det_pd(HermitianMatrix(ident + x.matrix()));
        case EnsembleKind::gkb1:
            return -trace_prod_re(s.theta.materialize(), x) +
                   (s.alpha1 - gm1) *
                       log_det_pd(HermitianMatrix(x.matrix() - s.psi.materialize().matrix())) +
                   (s.alpha2 - gm1) *
                       log_det_pd(HermitianMatrix(s.omega.materialize().matrix() - x.matrix()));
        case EnsembleKind::gkb2:
            return -trace_prod_re(s.theta.materialize(), x) +
                   (s.alpha1 - gm1) *
                       log_det_pd(HermitianMatrix(x.matrix() - s.psi.materialize().matrix())) -
                   s.alpha2 *
                       log_det_pd(HermitianMatrix(s.omega.materialize().matrix() + x.matrix()));
        case EnsembleKind::normal:
            throw DomainError("use the rectangular overload for the normal ensemble");
    }
    throw DomainError("unhandled ensemble kind");
}

inline double log_density(const EnsembleSpec& s, const HermitianMatrix& x,
                          const NormalizerOptions& opt = {}) {
    require_concrete(s.beta);
    double k = log_kernel(s, x);
    if (!std::isfinite(k)) return k;
    return log_normalizer(s, opt) + k;
}

// Density of the matrix-variate normal at a rectangular sample.
inline double log_density(const EnsembleSpec& s, const DAMatrix& x,
                          const NormalizerOptions& opt = {}) {
    require_concrete(s.beta);
    if (s.kind != EnsembleKind::normal)
        throw DomainError("rectangular densities exist only for the normal ensemble");
    if (x.rows() != s.n_rows || x.cols() != s.p || x.beta() != s.beta)
        throw DimensionMismatch("sample has the wrong shape for this ensemble");
    DAMatrix centered = s.mu ? x - *s.mu : x;
    DAMatrix si = inv_pd(s.sigma.materialize()).matrix();
    DAMatrix ti = inv_pd(s.theta.materialize()).matrix();
    DAMatrix q = si * centered.conj_transpose() * ti * centered;
    return log_normalizer(s, opt) - 0.5 * s.beta * q.trace_re();
}

// p = 1 density as a pure formula in the scalar sample; every beta accepted.
inline double scalar_log_density(const EnsembleSpec& s, double x,
                                 const NormalizerOptions& opt = {}) {
    if (s.p != 1) throw DomainError("scalar_log_density needs p = 1");
    double k = log_kernel_eig(s, {x});
    if (!std::isfinite(k)) return k;
    return log_normalizer(s, opt) + k;
}

// ---------------------------------------------------------------------------
// GKB affine transforms and the pushed-through density.
// ---------------------------------------------------------------------------

inline HermitianMatrix gkb1_transform(const HermitianMatrix& u, const HermitianMatrix& omega,
                                      const HermitianMatrix& psi) {
    HermitianMatrix a = omega - psi;
    if (!is_positive_definite(a)) throw NotPositiveDefinite("GKB1 needs Omega - Psi PD");
    DAMatrix r = sqrt_pd(a).matrix();
    return HermitianMatrix(r * u.matrix() * r + psi.matrix());
}

inline HermitianMatrix gkb1_inverse(const HermitianMatrix& x, const HermitianMatrix& omega,
                                    const HermitianMatrix& psi) {
    HermitianMatrix a = omega - psi;
    if (!is_positive_definite(a)) throw NotPositiveDefinite("GKB1 needs Omega - Psi PD");
    DAMatrix ri = inv_pd(sqrt_pd(a)).matrix();
    return HermitianMatrix(ri * (x.matrix() - psi.matrix()) * ri);
}

inline HermitianMatrix gkb2_transform(const HermitianMatrix& u, const HermitianMatrix& omega,
                                      const HermitianMatrix& psi) {
    HermitianMatrix a = omega + psi;
    if (!is_positive_definite(a)) throw NotPositiveDefinite("GKB2 needs Omega + Psi PD");
    DAMatrix r = sqrt_pd(a).matrix();
    return HermitianMatrix(r * u.matrix() * r + psi.matrix());
}

inline HermitianMatrix gkb2_inverse(const HermitianMatrix& x, const HermitianMatrix& omega,
                                    const HermitianMatrix& psi) {
    HermitianMatrix a = omega + psi;
    if (!is_positive_definite(a)) throw NotPositiveDefinite("GKB2 needs Omega + Psi PD");
    DAMatrix ri = inv_pd(sqrt_pd(a)).matrix();
    return HermitianMatrix(ri * (x.matrix() - psi.matrix()) * ri);
}

// GKB density obtained by pushing the KB density through the affine map with
// the programmatic change-of-variables factor |A|^{beta(p-1)/2 + 1}; this is
// deliberately a second route, independent of log_density's composed
// normalizer, so the two can cross-check each other.
inline double gkb_log_density(int kind, double a1, double a2, const HermitianMatrix& theta,
                              const HermitianMatrix& omega, const HermitianMatrix& psi,
                              const HermitianMatrix& x, const NormalizerOptions& opt = {}) {
    if (kind != 1 && kind != 2) throw DomainError("GKB kind must be 1 or 2");
    const int p = x.p(), beta = x.beta();
    HermitianMatrix a = (kind == 1) ? omega - psi : omega + psi;
    if (!is_positive_definite(a))
        throw NotPositiveDefinite("GKB needs Omega -+ Psi positive definite");
    HermitianMatrix ra = sqrt_pd(a);
    HermitianMatrix sigma_eff(ra.matrix() * theta.matrix() * ra.matrix());
    HermitianMatrix u = (kind == 1) ? gkb1_inverse(x, omega, psi) : gkb2_inverse(x, omega, psi);

    EnsembleSpec kb;
    kb.kind = (kind == 1) ? EnsembleKind::kb1 : EnsembleKind::kb2;
    kb.p = p;
    kb.beta = beta;
    kb.alpha1 = a1;
    kb.alpha2 = a2;
    kb.sigma = MatrixParam::concrete(sigma_eff);
    kb.validate();

    double log_jac = (0.5 * beta * (p - 1) + 1.0) * log_det_pd(a);
    double kb_density = log_density(kb, u, opt);
    if (!std::isfinite(kb_density)) return kb_density;
    return kb_density - log_jac;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct RejectionStats {
    std::size_t proposals = 0;
    std::size_t accepts = 0;
    double rate() const {
        return proposals ? static_cast<double>(accepts) / proposals : 1.0;
    }
};

namespace detail {

constexpr std::size_t kStallProbe = 2000000;

// Wishart(n, Sigma): the quadratic-form route S = Sigma^{1/2} X* X Sigma^{1/2}
// for integer dof, the triangular-factor route otherwise.
inline HermitianMatrix wishart_sample(const EnsembleSpec& s, Rng& rng) {
    const int p = s.p, beta = s.beta;
    HermitianMatrix sig = s.sigma.materialize();
    bool integer_dof = std::fabs(s.n - std::round(s.n)) < 1e-12;
    if (integer_dof) {
        int n = static_cast<int>(std::round(s.n));
        if (n < p) throw DomainError("quadratic-form Wishart sampling needs n >= p");
        double sd = 1.0 / std::sqrt(static_cast<double>(beta));
        DAMatrix g = ginibre(beta, n, p, rng, sd);
        DAMatrix c = sqrt_pd(sig).matrix();
        DAMatrix x = g * c;
        return HermitianMatrix(x.conj_transpose() * x);
    }
    if (!(s.n > p - 1)) throw DomainError("Wishart sampling needs n > p - 1");
    return wishart_sample_real_dof(s.n, sig, rng);
}

// Matrix-variate beta type I with parameters (a1, a2) (Pochhammer scale:
// a_i = beta * dof_i / 2), via two identity-scale Wisharts.
inline HermitianMatrix beta1_sample(int p, int beta, double a1, double a2, Rng& rng) {
    if (!(a1 > 0.5 * beta * (p - 1)) || !(a2 > 0.5 * beta * (p - 1)))
        throw DomainError("matrix beta sampling needs a1, a2 > (p-1)beta/2");
    HermitianMatrix ident = HermitianMatrix::identity(beta, p);
    HermitianMatrix a = wishart_sample_real_dof(2.0 * a1 / beta, ident, rng);
    HermitianMatrix b = wishart_sample_real_dof(2.0 * a2 / beta, ident, rng);
    DAMatrix ri = inv_pd(sqrt_pd(a + b)).matrix();
    return HermitianMatrix(ri * a.matrix() * ri);
}

inline HermitianMatrix kb1_sample(const EnsembleSpec& s, Rng& rng, RejectionStats* stats) {
    HermitianMatrix sig = s.sigma.materialize();
    RejectionStats local;
    RejectionStats& st = stats ? *stats : local;
    for (;;) {
        if (st.proposals >= kStallProbe && st.rate() < 1e-6)
            throw RejectionStall("KB1 rejection sampler stalled", st.rate());
        ++st.proposals;
        HermitianMatrix u = beta1_sample(s.p, s.beta, s.alpha1, s.alpha2, rng);
        double t = trace_prod_re(sig, u);  // >= 0 on 0 < U < I for PD Sigma
        if (draw_uniform(rng) < std::exp(-t)) {
            ++st.accepts;
            return u;
        }
    }
}

inline HermitianMatrix kb2_sample(const EnsembleSpec& s, Rng& rng, RejectionStats* stats) {
    HermitianMatrix sig = s.sigma.materialize();
    HermitianMatrix scale = HermitianMatrix(inv_pd(sig).matrix() * (0.5 * s.beta));
    const double dof = 2.0 * s.alpha1 / s.beta;
    RejectionStats local;
    RejectionStats& st = stats ? *stats : local;
    for (;;) {
        if (st.proposals >= kStallProbe && st.rate() < 1e-6)
            throw RejectionStall("KB2 rejection sampler stalled", st.rate());
        ++st.proposals;
        HermitianMatrix y = wishart_sample_real_dof(dof, scale, rng);
        double ld = log_det_pd(
            HermitianMatrix(y.matrix() + DAMatrix::identity(s.beta, s.p)));
        if (std::log(draw_uniform(rng)) < -s.alpha2 * ld) {
            ++st.accepts;
            return y;
        }
    }
}

}  // namespace detail

// Draw one Hermitian sample from a quadratic-form ensemble. For the normal
// ensemble use sample_normal_matrix.
inline HermitianMatrix sample(const EnsembleSpec& s, Rng& rng, RejectionStats* stats = nullptr) {
    require_concrete(s.beta);
    s.validate();
    switch (s.kind) {
        case EnsembleKind::normal:
            throw DomainError("the normal ensemble yields rectangular samples");
        case EnsembleKind::wishart:
            return detail::wishart_sample(s, rng);
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre: {
            if (!(s.n >= s.p)) throw DomainError("quadratic-form sampling needs n >= p");
            HermitianMatrix u =
                detail::beta1_sample(s.p, s.beta, 0.5 * s.beta * s.n, 0.5 * s.beta * s.nu, rng);
            // Y = (I - U)^{-1} - I maps matrix beta I to beta II.
            HermitianMatrix iu =
                HermitianMatrix(DAMatrix::identity(s.beta, s.p) - u.matrix());
            return HermitianMatrix(inv_pd(iu).matrix() - DAMatrix::identity(s.beta, s.p));
        }
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre:
            if (!(s.n >= s.p)) throw DomainError("quadratic-form sampling needs n >= p");
            return detail::beta1_sample(s.p, s.beta, 0.5 * s.beta * s.n, 0.5 * s.beta * s.nu, rng);
        case EnsembleKind::kb1:
            return detail::kb1_sample(s, rng, stats);
        case EnsembleKind::kb2:
            return detail::kb2_sample(s, rng, stats);
        case EnsembleKind::gkb1: {
            EnsembleSpec kb = s;
            kb.kind = EnsembleKind::kb1;
            HermitianMatrix a = detail::gkb_a_matrix(s);
            HermitianMatrix ra = sqrt_pd(a);
            kb.sigma = MatrixParam::concrete(
                HermitianMatrix(ra.matrix() * s.theta.materialize().matrix() * ra.matrix()));
            HermitianMatrix u = detail::kb1_sample(kb, rng, stats);
            return gkb1_transform(u, s.omega.materialize(), s.psi.materialize());
        }
        case EnsembleKind::gkb2: {
            EnsembleSpec kb = s;
            kb.kind = EnsembleKind::kb2;
            HermitianMatrix a = detail::gkb_a_matrix(s);
            HermitianMatrix ra = sqrt_pd(a);
            kb.sigma = MatrixParam::concrete(
                HermitianMatrix(ra.matrix() * s.theta.materialize().matrix() * ra.matrix()));
            HermitianMatrix u = detail::kb2_sample(kb, rng, stats);
            return gkb2_transform(u, s.omega.materialize(), s.psi.materialize());
        }
    }
    throw DomainError("unhandled ensemble kind");
}

inline DAMatrix sample_normal_matrix(const EnsembleSpec& s, Rng& rng) {
    require_concrete(s.beta);
    if (s.kind != EnsembleKind::normal)
        throw DomainError("sample_normal_matrix needs the normal ensemble");
    double sd = 1.0 / std::sqrt(static_cast<double>(s.beta));
    DAMatrix g = ginibre(s.beta, s.n_rows, s.p, rng, sd);
    DAMatrix x = sqrt_pd(s.theta.materialize()).matrix() * g *
                 sqrt_pd(s.sigma.materialize()).matrix();
    if (s.mu) x = x + *s.mu;
    return x;
}

// Deterministic multi-stream batch; draws are merged in worker order so the
// result depends only on (seed, workers).
struct SampleBatch {
    std::vector<HermitianMatrix> draws;
    double acceptance_rate = 1.0;
};

inline SampleBatch sample_batch(const EnsembleSpec& s, std::size_t count, std::uint64_t seed,
                                int workers = 1) {
    SampleBatch batch;
    batch.draws.reserve(count);
    RejectionStats stats;
    for (int w = 0; w < workers; ++w) {
        std::size_t quota =
            count / workers + (static_cast<std::size_t>(w) < count % workers ? 1 : 0);
        Rng rng = make_stream(seed, 0xba7c5 + w);
        for (std::size_t i = 0; i < quota; ++i) batch.draws.push_back(sample(s, rng, &stats));
    }
    batch.acceptance_rate = stats.proposals ? stats.rate() : 1.0;
    return batch;
}

// ---------------------------------------------------------------------------
// Joint eigenvalue density
// ---------------------------------------------------------------------------

inline bool orthogonally_invariant(const EnsembleSpec& s) {
    switch (s.kind) {
        case EnsembleKind::normal: return false;
        case EnsembleKind::wishart:
        case EnsembleKind::kb1:
        case EnsembleKind::kb2: return s.sigma.is_scalar();
        case EnsembleKind::t_type2:
        case EnsembleKind::t_laguerre:
        case EnsembleKind::gegenbauer2:
        case EnsembleKind::gegenbauer_laguerre: return true;
        case EnsembleKind::gkb1:
        case EnsembleKind::gkb2: return detail::gkb_all_scalar(s);
    }
    return false;
}

struct EigenDensityResult {
    double log_value;
    double rel_stderr;  // 0 when the Haar integral collapses
};

inline EigenDensityResult eigen_joint_log_density(const EnsembleSpec& s,
                                                  const std::vector<double>& lam,
                                                  int haar_budget = 256,
                                                  std::uint64_t seed = 42,
                                                  const NormalizerOptions& opt = {}) {
    require_concrete(s.beta);  // the Haar machinery is concrete-only
    if (s.kind == EnsembleKind::normal)
        throw DomainError("eigenvalue density applies to cone-supported ensembles");
    const int p = s.p;
    if (static_cast<int>(lam.size()) != p)
        throw DimensionMismatch("eigenvalue count must match the dimension");
    for (int i = 0; i + 1 < p; ++i)
        if (!(lam[i] > lam[i + 1])) throw DomainError("eigenvalues must be strictly descending");

    double log_vdm = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) log_vdm += s.beta * std::log(lam[i] - lam[j]);
    double log_const = eigen_measure_log_const(p, s.beta);

    if (orthogonally_invariant(s)) {
        double f = log_normalizer(s, opt) + log_kernel_eig(s, lam);
        return {log_const + log_vdm + f, 0.0};
    }

    double log_norm = log_normalizer(s, opt);
    Rng rng = make_stream(seed, 0x4aa);
    std::vector<double> log_f(haar_budget);
    for (int i = 0; i < haar_budget; ++i) {
        UnitaryMatrix h = haar_sample(p, s.beta, rng);
        log_f[i] = log_kernel(s, conjugate_by(h, lam));
    }
    auto m = detail::log_mean_exp(log_f);
    return {log_const + log_vdm + log_norm + m.log_mean, m.rel_stderr};
}

}  // namespace betaint
