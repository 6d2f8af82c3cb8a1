#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "betaint/errors.hpp"
#include "betaint/rng.hpp"

namespace betaint {

// beta is the real dimension of the division algebra: 1 real, 2 complex,
// 4 quaternion, 8 octonion. Octonions are formula-only: every concrete
// matrix operation rejects beta = 8.
inline void check_beta(int beta) {
    if (beta != 1 && beta != 2 && beta != 4 && beta != 8)
        throw InvalidBeta("beta must be one of {1, 2, 4, 8}, got " + std::to_string(beta));
}

inline void require_concrete(int beta) {
    check_beta(beta);
    if (beta == 8)
        throw FormulaOnlyAlgebra(
            "beta = 8 (octonions) supports closed-form evaluation only; "
            "no concrete matrix operations");
}

// Jack parameter alpha = 2/beta.
inline double jack_alpha(int beta) {
    check_beta(beta);
    return 2.0 / beta;
}

struct Quat {
    double w = 0, x = 0, y = 0, z = 0;

    Quat() = default;
    Quat(double w_, double x_ = 0, double y_ = 0, double z_ = 0) : w(w_), x(x_), y(y_), z(z_) {}

    Quat conj() const { return {w, -x, -y, -z}; }
    double norm2() const { return w * w + x * x + y * y + z * z; }
    double abs() const { return std::sqrt(norm2()); }

    Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    Quat operator-() const { return {-w, -x, -y, -z}; }
    Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    Quat operator/(double s) const { return {w / s, x / s, y / s, z / s}; }
    Quat& operator+=(const Quat& o) { w += o.w; x += o.x; y += o.y; z += o.z; return *this; }
    Quat& operator-=(const Quat& o) { w -= o.w; x -= o.x; y -= o.y; z -= o.z; return *this; }

    // Hamilton product.
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
};

// Dense matrix over the algebra tagged by beta. Storage is rows*cols*beta
// real components, row-major, the beta components of one entry consecutive.
class DAMatrix {
public:
    DAMatrix(int beta, int rows, int cols)
        : beta_(beta), rows_(rows), cols_(cols), c_(static_cast<size_t>(rows) * cols * beta, 0.0) {
        require_concrete(beta);
        if (rows <= 0 || cols <= 0)
            throw DimensionMismatch("matrix dimensions must be positive");
    }

    static DAMatrix zeros(int beta, int rows, int cols) { return DAMatrix(beta, rows, cols); }

    static DAMatrix identity(int beta, int p) {
        DAMatrix m(beta, p, p);
        for (int i = 0; i < p; ++i) m.set(i, i, Quat(1.0));
        return m;
    }

    int beta() const { return beta_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Quat at(int i, int j) const {
        const size_t base = idx(i, j);
        Quat q;
        q.w = c_[base];
        if (beta_ >= 2) q.x = c_[base + 1];
        if (beta_ >= 4) { q.y = c_[base + 2]; q.z = c_[base + 3]; }
        return q;
    }

    void set(int i, int j, const Quat& q) {
        const size_t base = idx(i, j);
        c_[base] = q.w;
        if (beta_ >= 2) c_[base + 1] = q.x;
        if (beta_ >= 4) { c_[base + 2] = q.y; c_[base + 3] = q.z; }
    }

    const std::vector<double>& components() const { return c_; }

    double max_abs() const {
        double m = 0;
        for (double v : c_) m = std::max(m, std::fabs(v));
        return m;
    }

    DAMatrix conj_transpose() const {
        DAMatrix r(beta_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.set(j, i, at(i, j).conj());
        return r;
    }

    DAMatrix operator+(const DAMatrix& o) const {
        require_same_shape(o);
        DAMatrix r = *this;
        for (size_t k = 0; k < c_.size(); ++k) r.c_[k] += o.c_[k];
        return r;
    }
    DAMatrix operator-(const DAMatrix& o) const {
        require_same_shape(o);
        DAMatrix r = *this;
        for (size_t k = 0; k < c_.size(); ++k) r.c_[k] -= o.c_[k];
        return r;
    }
    DAMatrix operator*(double s) const {
        DAMatrix r = *this;
        for (double& v : r.c_) v *= s;
        return r;
    }

    DAMatrix operator*(const DAMatrix& o) const {
        if (cols_ != o.rows_ || beta_ != o.beta_)
            throw DimensionMismatch("matrix product shape/tag mismatch");
        DAMatrix r(beta_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < o.cols_; ++j) {
                Quat acc;
                for (int k = 0; k < cols_; ++k) acc += at(i, k) * o.at(k, j);
                r.set(i, j, acc);
            }
        return r;
    }

    // Real part of the trace (square matrices).
    double trace_re() const {
        double t = 0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i).w;
        return t;
    }

    // Complex adjoint embedding: identity for beta = 1, 2; the 2x2-block
    // representation [[A, B], [-conj(B), conj(A)]] for quaternions Q = A + Bj.
    Eigen::MatrixXcd embed() const {
        using C = std::complex<double>;
        if (beta_ != 4) {
            Eigen::MatrixXcd m(rows_, cols_);
            for (int i = 0; i < rows_; ++i)
                for (int j = 0; j < cols_; ++j) {
                    Quat q = at(i, j);
                    m(i, j) = C(q.w, q.x);
                }
            return m;
        }
        Eigen::MatrixXcd m(2 * rows_, 2 * cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) {
                Quat q = at(i, j);
                C a(q.w, q.x), b(q.y, q.z);
                m(i, j) = a;
                m(i, j + cols_) = b;
                m(i + rows_, j) = -std::conj(b);
                m(i + rows_, j + cols_) = std::conj(a);
            }
        return m;
    }

    static DAMatrix from_embed(int beta, const Eigen::MatrixXcd& e, int rows, int cols) {
        require_concrete(beta);
        DAMatrix m(beta, rows, cols);
        if (beta != 4) {
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    m.set(i, j, Quat(e(i, j).real(), beta == 2 ? e(i, j).imag() : 0.0));
            return m;
        }
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                std::complex<double> a = e(i, j), b = e(i, j + cols);
                m.set(i, j, Quat(a.real(), a.imag(), b.real(), b.imag()));
            }
        return m;
    }

private:
    size_t idx(int i, int j) const {
        return (static_cast<size_t>(i) * cols_ + j) * beta_;
    }
    void require_same_shape(const DAMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_ || beta_ != o.beta_)
            throw DimensionMismatch("matrix shape/tag mismatch");
    }

    int beta_, rows_, cols_;
    std::vector<double> c_;
};

inline DAMatrix conj_transpose(const DAMatrix& a) { return a.conj_transpose(); }

namespace detail {
constexpr double kHermitianTol = 1e-12;   // relative to max entry magnitude
constexpr double kUnitaryTol = 1e-10;
constexpr double kPdEigFloor = 1e-13;
}  // namespace detail

// Self-adjoint square matrix. The constructor validates A = A* within
// tolerance and then canonicalizes ((A + A*)/2, exactly real diagonal).
class HermitianMatrix {
public:
    explicit HermitianMatrix(const DAMatrix& a) : m_(a) {
        if (a.rows() != a.cols())
            throw NonHermitian("Hermitian matrix must be square");
        const int p = a.rows();
        double scale = std::max(1.0, a.max_abs());
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) {
                Quat d = a.at(i, j) - a.at(j, i).conj();
                if (d.abs() > detail::kHermitianTol * scale)
                    throw NonHermitian("matrix is not self-adjoint within tolerance");
            }
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                Quat s = (m_.at(i, j) + m_.at(j, i).conj()) * 0.5;
                if (i == j) s = Quat(s.w);
                m_.set(i, j, s);
            }
        }
    }

    static HermitianMatrix identity(int beta, int p) {
        return HermitianMatrix(DAMatrix::identity(beta, p));
    }

    static HermitianMatrix diagonal(int beta, const std::vector<double>& d) {
        DAMatrix m(beta, static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), Quat(d[i]));
        return HermitianMatrix(m);
    }

    int beta() const { return m_.beta(); }
    int p() const { return m_.rows(); }
    Quat at(int i, int j) const { return m_.at(i, j); }
    const DAMatrix& matrix() const { return m_; }
    double trace_re() const { return m_.trace_re(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(m_ + o.m_); }
    HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(m_ - o.m_); }
    HermitianMatrix operator*(double s) const { return HermitianMatrix(m_ * s); }

private:
    DAMatrix m_;
};

// Square matrix with H*H = I within tolerance.
class UnitaryMatrix {
public:
    explicit UnitaryMatrix(const DAMatrix& h) : m_(h) {
        if (h.rows() != h.cols())
            throw DimensionMismatch("unitary matrix must be square");
        const int p = h.rows();
        DAMatrix g = h.conj_transpose() * h;
        double err = 0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                Quat d = g.at(i, j) - (i == j ? Quat(1.0) : Quat());
                err = std::max(err, d.abs());
            }
        if (err > detail::kUnitaryTol)
            throw DomainError("matrix fails H*H = I within tolerance");
    }

    int beta() const { return m_.beta(); }
    int p() const { return m_.rows(); }
    Quat at(int i, int j) const { return m_.at(i, j); }
    const DAMatrix& matrix() const { return m_; }

private:
    DAMatrix m_;
};

namespace detail {

// Eigenvalues of the complex embedding, ascending (Eigen's order).
inline Eigen::VectorXd embed_eigenvalues(const HermitianMatrix& a) {
    Eigen::MatrixXcd e = a.matrix().embed();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error("eigenvalue decomposition failed");
    return solver.eigenvalues();
}

}  // namespace detail

// Eigenvalues sorted descending. For beta = 4 the 2p x 2p embedding spectrum
// has even multiplicity; each value is reported once.
inline std::vector<double> hermitian_eigenvalues(const HermitianMatrix& a) {
    Eigen::VectorXd ev = detail::embed_eigenvalues(a);
    const int p = a.p();
    std::vector<double> out;
    out.reserve(p);
    if (a.beta() == 4) {
        double scale = std::max(1.0, std::max(std::fabs(ev(0)), std::fabs(ev(ev.size() - 1))));
        for (int i = 0; i < 2 * p; i += 2) {
            if (std::fabs(ev(i) - ev(i + 1)) > 1e-8 * scale)
                throw Error("quaternion embedding spectrum lost its pairing");
            out.push_back(0.5 * (ev(i) + ev(i + 1)));
        }
    } else {
        for (int i = 0; i < p; ++i) out.push_back(ev(i));
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

inline double log_det_pd(const HermitianMatrix& a) {
    std::vector<double> ev = hermitian_eigenvalues(a);
    double floor = detail::kPdEigFloor * std::max(1.0, std::fabs(ev.front()));
    double s = 0;
    for (double v : ev) {
        if (v <= floor)
            throw NotPositiveDefinite("matrix has an eigenvalue <= tolerance");
        s += std::log(v);
    }
    return s;
}

inline bool is_positive_definite(const HermitianMatrix& a) {
    std::vector<double> ev = hermitian_eigenvalues(a);
    double floor = detail::kPdEigFloor * std::max(1.0, std::fabs(ev.front()));
    return ev.back() > floor;
}

struct EtrResult {
    double value;      // exp(trace); +inf on overflow
    double log_value;  // trace, always finite
    bool overflowed;
};

// exp(trace(A)); the trace of a Hermitian matrix is real by construction.
inline EtrResult etr(const HermitianMatrix& a) {
    double t = a.trace_re();
    double v = std::exp(t);
    return {v, t, !std::isfinite(v)};
}

namespace detail {

// Modified Gram-Schmidt over the algebra, one reorthogonalization pass.
// Returns the orthonormal factor; the triangular factor's diagonal is
// positive real, which makes Ginibre -> Q exactly Haar distributed.
inline DAMatrix gram_schmidt_q(const DAMatrix& a) {
    const int p = a.rows();
    DAMatrix q = a;
    for (int j = 0; j < p; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                Quat r;
                for (int k = 0; k < p; ++k) r += q.at(k, i).conj() * q.at(k, j);
                for (int k = 0; k < p; ++k) q.set(k, j, q.at(k, j) - q.at(k, i) * r);
            }
        }
        double n2 = 0;
        for (int k = 0; k < p; ++k) n2 += q.at(k, j).norm2();
        double n = std::sqrt(n2);
        if (n == 0) throw Error("Gram-Schmidt hit a zero column");
        for (int k = 0; k < p; ++k) q.set(k, j, q.at(k, j) / n);
    }
    return q;
}

}  // namespace detail

// Ginibre matrix: each of the beta real components per entry is an
// independent N(0, sd^2) draw.
inline DAMatrix ginibre(int beta, int rows, int cols, Rng& rng, double sd = 1.0) {
    require_concrete(beta);
    DAMatrix g(beta, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            Quat q;
            q.w = draw_normal(rng, sd);
            if (beta >= 2) q.x = draw_normal(rng, sd);
            if (beta >= 4) { q.y = draw_normal(rng, sd); q.z = draw_normal(rng, sd); }
            g.set(i, j, q);
        }
    return g;
}

// Haar-distributed element of U^beta(p), by QR of a Ginibre matrix with the
// positive-diagonal convention.
inline UnitaryMatrix haar_sample(int p, int beta, Rng& rng) {
    require_concrete(beta);
    DAMatrix g = ginibre(beta, p, p, rng);
    return UnitaryMatrix(detail::gram_schmidt_q(g));
}

// H diag(lambda) H^*.
inline HermitianMatrix conjugate_by(const UnitaryMatrix& h, const std::vector<double>& lambda) {
    const int p = h.p();
    if (static_cast<int>(lambda.size()) != p)
        throw DimensionMismatch("eigenvalue vector length must match dimension");
    DAMatrix d(h.beta(), p, p);
    for (int i = 0; i < p; ++i) d.set(i, i, Quat(lambda[i]));
    DAMatrix r = h.matrix() * d * h.matrix().conj_transpose();
    return HermitianMatrix(r);
}

namespace detail {

// Spectral calculus through the embedding: f applied to eigenvalues. The
// embedding of a quaternion Hermitian matrix keeps its block structure under
// any real spectral function, so the pull-back is well defined.
template <typename F>
HermitianMatrix spectral_map(const HermitianMatrix& a, F f) {
    Eigen::MatrixXcd e = a.matrix().embed();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e);
    if (solver.info() != Eigen::Success)
        throw Error("eigenvalue decomposition failed");
    Eigen::VectorXd ev = solver.eigenvalues();
    Eigen::VectorXcd fd(ev.size());
    for (int i = 0; i < ev.size(); ++i) fd(i) = f(ev(i));
    Eigen::MatrixXcd r = solver.eigenvectors() * fd.asDiagonal() * solver.eigenvectors().adjoint();
    return HermitianMatrix(DAMatrix::from_embed(a.beta(), r, a.p(), a.p()));
}

}  // namespace detail

inline HermitianMatrix sqrt_pd(const HermitianMatrix& a) {
    double floor = detail::kPdEigFloor;
    return detail::spectral_map(a, [floor](double v) {
        if (v <= floor) throw NotPositiveDefinite("matrix square root needs a PD argument");
        return std::sqrt(v);
    });
}

inline HermitianMatrix inv_pd(const HermitianMatrix& a) {
    double floor = detail::kPdEigFloor;
    return detail::spectral_map(a, [floor](double v) {
        if (v <= floor) throw NotPositiveDefinite("matrix inverse needs a PD argument");
        return 1.0 / v;
    });
}

// Real part of tr(A B) for Hermitian A, B (the full trace is real).
inline double trace_prod_re(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.p() != b.p() || a.beta() != b.beta())
        throw DimensionMismatch("trace of product needs matching shapes");
    double t = 0;
    for (int i = 0; i < a.p(); ++i)
        for (int k = 0; k < a.p(); ++k) t += (a.at(i, k) * b.at(k, i)).w;
    return t;
}

// Random Hermitian matrix (Gaussian entries symmetrized), for tests and
// Haar-averaged integrands.
inline HermitianMatrix random_hermitian(int beta, int p, Rng& rng, double sd = 1.0) {
    DAMatrix g = ginibre(beta, p, p, rng, sd);
    DAMatrix s = (g + g.conj_transpose()) * 0.5;
    return HermitianMatrix(s);
}

inline HermitianMatrix random_pd(int beta, int p, Rng& rng) {
    DAMatrix g = ginibre(beta, p, p, rng);
    DAMatrix s = g.conj_transpose() * g + DAMatrix::identity(beta, p) * 0.5;
    return HermitianMatrix(s);
}

}  // namespace betaint
