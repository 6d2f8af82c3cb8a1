#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "betaint/algebra.hpp"
#include "support/stats.hpp"

using namespace betaint;

TEST_CASE("conj_transpose basics") {
    SECTION("real matrix transposes") {
        DAMatrix a(1, 2, 3);
        int v = 1;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) a.set(i, j, Quat(v++));
        DAMatrix t = conj_transpose(a);
        REQUIRE(t.rows() == 3);
        REQUIRE(t.cols() == 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) REQUIRE(t.at(j, i).w == a.at(i, j).w);
    }
    SECTION("complex scalar conjugates") {
        DAMatrix a(2, 1, 1);
        a.set(0, 0, Quat(0, 1));  // i
        DAMatrix t = conj_transpose(a);
        REQUIRE(t.at(0, 0).x == -1.0);
    }
    SECTION("quaternion q * conj(q) is real") {
        Quat q(0.3, -1.2, 0.7, 2.0);
        Quat r = q * q.conj();
        REQUIRE_THAT(r.w, Catch::Matchers::WithinRel(q.norm2(), 1e-14));
        REQUIRE(std::fabs(r.x) < 1e-14);
        REQUIRE(std::fabs(r.y) < 1e-14);
        REQUIRE(std::fabs(r.z) < 1e-14);
    }
    SECTION("double application is the identity, exactly") {
        Rng rng = make_stream(11);
        for (int beta : {1, 2, 4}) {
            DAMatrix a = ginibre(beta, 3, 2, rng);
            DAMatrix b = conj_transpose(conj_transpose(a));
            REQUIRE(b.components() == a.components());
        }
    }
}

TEST_CASE("hermitian eigenvalues") {
    SECTION("identity") {
        auto ev = hermitian_eigenvalues(HermitianMatrix::identity(1, 3));
        for (double v : ev) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(1.0, 1e-13));
    }
    SECTION("complex diagonal") {
        auto ev = hermitian_eigenvalues(HermitianMatrix::diagonal(2, {3.0, 1.0}));
        REQUIRE_THAT(ev[0], Catch::Matchers::WithinAbs(3.0, 1e-13));
        REQUIRE_THAT(ev[1], Catch::Matchers::WithinAbs(1.0, 1e-13));
    }
    SECTION("quaternion 2x2 matches its hand-built complex embedding") {
        Rng rng = make_stream(42);
        HermitianMatrix a = random_hermitian(4, 2, rng);
        // Independent oracle: assemble [[A,B],[-conj B, conj A]] directly and
        // diagonalize with Eigen.
        Eigen::MatrixXcd e(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Quat q = a.at(i, j);
                std::complex<double> ca(q.w, q.x), cb(q.y, q.z);
                e(i, j) = ca;
                e(i, j + 2) = cb;
                e(i + 2, j) = -std::conj(cb);
                e(i + 2, j + 2) = std::conj(ca);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(e, Eigen::EigenvaluesOnly);
        Eigen::VectorXd oracle = s.eigenvalues();  // ascending, multiplicity 2
        REQUIRE_THAT(oracle(0), Catch::Matchers::WithinAbs(oracle(1), 1e-10));
        REQUIRE_THAT(oracle(2), Catch::Matchers::WithinAbs(oracle(3), 1e-10));
        auto ev = hermitian_eigenvalues(a);
        REQUIRE(ev.size() == 2);
        REQUIRE_THAT(ev[0], Catch::Matchers::WithinAbs(oracle(2), 1e-10));
        REQUIRE_THAT(ev[1], Catch::Matchers::WithinAbs(oracle(0), 1e-10));
    }
    SECTION("beta = 8 is formula-only") {
        REQUIRE_THROWS_AS(DAMatrix(8, 2, 2), FormulaOnlyAlgebra);
    }
    SECTION("non-hermitian input is rejected") {
        DAMatrix a(2, 2, 2);
        a.set(0, 1, Quat(1, 1));
        a.set(1, 0, Quat(2, 0));
        REQUIRE_THROWS_AS(HermitianMatrix(a), NonHermitian);
    }
}

TEST_CASE("log_det_pd") {
    REQUIRE_THAT(log_det_pd(HermitianMatrix::identity(1, 4)), Catch::Matchers::WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(log_det_pd(HermitianMatrix::diagonal(1, {2.0, 8.0})),
                 Catch::Matchers::WithinRel(std::log(16.0), 1e-12));

    SECTION("2x2 complex [[2, i], [-i, 2]] has determinant 3") {
        DAMatrix a(2, 2, 2);
        a.set(0, 0, Quat(2));
        a.set(1, 1, Quat(2));
        a.set(0, 1, Quat(0, 1));
        a.set(1, 0, Quat(0, -1));
        REQUIRE_THAT(log_det_pd(HermitianMatrix(a)), Catch::Matchers::WithinRel(std::log(3.0), 1e-12));
    }
    SECTION("not positive definite") {
        REQUIRE_THROWS_AS(log_det_pd(HermitianMatrix::diagonal(1, {1.0, -0.5})),
                          NotPositiveDefinite);
    }
    SECTION("spectral consistency across betas and sizes") {
        Rng rng = make_stream(7);
        for (int beta : {1, 2, 4})
            for (int p : {2, 4, 6}) {
                HermitianMatrix a = random_pd(beta, p, rng);
                auto ev = hermitian_eigenvalues(a);
                double s = 0;
                for (double v : ev) s += std::log(v);
                REQUIRE_THAT(log_det_pd(a), Catch::Matchers::WithinAbs(s, 1e-10));
            }
    }
}

TEST_CASE("etr") {
    REQUIRE_THAT(etr(HermitianMatrix::diagonal(1, {0.0, 0.0})).value,
                 Catch::Matchers::WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(etr(HermitianMatrix::diagonal(1, {1.0, 2.0})).value,
                 Catch::Matchers::WithinRel(std::exp(3.0), 1e-13));

    SECTION("similarity invariance under conjugation") {
        Rng rng = make_stream(5);
        for (int beta : {1, 2, 4}) {
            HermitianMatrix a = random_hermitian(beta, 3, rng);
            UnitaryMatrix h = haar_sample(3, beta, rng);
            DAMatrix c = h.matrix() * a.matrix() * h.matrix().conj_transpose();
            REQUIRE_THAT(etr(HermitianMatrix(c)).value,
                         Catch::Matchers::WithinRel(etr(a).value, 1e-11));
        }
    }
    SECTION("overflow raises the flag, keeps the log") {
        EtrResult r = etr(HermitianMatrix::diagonal(1, {800.0, 200.0}));
        REQUIRE(r.overflowed);
        REQUIRE_THAT(r.log_value, Catch::Matchers::WithinAbs(1000.0, 1e-9));
    }
}

TEST_CASE("haar_sample") {
    SECTION("draws are unitary to tolerance") {
        Rng rng = make_stream(19);
        for (int beta : {1, 2, 4})
            for (int p : {1, 2, 4}) {
                UnitaryMatrix h = haar_sample(p, beta, rng);  // ctor enforces H*H = I @ 1e-10
                REQUIRE(h.p() == p);
            }
    }
    SECTION("column uniformity: E h11^2 = 1/p for beta=1, p=2") {
        Rng rng = make_stream(101);
        const int n = 1000000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            UnitaryMatrix h = haar_sample(2, 1, rng);
            double v = h.at(0, 0).w * h.at(0, 0).w;
            s += v;
            s2 += v * v;
        }
        double m = s / n;
        double se = std::sqrt((s2 / n - m * m) / n);
        REQUIRE(std::fabs(m - 0.5) < 3 * se);
    }
    SECTION("column uniformity: E |h11|^2 = 1/p for beta=2, p=3") {
        Rng rng = make_stream(102);
        const int n = 1000000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            UnitaryMatrix h = haar_sample(3, 2, rng);
            double v = h.at(0, 0).norm2();
            s += v;
            s2 += v * v;
        }
        double m = s / n;
        double se = std::sqrt((s2 / n - m * m) / n);
        REQUIRE(std::fabs(m - 1.0 / 3.0) < 3 * se);
    }
    SECTION("left invariance: U * haar matches haar in distribution (KS)") {
        Rng rng_u = make_stream(103);
        UnitaryMatrix u = haar_sample(2, 1, rng_u);
        const int n = 100000;
        std::vector<double> rotated, plain;
        rotated.reserve(n);
        plain.reserve(n);
        Rng r1 = make_stream(104), r2 = make_stream(105);
        for (int i = 0; i < n; ++i) {
            UnitaryMatrix h = haar_sample(2, 1, r1);
            DAMatrix uh = u.matrix() * h.matrix();
            rotated.push_back(uh.at(0, 0).w);
            plain.push_back(haar_sample(2, 1, r2).at(0, 0).w);
        }
        REQUIRE(teststats::ks_two_sample_pvalue(rotated, plain) > 0.01);
    }
    SECTION("beta = 8 is rejected") {
        Rng rng = make_stream(1);
        REQUIRE_THROWS_AS(haar_sample(2, 8, rng), FormulaOnlyAlgebra);
    }
}

TEST_CASE("conjugate_by") {
    Rng rng = make_stream(23);
    SECTION("identity conjugation returns the diagonal") {
        UnitaryMatrix id(DAMatrix::identity(2, 3));
        HermitianMatrix d = conjugate_by(id, {3.0, 2.0, 1.0});
        for (int i = 0; i < 3; ++i) REQUIRE_THAT(d.at(i, i).w, Catch::Matchers::WithinAbs(3.0 - i, 1e-13));
    }
    SECTION("spectrum, trace and etr are carried over") {
        for (int beta : {1, 2, 4}) {
            UnitaryMatrix h = haar_sample(3, beta, rng);
            std::vector<double> lam = {2.5, 1.0, -0.5};
            HermitianMatrix a = conjugate_by(h, lam);
            auto ev = hermitian_eigenvalues(a);
            for (int i = 0; i < 3; ++i) REQUIRE_THAT(ev[i], Catch::Matchers::WithinAbs(lam[i], 1e-10));
            REQUIRE_THAT(a.trace_re(), Catch::Matchers::WithinAbs(3.0, 1e-11));
            REQUIRE_THAT(etr(a).value, Catch::Matchers::WithinRel(std::exp(3.0), 1e-12));
        }
    }
    SECTION("dimension mismatch") {
        UnitaryMatrix id(DAMatrix::identity(1, 2));
        REQUIRE_THROWS_AS(conjugate_by(id, {1.0, 2.0, 3.0}), DimensionMismatch);
    }
}

TEST_CASE("spectral maps") {
    Rng rng = make_stream(31);
    for (int beta : {1, 2, 4}) {
        HermitianMatrix a = random_pd(beta, 3, rng);
        HermitianMatrix r = sqrt_pd(a);
        DAMatrix rr = r.matrix() * r.matrix();
        double err = (rr - a.matrix()).max_abs();
        REQUIRE(err < 1e-10 * std::max(1.0, a.matrix().max_abs()));

        HermitianMatrix inv = inv_pd(a);
        DAMatrix prod = inv.matrix() * a.matrix();
        double ierr = (prod - DAMatrix::identity(beta, 3)).max_abs();
        REQUIRE(ierr < 1e-10);
    }
}
