#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "betaint/hypergeom.hpp"
#include "betaint/quadrature.hpp"

using namespace betaint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("0F0 equals etr") {
    Rng rng = make_stream(201);
    for (int beta : {1, 2, 4}) {
        for (int p : {1, 2, 3}) {
            for (int rep = 0; rep < 3; ++rep) {
                std::vector<double> x(p);
                double s = 0;
                for (double& v : x) {
                    v = 2.0 * draw_uniform(rng) - 1.0;  // |x|_inf <= 1
                    s += v;
                }
                HypSeriesResult r = hyp_pq({}, {}, beta, x, 30, 1e-12);
                REQUIRE(r.converged);
                REQUIRE_THAT(r.value_linear(), WithinRel(std::exp(s), 1e-8));
            }
        }
    }
}

TEST_CASE("0F0 degree contributions are (tr x)^k / k!") {
    std::vector<double> x = {0.4, 0.9, 0.2};
    double tr = 1.5;
    double prev = 0.0;
    for (int k = 0; k <= 8; ++k) {
        HypSeriesResult r = hyp_pq({}, {}, 2, x, k, 0.0);
        double contribution = r.value_linear() - prev;
        prev = r.value_linear();
        double expect = std::pow(tr, k) / std::tgamma(k + 1.0);
        REQUIRE_THAT(contribution, WithinAbs(expect, 1e-9 * std::max(1.0, expect)));
    }
}

TEST_CASE("1F1 basics") {
    SECTION("zero argument gives 1") {
        HypSeriesResult r = hyp_pq({1.3}, {2.9}, 1, {0.0, 0.0}, 30, 1e-12);
        REQUIRE(r.converged);
        REQUIRE_THAT(r.value_linear(), WithinAbs(1.0, 1e-14));
    }
    SECTION("p = 1 matches the scalar Kummer-M series") {
        for (auto [a, b, x] : std::vector<std::tuple<double, double, double>>{
                 {1.5, 2.5, 0.8}, {0.7, 1.9, -1.2}, {2.2, 0.4, 0.3}, {3.0, 4.5, 2.0}}) {
            // Independent oracle: the univariate series summed directly.
            double oracle = 0, term = 1;
            for (int k = 0; k < 120; ++k) {
                oracle += term;
                term *= (a + k) / (b + k) * x / (k + 1);
            }
            HypSeriesResult r = hyp_pq({a}, {b}, 1, {x}, 60, 1e-14);
            REQUIRE(r.converged);
            REQUIRE_THAT(r.value_linear(), WithinRel(oracle, 1e-8));
        }
    }
    SECTION("monotone truncation for nonnegative data") {
        std::vector<double> x = {0.7, 0.3};
        double prev = -1;
        for (int k = 0; k <= 10; ++k) {
            double v = hyp_pq({1.4}, {3.3}, 2, x, k, 0.0).value_linear();
            REQUIRE(v >= prev - 1e-15);
            prev = v;
        }
    }
    SECTION("excluded lower-parameter lattice") {
        REQUIRE_THROWS_AS(hyp_pq({1.0}, {0.5}, 1, {0.3, 0.2}, 10, 1e-10), PoleParameter);
    }
}

TEST_CASE("kummer_psi scalar quadrature") {
    SECTION("Psi(1, 1; 1) = e E1(1)") {
        PsiResult r = kummer_psi_eig(1.0, 1.0, 1, {1.0});
        REQUIRE_THAT(std::exp(r.log_value), WithinAbs(0.596347, 5e-7));
    }
    SECTION("Tricomi integral oracle at (2, 0.5, 1.3), cone_mc within 3 stderr") {
        const double a = 2.0, c = 0.5, x = 1.3;
        double oracle = integrate_0inf(
                            [&](double y) {
                                return std::exp(-x * y) * std::pow(y, a - 1) *
                                       std::pow(1 + y, c - a - 1);
                            },
                            1e-11) /
                        std::tgamma(a);
        PsiResult q = kummer_psi_eig(a, c, 1, {x});
        REQUIRE_THAT(std::exp(q.log_value), WithinRel(oracle, 1e-8));

        PsiBudget budget;
        budget.samples = 200000;
        budget.seed = 7;
        PsiResult mc = kummer_psi(a, c, HermitianMatrix::diagonal(1, {x}), PsiMethod::cone_mc, budget);
        double est = std::exp(mc.log_value);
        REQUIRE(std::fabs(est - oracle) <= 3 * mc.rel_stderr * est);
    }
    SECTION("c = a + (p-1)beta/2 + 1 collapses to |X|^{-a}") {
        REQUIRE_THAT(std::exp(kummer_psi_eig(1.7, 2.7, 1, {1.3}).log_value),
                     WithinRel(std::pow(1.3, -1.7), 1e-8));
        // p = 2, beta = 1, scalar argument 0.9 I.
        double a = 2.1, c = a + 0.5 + 1;
        PsiResult r = kummer_psi_eig(a, c, 1, {0.9, 0.9});
        REQUIRE_THAT(std::exp(r.log_value), WithinRel(std::pow(0.9, -2 * a), 1e-6));
    }
}

TEST_CASE("kummer_psi routes agree at p = 2") {
    const double a = 2.2, c = 1.1, x = 0.8;
    PsiResult quad = kummer_psi_eig(a, c, 1, {x, x}, PsiMethod::eigen_quadrature);
    PsiBudget budget;
    budget.samples = 200000;
    budget.seed = 11;
    PsiResult mc = kummer_psi(a, c, HermitianMatrix::diagonal(1, {x, x}), PsiMethod::cone_mc, budget);
    double q = std::exp(quad.log_value), m = std::exp(mc.log_value);
    REQUIRE(std::fabs(m - q) <= 3 * mc.rel_stderr * m + 1e-9);

    PsiResult emc = kummer_psi_eig(a, c, 1, {x, x}, PsiMethod::eigen_mc, budget);
    double e = std::exp(emc.log_value);
    REQUIRE(std::fabs(e - q) <= 3 * emc.rel_stderr * e + 1e-9);
}

TEST_CASE("kummer_psi formula mode accepts beta = 8") {
    PsiResult r = kummer_psi_eig(4.2, 1.0, 8, {1.0});
    REQUIRE(std::isfinite(r.log_value));
    PsiBudget budget;
    budget.samples = 20000;
    PsiResult r3 = kummer_psi_eig(9.0, 2.0, 8, {1.0, 1.0, 1.0}, PsiMethod::eigen_mc, budget);
    REQUIRE(std::isfinite(r3.log_value));
    REQUIRE_THROWS_AS(kummer_psi_eig(9.0, 2.0, 8, {2.0, 1.0, 0.5}), DomainError);
}
