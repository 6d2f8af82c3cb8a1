#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "betaint/errors.hpp"

namespace betaint {

// Adaptive quadrature helpers shared by the oracle paths. tanh-sinh handles
// integrable endpoint singularities, which the |Lambda| and |I - Lambda|
// weights produce routinely.

inline double integrate_interval(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-9) {
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    double error = 0, l1 = 0;
    double r = integrator.integrate(f, a, b, tol, &error, &l1);
    double scale = std::max(1.0, l1);
    if (!(error <= 1e3 * tol * scale))
        throw QuadratureFailure("quadrature did not reach the requested tolerance",
                                error / scale);
    return r;
}

// Semi-infinite domain mapped onto (0,1) by lambda = t/(1-t).
inline double integrate_0inf(const std::function<double(double)>& f, double tol = 1e-9) {
    auto g = [&f](double t) {
        double u = 1.0 - t;
        double lambda = t / u;
        if (!std::isfinite(lambda)) return 0.0;
        double v = f(lambda);
        return v / (u * u);
    };
    return integrate_interval(g, 0.0, 1.0, tol);
}

inline double integrate_shifted_0inf(const std::function<double(double)>& f, double shift,
                                     double tol = 1e-9) {
    return integrate_0inf([&f, shift](double x) { return f(shift + x); }, tol);
}

// Nested quadrature of f(l1, l2) over the ordered region b > l1 > l2 > a.
inline double integrate_ordered2(const std::function<double(double, double)>& f, double a,
                                 double b, double tol = 1e-9) {
    auto outer = [&](double l1) {
        return integrate_interval([&](double l2) { return f(l1, l2); }, a, l1, tol / 8);
    };
    return integrate_interval(outer, a, b, tol);
}

// Ordered cone l1 > l2 > 0, both coordinates mapped to (0,1).
inline double integrate_ordered2_0inf(const std::function<double(double, double)>& f,
                                      double tol = 1e-9) {
    auto g = [&f](double t1, double t2) {
        double u1 = 1.0 - t1, u2 = 1.0 - t2;
        double l1 = t1 / u1, l2 = t2 / u2;
        if (!std::isfinite(l1) || !std::isfinite(l2)) return 0.0;
        return f(l1, l2) / (u1 * u1 * u2 * u2);
    };
    // t -> lambda is monotone, so the ordered region maps to t1 > t2.
    return integrate_ordered2(g, 0.0, 1.0, tol);
}

}  // namespace betaint
