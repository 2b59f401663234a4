#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nheat/errors.hpp"

namespace nheat {

/// Fixed 16-point Gauss-Legendre rule on [0, 1].
template <class F>
double gauss16_unit(F&& f) {
    return boost::math::quadrature::gauss<double, 16>::integrate(f, 0.0, 1.0);
}

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Boost stops refining an interval once its local
/// error is below tol times its own estimate or a share of tol times the whole estimate, so the
/// summed error can reach 2 tol ||f||_1. Throws QuadratureError beyond that.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 15) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &err, &l1);
    if (!std::isfinite(v) || err > 2.0 * tol * std::max(1.0, l1))
        { char m[160]; std::snprintf(m, sizeof m, "adaptive quadrature did not converge: value %g, error estimate %g, |f| integral %g", v, err, l1); throw QuadratureError(m); }
    return v;
}

}  // namespace nheat
