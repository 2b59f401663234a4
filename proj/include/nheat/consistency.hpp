#pragma once

#include <utility>

#include "nheat/exact.hpp"
#include "nheat/grid.hpp"
#include "nheat/quadrature.hpp"
#include "nheat/spectral.hpp"

namespace nheat {

/// (L w)_j = w''(x_j) - (P Pi w)_j
inline Field1D l_delta(const SmoothFunction& w, const Grid1D& g) {
    const Field1D pw = NeumannLaplacian1D(g).apply(project(g, [&](double x) { return w(x, 0); }));
    Field1D out = project(g, [&](double x) { return w(x, 2); });
    out -= pw;
    return out;
}

/// Endpoint values of the boundary part of the defect, valid when w'(0) = w'(L) = 0:
///   [0]   = w''(0)/2 - (dx/2) int_0^1 (1-s)^2 w'''(s dx) ds
///   [J-1] = w''(L)/2 + (dx/2) int_0^1 (1-s)^2 w'''(L - s dx) ds
inline std::pair<double, double> l1(const SmoothFunction& w, const Grid1D& g) {
    const double dx = g.dx();
    const double L = g.L();
    const double left = gauss16_unit([&](double s) { return (1 - s) * (1 - s) * w(s * dx, 3); });
    const double right = gauss16_unit([&](double s) { return (1 - s) * (1 - s) * w(L - s * dx, 3); });
    return {0.5 * w(0.0, 2) - 0.5 * dx * left, 0.5 * w(L, 2) + 0.5 * dx * right};
}

/// Interior part: entries j = 1..J-2 are
///   -(1/6) [ int_0^1 (1-s)^3 w''''(x_j + s dx) ds + int_0^1 (1-s)^3 w''''(x_j - s dx) ds ],
/// endpoints are 0.
inline Field1D l2(const SmoothFunction& w, const Grid1D& g) {
    const double dx = g.dx();
    Field1D out(g);
    for (long j = 1; j + 1 < g.J(); ++j) {
        const double xj = g.node(j);
        const double fwd = gauss16_unit([&](double s) { return (1 - s) * (1 - s) * (1 - s) * w(xj + s * dx, 4); });
        const double bwd = gauss16_unit([&](double s) { return (1 - s) * (1 - s) * (1 - s) * w(xj - s * dx, 4); });
        out[static_cast<std::size_t>(j)] = -(fwd + bwd) / 6.0;
    }
    return out;
}

/// Field equal to the pair at the two endpoints and zero elsewhere.
inline Field1D embed(const std::pair<double, double>& ends, const Grid1D& g) {
    Field1D out(g);
    out[0] += ends.first;
    out[static_cast<std::size_t>(g.J() - 1)] += ends.second;
    return out;
}

struct ConsistencyDefect {
    Field1D full;
    std::pair<double, double> boundary;
    Field1D interior;
};

/// full = embed(boundary) + dx^2 * interior when w'(0) = w'(L) = 0.
inline ConsistencyDefect split_defect(const SmoothFunction& w, const Grid1D& g) {
    return {l_delta(w, g), l1(w, g), l2(w, g)};
}

}  // namespace nheat
