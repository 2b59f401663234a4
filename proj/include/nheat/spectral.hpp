#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nheat/errors.hpp"
#include "nheat/grid.hpp"

namespace nheat {

/// Discrete Neumann Laplacian P on a uniform grid, applied matrix-free.
///
///   row 0      (v1 - v0) / dx^2
///   row j      (v_{j-1} - 2 v_j + v_{j+1}) / dx^2
///   row J-1    (v_{J-2} - v_{J-1}) / dx^2
class NeumannLaplacian1D {
public:
    explicit NeumannLaplacian1D(const Grid1D& g) : grid_(g), inv_dx2_(1.0 / (g.dx() * g.dx())) {}

    [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }

    /// out = P in. Sizes must both equal J; in and out must not alias.
    void apply_into(std::span<const double> in, std::span<double> out) const noexcept {
        const std::size_t n = in.size();
        out[0] = (in[1] - in[0]) * inv_dx2_;
        for (std::size_t j = 1; j + 1 < n; ++j)
            out[j] = ((in[j - 1] - in[j]) + (in[j + 1] - in[j])) * inv_dx2_;
        out[n - 1] = (in[n - 2] - in[n - 1]) * inv_dx2_;
    }

    [[nodiscard]] Field1D apply(const Field1D& v) const {
        require(v.grid() == grid_, "NeumannLaplacian1D::apply: grid mismatch");
        Field1D out(grid_);
        apply_into(v.values(), out.values());
        return out;
    }

private:
    Grid1D grid_;
    double inv_dx2_;
};

inline void check_mode_index(const Grid1D& g, long l) {
    require(l >= 0 && l < g.J(), "mode index out of range");
}

/// lambda_l = -(4/dx^2) sin^2(l pi / (2J))
inline double eigenvalue(const Grid1D& g, long l) {
    check_mode_index(g, l);
    if (l == 0) return 0.0;
    const double s = std::sin(static_cast<double>(l) * std::numbers::pi / (2.0 * static_cast<double>(g.J())));
    return -4.0 / (g.dx() * g.dx()) * s * s;
}

/// W_0 = 1, (W_l)_j = sqrt(2) cos(l (j + 1/2) pi / J). Orthonormal for inner().
inline Field1D eigenvector(const Grid1D& g, long l) {
    check_mode_index(g, l);
    if (l == 0) return Field1D::ones(g);
    const long long J = g.J();
    const long long period = 4 * J;  // the angle is l(2j+1) * pi/(2J)
    const double unit = std::numbers::pi / (2.0 * static_cast<double>(J));
    std::vector<double> w(static_cast<std::size_t>(J));
    for (long long j = 0; j < J; ++j) {
        const long long k = (static_cast<long long>(l) * (2 * j + 1)) % period;
        w[static_cast<std::size_t>(j)] = std::numbers::sqrt2 * std::cos(static_cast<double>(k) * unit);
    }
    return Field1D(g, std::move(w));
}

struct EigenPair {
    long index;
    double lambda;
    Field1D vector;
};

inline EigenPair eigenpair(const Grid1D& g, long l) { return {l, eigenvalue(g, l), eigenvector(g, l)}; }

/// min over l >= 1 of |lambda_l|, i.e. (4/dx^2) sin^2(pi/(2J)).
inline double spectral_gap(const Grid1D& g) { return -eigenvalue(g, 1); }

/// dt/dx^2 <= 1/2, compared exactly.
inline bool cfl_ok(const Grid1D& g, double dt) { return dt > 0.0 && dt / (g.dx() * g.dx()) <= 0.5; }

inline void require_cfl(const Grid1D& g, double dt) {
    require(dt > 0.0, "time step must be positive");
    if (!cfl_ok(g, dt)) throw CflError("CFL condition dt/dx^2 <= 1/2 violated");
}

/// max_{1<=l<=J-1} |1 + dt lambda_l|; l -> 1 + dt lambda_l is monotone so only the ends matter.
inline double eta(const Grid1D& g, double dt) {
    require(dt > 0.0, "eta: dt must be positive");
    return std::max(std::fabs(1.0 + dt * eigenvalue(g, 1)), std::fabs(1.0 + dt * eigenvalue(g, g.J() - 1)));
}

struct AmplificationReport {
    std::vector<double> margins;  ///< exp(-(dt/dx^2) sin^2(l pi/J)) - |1 + dt lambda_l|
    long worst_index = 0;
    double worst_margin = 0.0;
    bool pass = true;
};

/// Checks |1 + dt lambda_l| <= exp(-(dt/dx^2) sin^2(l pi / J)) for every l.
/// eigenvalue_scale != 1 multiplies every lambda_l; only used to inject faults.
inline AmplificationReport amplification_bound_check(const Grid1D& g, double dt, double eigenvalue_scale = 1.0) {
    require_cfl(g, dt);
    AmplificationReport rep;
    const double ratio = dt / (g.dx() * g.dx());
    const double J = static_cast<double>(g.J());
    rep.margins.resize(static_cast<std::size_t>(g.J()));
    for (long l = 0; l < g.J(); ++l) {
        const double s = std::sin(static_cast<double>(l) * std::numbers::pi / J);
        const double lhs = std::fabs(1.0 + dt * eigenvalue_scale * eigenvalue(g, l));
        const double m = std::exp(-ratio * s * s) - lhs;
        rep.margins[static_cast<std::size_t>(l)] = m;
        if (l == 0 || m < rep.worst_margin) {
            rep.worst_margin = m;
            rep.worst_index = l;
        }
    }
    rep.pass = rep.worst_margin >= 0.0;
    return rep;
}

namespace detail {

/// sum_{k=0}^{n-1} q^k given q and 1-q computed separately (1-q = -dt*lambda is exact-ish).
inline double geometric_sum(double q, double one_minus_q, long long n) {
    if (std::fabs(one_minus_q) < 1e-14) return static_cast<double>(n);
    return (1.0 - std::pow(q, static_cast<double>(n))) / one_minus_q;
}

}  // namespace detail

/// dt * sum_{k=0}^{n-1} eta^k. Bounded by 2 L^2 under CFL.
inline double eta_geometric_sum(const Grid1D& g, double dt, long long n) {
    require_cfl(g, dt);
    require(n >= 1, "eta_geometric_sum: n must be >= 1");
    const double e = eta(g, dt);
    return dt * detail::geometric_sum(e, 1.0 - e, n);
}

/// sum_{l=1}^{J-1} | dt * sum_{k=0}^{n-1} (1 + dt lambda_l)^k |^2
inline double resolvent_power_sum(const Grid1D& g, double dt, long long n) {
    require_cfl(g, dt);
    require(n >= 1, "resolvent_power_sum: n must be >= 1");
    CompensatedSum acc;
    for (long l = 1; l < g.J(); ++l) {
        const double lam = eigenvalue(g, l);
        const double term = dt * detail::geometric_sum(1.0 + dt * lam, -dt * lam, n);
        acc.add(term * term);
    }
    return acc.value();
}

/// 4 pi^4 L^4 / 90, i.e. (1/4)(2L)^4 zeta(4).
inline double resolvent_power_sum_bound(double L) {
    const double pi4 = std::pow(std::numbers::pi, 4);
    return 4.0 * pi4 * std::pow(L, 4) / 90.0;
}

struct KernelSum {
    double value;
    double bound;
};

/// value = dx sum_{l=1}^{J-1} exp(-alpha m sin^2(l pi/J)), bound = L sqrt(pi) / sqrt(m alpha).
inline KernelSum heat_kernel_spectrum_sum(const Grid1D& g, double alpha, long long m) {
    require(alpha > 0.0, "heat_kernel_spectrum_sum: alpha must be positive");
    require(m >= 1, "heat_kernel_spectrum_sum: m must be >= 1");
    const double am = alpha * static_cast<double>(m);
    const double J = static_cast<double>(g.J());
    CompensatedSum acc;
    for (long l = 1; l < g.J(); ++l) {
        const double s = std::sin(static_cast<double>(l) * std::numbers::pi / J);
        acc.add(std::exp(-am * s * s));
    }
    return {g.dx() * acc.value(), g.L() * std::sqrt(std::numbers::pi) / std::sqrt(am)};
}

}  // namespace nheat
