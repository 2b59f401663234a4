#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "nheat/errors.hpp"
#include "nheat/exact.hpp"
#include "nheat/grid.hpp"
#include "nheat/quadrature.hpp"

namespace nheat {

/// -Lap u = f on (0,Lx)x(0,Ly), d_x u = g1 on the sides x = 0, Lx and d_y u = g2 on y = 0, Ly.
struct Problem2D {
    std::function<double(double, double)> f;
    std::function<double(double, double)> g1;
    std::function<double(double, double)> g2;
    double Lx = 1.0;
    double Ly = 1.0;

    /// int f + outward flux, computed by nested adaptive quadrature; zero for compatible data.
    [[nodiscard]] double balance_residual(double tol = 1e-11) const {
        auto row = [&](double y) { return integrate_adaptive([&](double x) { return f(x, y); }, 0.0, Lx, tol); };
        const double source = integrate_adaptive(row, 0.0, Ly, tol);
        const double fx = integrate_adaptive([&](double y) { return g1(Lx, y) - g1(0.0, y); }, 0.0, Ly, tol);
        const double fy = integrate_adaptive([&](double x) { return g2(x, Ly) - g2(x, 0.0); }, 0.0, Lx, tol);
        return source + fx + fy;
    }
};

inline Problem2D to_problem(const Gaussian2DProblem& gp) {
    return {[gp](double x, double y) { return gp.f(x, y); }, [gp](double x, double y) { return gp.g1(x, y); },
            [gp](double x, double y) { return gp.g2(x, y); }, gp.Lx, gp.Ly};
}

struct Rhs2D {
    Field2D b;
    double r;
};

namespace detail {

/// out = A in for the Kronecker-sum Neumann Laplacian; in and out must not alias.
inline void apply2d_into(const Grid2D& g, std::span<const double> in, std::span<double> out) {
    const long Jx = g.Jx(), Jy = g.Jy();
    const double ix = 1.0 / (g.dx() * g.dx());
    const double iy = 1.0 / (g.dy() * g.dy());
    for (long j = 0; j < Jy; ++j) {
        const double* v = in.data() + g.index(0, j);
        const double* dn = j > 0 ? v - Jx : nullptr;
        const double* up = j + 1 < Jy ? v + Jx : nullptr;
        double* o = out.data() + g.index(0, j);
        for (long i = 0; i < Jx; ++i) {
            const double c = v[i];
            const double sx = (i > 0 ? v[i - 1] - c : 0.0) + (i + 1 < Jx ? v[i + 1] - c : 0.0);
            const double sy = (dn ? dn[i] - c : 0.0) + (up ? up[i] - c : 0.0);
            o[i] = sx * ix + sy * iy;
        }
    }
}

}  // namespace detail

/// 1D Neumann stencil along x plus the same along y.
inline Field2D apply2d(const Grid2D& g, const Field2D& v) {
    require(v.grid() == g, "apply2d: grid mismatch");
    Field2D out(g);
    detail::apply2d_into(g, v.values(), out.values());
    return out;
}

/// dt (1/dx^2 + 1/dy^2) <= 1/2, evaluated as dt (dx^2 + dy^2) <= dx^2 dy^2 / 2.
inline bool cfl2d(const Grid2D& g, double dt) {
    const double hx = g.dx() * g.dx(), hy = g.dy() * g.dy();
    return dt > 0.0 && dt * (hx + hy) <= 0.5 * hx * hy;
}

/// dt = cfl / (1/dx^2 + 1/dy^2), rounded down to the nearest double accepted by cfl2d when cfl = 1/2.
inline double dt_rule_2d(const Grid2D& g, double cfl = 0.5) {
    require(cfl > 0.0, "dt_rule_2d: cfl must be positive");
    const double hx = g.dx() * g.dx(), hy = g.dy() * g.dy();
    double dt = cfl * hx * hy / (hx + hy);
    if (cfl <= 0.5)
        while (!cfl2d(g, dt)) dt = std::nextafter(dt, 0.0);
    return dt;
}

inline Rhs2D build_rhs2d(const Problem2D& p, const Grid2D& g) {
    Field2D b = project2d(g, p.f);
    const long Jx = g.Jx(), Jy = g.Jy();
    const double dx = g.dx(), dy = g.dy();
    for (long j = 0; j < Jy; ++j) {
        const double y = g.y_axis().node(j);
        b(0, j) -= p.g1(0.0, y) / dx;
        b(Jx - 1, j) += p.g1(g.Lx(), y) / dx;
    }
    for (long i = 0; i < Jx; ++i) {
        const double x = g.x_axis().node(i);
        b(i, 0) -= p.g2(x, 0.0) / dy;
        b(i, Jy - 1) += p.g2(x, g.Ly()) / dy;
    }
    const double r = -mean2d(b);
    b.add_constant(r);
    return {std::move(b), r};
}

/// Explicit Euler on the 2D grid: v <- v + dt (A v + b), with periodic mean re-anchoring.
class RunState2D {
public:
    static constexpr long long kAnchorInterval = 4096;

    RunState2D(const Grid2D& g, double dt, Field2D v0, Field2D b) : g_(g), dt_(dt), v_(std::move(v0)), buf_(g), b_(std::move(b)) {
        require(v_.grid() == g && b_.grid() == g, "RunState2D: grid mismatch");
        require(dt > 0.0, "RunState2D: dt must be positive");
        if (!cfl2d(g, dt)) throw CflError("2D CFL condition dt (1/dx^2 + 1/dy^2) <= 1/2 violated");
        mean0_ = mean2d(v_);
        b_mean_ = mean2d(b_);
    }

    [[nodiscard]] const Grid2D& grid() const noexcept { return g_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] long long n() const noexcept { return n_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(n_) * dt_; }
    [[nodiscard]] const Field2D& field() const noexcept { return v_; }

    void step() {
        detail::apply2d_into(g_, v_.values(), buf_.values());
        const std::size_t N = v_.size();
        double* w = buf_.values().data();
        const double* v = v_.values().data();
        const double* b = b_.values().data();
        double probe = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            w[k] = v[k] + dt_ * (w[k] + b[k]);
            probe += w[k];
        }
        if (!std::isfinite(probe)) throw InstabilityError("non-finite value after 2D step " + std::to_string(n_ + 1));
        std::swap(v_, buf_);
        ++n_;
        if (n_ % kAnchorInterval == 0) anchor();
    }

    void anchor() {
        const double target = mean0_ + static_cast<double>(n_) * dt_ * b_mean_;
        v_.add_constant(target - mean2d(v_));
    }

    /// norm2d(A v + b)
    [[nodiscard]] double residual() const {
        Field2D r(g_);
        detail::apply2d_into(g_, v_.values(), r.values());
        for (std::size_t k = 0; k < r.size(); ++k) r[k] += b_[k];
        return norm2d(r);
    }

private:
    Grid2D g_;
    double dt_;
    Field2D v_;
    Field2D buf_;
    Field2D b_;
    long long n_ = 0;
    double mean0_ = 0.0;
    double b_mean_ = 0.0;
};

struct SteadyResult2D {
    Field2D v;
    long long iterations;
    double residual;
    bool converged;
};

/// Iterates until norm2d(A v + b) <= tol or max_steps; the mean of v0 is preserved.
inline SteadyResult2D solve_steady_2d(const Problem2D& p, const Grid2D& g, double dt, const Field2D& v0,
                                      double tol = 1e-10, long long max_steps = 100'000'000) {
    require(v0.grid() == g, "solve_steady_2d: v0 on a different grid");
    RunState2D st(g, dt, v0, build_rhs2d(p, g).b);
    constexpr long long kCheckEvery = 16;
    double res = st.residual();
    while (res > tol && st.n() < max_steps) {
        for (long long k = 0; k < kCheckEvery && st.n() < max_steps; ++k) st.step();
        res = st.residual();
    }
    st.anchor();
    return {st.field(), st.n(), res, res <= tol};
}

/// Runs n = round(t/dt) steps from v0 and returns the state.
inline RunState2D run2d_to(const Problem2D& p, const Grid2D& g, double dt, const Field2D& v0, double t) {
    RunState2D st(g, dt, v0, build_rhs2d(p, g).b);
    const long long n = std::llround(t / dt);
    while (st.n() < n) st.step();
    return st;
}

}  // namespace nheat
