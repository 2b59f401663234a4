#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nheat/errors.hpp"
#include "nheat/exact.hpp"
#include "nheat/grid.hpp"
#include "nheat/quadrature.hpp"
#include "nheat/spectral.hpp"

namespace nheat {

/// -u'' = f on (0, L), u'(0) = beta, u'(L) = gamma.
struct NonhomogProblem {
    std::function<double(double)> f;
    double beta = 0.0;
    double gamma = 0.0;
    double L = 1.0;
    std::optional<double> integral_f;  ///< exact int_0^L f; quadrature when absent

    [[nodiscard]] double source_integral(double tol = 1e-12) const {
        if (integral_f) return *integral_f;
        return integrate_adaptive(f, 0.0, L, tol);
    }
};

/// The piecewise-source problem with beta = 1/2, gamma = -15/4 on [0, 2].
inline NonhomogProblem piecewise_source_problem() {
    const SteadyState1D s = steady_1d();
    return {&SteadyState1D::f, s.beta, s.gamma, s.L, s.integral_f};
}

/// gamma - beta + int f; zero iff a steady state exists.
inline double check_compatibility(const NonhomogProblem& p) { return p.gamma - p.beta + p.source_integral(); }

struct DiscreteRHS {
    Field1D b;
    double r;
};

/// b = Pi f + (1/dx)(-beta, 0, ..., 0, gamma) + r 1 with r = (int f - dx sum_j f(x_j)) / (J dx).
inline DiscreteRHS build_rhs(const NonhomogProblem& p, const Grid1D& g) {
    require(std::fabs(p.L - g.L()) <= 1e-14 * p.L, "build_rhs: grid length does not match problem");
    Field1D b = project(g, p.f);
    const double dx = g.dx();
    const double r = (p.source_integral() - dx * detail::sum(b.values())) / (static_cast<double>(g.J()) * dx);
    b[0] -= p.beta / dx;
    b[static_cast<std::size_t>(g.J() - 1)] += p.gamma / dx;
    b.add_constant(r);
    return {std::move(b), r};
}

/// Explicit Euler state v^n with optional source b: v^{n+1} = v^n + dt (P v^n + b).
class RunState {
public:
    static constexpr long long kAnchorInterval = 4096;

    RunState(const Grid1D& g, double dt, Field1D v0, std::optional<Field1D> rhs = std::nullopt)
        : op_(g), dt_(dt), v_(std::move(v0)), buf_(g), rhs_(std::move(rhs)) {
        require(v_.grid() == g, "RunState: initial field on a different grid");
        if (rhs_) require(rhs_->grid() == g, "RunState: rhs on a different grid");
        require_cfl(g, dt);
        mean0_ = mean(v_);
        rhs_mean_ = rhs_ ? mean(*rhs_) : 0.0;
    }

    [[nodiscard]] const Grid1D& grid() const noexcept { return op_.grid(); }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] long long n() const noexcept { return n_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(n_) * dt_; }
    [[nodiscard]] const Field1D& field() const noexcept { return v_; }
    [[nodiscard]] bool has_rhs() const noexcept { return rhs_.has_value(); }

    /// 0 disables the periodic mean correction.
    void set_anchor_interval(long long k) noexcept { anchor_interval_ = k; }

    void step() {
        const std::size_t J = v_.size();
        const double* v = v_.values().data();
        double* w = buf_.values().data();
        const double c = dt_ / (grid().dx() * grid().dx());
        w[0] = v[0] + c * (v[1] - v[0]);
        for (std::size_t j = 1; j + 1 < J; ++j) w[j] = v[j] + c * ((v[j - 1] - v[j]) + (v[j + 1] - v[j]));
        w[J - 1] = v[J - 1] + c * (v[J - 2] - v[J - 1]);
        if (rhs_) {
            const double* b = rhs_->values().data();
            for (std::size_t j = 0; j < J; ++j) w[j] += dt_ * b[j];
        }
        double probe = 0.0;
        for (std::size_t j = 0; j < J; ++j) probe += w[j];
        if (!std::isfinite(probe)) throw InstabilityError("non-finite value after step " + std::to_string(n_ + 1));
        std::swap(v_, buf_);
        ++n_;
        if (anchor_interval_ > 0 && n_ % anchor_interval_ == 0) anchor();
    }

    /// Restores the exactly conserved mean: <v^n> = <v^0> + n dt <b>.
    void anchor() {
        const double target = mean0_ + static_cast<double>(n_) * dt_ * rhs_mean_;
        v_.add_constant(target - mean(v_));
    }

private:
    NeumannLaplacian1D op_;
    double dt_;
    Field1D v_;
    Field1D buf_;
    std::optional<Field1D> rhs_;
    long long n_ = 0;
    long long anchor_interval_ = kAnchorInterval;
    double mean0_ = 0.0;
    double rhs_mean_ = 0.0;
};

inline RunState step(RunState st) {
    st.step();
    return st;
}

struct Checkpoint {
    double t_target;
    double t_realized;
    long long n;
    Field1D field;
};

/// Step index recorded for target time t: the nearest step, round(t / dt).
inline long long checkpoint_step(double t, double dt) { return std::llround(t / dt); }

/// Advances st through each target time, recording the field at n = round(t/dt).
inline std::vector<Checkpoint> run_to(RunState& st, const std::vector<double>& checkpoints) {
    require(!checkpoints.empty(), "run_to: empty checkpoint list");
    std::vector<Checkpoint> out;
    out.reserve(checkpoints.size());
    double prev = st.time();
    for (double t : checkpoints) {
        require(std::isfinite(t) && t >= prev, "run_to: checkpoints must be nondecreasing and not in the past");
        prev = t;
        const long long target = checkpoint_step(t, st.dt());
        require(target >= st.n(), "run_to: checkpoint rounds to a step already passed");
        while (st.n() < target) st.step();
        out.push_back({t, st.time(), st.n(), st.field()});
    }
    return out;
}

struct SteadyResult {
    Field1D v;
    long long iterations;
    double residual;  ///< norm_l2(P v + b)
    bool converged;
};

inline double steady_residual(const NeumannLaplacian1D& op, const Field1D& v, const Field1D& b) {
    Field1D r = op.apply(v);
    r += b;
    return norm_l2(r);
}

/// Iterates v <- v + dt (P v + b) until norm_l2(P v + b) <= tol. The mean of v0 is preserved.
/// The iterate is carried as an unevaluated sum hi + lo: a plain double update stalls once
/// dt |P v + b| drops below half an ulp of v, which for |v| ~ 1 and dx ~ 1e-2 is near 1e-12.
/// On exhaustion of max_steps the best iterate seen is returned with converged = false.
inline SteadyResult solve_steady_iterative(const DiscreteRHS& rhs, double dt, const Field1D& v0, double tol = 1e-10,
                                           long long max_steps = 100'000'000) {
    const Grid1D& g = v0.grid();
    require(rhs.b.grid() == g, "solve_steady_iterative: rhs on a different grid");
    require(tol > 0.0, "solve_steady_iterative: tol must be positive");
    require_cfl(g, dt);
    if (std::fabs(mean(rhs.b)) > 1e-10)
        throw IncompatibleProblemError("solve_steady_iterative: right-hand side has nonzero mean");
    constexpr long long kCheckEvery = 16;
    const std::size_t J = v0.size();
    const double ih = 1.0 / (g.dx() * g.dx());
    const double* b = rhs.b.values().data();
    std::vector<double> hi(v0.values().begin(), v0.values().end()), lo(J, 0.0), r(J);

    auto lap = [J](const std::vector<double>& v, std::size_t j) {
        if (j == 0) return v[1] - v[0];
        if (j + 1 == J) return v[J - 2] - v[J - 1];
        return (v[j - 1] - v[j]) + (v[j + 1] - v[j]);
    };
    auto residual = [&] {
        for (std::size_t j = 0; j < J; ++j) r[j] = (lap(hi, j) + lap(lo, j)) * ih + b[j];
        return std::sqrt(g.dx() * detail::dot(r, r));
    };

    long long n = 0;
    double res = residual();
    std::vector<double> best = hi;
    double best_res = res;
    while (res > tol && n < max_steps) {
        for (long long k = 0; k < kCheckEvery && n < max_steps; ++k, ++n) {
            for (std::size_t j = 0; j < J; ++j) r[j] = dt * ((lap(hi, j) + lap(lo, j)) * ih + b[j]);
            for (std::size_t j = 0; j < J; ++j) {
                const double s = hi[j] + r[j];
                const double bb = s - hi[j];
                lo[j] += (hi[j] - (s - bb)) + (r[j] - bb);
                hi[j] = s + lo[j];
                lo[j] -= hi[j] - s;
            }
        }
        res = residual();
        if (!std::isfinite(res)) throw InstabilityError("solve_steady_iterative: non-finite residual");
        if (res < best_res) {
            best_res = res;
            best = hi;
        }
    }
    Field1D v(g, res <= tol ? hi : best);
    v.add_constant(mean(v0) - mean(v));
    return {std::move(v), n, res <= tol ? res : best_res, res <= tol};
}

inline SteadyResult solve_steady_iterative(const NonhomogProblem& p, const Grid1D& g, double dt, const Field1D& v0,
                                           double tol = 1e-10, long long max_steps = 100'000'000) {
    require(v0.grid() == g, "solve_steady_iterative: v0 on a different grid");
    return solve_steady_iterative(build_rhs(p, g), dt, v0, tol, max_steps);
}

/// Solves (s I - P) v = b by tridiagonal elimination (no pivoting; the matrix is SPD for s > 0).
inline Field1D solve_shifted(const Field1D& b, double s) {
    require(s > 0.0, "solve_shifted: shift must be positive");
    const Grid1D& g = b.grid();
    const std::size_t J = b.size();
    const double dx2 = g.dx() * g.dx();
    // Scaled by dx^2: diagonal s dx^2 + {1, 2, ..., 2, 1}, off-diagonals -1.
    std::vector<double> diag(J), rhs(J), upper(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        diag[j] = s * dx2 + ((j == 0 || j + 1 == J) ? 1.0 : 2.0);
        rhs[j] = dx2 * b[j];
    }
    upper[0] = -1.0 / diag[0];
    rhs[0] /= diag[0];
    for (std::size_t j = 1; j < J; ++j) {
        const double piv = diag[j] + upper[j - 1];  // diag - (-1) * upper
        upper[j] = (j + 1 < J) ? -1.0 / piv : 0.0;
        rhs[j] = (rhs[j] + rhs[j - 1]) / piv;
    }
    for (std::size_t j = J - 1; j-- > 0;) rhs[j] -= upper[j] * rhs[j + 1];
    // The last pivot is O(s dx^2), so elimination error lands in the constant mode.
    // That mode decouples exactly: mean(v) = mean(b) / s.
    Field1D v(g, std::move(rhs));
    v.add_constant(mean(b) / s - mean(v));
    return v;
}

inline Field1D solve_steady_laplace(const NonhomogProblem& p, const Grid1D& g, double s) {
    require(s > 0.0, "solve_steady_laplace: shift must be positive");
    return solve_shifted(build_rhs(p, g).b, s);
}

/// Bound on the distance between the shifted solution and the zero-mean solution of -P v = b:
/// s ||b|| / gap^2, with gap = (4/dx^2) sin^2(pi/(2J)) the smallest nonzero |lambda|.
/// For large J this is s L^4 / pi^4 ||b|| up to a factor (J/(J-1))^4.
inline double laplace_shift_error_bound(const Grid1D& g, double s, double b_norm) {
    const double gap = spectral_gap(g);
    return s * b_norm / (gap * gap);
}

}  // namespace nheat
