#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nheat/errors.hpp"
#include "nheat/grid.hpp"
#include "nheat/quadrature.hpp"

namespace nheat {

/// f(x, k) returns the k-th derivative of f at x (k = 0 is the value).
using SmoothFunction = std::function<double(double, int)>;

/// k-th derivative of the normalized Neumann cosine c_p on [0, L]:
/// c_0 = 1, c_p(x) = sqrt(2) cos(p pi x / L).
inline double cosine_mode(double L, long p, double x, int order = 0) {
    if (p == 0) return order == 0 ? 1.0 : 0.0;
    const double k = static_cast<double>(p) * std::numbers::pi / L;
    const double amp = std::numbers::sqrt2 * std::pow(k, order);
    switch (order % 4) {
        case 0: return amp * std::cos(k * x);
        case 1: return -amp * std::sin(k * x);
        case 2: return -amp * std::cos(k * x);
        default: return amp * std::sin(k * x);
    }
}

/// u(t, x) = sum_p alpha_p exp(-p^2 pi^2 t / L^2) c_p(x), either a finite list of
/// coefficients or a coefficient rule with a decay bound |alpha_p| <= C p^-q.
class CosineSeries {
public:
    struct Decay {
        double constant;
        double power;
    };

    static constexpr double kTailTolerance = 1e-13;
    static constexpr long kMaxModes = 2'000'000;

    static CosineSeries finite(double L, std::vector<double> alpha) {
        require(L > 0.0, "CosineSeries: L must be positive");
        CosineSeries s;
        s.L_ = L;
        s.finite_ = std::move(alpha);
        return s;
    }

    /// initial(x, k) is used at t = 0, where the rule series need not converge fast enough.
    static CosineSeries from_rule(double L, std::function<double(long)> rule, Decay decay,
                                  SmoothFunction initial = {}) {
        require(L > 0.0, "CosineSeries: L must be positive");
        CosineSeries s;
        s.L_ = L;
        s.rule_ = std::move(rule);
        s.decay_ = decay;
        s.initial_ = std::move(initial);
        return s;
    }

    [[nodiscard]] double L() const noexcept { return L_; }
    [[nodiscard]] bool is_finite() const noexcept { return !rule_; }

    /// Highest index of a finite series; -1 for rule-based series.
    [[nodiscard]] long degree() const noexcept {
        return is_finite() ? static_cast<long>(finite_.size()) - 1 : -1;
    }

    [[nodiscard]] double coefficient(long p) const {
        require(p >= 0, "CosineSeries::coefficient: negative index");
        if (rule_) return rule_(p);
        return p < static_cast<long>(finite_.size()) ? finite_[static_cast<std::size_t>(p)] : 0.0;
    }

    /// Number of the last mode kept when evaluating the order-th x-derivative at time t,
    /// so that the discarded tail is below kTailTolerance.
    [[nodiscard]] long truncation(double t, int order = 0) const {
        if (is_finite()) return degree();
        const double a = std::numbers::pi * std::numbers::pi * t / (L_ * L_);
        if (!(a > 0.0)) throw QuadratureError("CosineSeries: rule series cannot be summed at t = 0");
        const double e = static_cast<double>(order) - decay_.power;
        const double scale = std::numbers::sqrt2 * decay_.constant * std::pow(std::numbers::pi / L_, order);
        auto term = [&](double p) { return scale * std::pow(p, e) * std::exp(-p * p * a); };
        for (long P = 0; P < kMaxModes; ++P) {
            const double p1 = static_cast<double>(P + 1);
            const double rho = std::pow((p1 + 1.0) / p1, std::max(e, 0.0)) * std::exp(-(2.0 * p1 + 1.0) * a);
            if (rho < 1.0 && term(p1) / (1.0 - rho) < kTailTolerance) return P;
        }
        throw QuadratureError("CosineSeries: truncation exceeds the mode limit");
    }

    [[nodiscard]] double evaluate(double t, double x) const { return evaluate_derivative(t, x, 0); }

    /// order-th x-derivative of u(t, .) at x. Time derivatives follow from d_t = d_xx.
    [[nodiscard]] double evaluate_derivative(double t, double x, int order) const {
        check_args(t, x, order);
        if (t == 0.0 && !is_finite()) return initial_at(x, order);
        const long P = truncation(t, order);
        CompensatedSum acc;
        for (long p = 0; p <= P; ++p) {
            const double c = coefficient(p);
            if (c == 0.0) continue;
            acc.add(c * decay_factor(p, t) * cosine_mode(L_, p, x, order));
        }
        return acc.value();
    }

    /// Nodal values of the order-th x-derivative at time t.
    [[nodiscard]] Field1D evaluate_nodes(const Grid1D& g, double t, int order = 0) const {
        require(std::fabs(g.L() - L_) <= 1e-14 * L_, "CosineSeries::evaluate_nodes: grid length mismatch");
        return project(g, [&](double x) { return evaluate_derivative(t, std::min(x, L_), order); });
    }

    /// u(t, .) as a function with derivatives.
    [[nodiscard]] SmoothFunction at_time(double t) const {
        require(t >= 0.0, "CosineSeries::at_time: negative time");
        return [s = *this, t](double x, int k) { return s.evaluate_derivative(t, x, k); };
    }

    [[nodiscard]] double decay_factor(long p, double t) const {
        const double k = static_cast<double>(p) * std::numbers::pi / L_;
        return std::exp(-k * k * t);
    }

private:
    void check_args(double t, double x, int order) const {
        if (!(t >= 0.0)) throw ContractError("CosineSeries: negative time");
        if (!(x >= 0.0 && x <= L_)) throw ContractError("CosineSeries: x outside [0, L]");
        require(order >= 0, "CosineSeries: negative derivative order");
    }

    double initial_at(double x, int order) const {
        if (!initial_) throw QuadratureError("CosineSeries: no closed form available at t = 0");
        return initial_(x, order);
    }

    double L_ = 1.0;
    std::vector<double> finite_;
    std::function<double(long)> rule_;
    Decay decay_{0.0, 0.0};
    SmoothFunction initial_;
};

/// exp(-pi^2 t / L^2) * u0_norm, the decay bound of ||u(t) - <u0>||.
inline double decay_envelope(double u0_norm, double t, double L) {
    require(t >= 0.0, "decay_envelope: negative time");
    return std::exp(-std::numbers::pi * std::numbers::pi * t / (L * L)) * u0_norm;
}

// ---- initial data catalog ----

struct TrigPoly {
    std::vector<double> coefficients;  ///< alpha_0, alpha_1, ...
};

/// x^2 (L - x)^2
struct PolyBump {};

/// max(1 - |x - center| / width, 0)
struct Hat {
    double width;
    double center;
};

struct Custom {
    SmoothFunction f;  ///< must provide derivatives up to order 5
    std::string name = "custom";
};

class InitialDatum {
public:
    using Kind = std::variant<TrigPoly, PolyBump, Hat, Custom>;

    InitialDatum(Kind kind, double L) : kind_(std::move(kind)), L_(L) {
        require(L > 0.0, "InitialDatum: L must be positive");
        if (const auto* h = std::get_if<Hat>(&kind_))
            require(h->width > 0.0, "InitialDatum: hat width must be positive");
        if (const auto* c = std::get_if<Custom>(&kind_)) require(static_cast<bool>(c->f), "InitialDatum: empty function");
    }

    /// The five-mode trigonometric datum (1, 1, 5, -1, 2, 1) on [0, 1].
    static InitialDatum trig_poly(std::vector<double> coeffs = {1, 1, 5, -1, 2, 1}, double L = 1.0) {
        return {TrigPoly{std::move(coeffs)}, L};
    }
    static InitialDatum poly_bump(double L = 1.0) { return {PolyBump{}, L}; }
    static InitialDatum hat(double width = 1.0 / 50.0, double L = 2.0) { return {Hat{width, L / 2.0}, L}; }
    static InitialDatum custom(SmoothFunction f, double L, std::string name = "custom") {
        return {Custom{std::move(f), std::move(name)}, L};
    }

    [[nodiscard]] double L() const noexcept { return L_; }
    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

    [[nodiscard]] std::string name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, TrigPoly>) return "trigpoly";
                else if constexpr (std::is_same_v<T, PolyBump>) return "polybump";
                else if constexpr (std::is_same_v<T, Hat>) return "hat";
                else return k.name;
            },
            kind_);
    }

    /// Whether the datum is a finite cosine sum and hence lies in every domain of P^k.
    /// PolyBump and Hat do not; Custom data are not classified.
    [[nodiscard]] std::optional<bool> satisfies_regularity_hypothesis() const {
        if (std::holds_alternative<TrigPoly>(kind_)) return true;
        if (std::holds_alternative<Custom>(kind_)) return std::nullopt;
        return false;
    }

    [[nodiscard]] double value(double x) const { return derivative(x, 0); }

    [[nodiscard]] double derivative(double x, int order) const {
        require(order >= 0 && order <= 5, "InitialDatum: derivative order must be in [0, 5]");
        return std::visit([&](const auto& k) { return eval(k, x, order); }, kind_);
    }

    [[nodiscard]] SmoothFunction as_function() const {
        return [d = *this](double x, int k) { return d.derivative(x, k); };
    }

private:
    double eval(const TrigPoly& k, double x, int order) const {
        CompensatedSum s;
        for (std::size_t p = 0; p < k.coefficients.size(); ++p)
            s.add(k.coefficients[p] * cosine_mode(L_, static_cast<long>(p), x, order));
        return s.value();
    }
    double eval(const PolyBump&, double x, int order) const {
        const double L = L_;
        switch (order) {
            case 0: return x * x * (L - x) * (L - x);
            case 1: return 4 * x * x * x - 6 * L * x * x + 2 * L * L * x;
            case 2: return 12 * x * x - 12 * L * x + 2 * L * L;
            case 3: return 24 * x - 12 * L;
            case 4: return 24.0;
            default: return 0.0;
        }
    }
    double eval(const Hat& h, double x, int order) const {
        const double d = x - h.center;
        if (std::fabs(d) >= h.width) return 0.0;
        if (order == 0) return 1.0 - std::fabs(d) / h.width;
        if (order == 1) return d == 0.0 ? 0.0 : (d < 0.0 ? 1.0 : -1.0) / h.width;
        return 0.0;
    }
    double eval(const Custom& c, double x, int order) const { return c.f(x, order); }

    Kind kind_;
    double L_;
};

/// alpha_p = (1/L) int_0^L u0 c_p. Closed forms for the catalog; adaptive quadrature up to
/// p_max (absolute tolerance tol) for Custom data.
inline CosineSeries cosine_coefficients(const InitialDatum& u0, long p_max, double tol = 1e-12) {
    require(p_max >= 0, "cosine_coefficients: p_max must be >= 0");
    const double L = u0.L();
    const double pi = std::numbers::pi;
    const auto& kind = u0.kind();

    if (const auto* tp = std::get_if<TrigPoly>(&kind)) return CosineSeries::finite(L, tp->coefficients);

    if (std::holds_alternative<PolyBump>(kind)) {
        const double L4 = std::pow(L, 4);
        auto rule = [L4, pi](long p) {
            if (p == 0) return L4 / 30.0;
            if (p % 2 != 0) return 0.0;
            const double pp = static_cast<double>(p) * pi;
            return -24.0 * std::numbers::sqrt2 * L4 / (pp * pp * pp * pp);
        };
        return CosineSeries::from_rule(L, rule, {24.0 * std::numbers::sqrt2 * L4 / std::pow(pi, 4), 4.0},
                                       u0.as_function());
    }

    if (const auto* h = std::get_if<Hat>(&kind)) {
        const double w = h->width, c = h->center;
        require(c - w >= 0.0 && c + w <= L, "cosine_coefficients: hat support must lie in [0, L]");
        auto rule = [L, w, c, pi](long p) {
            if (p == 0) return w / L;
            const double k = static_cast<double>(p) * pi / L;
            return std::numbers::sqrt2 / L * std::cos(k * c) * 2.0 * (1.0 - std::cos(k * w)) / (k * k * w);
        };
        return CosineSeries::from_rule(L, rule, {4.0 * std::numbers::sqrt2 * L / (pi * pi * w), 2.0},
                                       u0.as_function());
    }

    std::vector<double> alpha(static_cast<std::size_t>(p_max + 1));
    for (long p = 0; p <= p_max; ++p) {
        auto integrand = [&](double x) { return u0.value(x) * cosine_mode(L, p, x); };
        alpha[static_cast<std::size_t>(p)] = integrate_adaptive(integrand, 0.0, L, tol) / L;
    }
    return CosineSeries::finite(L, std::move(alpha));
}

// ---- steady states ----

/// The 1D stationary test problem on [0, 2]: -u'' = f, u'(0) = beta, u'(2) = gamma with
/// f = 1 on [0, 1/2] and 2x on (1/2, 2].
struct SteadyState1D {
    double L = 2.0;
    double beta = 0.5;
    double gamma = -3.75;
    double integral_f = 17.0 / 4.0;
    double mean = -193.0 / 384.0;

    [[nodiscard]] static double f(double x) { return x <= 0.5 ? 1.0 : 2.0 * x; }

    /// Piecewise exact steady state with mean -193/384:
    /// -(x - 1/2)^2 / 2 on [0, 1/2], -x^3/3 + x/4 - 1/12 on (1/2, 2].
    [[nodiscard]] static double u(double x, int order = 0) {
        if (x <= 0.5) {
            switch (order) {
                case 0: return -0.5 * (x - 0.5) * (x - 0.5);
                case 1: return -(x - 0.5);
                case 2: return -1.0;
                default: return 0.0;
            }
        }
        switch (order) {
            case 0: return -x * x * x / 3.0 + x / 4.0 - 1.0 / 12.0;
            case 1: return -x * x + 0.25;
            case 2: return -2.0 * x;
            case 3: return -2.0;
            default: return 0.0;
        }
    }
};

inline SteadyState1D steady_1d() { return {}; }

/// Zero-mean quadratic with w'' = const, w'(0) = beta, w'(L) = gamma.
inline SmoothFunction companion_w(double beta, double gamma, double L) {
    require(L > 0.0, "companion_w: L must be positive");
    const double a = (gamma - beta) / (2.0 * L);
    const double c = -(gamma - beta) / 6.0 * L - beta / 2.0 * L;
    return [a, beta, c](double x, int order) {
        switch (order) {
            case 0: return a * x * x + beta * x + c;
            case 1: return 2.0 * a * x + beta;
            case 2: return 2.0 * a;
            default: return 0.0;
        }
    };
}

/// Gaussian steady state exp(-alpha (x-x0)^2 - beta_g (y-y0)^2) on (0,2)x(0,4) and its data.
struct Gaussian2DProblem {
    double alpha;
    double beta_g;
    double x0;
    double y0;
    double Lx = 2.0;
    double Ly = 4.0;

    [[nodiscard]] double u(double x, double y) const {
        const double dx = x - x0, dy = y - y0;
        return std::exp(-alpha * dx * dx - beta_g * dy * dy);
    }
    [[nodiscard]] double f(double x, double y) const {
        const double dx = x - x0, dy = y - y0;
        return (2 * alpha * (1 - 2 * alpha * dx * dx) + 2 * beta_g * (1 - 2 * beta_g * dy * dy)) * u(x, y);
    }
    /// d_x u, imposed on the sides x = 0 and x = Lx.
    [[nodiscard]] double g1(double x, double y) const { return -2 * alpha * (x - x0) * u(x, y); }
    /// d_y u, imposed on the sides y = 0 and y = Ly.
    [[nodiscard]] double g2(double x, double y) const { return -2 * beta_g * (y - y0) * u(x, y); }
};

inline Gaussian2DProblem gaussian_2d(double alpha, double beta_g, double x0, double y0) {
    require(alpha > 0.0 && beta_g > 0.0, "gaussian_2d: widths must be positive");
    return {alpha, beta_g, x0, y0};
}

}  // namespace nheat
