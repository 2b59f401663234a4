#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nheat/consistency.hpp"
#include "nheat/errors.hpp"
#include "nheat/exact.hpp"
#include "nheat/grid.hpp"
#include "nheat/scheme1d.hpp"
#include "nheat/scheme2d.hpp"
#include "nheat/spectral.hpp"

namespace nheat {

enum class ExperimentId {
    HomogTrigPoly,
    HomogPolyBump,
    HomogHat,
    Steady1dW,
    Steady1dConst,
    Steady2dCentered,
    Steady2dOffset,
};

enum class Normalization { RelativeToInitial, RelativeToSteady, Absolute };

inline constexpr ExperimentId kAllExperiments[] = {
    ExperimentId::HomogTrigPoly, ExperimentId::HomogPolyBump,    ExperimentId::HomogHat,
    ExperimentId::Steady1dW,     ExperimentId::Steady1dConst,    ExperimentId::Steady2dCentered,
    ExperimentId::Steady2dOffset,
};

inline std::string to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::HomogTrigPoly: return "homog-trigpoly";
        case ExperimentId::HomogPolyBump: return "homog-polybump";
        case ExperimentId::HomogHat: return "homog-hat";
        case ExperimentId::Steady1dW: return "steady1d-w";
        case ExperimentId::Steady1dConst: return "steady1d-const";
        case ExperimentId::Steady2dCentered: return "steady2d-centered";
        case ExperimentId::Steady2dOffset: return "steady2d-offset";
    }
    return "?";
}

inline std::optional<ExperimentId> parse_experiment(std::string_view s) {
    for (ExperimentId id : kAllExperiments)
        if (to_string(id) == s) return id;
    return std::nullopt;
}

inline std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::RelativeToInitial: return "relative-to-initial";
        case Normalization::RelativeToSteady: return "relative-to-steady";
        case Normalization::Absolute: return "absolute";
    }
    return "?";
}

inline std::optional<Normalization> parse_normalization(std::string_view s) {
    for (Normalization n : {Normalization::RelativeToInitial, Normalization::RelativeToSteady, Normalization::Absolute})
        if (to_string(n) == s) return n;
    return std::nullopt;
}

inline bool is_2d(ExperimentId id) {
    return id == ExperimentId::Steady2dCentered || id == ExperimentId::Steady2dOffset;
}

inline bool is_homogeneous(ExperimentId id) {
    return id == ExperimentId::HomogTrigPoly || id == ExperimentId::HomogPolyBump || id == ExperimentId::HomogHat;
}

inline Normalization default_normalization(ExperimentId id) {
    if (is_homogeneous(id)) return Normalization::RelativeToInitial;
    if (is_2d(id)) return Normalization::Absolute;
    return Normalization::RelativeToSteady;
}

/// Interval length used by an experiment unless overridden.
inline double default_length(ExperimentId id) {
    switch (id) {
        case ExperimentId::HomogTrigPoly:
        case ExperimentId::HomogPolyBump: return 1.0;
        case ExperimentId::HomogHat:
        case ExperimentId::Steady1dW:
        case ExperimentId::Steady1dConst:
        case ExperimentId::Steady2dCentered:
        case ExperimentId::Steady2dOffset: return 2.0;
    }
    return 1.0;
}

inline Gaussian2DProblem gaussian_case(ExperimentId id) {
    require(is_2d(id), "gaussian_case: not a 2D experiment");
    return id == ExperimentId::Steady2dCentered ? gaussian_2d(15.0, 5.0, 1.0, 2.0) : gaussian_2d(1.0, 5.0, 0.0, 4.0);
}

struct ExperimentConfig {
    ExperimentId id = ExperimentId::HomogTrigPoly;
    std::vector<long> J;
    double cfl = 0.5;  ///< dt = cfl / sum_d (1/h_d^2); in 1D dt = cfl dx^2
    std::vector<double> checkpoints;
    Normalization normalization = Normalization::RelativeToInitial;
    std::optional<double> L;  ///< homogeneous experiments only
    unsigned threads = 1;

    static ExperimentConfig make(ExperimentId id, std::vector<long> J, std::vector<double> checkpoints) {
        ExperimentConfig c;
        c.id = id;
        c.J = std::move(J);
        c.checkpoints = std::move(checkpoints);
        c.normalization = default_normalization(id);
        return c;
    }

    [[nodiscard]] double length() const { return L.value_or(default_length(id)); }

    void validate() const {
        require(!J.empty(), "ExperimentConfig: empty J list");
        require(!checkpoints.empty(), "ExperimentConfig: empty checkpoint list");
        for (long j : J) require(j >= 2, "ExperimentConfig: every J must be >= 2");
        for (double t : checkpoints) require(std::isfinite(t) && t >= 0.0, "ExperimentConfig: checkpoints must be >= 0");
        require(std::isfinite(cfl) && cfl > 0.0, "ExperimentConfig: cfl must be positive");
        if (cfl > 0.5) throw CflError("ExperimentConfig: cfl ratio above 1/2");
        require(!L || is_homogeneous(id), "ExperimentConfig: L can only be overridden for homogeneous experiments");
        require(!L || *L > 0.0, "ExperimentConfig: L must be positive");
        require(!(is_2d(id) && normalization == Normalization::RelativeToInitial),
                "ExperimentConfig: 2D runs start from zero and cannot be normalized by the initial state");
    }
};

struct ErrorRecord {
    std::string experiment;
    long J = 0;
    double dx = 0.0;
    double dt = 0.0;
    double t_target = 0.0;
    double t_realized = 0.0;
    long long n = 0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double wall_ms = 0.0;
};

inline bool record_less(const ErrorRecord& a, const ErrorRecord& b) {
    if (a.experiment != b.experiment) return a.experiment < b.experiment;
    if (a.J != b.J) return a.J < b.J;
    return a.t_target < b.t_target;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline double normalizer(Normalization n, double initial_norm, double steady_norm) {
    switch (n) {
        case Normalization::RelativeToInitial: return initial_norm;
        case Normalization::RelativeToSteady: return steady_norm;
        case Normalization::Absolute: return 1.0;
    }
    return 1.0;
}

inline InitialDatum homogeneous_datum(ExperimentId id, double L) {
    switch (id) {
        case ExperimentId::HomogTrigPoly: return InitialDatum::trig_poly({1, 1, 5, -1, 2, 1}, L);
        case ExperimentId::HomogPolyBump: return InitialDatum::poly_bump(L);
        default: return InitialDatum::hat(1.0 / 50.0, L);
    }
}

inline std::vector<ErrorRecord> run_homogeneous(const ExperimentConfig& cfg, long J, const std::vector<double>& ts) {
    const auto t0 = Clock::now();
    const Grid1D g(J, cfg.length());
    const InitialDatum u0 = homogeneous_datum(cfg.id, g.L());
    const CosineSeries exact = cosine_coefficients(u0, 0);
    const Field1D v0 = project(g, [&](double x) { return u0.value(x); });
    const double init_norm = norm_l2(v0);
    const double steady_norm = std::fabs(exact.coefficient(0));
    const double dt = cfg.cfl * g.dx() * g.dx();
    RunState st(g, dt, v0);
    std::vector<ErrorRecord> out;
    for (const Checkpoint& c : run_to(st, ts)) {
        const double err = norm_l2(exact.evaluate_nodes(g, c.t_realized) - c.field);
        out.push_back({to_string(cfg.id), J, g.dx(), dt, c.t_target, c.t_realized, c.n, err,
                       err / normalizer(cfg.normalization, init_norm, steady_norm), ms_since(t0)});
    }
    return out;
}

inline std::vector<ErrorRecord> run_steady1d(const ExperimentConfig& cfg, long J, const std::vector<double>& ts) {
    const auto t0 = Clock::now();
    const SteadyState1D s = steady_1d();
    const Grid1D g(J, s.L);
    const Field1D target = project(g, [](double x) { return SteadyState1D::u(x); });
    const double target_mean = mean(target);
    Field1D v0(g, s.mean);
    if (cfg.id == ExperimentId::Steady1dW) {
        const SmoothFunction w = companion_w(s.beta, s.gamma, s.L);
        v0 = project(g, [&](double x) { return s.mean + w(x, 0); });
    }
    const double dt = cfg.cfl * g.dx() * g.dx();
    RunState st(g, dt, v0, build_rhs(piecewise_source_problem(), g).b);
    std::vector<ErrorRecord> out;
    for (Checkpoint& c : run_to(st, ts)) {
        // The steady state is only defined up to a constant: compare with matching means.
        c.field.add_constant(target_mean - mean(c.field));
        const double err = norm_l2(target - c.field);
        out.push_back({to_string(cfg.id), J, g.dx(), dt, c.t_target, c.t_realized, c.n, err,
                       err / normalizer(cfg.normalization, norm_l2(v0), norm_l2(target)), ms_since(t0)});
    }
    return out;
}

inline std::vector<ErrorRecord> run_steady2d(const ExperimentConfig& cfg, long J, const std::vector<double>& ts) {
    const auto t0 = Clock::now();
    const Gaussian2DProblem gp = gaussian_case(cfg.id);
    const Grid2D g = Grid2D::isotropic(J, gp.Lx, gp.Ly);
    const double dt = dt_rule_2d(g, cfg.cfl);
    const Field2D target = project2d(g, [&](double x, double y) { return gp.u(x, y); });
    const double target_mean = mean2d(target);
    const Field2D v0(g, 0.0);
    RunState2D st(g, dt, v0, build_rhs2d(to_problem(gp), g).b);
    std::vector<ErrorRecord> out;
    for (double t : ts) {
        const long long n = checkpoint_step(t, dt);
        require(n >= st.n(), "run_steady2d: checkpoint rounds to a step already passed");
        while (st.n() < n) st.step();
        Field2D v = st.field();
        v.add_constant(target_mean - mean2d(v));
        const double err = norm2d(target - v);
        out.push_back({to_string(cfg.id), J, g.dx(), dt, t, st.time(), st.n(), err,
                       err / normalizer(cfg.normalization, 0.0, norm2d(target)), ms_since(t0)});
    }
    return out;
}

}  // namespace detail

/// Runs one experiment for a single resolution J over all checkpoints.
inline std::vector<ErrorRecord> run_single(const ExperimentConfig& cfg, long J) {
    std::vector<double> ts = cfg.checkpoints;
    std::sort(ts.begin(), ts.end());
    if (is_homogeneous(cfg.id)) return detail::run_homogeneous(cfg, J, ts);
    if (is_2d(cfg.id)) return detail::run_steady2d(cfg, J, ts);
    return detail::run_steady1d(cfg, J, ts);
}

/// All (J, checkpoint) errors of an experiment, sorted by (experiment, J, t_target).
/// Resolutions run concurrently on up to cfg.threads workers.
inline std::vector<ErrorRecord> run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<long> Js = cfg.J;
    std::sort(Js.begin(), Js.end());
    Js.erase(std::unique(Js.begin(), Js.end()), Js.end());
    std::vector<ErrorRecord> out;
    const std::size_t width = std::max(1u, cfg.threads);
    for (std::size_t start = 0; start < Js.size(); start += width) {
        std::vector<std::future<std::vector<ErrorRecord>>> jobs;
        for (std::size_t k = start; k < std::min(Js.size(), start + width); ++k)
            jobs.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred,
                                      [&cfg, J = Js[k]] { return run_single(cfg, J); }));
        for (auto& j : jobs) {
            auto recs = j.get();
            out.insert(out.end(), recs.begin(), recs.end());
        }
    }
    std::stable_sort(out.begin(), out.end(), record_less);
    return out;
}

/// Records whose target time equals t.
inline std::vector<ErrorRecord> at_checkpoint(const std::vector<ErrorRecord>& recs, double t) {
    std::vector<ErrorRecord> out;
    for (const auto& r : recs)
        if (r.t_target == t) out.push_back(r);
    return out;
}

struct SlopeFit {
    std::vector<long> J;
    double slope = 0.0;      ///< error ~ J^-slope
    double intercept = 0.0;  ///< log error at log J = 0
    double residual = 0.0;   ///< root-mean-square of log-space residuals
};

/// Least squares on (log J, log err). All records must share one target time; when Js is given
/// only those resolutions are used.
inline SlopeFit estimate_slope(const std::vector<ErrorRecord>& recs, const std::optional<std::vector<long>>& Js = {}) {
    std::vector<const ErrorRecord*> pts;
    for (const auto& r : recs)
        if (!Js || std::find(Js->begin(), Js->end(), r.J) != Js->end()) pts.push_back(&r);
    require(pts.size() >= 3, "estimate_slope: need at least 3 points");
    for (const auto* r : pts) {
        require(r->t_target == pts.front()->t_target, "estimate_slope: records span several checkpoints");
        require(r->rel_err > 0.0, "estimate_slope: errors must be positive");
    }
    const double m = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto* r : pts) {
        sx += std::log(static_cast<double>(r->J));
        sy += std::log(r->rel_err);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto* r : pts) {
        const double dx = std::log(static_cast<double>(r->J)) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r->rel_err) - my);
    }
    require(sxx > 0.0, "estimate_slope: need at least two distinct J");
    SlopeFit fit;
    const double b = sxy / sxx;
    fit.slope = -b;
    fit.intercept = my - b * mx;
    double ss = 0;
    for (const auto* r : pts) {
        fit.J.push_back(r->J);
        const double e = std::log(r->rel_err) - (fit.intercept + b * std::log(static_cast<double>(r->J)));
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    return fit;
}

// ---- error-decomposition diagnostics ----

/// int_0^1 (1 - s) exp(-a s) ds = sum_k (-a)^k / (k + 2)!
/// The closed form (a + expm1(-a)) / a^2 cancels badly for small a, so |a| < 1 uses the series.
inline double phi_kernel(double a) {
    if (std::fabs(a) < 1.0) {
        double term = 0.5, s = 0.0;
        for (int k = 0; k < 40 && std::fabs(term) > 1e-18; ++k) {
            s += term;
            term *= -a / (k + 3);
        }
        return s;
    }
    return (a + std::expm1(-a)) / (a * a);
}

struct EpsilonNorms {
    double eps1;
    double eps2;
};

/// eps1 = dt L(u(n dt)) and eps2 = int_{n dt}^{(n+1) dt} ((n+1) dt - s) Pi P^2 u(s) ds, both in norm_l2.
/// eps2 is summed mode by mode: alpha_p k^4 e^{-k^2 n dt} dt^2 phi(k^2 dt) Pi c_p, k = p pi / L.
inline EpsilonNorms epsilon_diagnostics(const InitialDatum& u0, const Grid1D& g, double dt, long long n) {
    require(dt > 0.0 && n >= 0, "epsilon_diagnostics: need dt > 0 and n >= 0");
    require(std::fabs(u0.L() - g.L()) <= 1e-14 * g.L(), "epsilon_diagnostics: length mismatch");
    const CosineSeries s = cosine_coefficients(u0, 64);
    const double t = static_cast<double>(n) * dt;
    const double e1 = dt * norm_l2(l_delta(s.at_time(t), g));

    const long P = s.truncation(t, 4);
    Field1D acc(g);
    for (long p = 1; p <= P; ++p) {
        const double a = s.coefficient(p);
        if (a == 0.0) continue;
        const double k2 = std::pow(static_cast<double>(p) * std::numbers::pi / g.L(), 2);
        const double w = a * k2 * k2 * std::exp(-k2 * t) * dt * dt * phi_kernel(k2 * dt);
        for (long j = 0; j < g.J(); ++j) acc[static_cast<std::size_t>(j)] += w * cosine_mode(g.L(), p, g.node(j));
    }
    return {e1, norm_l2(acc)};
}

// ---- appendix bound checks ----

/// dt^2 sum over (k1, k2) in {0..n-1}^2 with k1 + k2 <= 2n - 3 of
/// exp(-p^2 pi^2 (k1 + k2) dt / L^2) / sqrt((2n - 2 - k1 - k2) dt), by direct double summation.
inline double convolution_sum(double L, double dt, long p, long n) {
    require(L > 0.0 && dt > 0.0 && p >= 1 && n >= 1, "convolution_sum: invalid arguments");
    require(n <= 2000, "convolution_sum: n capped at 2000");
    const double a = static_cast<double>(p) * static_cast<double>(p) * std::numbers::pi * std::numbers::pi * dt / (L * L);
    CompensatedSum acc;
    for (long k1 = 0; k1 < n; ++k1)
        for (long k2 = 0; k2 < n; ++k2) {
            const long m = k1 + k2;
            if (2 * n - 2 - m < 1) continue;
            acc.add(std::exp(-a * static_cast<double>(m)) / std::sqrt(static_cast<double>(2 * n - 2 - m) * dt));
        }
    return dt * dt * acc.value();
}

/// Uniform cap for convolution_sum at L = 1. Calibrated from a brute-force sweep over
/// dt in {0.1, 0.01, 0.001}, p in {1, 2, 4}, n in {10, 100, 1000}; the largest value
/// observed there is 0.0196537 (dt = 0.1, p = 1, n = 10).
inline constexpr double kConvolutionCap = 0.02;

/// Explicit constant from the proof of the convolution lemma:
/// (1 / (1 - e^{-pi^2/L^2}))^2 + (8/3) e^{pi^2/L^2} sup_tau tau^{3/2} e^{-pi^2 tau / L^2}.
inline double convolution_proof_constant(double L) {
    const double a = std::numbers::pi * std::numbers::pi / (L * L);
    const double first = 1.0 / (1.0 - std::exp(-a));
    const double tau = 1.5 / a;
    return first * first + 8.0 / 3.0 * std::exp(a) * std::pow(tau, 1.5) * std::exp(-a * tau);
}

struct ConvolutionSample {
    double dt;
    long p;
    long n;
    double value;
};

struct ConvolutionReport {
    std::vector<ConvolutionSample> samples;
    double max_value = 0.0;
    double cap = 0.0;
    bool pass = true;
};

/// Checks convolution_sum against the calibrated cap (L = 1) or the proof constant (other L).
inline ConvolutionReport convolution_bound_check(double L, const std::vector<double>& dts, const std::vector<long>& ps,
                                                 const std::vector<long>& ns) {
    ConvolutionReport rep;
    rep.cap = L == 1.0 ? kConvolutionCap : convolution_proof_constant(L);
    for (double dt : dts)
        for (long p : ps)
            for (long n : ns) {
                const double v = convolution_sum(L, dt, p, n);
                rep.samples.push_back({dt, p, n, v});
                rep.max_value = std::max(rep.max_value, v);
            }
    rep.pass = rep.max_value <= rep.cap;
    return rep;
}

/// A function on [0, L] with its exact squared H^1 norm (1/L) int (v^2 + v'^2).
struct H1Function {
    std::string name;
    std::function<double(double)> v;
    double L;
    double h1_norm_sq;

    static H1Function constant(double c, double L = 1.0) {
        return {"constant", [c](double) { return c; }, L, c * c};
    }
    static H1Function cosine(long p, double L = 1.0) {
        const double k = static_cast<double>(p) * std::numbers::pi / L;
        return {"c" + std::to_string(p), [L, p](double x) { return cosine_mode(L, p, x); }, L,
                p == 0 ? 1.0 : 1.0 + k * k};
    }
    static H1Function identity(double L = 1.0) {
        return {"identity", [](double x) { return x; }, L, L * L / 3.0 + 1.0};
    }
};

struct QuadratureCase {
    long J;
    double lhs;  ///< norm_l2(Pi v)^2
    double rhs;  ///< ((J-1)/J) 2 (1 + dx) ||v||_{H^1}^2
};

struct QuadratureReport {
    std::vector<QuadratureCase> cases;
    double worst_ratio = 0.0;  ///< max lhs / rhs
    bool pass = true;
};

inline QuadratureReport quadrature_inequality_check(const H1Function& v, const std::vector<long>& Js) {
    QuadratureReport rep;
    for (long J : Js) {
        const Grid1D g(J, v.L);
        const double n = norm_l2(project(g, v.v));
        const double Jd = static_cast<double>(J);
        const QuadratureCase c{J, n * n, (Jd - 1.0) / Jd * 2.0 * (1.0 + g.dx()) * v.h1_norm_sq};
        rep.cases.push_back(c);
        rep.worst_ratio = std::max(rep.worst_ratio, c.lhs / c.rhs);
        rep.pass = rep.pass && c.lhs <= c.rhs;
    }
    return rep;
}

// ---- full bound suite ----

struct BoundSuiteConfig {
    std::vector<long> J;  ///< default 2..512
    std::vector<double> cfl{0.5, 0.25, 0.1};
    std::vector<long long> m{1, 10, 100, 1000};
    std::vector<long long> n{1, 100, 1'000'000};
    double L = 1.0;
    double perturb = 0.0;  ///< scales every eigenvalue by (1 + perturb) in the amplification check

    static BoundSuiteConfig defaults() {
        BoundSuiteConfig c;
        for (long J = 2; J <= 512; ++J) c.J.push_back(J);
        return c;
    }
};

struct BoundResult {
    std::string check;
    bool pass = true;
    double worst_margin = 0.0;  ///< bound - value (or 1 - value/bound for ratios), minimum over the sweep
    std::string worst_case{};    ///< parameters of the worst case
};

namespace detail {

inline void track(BoundResult& r, double margin, const std::string& where) {
    if (r.worst_case.empty() || margin < r.worst_margin) {
        r.worst_margin = margin;
        r.worst_case = where;
    }
    if (margin < 0.0) r.pass = false;
}

inline std::string fmt_case(long J, double cfl, const std::string& extra) {
    std::ostringstream os;
    os << "J=" << J << " cfl=" << cfl << ' ' << extra;
    return os.str();
}

}  // namespace detail

/// Amplification, eta-sum, resolvent power sum, kernel sum, convolution and quadrature checks.
inline std::vector<BoundResult> run_bound_suite(const BoundSuiteConfig& cfg) {
    require(!cfg.J.empty() && !cfg.cfl.empty(), "run_bound_suite: empty sweep");
    BoundResult amp{"amplification"}, etas{"eta-sum <= 2L^2"}, res{"resolvent-sum <= 4pi^4L^4/90"},
        ker{"kernel-sum <= L sqrt(pi/(m alpha))"}, quad{"quadrature-inequality"};
    const double L = cfg.L;
    const double res_bound = resolvent_power_sum_bound(L);
    for (long J : cfg.J) {
        const Grid1D g(J, L);
        for (double c : cfg.cfl) {
            const double dt = c * g.dx() * g.dx();
            const auto a = amplification_bound_check(g, dt, 1.0 + cfg.perturb);
            detail::track(amp, a.worst_margin, detail::fmt_case(J, c, "l=" + std::to_string(a.worst_index)));
            for (long long n : cfg.n) {
                detail::track(etas, 2 * L * L - eta_geometric_sum(g, dt, n), detail::fmt_case(J, c, "n=" + std::to_string(n)));
                detail::track(res, res_bound - resolvent_power_sum(g, dt, n), detail::fmt_case(J, c, "n=" + std::to_string(n)));
            }
            for (long long m : cfg.m) {
                const KernelSum k = heat_kernel_spectrum_sum(g, c, m);
                detail::track(ker, k.bound - k.value, detail::fmt_case(J, c, "m=" + std::to_string(m)));
            }
        }
    }
    for (const H1Function& f : {H1Function::constant(1.0, L), H1Function::cosine(1, L), H1Function::identity(L)}) {
        const QuadratureReport q = quadrature_inequality_check(f, cfg.J);
        for (const auto& c : q.cases) detail::track(quad, c.rhs - c.lhs, "J=" + std::to_string(c.J) + " v=" + f.name);
    }
    const ConvolutionReport conv = convolution_bound_check(L, {0.1, 0.01, 0.001}, {1, 2, 4}, {10, 100, 1000});
    BoundResult cv{"convolution-sum <= cap"};
    for (const auto& s : conv.samples) {
        std::ostringstream os;
        os << "dt=" << s.dt << " p=" << s.p << " n=" << s.n;
        detail::track(cv, conv.cap - s.value, os.str());
    }
    return {amp, etas, res, ker, quad, cv};
}

// ---- CSV output ----

inline std::string format_number(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline constexpr std::string_view kCsvHeader = "experiment,J,dx,dt,t_target,t_realized,n,abs_err,rel_err,wall_ms";

inline void write_csv(std::vector<ErrorRecord> recs, std::ostream& os) {
    std::stable_sort(recs.begin(), recs.end(), record_less);
    os << kCsvHeader << '\n';
    for (const auto& r : recs)
        os << r.experiment << ',' << r.J << ',' << format_number(r.dx) << ',' << format_number(r.dt) << ','
           << format_number(r.t_target) << ',' << format_number(r.t_realized) << ',' << r.n << ','
           << format_number(r.abs_err) << ',' << format_number(r.rel_err) << ',' << format_number(r.wall_ms) << '\n';
}

inline void emit_csv(const std::vector<ErrorRecord>& recs, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_csv(recs, os);
    os.flush();
    if (!os) throw IoError("write failed for " + path);
}

/// key=value description of a configuration.
inline std::string meta_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "experiment=" << to_string(cfg.id) << '\n';
    os << "J=";
    for (std::size_t k = 0; k < cfg.J.size(); ++k) os << (k ? "," : "") << cfg.J[k];
    os << "\ncfl=" << format_number(cfg.cfl) << '\n';
    os << "dt_rule=" << (is_2d(cfg.id) ? "cfl/(1/dx^2+1/dy^2)" : "cfl*dx^2") << '\n';
    os << "t=";
    for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) os << (k ? "," : "") << format_number(cfg.checkpoints[k]);
    os << "\nnormalization=" << to_string(cfg.normalization) << '\n';
    os << "L=" << format_number(cfg.length()) << '\n';
    os << "checkpoint_rounding=nearest-step\n";
    return os.str();
}

inline void emit_meta(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << meta_text(cfg);
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace nheat
