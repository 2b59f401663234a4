#pragma once

// Command-line front end. Kept in a header so the tests can drive it in-process;
// tools/heatlab.cpp is a thin main().

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nheat/errors.hpp"
#include "nheat/exact.hpp"
#include "nheat/harness.hpp"
#include "nheat/scheme1d.hpp"
#include "nheat/scheme2d.hpp"
#include "nheat/spectral.hpp"

namespace nheat::cli {

enum ExitCode : int {
    kOk = 0,
    kBoundFailure = 1,
    kFlagError = 2,
    kCflViolation = 3,
    kIoError = 4,
    kIncompatible = 5,
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

inline long parse_long(const std::string& s) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ContractError("not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw ContractError("not an integer: '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ContractError("not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw ContractError("not a number: '" + s + "'");
    return v;
}

}  // namespace detail

/// "17,33,65", "2..512" or a mix such as "2..5,9".
inline std::vector<long> parse_J_list(const std::string& text) {
    std::vector<long> out;
    for (const std::string& item : detail::split(text, ',')) {
        require(!item.empty(), "empty entry in J list");
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::parse_long(item));
            continue;
        }
        const long a = detail::parse_long(item.substr(0, dots));
        const long b = detail::parse_long(item.substr(dots + 2));
        require(a <= b, "empty J range '" + item + "'");
        require(b - a <= 10'000'000, "J range too long");
        for (long J = a; J <= b; ++J) out.push_back(J);
    }
    require(!out.empty(), "empty J list");
    for (long J : out) require(J >= 2, "J must be >= 2");
    return out;
}

inline std::vector<double> parse_time_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : detail::split(text, ',')) {
        require(!item.empty(), "empty entry in time list");
        const double t = detail::parse_double(item);
        require(t >= 0.0, "times must be >= 0");
        out.push_back(t);
    }
    require(!out.empty(), "empty time list");
    return out;
}

/// key=value lines; blank lines and lines starting with '#' are ignored. Keys may carry a leading "--".
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ContractError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = detail::trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        require(!key.empty(), path + ":" + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, detail::trim(t.substr(eq + 1)));
    }
    return out;
}

/// Appends config entries as flags unless the same flag was given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args,
                                             const std::vector<std::pair<std::string, std::string>>& cfg) {
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> extra;
    for (const auto& [k, v] : cfg) {
        if (k == "config" || given(k)) continue;
        extra.push_back("--" + k);
        extra.push_back(v);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

namespace detail {

struct Common {
    std::string J;
    std::optional<double> L;
    std::optional<double> cfl;
    std::string t;
    std::string out;
    std::string config;
    unsigned threads = 1;
};

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--J", c.J, "resolutions: comma list and/or a..b ranges");
    sub->add_option("--L", c.L, "interval length");
    sub->add_option("--cfl", c.cfl, "ratio dt/dx^2 in (0, 0.5]");
    sub->add_option("--t", c.t, "checkpoint times, comma separated");
    sub->add_option("--out", c.out, "output CSV path (standard output when absent)");
    sub->add_option("--config", c.config, "key=value file; command-line flags take precedence");
    sub->add_option("--threads", c.threads, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));
}

inline double checked_cfl(const std::optional<double>& cfl) {
    const double c = cfl.value_or(0.5);
    require(std::isfinite(c) && c > 0.0, "--cfl must be positive");
    if (c > 0.5) throw CflError("--cfl " + format_number(c) + " violates dt/dx^2 <= 1/2");
    return c;
}

/// Writes CSV to path, or to out when path is empty.
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty()) {
        fn(out);
        return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    fn(os);
    os.flush();
    if (!os) throw IoError("write failed for " + path);
}

inline void print_slopes(const std::vector<ErrorRecord>& recs, const std::vector<double>& ts, std::ostream& os) {
    std::vector<double> uniq = ts;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    os << "t_target  points  slope     residual\n";
    for (double t : uniq) {
        const auto sel = at_checkpoint(recs, t);
        os << std::left << std::setw(10) << format_number(t) << std::setw(8) << sel.size();
        if (sel.size() < 3) {
            os << "-         (need >= 3 resolutions)\n";
            continue;
        }
        const SlopeFit f = estimate_slope(sel);
        os << std::setw(10) << std::setprecision(4) << std::fixed << f.slope << std::setprecision(3)
           << std::scientific << f.residual << std::defaultfloat << '\n';
    }
}

inline int run_experiment(ExperimentConfig cfg, const Common& c, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const auto recs = run_convergence(cfg);
    with_output(c.out, out, [&](std::ostream& os) { write_csv(recs, os); });
    if (!c.out.empty()) emit_meta(cfg, c.out + ".meta");
    print_slopes(recs, cfg.checkpoints, c.out.empty() ? err : out);
    return kOk;
}

}  // namespace detail

/// Runs the command line given as a vector of arguments (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Explicit finite differences for the heat equation with Neumann boundary conditions"};
    app.require_subcommand(1);
    detail::Common c;

    // homog
    auto* homog = app.add_subcommand("homog", "homogeneous problem: convergence of v^n to Pi u(n dt)");
    std::string datum;
    homog->add_option("--datum", datum, "initial datum")->required()->check(CLI::IsMember({"trigpoly", "polybump", "hat"}));
    detail::add_common(homog, c);

    // steady1d
    auto* s1 = app.add_subcommand("steady1d", "one-dimensional stationary Neumann problem");
    std::string problem = "sec52", solver = "iterate", init = "const";
    std::optional<double> shift, beta, gamma;
    double tol = 1e-10;
    long long max_steps = 200'000'000;
    s1->add_option("--problem", problem, "problem id")->check(CLI::IsMember({"sec52"}));
    s1->add_option("--solver", solver, "iterate | laplace")->check(CLI::IsMember({"iterate", "laplace"}));
    s1->add_option("--s", shift, "Laplace shift s > 0");
    s1->add_option("--tol", tol, "residual tolerance for the iterative solver");
    s1->add_option("--max-steps", max_steps, "iteration cap for the iterative solver");
    s1->add_option("--beta", beta, "override the left flux");
    s1->add_option("--gamma", gamma, "override the right flux");
    s1->add_option("--init", init, "time-stepping start: const (mean value) or w (mean + companion)")
        ->check(CLI::IsMember({"const", "w"}));
    detail::add_common(s1, c);

    // steady2d
    auto* s2 = app.add_subcommand("steady2d", "two-dimensional Gaussian steady state on (0,2)x(0,4)");
    std::string gcase = "centered";
    s2->add_option("--case", gcase, "centered | offset")->check(CLI::IsMember({"centered", "offset"}));
    s2->add_option("--tol", tol, "residual tolerance when no --t is given");
    s2->add_option("--max-steps", max_steps, "iteration cap");
    detail::add_common(s2, c);

    // spectra
    auto* sp = app.add_subcommand("spectra", "eigenvalues and amplification factors of P");
    std::optional<double> dt_flag;
    sp->add_option("--dt", dt_flag, "time step (default cfl * dx^2)");
    detail::add_common(sp, c);

    // bounds
    auto* bd = app.add_subcommand("bounds", "numerical verification of the spectral and quadrature bounds");
    double perturb = 0.0;
    bd->add_option("--perturb", perturb, "testing only: scale eigenvalues by (1 + perturb)");
    detail::add_common(bd, c);

    // sweep
    auto* sw = app.add_subcommand("sweep", "any experiment over a J list and checkpoint list");
    std::string experiment;
    std::string normalization;
    sw->add_option("--experiment", experiment, "experiment id")->required();
    sw->add_option("--normalization", normalization, "relative-to-initial | relative-to-steady | absolute");
    detail::add_common(sw, c);

    try {
        if (!args.empty()) {
            auto it = std::find(args.begin(), args.end(), "--config");
            std::string cfg_path;
            if (it != args.end() && it + 1 != args.end()) cfg_path = *(it + 1);
            for (const auto& a : args)
                if (a.rfind("--config=", 0) == 0) cfg_path = a.substr(9);
            if (!cfg_path.empty()) args = merge_config(args, read_config(cfg_path));
        }
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kFlagError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kFlagError;
    }

    try {
        if (homog->parsed()) {
            require(!c.J.empty() && !c.t.empty(), "homog requires --J and --t");
            const ExperimentId id = datum == "trigpoly" ? ExperimentId::HomogTrigPoly
                                  : datum == "polybump" ? ExperimentId::HomogPolyBump
                                                        : ExperimentId::HomogHat;
            auto cfg = ExperimentConfig::make(id, parse_J_list(c.J), parse_time_list(c.t));
            cfg.cfl = detail::checked_cfl(c.cfl);
            cfg.L = c.L;
            cfg.threads = c.threads;
            return detail::run_experiment(cfg, c, out, err);
        }

        if (sw->parsed()) {
            const auto id = parse_experiment(experiment);
            require(id.has_value(), "unknown experiment '" + experiment + "'");
            require(!c.J.empty() && !c.t.empty(), "sweep requires --J and --t");
            auto cfg = ExperimentConfig::make(*id, parse_J_list(c.J), parse_time_list(c.t));
            cfg.cfl = detail::checked_cfl(c.cfl);
            cfg.L = c.L;
            cfg.threads = c.threads;
            if (!normalization.empty()) {
                const auto n = parse_normalization(normalization);
                require(n.has_value(), "unknown normalization '" + normalization + "'");
                cfg.normalization = *n;
            }
            return detail::run_experiment(cfg, c, out, err);
        }

        if (s1->parsed()) {
            const double cfl = detail::checked_cfl(c.cfl);
            require(!c.L, "steady1d: --L is fixed by the problem");
            if (!c.t.empty()) {
                require(solver == "iterate" && !shift, "steady1d: --t runs the time-stepping experiment; drop --solver/--s");
                require(!beta && !gamma, "steady1d: flux overrides are only available for steady solves");
                require(!c.J.empty(), "steady1d requires --J");
                auto cfg = ExperimentConfig::make(init == "w" ? ExperimentId::Steady1dW : ExperimentId::Steady1dConst,
                                                  parse_J_list(c.J), parse_time_list(c.t));
                cfg.cfl = cfl;
                cfg.threads = c.threads;
                return detail::run_experiment(cfg, c, out, err);
            }
            require(!c.J.empty(), "steady1d requires --J");
            const auto Js = parse_J_list(c.J);
            require(Js.size() == 1, "steady1d solves take a single --J");
            require(solver == "laplace" || !shift, "--s only applies to --solver laplace");
            require(solver != "laplace" || shift.has_value(), "--solver laplace requires --s");
            require(tol > 0.0, "--tol must be positive");

            NonhomogProblem p = piecewise_source_problem();
            if (beta) p.beta = *beta;
            if (gamma) p.gamma = *gamma;
            const double compat = check_compatibility(p);
            if (std::fabs(compat) > 1e-8) {
                err << "error: incompatible data, gamma - beta + int f = " << format_number(compat) << '\n';
                return kIncompatible;
            }
            const Grid1D g(Js.front(), p.L);
            const SteadyState1D exact = steady_1d();
            const Field1D target = project(g, [](double x) { return SteadyState1D::u(x); });
            const DiscreteRHS rhs = build_rhs(p, g);
            const NeumannLaplacian1D op(g);
            Field1D v(g);
            std::ostringstream rep;
            rep << std::setprecision(17);
            if (solver == "iterate") {
                const double dt = cfl * g.dx() * g.dx();
                SteadyResult r = solve_steady_iterative(rhs, dt, Field1D(g, exact.mean), tol, max_steps);
                v = r.v;
                rep << "solver=iterate\nconverged=" << (r.converged ? "true" : "false") << "\niterations=" << r.iterations
                    << "\nresidual=" << r.residual << '\n';
            } else {
                require(*shift > 0.0, "--s must be positive");
                v = solve_shifted(rhs.b, *shift);
                Field1D res = op.apply(v);
                res *= -1.0;
                Field1D sv = *shift * v;
                res += sv;
                res -= rhs.b;
                rep << "solver=laplace\ns=" << *shift << "\nresidual=" << norm_l2(res) << '\n';
            }
            rep << "J=" << g.J() << "\nmean=" << mean(v) << '\n';
            Field1D shifted = v;
            shifted.add_constant(mean(target) - mean(v));
            const double e = norm_l2(target - shifted);
            rep << "abs_err=" << e << "\nrel_err=" << e / norm_l2(target) << '\n';
            if (!c.out.empty()) {
                detail::with_output(c.out, out, [&](std::ostream& os) {
                    os << "j,x,v,u_exact\n";
                    for (long j = 0; j < g.J(); ++j)
                        os << j << ',' << format_number(g.node(j)) << ',' << format_number(v[static_cast<std::size_t>(j)])
                           << ',' << format_number(target[static_cast<std::size_t>(j)]) << '\n';
                });
            }
            out << rep.str();
            return kOk;
        }

        if (s2->parsed()) {
            require(!c.L, "steady2d: the domain is fixed");
            require(!c.J.empty(), "steady2d requires --J");
            const double cfl = detail::checked_cfl(c.cfl);
            const ExperimentId id = gcase == "centered" ? ExperimentId::Steady2dCentered : ExperimentId::Steady2dOffset;
            if (!c.t.empty()) {
                auto cfg = ExperimentConfig::make(id, parse_J_list(c.J), parse_time_list(c.t));
                cfg.cfl = cfl;
                cfg.threads = c.threads;
                return detail::run_experiment(cfg, c, out, err);
            }
            const auto Js = parse_J_list(c.J);
            require(Js.size() == 1, "steady2d solves take a single --J");
            const Gaussian2DProblem gp = gaussian_case(id);
            const Grid2D g = Grid2D::isotropic(Js.front(), gp.Lx, gp.Ly);
            const double dt = dt_rule_2d(g, cfl);
            const auto r = solve_steady_2d(to_problem(gp), g, dt, Field2D(g), tol, max_steps);
            const Field2D target = project2d(g, [&](double x, double y) { return gp.u(x, y); });
            Field2D v = r.v;
            v.add_constant(mean2d(target) - mean2d(v));
            out << std::setprecision(17) << "case=" << gcase << "\nJx=" << g.Jx() << "\nJy=" << g.Jy()
                << "\nconverged=" << (r.converged ? "true" : "false") << "\niterations=" << r.iterations
                << "\nresidual=" << r.residual << "\nabs_err=" << norm2d(target - v) << '\n';
            return kOk;
        }

        if (sp->parsed()) {
            require(!c.J.empty(), "spectra requires --J");
            const auto Js = parse_J_list(c.J);
            require(Js.size() == 1, "spectra takes a single --J");
            require(!(dt_flag && c.cfl), "give either --dt or --cfl, not both");
            const Grid1D g(Js.front(), c.L.value_or(1.0));
            double dt = 0.0;
            if (dt_flag) {
                require(*dt_flag > 0.0, "--dt must be positive");
                dt = *dt_flag;
            } else {
                dt = detail::checked_cfl(c.cfl) * g.dx() * g.dx();
            }
            const double ratio = dt / (g.dx() * g.dx());
            detail::with_output(c.out, out, [&](std::ostream& os) {
                os << "l,lambda,amplification,bound\n";
                for (long l = 0; l < g.J(); ++l) {
                    const double lam = eigenvalue(g, l);
                    const double s = std::sin(static_cast<double>(l) * std::numbers::pi / static_cast<double>(g.J()));
                    os << l << ',' << format_number(lam) << ',' << format_number(1.0 + dt * lam) << ','
                       << format_number(std::exp(-ratio * s * s)) << '\n';
                }
            });
            if (!cfl_ok(g, dt)) err << "warning: dt/dx^2 = " << format_number(ratio) << " exceeds 1/2\n";
            return kOk;
        }

        if (bd->parsed()) {
            BoundSuiteConfig cfg = BoundSuiteConfig::defaults();
            if (!c.J.empty()) cfg.J = parse_J_list(c.J);
            if (c.cfl) cfg.cfl = {detail::checked_cfl(c.cfl)};
            if (c.L) {
                require(*c.L > 0.0, "--L must be positive");
                cfg.L = *c.L;
            }
            require(std::isfinite(perturb), "--perturb must be finite");
            cfg.perturb = perturb;
            const auto results = run_bound_suite(cfg);
            bool ok = true;
            std::ostream& os = out;
            for (const auto& r : results) {
                os << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(38) << r.check << " worst margin "
                   << std::setprecision(6) << std::scientific << r.worst_margin << std::defaultfloat << " at "
                   << r.worst_case << '\n';
                ok = ok && r.pass;
            }
            return ok ? kOk : kBoundFailure;
        }
    } catch (const CflError& e) {
        err << "error: " << e.what() << '\n';
        return kCflViolation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const IncompatibleProblemError& e) {
        err << "error: " << e.what() << '\n';
        return kIncompatible;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kFlagError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBoundFailure;
    }
    return kFlagError;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace nheat::cli
