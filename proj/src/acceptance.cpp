#include "lagflow/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "lagflow/extensions.hpp"

namespace lagflow::harness {

namespace {

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

/// Bookkeeping for the properties that must hold over every run (criteria 2-4).
struct RunAudit {
    int runs = 0;
    long steps = 0;
    int violations = 0;
    double min_jacobian = std::numeric_limits<double>::infinity();
    int snapshots = 0;
    int max_principle_failures = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::vector<std::string> offenders;

    void add(const RunResult& r, const std::string& label) {
        ++runs;
        steps += r.history.empty() ? 0 : r.history.back().step;
        violations += r.audit_violations;
        if (r.audit_violations > 0) offenders.push_back(label);
        min_jacobian = std::min(min_jacobian, r.min_jacobian);
        for (const auto& s : r.snapshots) {
            ++snapshots;
            worst_excess = std::max(worst_excess, s.max_principle.max_abs - s.max_principle.bound);
            if (!s.max_principle.ok) ++max_principle_failures;
        }
    }
};

class Suite {
public:
    explicit Suite(const AcceptanceOptions& opt) : opt_(opt) {}

    bool wanted(int id) const { return opt_.only.empty() || std::count(opt_.only.begin(), opt_.only.end(), id) > 0; }

    RunResult run(ExperimentConfig cfg, const std::string& label) {
        cfg.output_dir.clear();
        RunResult r = simulate(cfg);
        if (!opt_.output_dir.empty()) write_outputs(r, (std::filesystem::path(opt_.output_dir) / label).string());
        audit_.add(r, label);
        return r;
    }

    void record(const RunResult& r, const std::string& label) { audit_.add(r, label); }

    const RunAudit& audit() const { return audit_; }
    const AcceptanceOptions& options() const { return opt_; }

private:
    const AcceptanceOptions& opt_;
    RunAudit audit_;
};

CriterionResult temporal_order(Suite& suite) {
    CriterionResult c{1, "temporal order", false, "", 0.0};
    ExperimentConfig base;
    base.profile = "linear";
    base.eps2 = 1e-2;
    base.space = SpaceKind::spectral;
    base.N = 64;
    base.t_end = 0.1;
    const std::vector<double> dts{2e-3, 1e-3, 5e-4, 2.5e-4};
    std::string detail;
    bool ok = true;
    for (TimeScheme s : {TimeScheme::bdf1, TimeScheme::bdf2}) {
        base.scheme = s;
        const ConvergenceStudy study = convergence_study(base, dts, 1e-5);
        for (std::size_t k = 0; k < study.runs.size(); ++k)
            suite.record(study.runs[k], "c1_" + to_string(s) + "_run" + std::to_string(k));
        const double lo = s == TimeScheme::bdf1 ? 0.75 : 1.7;
        const double hi = s == TimeScheme::bdf1 ? 1.25 : 2.3;
        const bool pass = study.complete && study.slope >= lo && study.slope <= hi;
        ok = ok && pass;
        detail += format("%s slope=%.3f in [%.2f, %.2f]%s; ", to_string(s).c_str(), study.slope, lo, hi,
                         study.complete ? "" : (" (" + study.error + ")").c_str());
        if (!suite.options().output_dir.empty()) {
            const auto dir = std::filesystem::path(suite.options().output_dir) / ("c1_" + to_string(s));
            std::filesystem::create_directories(dir);
            std::ofstream(dir / "convergence.json") << to_json(study).dump(2) << '\n';
        }
    }
    c.passed = ok;
    c.detail = detail.substr(0, detail.size() - 2);
    return c;
}

CriterionResult eps_independence(Suite& suite) {
    CriterionResult c{5, "eps-independent resolution", false, "", 0.0};
    int passed = 0, total = 0;
    std::string failures;
    for (double eps2 : {1e-3, 1e-4, 1e-5, 1e-6}) {
        for (int N : {8, 16, 32, 64}) {
            ++total;
            ExperimentConfig cfg;
            cfg.space = SpaceKind::fem;
            cfg.scheme = TimeScheme::bdf1;
            cfg.profile = "linear";
            cfg.N = N;
            cfg.eps2 = eps2;
            cfg.dt = 1e-4;
            cfg.t_end = 1.0;
            cfg.until_steady = true;
            const std::string label = format("c5_fem_N%d_eps2_%g", N, eps2);
            const RunResult r = suite.run(cfg, label);
            const Snapshot& last = r.snapshots.back();
            std::string why;
            if (r.status != RunStatus::ok) why = r.error;
            else if (!r.steady) why = "no steady state by t=1";
            else if (!last.interface) why = "no zero crossing";
            else {
                const double loc = last.interface->location;
                const double band = 10.0 * std::sqrt(eps2);
                int inside = 0;
                const Eigen::Index interior = last.x.size() - 2;
                for (Eigen::Index i = 1; i + 1 < last.x.size(); ++i)
                    if (std::abs(last.x(i) - loc) <= band) ++inside;
                if (std::abs(loc) > 2.0 / N) why = format("crossing at %.3g outside 2/N", loc);
                else if (2 * inside < interior)
                    why = format("%d of %ld interior nodes within 10 eps", inside, static_cast<long>(interior));
            }
            if (why.empty()) ++passed;
            else failures += format(" [N=%d eps2=%g: %s]", N, eps2, why.c_str());
        }
    }
    c.passed = passed == total;
    c.detail = format("%d/%d runs steady with crossing |x|<=2/N and half the nodes within 10 eps", passed, total) + failures;
    return c;
}

CriterionResult lagrangian_vs_eulerian(Suite& suite) {
    CriterionResult c{6, "lagrangian vs eulerian", false, "", 0.0};
    ExperimentConfig cfg;
    cfg.space = SpaceKind::spectral;
    cfg.scheme = TimeScheme::bdf2;
    cfg.N = 64;
    cfg.eps2 = 1e-3;
    cfg.dt = 1e-4;
    cfg.profile = "parabola";
    EulerianConfig ecfg;
    ecfg.N = 256;
    ecfg.dt = 1e-4;
    const std::vector<double> times{0.01, 0.05, 0.1};
    const MethodComparison cmp = compare_methods(cfg, ecfg, times);
    suite.record(cmp.lagrangian, "c6_lagrangian");
    if (!suite.options().output_dir.empty()) {
        const auto dir = std::filesystem::path(suite.options().output_dir) / "c6_comparison";
        write_outputs(cmp.lagrangian, dir.string());
        std::ofstream(dir / "comparison.json") << to_json(cmp).dump(2) << '\n';
    }
    const double max_offset = 5.0 * std::sqrt(cfg.eps2);
    bool ok = cmp.rows.size() == times.size();
    std::string detail;
    for (const auto& row : cmp.rows) {
        ok = ok && row.diff.offset < max_offset && row.diff.linf_outside_band < 0.05;
        detail += format("t=%g offset=%.2e linf(|f|>0.95)=%.2e; ", row.t, row.diff.offset, row.diff.linf_outside_band);
    }
    if (cmp.rows.size() != times.size()) detail += "lagrangian run stopped early: " + cmp.lagrangian.error + "; ";
    c.passed = ok;
    c.detail = detail.substr(0, detail.size() - 2);
    return c;
}

CriterionResult filter_efficacy(Suite& suite) {
    CriterionResult c{7, "filter efficacy", false, "", 0.0};
    bool ok = true;
    std::string detail;
    for (double eps2 : {1e-3, 1e-5}) {
        ExperimentConfig cfg;
        cfg.space = SpaceKind::spectral;
        cfg.scheme = TimeScheme::bdf1;
        cfg.N = 16;
        cfg.eps2 = eps2;
        cfg.dt = 1e-4;
        cfg.t_end = 1.0;
        cfg.until_steady = true;
        cfg.filter.enabled = true;
        const RunResult r = suite.run(cfg, format("c7_spectral_N16_eps2_%g", eps2));
        const Snapshot& last = r.snapshots.back();
        if (r.status != RunStatus::ok || !r.steady || !last.filter) {
            ok = false;
            detail += format("eps2=%g: %s; ", eps2, r.status != RunStatus::ok ? r.error.c_str() : "no steady state");
            continue;
        }
        const double tv_raw = total_variation(last.filter->interpolant);
        const double tv_filt = total_variation(last.filter->filtered);
        const double over_raw = last.filter->interpolant.cwiseAbs().maxCoeff() - 1.0;
        const double over_filt = last.filter->filtered.cwiseAbs().maxCoeff() - 1.0;
        ok = ok && tv_filt <= tv_raw && over_filt <= over_raw;
        detail += format("eps2=%g TV %.4f -> %.4f, overshoot %.2e -> %.2e; ", eps2, tv_raw, tv_filt, over_raw, over_filt);
    }
    c.passed = ok;
    c.detail = detail.substr(0, detail.size() - 2);
    return c;
}

CriterionResult axisymmetric(Suite& suite) {
    CriterionResult c{8, "axisymmetric run", false, "", 0.0};
    bool ok = true;
    std::string detail;
    for (int N : {16, 64}) {
        ExperimentConfig cfg;
        cfg.geometry = Geometry::axisymmetric;
        cfg.space = SpaceKind::spectral;
        cfg.scheme = TimeScheme::bdf1;
        cfg.N = N;
        cfg.eps2 = 1e-3;
        cfg.dt = 1e-4;
        cfg.t_end = 0.01;
        cfg.radius = 1.0;
        cfg.profile = "linear";
        const RunResult r = suite.run(cfg, format("c8_axisym_N%d", N));
        bool monotone = true;
        for (std::size_t k = 1; k < r.history.size(); ++k)
            if (r.history[k].E_total > r.history[k - 1].E_total + dissipation_tolerance(r.history[k - 1].E_total))
                monotone = false;
        bool pinned = true;
        for (const auto& s : r.snapshots) pinned = pinned && s.x(s.x.size() - 1) == cfg.radius;
        const bool complete = r.status == RunStatus::ok;
        const bool pass = complete && monotone && pinned && r.min_jacobian > 0.0;
        ok = ok && pass;
        if (complete)
            detail += format("N=%d: %d steps, energy %s, r(h)=h %s, min interior dr/dR=%.3g; ", N,
                             r.history.back().step, monotone ? "monotone" : "NOT monotone", pinned ? "exact" : "off",
                             r.min_jacobian);
        else
            detail += format("N=%d: %s (energy %s over %d accepted steps, r(h)=h %s, min interior dr/dR=%.3g); ", N,
                             r.error.c_str(), monotone ? "monotone" : "NOT monotone", r.history.back().step,
                             pinned ? "exact" : "off", r.min_jacobian);
    }
    c.passed = ok;
    c.detail = detail.substr(0, detail.size() - 2);
    return c;
}

FlowMapState<double> state_of(Vector<double> c) { return {std::move(c), 0.0, std::nullopt}; }

Vector<double> random_admissible(const TrajectoryModel<double>& model, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector<double> c(model.disc().dofs());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = u(rng);
    while (!(detail::admissible(model, c) && model.min_jacobian(c) >= 0.5)) c *= 0.5;
    return c;
}

/// max |fd - K d| / max |K d| over 20 random states.
template <typename ResidualFn, typename TangentFn>
double worst_tangent_error(const TrajectoryModel<double>& model, std::mt19937& rng, ResidualFn&& G, TangentFn&& K) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Vector<double> c = random_admissible(model, rng);
        const Vector<double> prev = random_admissible(model, rng);
        const Vector<double> older = random_admissible(model, rng);
        Vector<double> d(c.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = u(rng);
        d /= d.cwiseAbs().maxCoeff();
        double h = 1e-6;
        while (!(detail::admissible(model, Vector<double>(c + h * d)) && detail::admissible(model, Vector<double>(c - h * d))))
            h *= 0.5;
        const Vector<double> fd = (G(Vector<double>(c + h * d), prev, older) - G(Vector<double>(c - h * d), prev, older)) / (2.0 * h);
        const Vector<double> an = K(c, prev, older) * d;
        const double scale = std::max(an.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

CriterionResult solver_properties() {
    CriterionResult c{9, "solver properties", false, "", 0.0};
    std::mt19937 rng(20240917u);
    const double dt = 1e-3;
    double worst = 0.0;
    std::string per;

    const auto dw = Potential<double>::double_well(1e-2);
    const auto lin = InitialProfile<double>::linear();
    const auto par = InitialProfile<double>::parabola();
    const Domain1D<double> half(0.0, 1.0);
    struct Case {
        std::string name;
        TrajectoryModel<double> model;
        int kind;  // 0 bdf1, 1 advection, 2 bdf2
    };
    std::vector<Case> cases;
    cases.push_back({"bdf1/fem", TrajectoryModel<double>(Discretization<double>::fem_uniform(16), lin, dw), 0});
    cases.push_back({"bdf1/spectral", TrajectoryModel<double>(Discretization<double>::spectral(16), par, dw), 0});
    cases.push_back({"advection/spectral", TrajectoryModel<double>(Discretization<double>::spectral(16), lin, dw), 1});
    cases.push_back({"bdf2/fem", TrajectoryModel<double>(Discretization<double>::fem_uniform(16), lin, dw), 2});
    cases.push_back({"bdf2/spectral", TrajectoryModel<double>(Discretization<double>::spectral(16), lin, dw), 2});
    cases.push_back({"axisym/spectral",
                     make_axisymmetric_model(Discretization<double>::spectral(16, half), lin.on(half), dw), 0});
    cases.push_back({"axisym/fem", make_axisymmetric_model(Discretization<double>::fem_uniform(16, half), lin.on(half), dw), 0});

    for (const Case& k : cases) {
        const auto& m = k.model;
        double err = 0.0;
        if (k.kind == 0) {
            err = worst_tangent_error(
                m, rng,
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>&) {
                    return residual_weak_bdf1(m, state_of(x), state_of(p), dt);
                },
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>&) {
                    return tangent_bdf1(m, state_of(x), state_of(p), dt);
                });
        } else if (k.kind == 1) {
            err = worst_tangent_error(
                m, rng,
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>&) {
                    return residual_advection_bdf1(m, state_of(x), state_of(p), AdvectionField{1.0}, dt);
                },
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>&) {
                    return tangent_bdf1(m, state_of(x), state_of(p), dt);
                });
        } else {
            auto current = [&](const Vector<double>& p, const Vector<double>& o) {
                return FlowMapState<double>{p, 0.0, o};
            };
            auto star = [&](const Vector<double>& p, const Vector<double>& o) {
                return jacobian_star(m.disc().jacobian_at_quadrature(p), m.disc().jacobian_at_quadrature(o));
            };
            err = worst_tangent_error(
                m, rng,
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>& o) {
                    return residual_weak_bdf2(m, state_of(x), current(p, o), star(p, o), dt);
                },
                [&](const Vector<double>& x, const Vector<double>& p, const Vector<double>& o) {
                    return tangent_bdf2(m, state_of(x), current(p, o), star(p, o), dt);
                });
        }
        worst = std::max(worst, err);
        per += format("%s %.1e, ", k.name.c_str(), err);
    }
    const bool tangent_ok = worst <= 1e-5;

    // 2(3a - 4b + c, a) = |a|^2 - |b|^2 + |2a - b|^2 - |2b - c|^2 + |a - 2b + c|^2
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 2.0);
    double identity_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Vector<double> a(8), b(8), cc(8), w(8);
        for (int i = 0; i < 8; ++i) {
            a(i) = u(rng);
            b(i) = u(rng);
            cc(i) = u(rng);
            w(i) = pos(rng);
        }
        auto ip = [&](const Vector<double>& p, const Vector<double>& q) { return w.dot(p.cwiseProduct(q)); };
        const Vector<double> t1 = 3.0 * a - 4.0 * b + cc, t2 = 2.0 * a - b, t3 = 2.0 * b - cc, t4 = a - 2.0 * b + cc;
        const double lhs = 2.0 * ip(t1, a);
        const double rhs = ip(a, a) - ip(b, b) + ip(t2, t2) - ip(t3, t3) + ip(t4, t4);
        const double scale = 1.0 + ip(a, a) + ip(b, b) + ip(t2, t2) + ip(t3, t3) + ip(t4, t4);
        identity_worst = std::max(identity_worst, std::abs(lhs - rhs) / scale);
    }
    const bool identity_ok = identity_worst <= 1e-12;

    std::uniform_real_distribution<double> expo(-6.0, 6.0);
    int star_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Vector<double> dn(1), dnm1(1);
        dn(0) = std::pow(10.0, expo(rng));
        dnm1(0) = std::pow(10.0, expo(rng));
        const double s = jacobian_star(dn, dnm1)(0);
        if (!(s > 0.0) || !std::isfinite(s)) ++star_bad;
    }
    const bool star_ok = star_bad == 0;

    c.passed = tangent_ok && identity_ok && star_ok;
    c.detail = format("tangent vs finite differences worst %.2e (", worst) + per.substr(0, per.size() - 2) +
               format("); bdf2 identity worst %.1e; jacobian_star nonpositive %d/1000", identity_worst, star_bad);
    return c;
}

CriterionResult oracle_reductions() {
    CriterionResult c{10, "oracle reductions", false, "", 0.0};
    std::mt19937 rng(777u);
    const auto dw = Potential<double>::double_well(1e-3);
    const auto lin = InitialProfile<double>::linear();
    int mismatches = 0, compared = 0;
    for (const auto& disc : {Discretization<double>::fem_uniform(16), Discretization<double>::spectral(16)}) {
        TrajectoryModel<double> m(disc, lin, dw);
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = state_of(random_admissible(m, rng));
            const auto p = state_of(random_admissible(m, rng));
            const Vector<double> base = residual_weak_bdf1(m, x, p, 1e-3);
            const Vector<double> adv = residual_advection_bdf1(m, x, p, AdvectionField{0.0}, 1e-3);
            ++compared;
            for (Eigen::Index i = 0; i < base.size(); ++i)
                if (std::memcmp(&base(i), &adv(i), sizeof(double)) != 0) {
                    ++mismatches;
                    break;
                }
        }
    }

    double drift = 0.0;
    for (const auto& disc : {Discretization<double>::fem_uniform(16), Discretization<double>::spectral(16)}) {
        for (TimeScheme s : {TimeScheme::bdf1, TimeScheme::bdf2}) {
            SchemeConfig cfg;
            cfg.scheme = s;
            cfg.dt = 1e-3;
            TrajectorySolver<double> solver(TrajectoryModel<double>(disc, lin, Potential<double>::none()), cfg);
            for (int k = 0; k < 100; ++k) solver.step();
            drift = std::max(drift, (disc.nodal_positions(solver.state().coeffs) - disc.nodes()).cwiseAbs().maxCoeff());
        }
    }
    c.passed = mismatches == 0 && drift <= 1e-14;
    c.detail = format("v=0 advection residual bit-identical on %d/%d states; identity drift after 100 steps %.1e",
                      compared - mismatches, compared, drift);
    return c;
}

template <typename Fn>
CriterionResult timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = fn();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

bool AcceptanceReport::all_passed() const {
    return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string format_result(const CriterionResult& r) {
    return format("%s %2d  %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
    Suite suite(options);
    AcceptanceReport report;
    auto add = [&](int id, const char* name, auto&& fn) {
        if (!suite.wanted(id)) return;
        CriterionResult r = timed(fn);
        r.id = id;
        r.name = name;
        if (options.progress) options.progress(r);
        report.results.push_back(std::move(r));
    };
    add(1, "temporal order", [&] { return temporal_order(suite); });
    add(5, "eps-independent resolution", [&] { return eps_independence(suite); });
    add(6, "lagrangian vs eulerian", [&] { return lagrangian_vs_eulerian(suite); });
    add(7, "filter efficacy", [&] { return filter_efficacy(suite); });
    add(8, "axisymmetric run", [&] { return axisymmetric(suite); });
    add(9, "solver properties", [] { return solver_properties(); });
    add(10, "oracle reductions", [] { return oracle_reductions(); });

    const RunAudit& a = suite.audit();
    add(2, "discrete energy law", [&] {
        CriterionResult c;
        c.passed = a.runs > 0 && a.violations == 0;
        c.detail = format("%d violations over %ld steps in %d runs", a.violations, a.steps, a.runs);
        if (!a.offenders.empty()) c.detail += " (first: " + a.offenders.front() + ")";
        return c;
    });
    add(3, "jacobian positivity", [&] {
        CriterionResult c;
        c.passed = a.runs > 0 && a.min_jacobian > 0.0;
        c.detail = format("min dx/dX over accepted steps of %d runs = %.3g", a.runs, a.min_jacobian);
        return c;
    });
    add(4, "maximum principle", [&] {
        CriterionResult c;
        c.passed = a.snapshots > 0 && a.max_principle_failures == 0;
        c.detail = format("%d/%d snapshots within max|f0| + 1e-12 (worst max|f| - max|f0| = %.2e)",
                          a.snapshots - a.max_principle_failures, a.snapshots, a.worst_excess);
        return c;
    });

    std::sort(report.results.begin(), report.results.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
    if (!options.output_dir.empty()) {
        std::filesystem::create_directories(options.output_dir);
        std::ofstream(std::filesystem::path(options.output_dir) / "report.json") << to_json(report).dump(2) << '\n';
    }
    return report;
}

nlohmann::json to_json(const AcceptanceReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.results)
        rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    return {{"all_passed", report.all_passed()}, {"criteria", rows}};
}

}  // namespace lagflow::harness
