#include "lagflow/harness/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagflow::harness {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

ConvergenceStudy convergence_study(const ExperimentConfig& base, const std::vector<double>& dt_list,
                                   double reference_dt) {
    if (dt_list.size() < 3) throw ConfigError("convergence study needs at least 3 time steps");
    for (double dt : dt_list)
        if (!(dt > 0.0)) throw ConfigError("convergence study time steps must be positive");
    const double ratio = dt_list[1] / dt_list[0];
    for (std::size_t i = 1; i < dt_list.size(); ++i)
        if (std::abs(dt_list[i] / dt_list[i - 1] - ratio) > 1e-9 * ratio)
            throw ConfigError("convergence study time steps must be geometrically spaced");
    const double dt_min = *std::min_element(dt_list.begin(), dt_list.end());
    if (!(reference_dt > 0.0 && reference_dt < dt_min / 4.0))
        throw ConfigError("reference dt must be below min(dt_list)/4");

    ConvergenceStudy study;
    study.reference_dt = reference_dt;

    ExperimentConfig ref_cfg = base;
    ref_cfg.scheme = TimeScheme::bdf2;
    ref_cfg.dt = reference_dt;
    ref_cfg.snapshot_times.clear();
    ref_cfg.until_steady = false;
    ref_cfg.filter.enabled = false;
    ref_cfg.output_dir.clear();
    study.runs.push_back(simulate(ref_cfg));
    const RunResult& ref = study.runs.back();
    if (ref.status != RunStatus::ok) {
        study.error = "reference run failed: " + ref.error;
        return study;
    }
    const Vector<double> x_ref = ref.snapshots.back().x;

    for (double dt : dt_list) {
        ExperimentConfig cfg = ref_cfg;
        cfg.scheme = base.scheme;
        cfg.dt = dt;
        RunResult run = simulate(cfg);
        const bool ok = run.status == RunStatus::ok;
        const Vector<double> x = run.snapshots.back().x;
        study.runs.push_back(std::move(run));
        if (!ok) {
            study.error = "run with dt=" + std::to_string(dt) + " failed: " + study.runs.back().error;
            break;
        }
        study.rows.push_back({dt, (x - x_ref).cwiseAbs().maxCoeff()});
    }

    std::vector<double> lx, ly;
    for (const auto& row : study.rows) {
        lx.push_back(std::log(row.dt));
        ly.push_back(std::log(row.error));
    }
    study.slope = least_squares_slope(lx, ly);
    study.monotone = study.rows.size() >= 2;
    for (std::size_t i = 1; i < study.rows.size(); ++i) {
        const bool smaller_dt = study.rows[i].dt < study.rows[i - 1].dt;
        const bool smaller_err = study.rows[i].error < study.rows[i - 1].error;
        if (smaller_dt != smaller_err) study.monotone = false;
    }
    study.complete = study.error.empty();
    return study;
}

SampledComparison compare_sampled(const Vector<double>& xs, const Vector<double>& a, const Vector<double>& b,
                                  double level, double band) {
    if (xs.size() != a.size() || xs.size() != b.size()) throw ShapeError("compare_sampled: size mismatch");
    SampledComparison c;
    c.location_a = interface_metrics(xs, a, level).location;
    c.location_b = interface_metrics(xs, b, level).location;
    c.offset = std::abs(c.location_a - c.location_b);
    c.linf = (a - b).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        if (std::abs(b(i)) > band) c.linf_outside_band = std::max(c.linf_outside_band, std::abs(a(i) - b(i)));
    return c;
}

MethodComparison compare_methods(const ExperimentConfig& lagrangian, const EulerianConfig& eulerian,
                                 const std::vector<double>& times, double band) {
    if (times.empty()) throw ConfigError("compare_methods: no comparison times");
    if (lagrangian.geometry != Geometry::cartesian) throw ConfigError("compare_methods: cartesian geometry only");
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());

    ExperimentConfig cfg = lagrangian;
    cfg.t_end = sorted.back();
    cfg.snapshot_times = sorted;
    cfg.until_steady = false;
    cfg.output_dir.clear();

    EulerianConfig ecfg = eulerian;
    ecfg.domain = cfg.domain();
    ecfg.advection_v = cfg.advection_v.value_or(0.0);

    MethodComparison out;
    out.lagrangian = simulate(cfg);
    const auto profile = cfg.initial_profile();
    std::optional<EulerianSolver<double>> oracle;
    try {
        oracle.emplace(ecfg, cfg.make_potential(), [&](double x) { return profile.value(x); });
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const double level = cfg.level();
    long done = 0;
    for (double t : sorted) {
        const long target = std::llround(t / ecfg.dt);
        while (done < target) {
            oracle->step();
            ++done;
        }
        const auto it = std::find_if(out.lagrangian.snapshots.begin(), out.lagrangian.snapshots.end(),
                                     [&](const Snapshot& s) { return std::abs(s.t - t) <= 0.5 * cfg.dt; });
        if (it == out.lagrangian.snapshots.end()) break;  // the Lagrangian run stopped early
        const Vector<double> fe = oracle->sample(it->sample_x);
        out.rows.push_back({t, compare_sampled(it->sample_x, it->sample_f, fe, level, band)});
    }
    return out;
}

nlohmann::json to_json(const ConvergenceStudy& study) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : study.rows) rows.push_back({{"dt", r.dt}, {"error", r.error}});
    nlohmann::json j{{"reference_dt", study.reference_dt},
                     {"rows", rows},
                     {"monotone", study.monotone},
                     {"complete", study.complete},
                     {"error", study.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(study.error)}};
    j["slope"] = std::isfinite(study.slope) ? nlohmann::json(study.slope) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const MethodComparison& cmp) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : cmp.rows)
        rows.push_back({{"t", r.t},
                        {"lagrangian_location", r.diff.location_a},
                        {"eulerian_location", r.diff.location_b},
                        {"offset", r.diff.offset},
                        {"linf", r.diff.linf},
                        {"linf_outside_band", r.diff.linf_outside_band}});
    return {{"rows", rows}, {"lagrangian", summary_json(cmp.lagrangian)}};
}

}  // namespace lagflow::harness
