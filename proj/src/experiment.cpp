#include "lagflow/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace lagflow::harness {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool energy_law_applies(const ExperimentConfig& cfg) { return !cfg.advection_v || *cfg.advection_v == 0.0; }

Snapshot take_snapshot(const ExperimentConfig& cfg, const TrajectoryModel<double>& model,
                       const FlowMapState<double>& state, int step, double t) {
    const auto& disc = model.disc();
    const auto& profile = model.profile();
    Snapshot s;
    s.t = t;
    s.step = step;
    s.X = disc.nodes();
    s.x = disc.nodal_positions(state.coeffs);
    s.f.resize(s.X.size());
    for (Eigen::Index i = 0; i < s.X.size(); ++i) s.f(i) = profile.value(s.X(i));
    const auto dom = disc.domain();
    s.sample_x = Vector<double>::LinSpaced(cfg.samples, dom.left(), dom.right());
    s.sample_x(cfg.samples - 1) = dom.right();
    s.sample_f = reconstruct(disc, state, profile, s.sample_x);
    s.max_principle = max_principle_check(disc, state, profile, cfg.samples);
    try {
        s.interface = interface_metrics(s.sample_x, s.sample_f, cfg.level());
    } catch (const NoInterfaceError&) {
        s.interface.reset();
    }
    if (cfg.filter.enabled)
        s.filter = filter_reconstruction(disc, state, profile, s.sample_x, cfg.N,
                                         cfg.filter.strength.value_or(default_filter_strength<double>()),
                                         cfg.filter.exponent);
    return s;
}

HistoryRow initial_row(const TrajectoryModel<double>& model, const FlowMapState<double>& state) {
    const auto e = energy(model, state);
    HistoryRow row;
    row.E_total = e.total;
    row.E_grad = e.gradient_part;
    row.E_pot = e.potential_part;
    row.min_jacobian = model.min_jacobian(state.coeffs);
    return row;
}

double max_abs(const Vector<double>& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

std::string to_string(RunStatus s) { return s == RunStatus::ok ? "ok" : "solver_failure"; }

RunResult simulate(const ExperimentConfig& cfg) {
    cfg.validate();
    RunResult out;
    out.config = cfg;
    std::optional<TrajectorySolver<double>> solver;
    try {
        solver.emplace(cfg.model(), cfg.scheme_config());
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const auto& model = solver->model();

    const long total = std::llround(cfg.t_end / cfg.dt);
    std::vector<long> marks;
    for (double t : cfg.snapshot_schedule()) marks.push_back(std::llround(t / cfg.dt));
    auto marked = [&](long s) { return std::find(marks.begin(), marks.end(), s) != marks.end(); };

    out.history.push_back(initial_row(model, solver->state()));
    out.min_jacobian = out.history.front().min_jacobian;
    out.snapshots.push_back(take_snapshot(cfg, model, solver->state(), 0, 0.0));

    const bool audited = energy_law_applies(cfg);
    int calm = 0;
    long last = 0;
    for (long s = 1; s <= total; ++s) {
        StepRecord<double> rec;
        try {
            rec = solver->step();
        } catch (const Error& e) {
            out.status = RunStatus::solver_failure;
            out.failed_step = static_cast<int>(s);
            out.error = "step " + std::to_string(s) + ": " + e.what();
            break;
        }
        last = s;
        HistoryRow row;
        row.step = rec.step;
        row.t = rec.time;
        row.E_total = rec.energy.total;
        row.E_grad = rec.energy.gradient_part;
        row.E_pot = rec.energy.potential_part;
        row.E_aug = rec.energy.bdf2_augmentation;
        row.slack = rec.slack;
        row.newton_iters = rec.newton.iterations;
        row.audit_ok = rec.audit_ok;
        row.min_jacobian = rec.min_jacobian;
        out.history.push_back(row);
        if (audited && !rec.audit_ok) ++out.audit_violations;
        out.min_jacobian = std::min(out.min_jacobian, row.min_jacobian);
        out.max_newton_iters = std::max(out.max_newton_iters, row.newton_iters);

        calm = rec.max_displacement < steady_displacement ? calm + 1 : 0;
        if (calm >= steady_window && !out.steady) {
            out.steady = true;
            out.steady_step = rec.step;
        }
        const bool stop = cfg.until_steady && out.steady;
        if (marked(s) || stop) out.snapshots.push_back(take_snapshot(cfg, model, solver->state(), rec.step, rec.time));
        if (stop) break;
    }
    if (out.status == RunStatus::solver_failure && last > 0 && out.snapshots.back().step != last)
        out.snapshots.push_back(take_snapshot(cfg, model, solver->state(), static_cast<int>(last),
                                              static_cast<double>(solver->state().time)));
    out.final_state = solver->state();
    return out;
}

nlohmann::json summary_json(const RunResult& r) {
    nlohmann::json j;
    j["config"] = to_json(r.config);
    j["status"] = to_string(r.status);
    j["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
    j["failed_step"] = r.failed_step;
    j["steps"] = r.history.empty() ? 0 : r.history.back().step;
    j["final_time"] = r.history.empty() ? 0.0 : r.history.back().t;
    j["steady"] = r.steady;
    j["steady_step"] = r.steady ? nlohmann::json(r.steady_step) : nlohmann::json(nullptr);
    j["energy_law"] = !energy_law_applies(r.config) ? "not_enforced"
                      : r.audit_violations == 0      ? "satisfied"
                                                     : "violated";
    j["audit_violations"] = r.audit_violations;
    j["min_jacobian"] = r.min_jacobian;
    j["max_newton_iters"] = r.max_newton_iters;
    if (!r.history.empty()) {
        j["E_initial"] = r.history.front().E_total;
        j["E_final"] = r.history.back().E_total;
    }
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const Snapshot& s = r.snapshots[k];
        nlohmann::json sj;
        sj["index"] = k;
        sj["t"] = s.t;
        sj["step"] = s.step;
        sj["file"] = "snapshot_" + std::to_string(k) + ".csv";
        sj["max_abs_f"] = s.max_principle.max_abs;
        sj["max_abs_f0"] = s.max_principle.bound;
        sj["max_principle_ok"] = s.max_principle.ok;
        if (s.interface)
            sj["interface"] = {{"location", s.interface->location},
                               {"width", s.interface->width},
                               {"crossings", s.interface->crossings}};
        else
            sj["interface"] = nullptr;
        if (s.filter)
            sj["filter"] = {{"tv_unfiltered", total_variation(s.filter->interpolant)},
                            {"tv_filtered", total_variation(s.filter->filtered)},
                            {"max_abs_unfiltered", max_abs(s.filter->interpolant)},
                            {"max_abs_filtered", max_abs(s.filter->filtered)}};
        snaps.push_back(sj);
    }
    j["snapshots"] = snaps;
    return j;
}

void write_outputs(const RunResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path root(dir);

    {
        std::ofstream out(root / "energy.csv");
        out << "step,t,E_total,E_grad,E_pot,E_aug,slack,newton_iters\n";
        for (const auto& h : r.history)
            out << h.step << ',' << num(h.t) << ',' << num(h.E_total) << ',' << num(h.E_grad) << ',' << num(h.E_pot)
                << ',' << num(h.E_aug) << ',' << num(h.slack) << ',' << h.newton_iters << '\n';
    }
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const Snapshot& s = r.snapshots[k];
        std::ofstream snap(root / ("snapshot_" + std::to_string(k) + ".csv"));
        snap << "X,x,f\n";
        for (Eigen::Index i = 0; i < s.X.size(); ++i) snap << num(s.X(i)) << ',' << num(s.x(i)) << ',' << num(s.f(i)) << '\n';

        std::ofstream prof(root / ("profile_" + std::to_string(k) + ".csv"));
        prof << (s.filter ? "x,f,f_interp,f_filtered\n" : "x,f\n");
        for (Eigen::Index i = 0; i < s.sample_x.size(); ++i) {
            prof << num(s.sample_x(i)) << ',' << num(s.sample_f(i));
            if (s.filter) prof << ',' << num(s.filter->interpolant(i)) << ',' << num(s.filter->filtered(i));
            prof << '\n';
        }
    }
    std::ofstream(root / "summary.json") << summary_json(r).dump(2) << '\n';
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult r = simulate(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    if (!cfg.output_dir.empty()) {
        write_outputs(r, cfg.output_dir);
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        nlohmann::json meta{{"created_utc", stamp}, {"wall_seconds", wall}};
        std::ofstream(std::filesystem::path(cfg.output_dir) / "metadata.json") << meta.dump(2) << '\n';
    }
    return r;
}

}  // namespace lagflow::harness
