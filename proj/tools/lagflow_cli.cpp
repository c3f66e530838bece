// lagflow: run, converge, compare and verify front end.
//
// Settings come from an optional key=value file (--config) and are then
// overridden by flags. Exit codes: 0 ok, 2 config error, 3 solver failure,
// 4 acceptance failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "lagflow/harness/acceptance.hpp"

namespace fs = std::filesystem;
using namespace lagflow;
using namespace lagflow::harness;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;
constexpr int exit_acceptance = 4;

/// Experiment flags shared by run, converge and compare.
struct SettingFlags {
    std::string config_file;
    // CLI spelling -> value; only flags that were given end up here.
    std::map<std::string, std::string> given;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "key=value settings file")->check(CLI::ExistingFile);
        for (const char* key : {"scheme", "space", "n", "eps2", "dt", "t-end", "profile", "filter", "advection-v",
                                "geometry", "out", "potential", "snapshot-times", "radius", "until-steady",
                                "samples", "interface-level", "newton-damping"}) {
            const std::string name = std::string("--") + key;
            app->add_option_function<std::string>(name, [this, k = std::string(key)](const std::string& v) { given[k] = v; });
        }
    }

    ExperimentConfig resolve(const std::string& default_subdir) const {
        ExperimentConfig cfg;
        if (!config_file.empty()) cfg = load_config_file(config_file, cfg);
        for (const auto& [k, v] : given) apply_setting(cfg, k, v);
        if (cfg.output_dir.empty()) cfg.output_dir = (output_root() / default_subdir).string();
        return cfg;
    }

    static fs::path output_root() {
        const char* env = std::getenv(output_root_env);
        return env && *env ? fs::path(env) : fs::path("lagflow_output");
    }
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

void write_json(const fs::path& file, const nlohmann::json& j) {
    fs::create_directories(file.parent_path());
    std::ofstream(file) << j.dump(2) << '\n';
}

int cmd_run(const SettingFlags& flags) {
    const ExperimentConfig cfg = flags.resolve("run");
    const RunResult r = run_experiment(cfg);
    const auto& last = r.history.back();
    std::printf("steps %d  t %.6g  E %.12g -> %.12g  min dx/dX %.4g  energy law %s\n", last.step, last.t,
                r.history.front().E_total, last.E_total, r.min_jacobian,
                summary_json(r)["energy_law"].get<std::string>().c_str());
    if (r.steady) std::printf("steady at step %d\n", r.steady_step);
    if (r.snapshots.back().interface)
        std::printf("interface at %.6g, width %.4g\n", r.snapshots.back().interface->location,
                    r.snapshots.back().interface->width);
    std::printf("outputs in %s\n", cfg.output_dir.c_str());
    if (r.status != RunStatus::ok) {
        std::fprintf(stderr, "solver failure: %s\n", r.error.c_str());
        return exit_solver;
    }
    return exit_ok;
}

int cmd_converge(const SettingFlags& flags, const std::string& dts, double ref_dt) {
    const ExperimentConfig cfg = flags.resolve("converge");
    const ConvergenceStudy study = convergence_study(cfg, parse_list(dts), ref_dt);
    nlohmann::json j = to_json(study);
    j["config"] = to_json(cfg);
    write_json(fs::path(cfg.output_dir) / "convergence.json", j);
    std::printf("%-12s %-12s\n", "dt", "error");
    for (const auto& row : study.rows) std::printf("%-12.4g %-12.4e\n", row.dt, row.error);
    std::printf("slope %.4f  monotone %s\n", study.slope, study.monotone ? "yes" : "no");
    if (!study.complete) {
        std::fprintf(stderr, "solver failure: %s\n", study.error.c_str());
        return exit_solver;
    }
    return exit_ok;
}

int cmd_compare(const SettingFlags& flags, const std::string& times, int euler_n, int euler_order, double euler_dt,
                const std::string& laplacian) {
    const ExperimentConfig cfg = flags.resolve("compare");
    EulerianConfig ecfg;
    ecfg.N = euler_n;
    ecfg.order = euler_order;
    ecfg.dt = euler_dt;
    if (laplacian == "spectral") ecfg.laplacian = LaplacianKind::spectral;
    else if (laplacian == "fd") ecfg.laplacian = LaplacianKind::finite_difference;
    else throw ConfigError("eulerian laplacian must be spectral or fd");
    const MethodComparison cmp = compare_methods(cfg, ecfg, parse_list(times));
    write_outputs(cmp.lagrangian, cfg.output_dir);
    write_json(fs::path(cfg.output_dir) / "comparison.json", to_json(cmp));
    std::printf("%-10s %-12s %-12s %-12s %-12s\n", "t", "x_lag", "x_euler", "linf", "linf_band");
    for (const auto& row : cmp.rows)
        std::printf("%-10.4g %-12.6g %-12.6g %-12.4e %-12.4e\n", row.t, row.diff.location_a, row.diff.location_b,
                    row.diff.linf, row.diff.linf_outside_band);
    if (cmp.lagrangian.status != RunStatus::ok) {
        std::fprintf(stderr, "solver failure: %s\n", cmp.lagrangian.error.c_str());
        return exit_solver;
    }
    return exit_ok;
}

int cmd_verify(const std::string& out, const std::vector<int>& only) {
    AcceptanceOptions opt;
    opt.output_dir = out;
    opt.only = only;
    opt.progress = [](const CriterionResult& r) {
        std::printf("%s  (%.1fs)\n", format_result(r).c_str(), r.seconds);
        std::fflush(stdout);
    };
    const AcceptanceReport report = run_acceptance(opt);
    int failed = 0;
    for (const auto& r : report.results) failed += r.passed ? 0 : 1;
    std::printf("%zu criteria, %d failed\n", report.results.size(), failed);
    return report.all_passed() ? exit_ok : exit_acceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrangian interface-capturing solver for the 1D Allen-Cahn equation"};
    app.require_subcommand(1);

    SettingFlags run_flags, conv_flags, cmp_flags;
    auto* run = app.add_subcommand("run", "run one experiment and write its outputs");
    run_flags.attach(run);

    auto* conv = app.add_subcommand("converge", "temporal convergence against a fine BDF2 reference");
    conv_flags.attach(conv);
    std::string dts = "2e-3,1e-3,5e-4,2.5e-4";
    double ref_dt = 1e-5;
    conv->add_option("--dts", dts, "comma separated time steps, geometric")->capture_default_str();
    conv->add_option("--ref-dt", ref_dt, "reference time step")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "compare against the Eulerian semi-implicit solver");
    cmp_flags.attach(cmp);
    std::string times = "0.01,0.05,0.1";
    int euler_n = 256, euler_order = 1;
    double euler_dt = 1e-4;
    std::string laplacian = "spectral";
    cmp->add_option("--times", times, "comparison times")->capture_default_str();
    cmp->add_option("--eulerian-n", euler_n, "Eulerian resolution")->capture_default_str();
    cmp->add_option("--eulerian-order", euler_order, "Eulerian time order (1 or 2)")->capture_default_str();
    cmp->add_option("--eulerian-dt", euler_dt, "Eulerian time step")->capture_default_str();
    cmp->add_option("--eulerian-laplacian", laplacian, "spectral or fd")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    std::string verify_out;
    std::vector<int> only;
    verify->add_option("--out", verify_out, "artifact directory (default: <output root>/verify)");
    verify->add_option("--criteria", only, "criteria to run, e.g. --criteria 1 9")->check(CLI::Range(1, 10));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*conv) return cmd_converge(conv_flags, dts, ref_dt);
        if (*cmp) return cmd_compare(cmp_flags, times, euler_n, euler_order, euler_dt, laplacian);
        if (verify_out.empty()) verify_out = (SettingFlags::output_root() / "verify").string();
        return cmd_verify(verify_out, only);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const Error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return exit_solver;
    }
}
