#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lagflow/harness/config.hpp"
#include "lagflow/reconstruction.hpp"

namespace lagflow::harness {

/// One row of the energy history. Step 0 is the initial state.
struct HistoryRow {
    int step = 0;
    double t = 0.0;
    double E_total = 0.0;
    double E_grad = 0.0;
    double E_pot = 0.0;
    double E_aug = 0.0;
    double slack = 0.0;
    int newton_iters = 0;
    bool audit_ok = true;
    double min_jacobian = 1.0;
};

struct Snapshot {
    double t = 0.0;
    int step = 0;
    Vector<double> X;
    Vector<double> x;
    Vector<double> f;
    /// Uniform Eulerian samples and the reconstructed profile there.
    Vector<double> sample_x;
    Vector<double> sample_f;
    /// Filtered and unfiltered Legendre interpolants (filter runs only).
    std::optional<FilteredProfile<double>> filter;
    MaxPrincipleReport<double> max_principle{};
    /// Unset when the profile has no crossing of the interface level.
    std::optional<InterfaceMetrics<double>> interface;
};

enum class RunStatus { ok, solver_failure };

struct RunResult {
    ExperimentConfig config;
    RunStatus status = RunStatus::ok;
    std::string error;
    /// Step at which the solver failed (status == solver_failure).
    int failed_step = 0;
    std::vector<HistoryRow> history;
    std::vector<Snapshot> snapshots;
    FlowMapState<double> final_state;
    bool steady = false;
    int steady_step = 0;
    int audit_violations = 0;
    double min_jacobian = 1.0;
    int max_newton_iters = 0;
};

/// Displacement below which a step counts as stationary, and how many in a row declare steady state.
inline constexpr double steady_displacement = 1e-9;
inline constexpr int steady_window = 10;

/// Runs the trajectory solver described by cfg. Solver errors are captured in
/// the result; configuration errors throw ConfigError. Nothing is written.
RunResult simulate(const ExperimentConfig& cfg);

/// simulate() plus the artifact files in cfg.output_dir (when nonempty):
/// energy.csv, snapshot_<k>.csv, profile_<k>.csv, summary.json and metadata.json.
RunResult run_experiment(const ExperimentConfig& cfg);

void write_outputs(const RunResult& result, const std::string& dir);

nlohmann::json summary_json(const RunResult& result);

std::string to_string(RunStatus s);

}  // namespace lagflow::harness
