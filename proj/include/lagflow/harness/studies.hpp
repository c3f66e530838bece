#pragma once

#include <string>
#include <vector>

#include "lagflow/eulerian.hpp"
#include "lagflow/harness/experiment.hpp"

namespace lagflow::harness {

struct ConvergenceRow {
    double dt = 0.0;
    /// max |x_i(T) - x_ref_i(T)| over the Lagrangian nodes.
    double error = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double reference_dt = 0.0;
    /// Least-squares slope of log(error) against log(dt); NaN with fewer than two rows.
    double slope = 0.0;
    /// Errors strictly decrease along decreasing dt.
    bool monotone = false;
    bool complete = false;
    std::string error;
    /// Per-run bookkeeping, reference run first.
    std::vector<RunResult> runs;
};

/// Runs base at each dt and compares against a BDF2 run at reference_dt.
/// A failing member run stops the study; the rows computed so far are kept.
ConvergenceStudy convergence_study(const ExperimentConfig& base, const std::vector<double>& dt_list,
                                   double reference_dt);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SampledComparison {
    double location_a = 0.0;
    double location_b = 0.0;
    double offset = 0.0;
    double linf = 0.0;
    /// max |a - b| where |b| > band.
    double linf_outside_band = 0.0;
};

/// Compares two profiles sampled on the same points.
SampledComparison compare_sampled(const Vector<double>& xs, const Vector<double>& a, const Vector<double>& b,
                                  double level, double band = 0.95);

struct ComparisonRow {
    double t = 0.0;
    SampledComparison diff;
};

struct MethodComparison {
    std::vector<ComparisonRow> rows;
    RunResult lagrangian;
};

/// Runs the Lagrangian experiment and the Eulerian oracle (same eps2, profile,
/// potential and advection speed) and compares the profiles at each time on
/// the uniform sampling grid of the Lagrangian config. a = Lagrangian, b = Eulerian.
MethodComparison compare_methods(const ExperimentConfig& lagrangian, const EulerianConfig& eulerian,
                                 const std::vector<double>& times, double band = 0.95);

nlohmann::json to_json(const ConvergenceStudy& study);
nlohmann::json to_json(const MethodComparison& cmp);

}  // namespace lagflow::harness
