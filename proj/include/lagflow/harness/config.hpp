#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lagflow/discretization.hpp"
#include "lagflow/schemes.hpp"

namespace lagflow::harness {

/// Invalid or unreadable experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct FilterSettings {
    bool enabled = false;
    /// Strength a; unset means -log(machine epsilon).
    std::optional<double> strength;
    double exponent = 1.0;
};

struct ExperimentConfig {
    Geometry geometry = Geometry::cartesian;
    TimeScheme scheme = TimeScheme::bdf1;
    SpaceKind space = SpaceKind::spectral;
    /// Polynomial degree (spectral) or number of elements (fem).
    int N = 64;
    double eps2 = 1e-3;
    double dt = 1e-4;
    double t_end = 0.1;
    /// linear, parabola or scaled_linear (with profile_amplitude).
    std::string profile = "linear";
    double profile_amplitude = 1.0;
    /// double_well, logarithmic or none.
    std::string potential = "double_well";
    double theta = 1.0;
    double theta_c = 2.0;
    std::optional<double> advection_v;
    FilterSettings filter;
    std::vector<double> snapshot_times;
    std::string output_dir;
    /// Outer radius of the axisymmetric domain (0, h).
    double radius = 1.0;
    /// Stop once the map is steady; t_end is then an upper bound.
    bool until_steady = false;
    /// Uniform Eulerian sample points used for profiles and metrics.
    int samples = 1000;
    /// Level whose crossing defines the interface; unset means the mid-range of f0.
    std::optional<double> interface_level;
    /// Newton settings.
    double newton_damping = 1.0;
    double newton_tol = 1e-10;
    int newton_max_iters = 200;

    void validate() const;

    Domain1D<double> domain() const;
    Discretization<double> discretization() const;
    InitialProfile<double> initial_profile() const;
    Potential<double> make_potential() const;
    TrajectoryModel<double> model() const;
    SchemeConfig scheme_config() const;
    /// The crossing level used for interface metrics.
    double level() const;
    /// Snapshot times, sorted and deduplicated, always containing 0 and t_end.
    std::vector<double> snapshot_schedule() const;
};

/// Applies one key=value setting; keys mirror the field names, and the CLI
/// spellings (t-end, advection-v, n, out) are accepted too.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

nlohmann::json to_json(const ExperimentConfig& cfg);

std::string to_string(Geometry g);
std::string to_string(TimeScheme s);
std::string to_string(SpaceKind s);

/// Name of the environment variable holding the default output root.
inline constexpr const char* output_root_env = "LAGFLOW_OUTPUT_ROOT";

}  // namespace lagflow::harness
