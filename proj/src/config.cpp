#include "lagflow/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lagflow::harness {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "n") return "N";
    if (key == "out") return "output_dir";
    return key;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': not a number: '" + value + "'");
    }
    if (used != value.size() || !std::isfinite(v)) throw ConfigError("'" + key + "': not a finite number: '" + value + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': not an integer: '" + value + "'");
    }
    if (used != value.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError("'" + key + "': not an integer: '" + value + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "yes" || value == "1") return true;
    if (value == "off" || value == "false" || value == "no" || value == "0") return false;
    throw ConfigError("'" + key + "': expected on/off, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

}  // namespace

std::string to_string(Geometry g) { return g == Geometry::cartesian ? "cartesian" : "axisymmetric"; }
std::string to_string(TimeScheme s) { return s == TimeScheme::bdf1 ? "bdf1" : "bdf2"; }
std::string to_string(SpaceKind s) { return s == SpaceKind::fem ? "fem" : "spectral"; }

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = normalize_key(trim(raw_key));
    const std::string value = trim(raw_value);
    if (key == "geometry") {
        if (value == "cartesian") cfg.geometry = Geometry::cartesian;
        else if (value == "axisymmetric") cfg.geometry = Geometry::axisymmetric;
        else throw ConfigError("geometry must be cartesian or axisymmetric, got '" + value + "'");
    } else if (key == "scheme") {
        if (value == "bdf1") cfg.scheme = TimeScheme::bdf1;
        else if (value == "bdf2") cfg.scheme = TimeScheme::bdf2;
        else throw ConfigError("scheme must be bdf1 or bdf2, got '" + value + "'");
    } else if (key == "space") {
        if (value == "fem") cfg.space = SpaceKind::fem;
        else if (value == "spectral") cfg.space = SpaceKind::spectral;
        else throw ConfigError("space must be fem or spectral, got '" + value + "'");
    } else if (key == "N") {
        cfg.N = parse_int(key, value);
    } else if (key == "eps2") {
        cfg.eps2 = parse_double(key, value);
    } else if (key == "dt") {
        cfg.dt = parse_double(key, value);
    } else if (key == "t_end") {
        cfg.t_end = parse_double(key, value);
    } else if (key == "profile") {
        cfg.profile = value;
    } else if (key == "profile_amplitude") {
        cfg.profile_amplitude = parse_double(key, value);
    } else if (key == "potential") {
        cfg.potential = value;
    } else if (key == "theta") {
        cfg.theta = parse_double(key, value);
    } else if (key == "theta_c") {
        cfg.theta_c = parse_double(key, value);
    } else if (key == "advection_v") {
        if (value.empty() || value == "none" || value == "off") cfg.advection_v.reset();
        else cfg.advection_v = parse_double(key, value);
    } else if (key == "filter") {
        cfg.filter.enabled = parse_bool(key, value);
    } else if (key == "filter_a" || key == "filter_strength") {
        cfg.filter.strength = parse_double(key, value);
    } else if (key == "filter_exponent") {
        cfg.filter.exponent = parse_double(key, value);
    } else if (key == "snapshot_times") {
        cfg.snapshot_times = parse_list(key, value);
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "radius" || key == "h") {
        cfg.radius = parse_double(key, value);
    } else if (key == "until_steady") {
        cfg.until_steady = parse_bool(key, value);
    } else if (key == "samples") {
        cfg.samples = parse_int(key, value);
    } else if (key == "interface_level") {
        if (value == "auto") cfg.interface_level.reset();
        else cfg.interface_level = parse_double(key, value);
    } else if (key == "newton_damping") {
        cfg.newton_damping = parse_double(key, value);
    } else if (key == "newton_tol") {
        cfg.newton_tol = parse_double(key, value);
    } else if (key == "newton_max_iters") {
        cfg.newton_max_iters = parse_int(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + raw_key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig cfg) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

void ExperimentConfig::validate() const {
    if (N < 2) throw ConfigError("N must be >= 2");
    if (!(eps2 > 0.0)) throw ConfigError("eps2 must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    if (geometry == Geometry::axisymmetric) {
        if (!(radius > 0.0)) throw ConfigError("radius must be positive");
        if (scheme == TimeScheme::bdf2) throw ConfigError("the axisymmetric geometry supports bdf1 only");
        if (advection_v) throw ConfigError("advection is not available in the axisymmetric geometry");
    }
    if (advection_v && scheme == TimeScheme::bdf2) throw ConfigError("advection is implemented for bdf1 only");
    if (profile != "linear" && profile != "parabola" && profile != "scaled_linear")
        throw ConfigError("unknown profile '" + profile + "'");
    if (potential != "double_well" && potential != "logarithmic" && potential != "none")
        throw ConfigError("unknown potential '" + potential + "'");
    if (potential == "logarithmic" && !(theta > 0.0 && theta_c > 0.0))
        throw ConfigError("theta and theta_c must be positive");
    if (filter.strength && !(*filter.strength > 0.0)) throw ConfigError("filter strength must be positive");
    if (!(filter.exponent > 0.0)) throw ConfigError("filter exponent must be positive");
    if (samples < 2) throw ConfigError("samples must be >= 2");
    for (double t : snapshot_times)
        if (!(t >= 0.0 && t <= t_end)) throw ConfigError("snapshot times must lie in [0, t_end]");
    if (!(newton_damping > 0.0 && newton_damping <= 1.0)) throw ConfigError("newton_damping must lie in (0, 1]");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (newton_max_iters < 1) throw ConfigError("newton_max_iters must be positive");
    try {
        (void)initial_profile();
        (void)make_potential();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

Domain1D<double> ExperimentConfig::domain() const {
    return geometry == Geometry::axisymmetric ? Domain1D<double>(0.0, radius) : Domain1D<double>(-1.0, 1.0);
}

Discretization<double> ExperimentConfig::discretization() const {
    return space == SpaceKind::fem ? Discretization<double>::fem_uniform(N, domain())
                                   : Discretization<double>::spectral(N, domain());
}

InitialProfile<double> ExperimentConfig::initial_profile() const {
    const auto dom = domain();
    if (profile == "linear") return InitialProfile<double>::linear().on(dom);
    if (profile == "parabola") return InitialProfile<double>::parabola().on(dom);
    if (profile == "scaled_linear") return InitialProfile<double>::scaled_linear(profile_amplitude, dom);
    throw ConfigError("unknown profile '" + profile + "'");
}

Potential<double> ExperimentConfig::make_potential() const {
    if (potential == "double_well") return Potential<double>::double_well(eps2);
    if (potential == "logarithmic") return Potential<double>::logarithmic(theta, theta_c);
    if (potential == "none") return Potential<double>::none();
    throw ConfigError("unknown potential '" + potential + "'");
}

TrajectoryModel<double> ExperimentConfig::model() const {
    return TrajectoryModel<double>(discretization(), initial_profile(), make_potential(), geometry);
}

SchemeConfig ExperimentConfig::scheme_config() const {
    SchemeConfig s;
    s.scheme = scheme;
    s.dt = dt;
    s.newton.damping = newton_damping;
    s.newton.tol_residual = newton_tol;
    s.newton.max_iters = newton_max_iters;
    if (advection_v) s.advection = AdvectionField{*advection_v};
    return s;
}

double ExperimentConfig::level() const {
    if (interface_level) return *interface_level;
    const auto prof = initial_profile();
    const auto dom = domain();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i <= 2000; ++i) {
        const double X = dom.left() + dom.length() * i / 2000.0;
        const double f = prof.value(X);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return 0.5 * (lo + hi);
}

std::vector<double> ExperimentConfig::snapshot_schedule() const {
    std::vector<double> times = snapshot_times;
    times.push_back(0.0);
    times.push_back(t_end);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["geometry"] = to_string(cfg.geometry);
    j["scheme"] = to_string(cfg.scheme);
    j["space"] = to_string(cfg.space);
    j["N"] = cfg.N;
    j["eps2"] = cfg.eps2;
    j["dt"] = cfg.dt;
    j["t_end"] = cfg.t_end;
    j["profile"] = cfg.profile;
    if (cfg.profile == "scaled_linear") j["profile_amplitude"] = cfg.profile_amplitude;
    j["potential"] = cfg.potential;
    if (cfg.potential == "logarithmic") {
        j["theta"] = cfg.theta;
        j["theta_c"] = cfg.theta_c;
    }
    j["advection_v"] = cfg.advection_v ? nlohmann::json(*cfg.advection_v) : nlohmann::json(nullptr);
    j["filter"] = {{"enabled", cfg.filter.enabled},
                   {"a", cfg.filter.strength.value_or(default_filter_strength<double>())},
                   {"exponent", cfg.filter.exponent}};
    j["snapshot_times"] = cfg.snapshot_schedule();
    j["radius"] = cfg.radius;
    j["until_steady"] = cfg.until_steady;
    j["samples"] = cfg.samples;
    j["interface_level"] = cfg.level();
    j["newton"] = {{"damping", cfg.newton_damping}, {"tol", cfg.newton_tol}, {"max_iters", cfg.newton_max_iters}};
    return j;
}

}  // namespace lagflow::harness
