#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lagflow/harness/studies.hpp"

using namespace lagflow;
using namespace lagflow::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lagflow_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig small_run() {
    ExperimentConfig cfg;
    cfg.space = SpaceKind::fem;
    cfg.N = 16;
    cfg.eps2 = 1e-2;
    cfg.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.samples = 101;
    return cfg;
}

}  // namespace

TEST_CASE("config text parsing") {
    const auto cfg = parse_config_text(R"(
# a comment
scheme = bdf2
space=fem
N = 32
eps2 = 1e-4
t-end = 0.5
snapshot_times = 0.1, 0.2
filter = on
filter_a = 20
interface_level = auto
)");
    CHECK(cfg.scheme == TimeScheme::bdf2);
    CHECK(cfg.space == SpaceKind::fem);
    CHECK(cfg.N == 32);
    CHECK(cfg.eps2 == 1e-4);
    CHECK(cfg.t_end == 0.5);
    CHECK(cfg.snapshot_times == std::vector<double>{0.1, 0.2});
    CHECK(cfg.filter.enabled);
    CHECK(*cfg.filter.strength == 20.0);
    CHECK_FALSE(cfg.interface_level.has_value());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config_text("bogus = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("N = 3.5"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("eps2 = abc"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just a line"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scheme = rk4"), ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/lagflow.cfg"), ConfigError);

    ExperimentConfig cfg;
    cfg.eps2 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.geometry = Geometry::axisymmetric;
    cfg.scheme = TimeScheme::bdf2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.snapshot_times = {0.5};
    cfg.t_end = 0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.advection_v = 1.0;
    cfg.scheme = TimeScheme::bdf2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("later settings override earlier ones") {
    ExperimentConfig cfg = parse_config_text("dt = 1e-3\nN = 8\n");
    apply_setting(cfg, "dt", "2e-3");
    apply_setting(cfg, "n", "12");
    apply_setting(cfg, "out", "/tmp/x");
    apply_setting(cfg, "advection-v", "0.5");
    CHECK(cfg.dt == 2e-3);
    CHECK(cfg.N == 12);
    CHECK(cfg.output_dir == "/tmp/x");
    CHECK(*cfg.advection_v == 0.5);
    apply_setting(cfg, "advection_v", "none");
    CHECK_FALSE(cfg.advection_v.has_value());
}

TEST_CASE("interface level and snapshot schedule") {
    ExperimentConfig cfg;
    CHECK(cfg.level() == doctest::Approx(0.0).scale(1.0));
    cfg.profile = "parabola";
    CHECK(cfg.level() == doctest::Approx(0.5));
    cfg.interface_level = 0.25;
    CHECK(cfg.level() == 0.25);
    cfg.t_end = 0.1;
    cfg.snapshot_times = {0.05, 0.0, 0.05};
    CHECK(cfg.snapshot_schedule() == std::vector<double>{0.0, 0.05, 0.1});
}

TEST_CASE("config json echo") {
    const auto j = to_json(small_run());
    CHECK(j["space"] == "fem");
    CHECK(j["N"] == 16);
    CHECK(j["dt"] == 1e-3);
}

TEST_CASE("simulate records history and snapshots") {
    auto cfg = small_run();
    cfg.snapshot_times = {0.01};
    const RunResult r = simulate(cfg);
    REQUIRE(r.status == RunStatus::ok);
    CHECK(r.history.size() == 21);
    CHECK(r.history.front().step == 0);
    CHECK(r.history.back().t == doctest::Approx(0.02));
    REQUIRE(r.snapshots.size() == 3);
    CHECK(r.snapshots[1].step == 10);
    CHECK(r.audit_violations == 0);
    CHECK(r.min_jacobian > 0.0);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].E_total <= r.history[k - 1].E_total);
    for (const auto& s : r.snapshots) CHECK(s.max_principle.ok);
}

TEST_CASE("t_end = 0 gives only the identity") {
    auto cfg = small_run();
    cfg.t_end = 0.0;
    const RunResult r = simulate(cfg);
    CHECK(r.history.size() == 1);
    REQUIRE(r.snapshots.size() == 1);
    CHECK((r.snapshots[0].x - r.snapshots[0].X).isZero());
}

TEST_CASE("outputs have fixed headers and are byte-identical across runs") {
    auto cfg = small_run();
    cfg.filter.enabled = true;
    cfg.space = SpaceKind::spectral;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    cfg.output_dir = a.string();
    run_experiment(cfg);
    cfg.output_dir = b.string();
    run_experiment(cfg);

    std::string line;
    std::ifstream energy(a / "energy.csv");
    std::getline(energy, line);
    CHECK(line == "step,t,E_total,E_grad,E_pot,E_aug,slack,newton_iters");
    std::ifstream snap(a / "snapshot_0.csv");
    std::getline(snap, line);
    CHECK(line == "X,x,f");
    CHECK(fs::exists(a / "metadata.json"));

    for (const char* f : {"energy.csv", "snapshot_0.csv", "snapshot_1.csv", "profile_1.csv", "summary.json"})
        CHECK(slurp(a / f) == slurp(b / f));
    const auto sa = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(sa["energy_law"] == "satisfied");
    CHECK(sa.contains("snapshots"));
    CHECK_FALSE(sa.dump().find("created") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("solver failures are captured, not thrown") {
    ExperimentConfig cfg;
    cfg.geometry = Geometry::axisymmetric;
    cfg.N = 64;
    cfg.t_end = 0.001;
    cfg.dt = 1e-4;
    const RunResult r = simulate(cfg);
    if (r.status == RunStatus::solver_failure) {
        CHECK(r.failed_step >= 1);
        CHECK(r.error.rfind("step ", 0) == 0);
        CHECK(summary_json(r)["status"] == "solver_failure");
    } else {
        CHECK(r.history.size() == 11);
    }
}

TEST_CASE("advection runs report the energy law as not enforced") {
    auto cfg = small_run();
    cfg.advection_v = 1.0;
    const RunResult r = simulate(cfg);
    REQUIRE(r.status == RunStatus::ok);
    CHECK(summary_json(r)["energy_law"] == "not_enforced");
    CHECK(r.snapshots.back().interface->location > 0.0);
}

TEST_CASE("least squares slope") {
    CHECK(least_squares_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
    CHECK(std::isnan(least_squares_slope({1}, {1})));
}

TEST_CASE("convergence study input checks") {
    const auto cfg = small_run();
    CHECK_THROWS_AS(convergence_study(cfg, {1e-3, 5e-4}, 1e-5), ConfigError);
    CHECK_THROWS_AS(convergence_study(cfg, {1e-3, 5e-4, 3e-4}, 1e-5), ConfigError);
    CHECK_THROWS_AS(convergence_study(cfg, {1e-3, 5e-4, 2.5e-4}, 1e-4), ConfigError);
}

TEST_CASE("small convergence study") {
    auto cfg = small_run();
    cfg.space = SpaceKind::spectral;
    cfg.t_end = 0.02;
    const auto study = convergence_study(cfg, {4e-3, 2e-3, 1e-3}, 2e-4);
    REQUIRE(study.complete);
    CHECK(study.rows.size() == 3);
    CHECK(study.monotone);
    CHECK(study.slope > 0.7);
    CHECK(study.runs.size() == 4);
}

TEST_CASE("sampled comparison") {
    const Vector<double> xs = Vector<double>::LinSpaced(5, -1.0, 1.0);
    Vector<double> a(5), b(5);
    a << -1, -0.5, 0.1, 0.5, 1;
    b << -1, -0.6, -0.1, 0.4, 0.99;
    const auto c = compare_sampled(xs, a, b, 0.0, 0.95);
    CHECK(c.location_a == doctest::Approx(-0.5 + 0.5 * 0.5 / 0.6));
    CHECK(c.location_b == doctest::Approx(0.1));
    CHECK(c.linf == doctest::Approx(0.2));
    CHECK(c.linf_outside_band == doctest::Approx(0.01));
    CHECK_THROWS_AS(compare_sampled(xs, a, Vector<double>(Vector<double>::Zero(3)), 0.0), ShapeError);
}

TEST_CASE("method comparison runs both solvers") {
    auto cfg = small_run();
    cfg.space = SpaceKind::spectral;
    cfg.N = 32;
    EulerianConfig e;
    e.N = 64;
    e.dt = 1e-3;
    const auto cmp = compare_methods(cfg, e, {0.01, 0.02});
    REQUIRE(cmp.rows.size() == 2);
    CHECK(cmp.rows[1].diff.offset < 0.05);
    CHECK(cmp.rows[1].diff.linf < 0.1);
}
