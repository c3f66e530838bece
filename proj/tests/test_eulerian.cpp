#include "doctest.h"

#include "lagflow/eulerian.hpp"

using namespace lagflow;

namespace {

EulerianSolver<double> solver(LaplacianKind kind, int N, double eps2, double dt, int order = 1, double v = 0.0) {
    EulerianConfig cfg;
    cfg.N = N;
    cfg.dt = dt;
    cfg.order = order;
    cfg.laplacian = kind;
    cfg.advection_v = v;
    return {cfg, Potential<double>::double_well(eps2), [](double x) { return x; }};
}

}  // namespace

TEST_CASE("relaxes to the tanh profile") {
    const double eps2 = 1e-2, eps = 0.1;
    for (LaplacianKind k : {LaplacianKind::spectral, LaplacianKind::finite_difference}) {
        auto s = solver(k, k == LaplacianKind::spectral ? 64 : 400, eps2, 1e-3);
        double E = s.energy();
        for (int n = 0; n < 3000; ++n) {
            s.step();
            CHECK(s.energy() <= E + 1e-10);
            E = s.energy();
        }
        const Vector<double> xs = Vector<double>::LinSpaced(41, -1.0, 1.0);
        const Vector<double> f = s.sample(xs);
        double err = 0.0;
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            err = std::max(err, std::abs(f(i) - std::tanh(xs(i) / (std::sqrt(2.0) * eps))));
        CHECK(err < (k == LaplacianKind::spectral ? 1e-4 : 2e-3));
        CHECK(s.time() == doctest::Approx(3.0));
        CHECK(s.steps_taken() == 3000);
    }
}

TEST_CASE("odd data stay odd") {
    for (int order : {1, 2}) {
        auto s = solver(LaplacianKind::spectral, 48, 1e-2, 1e-3, order);
        for (int n = 0; n < 200; ++n) s.step();
        const Vector<double>& f = s.values();
        const Eigen::Index n = f.size();
        for (Eigen::Index i = 0; i < n; ++i) CHECK(f(i) == doctest::Approx(-f(n - 1 - i)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("boundary values are held") {
    auto s = solver(LaplacianKind::finite_difference, 64, 1e-2, 1e-3, 2);
    for (int n = 0; n < 20; ++n) s.step();
    CHECK(s.values()(0) == -1.0);
    CHECK(s.values()(64) == 1.0);
    CHECK(s.grid()(0) == -1.0);
}

TEST_CASE("advection moves the interface to the right") {
    auto s = solver(LaplacianKind::spectral, 64, 1e-2, 1e-4, 1, 1.0);
    for (int n = 0; n < 1000; ++n) s.step();
    // zero crossing of the sampled profile
    const Vector<double> xs = Vector<double>::LinSpaced(2001, -1.0, 1.0);
    const Vector<double> f = s.sample(xs);
    Eigen::Index i = 0;
    while (f(i + 1) < 0) ++i;
    CHECK(xs(i) > 0.05);
    CHECK(xs(i) < 0.15);
}

TEST_CASE("run_to_time records snapshots") {
    auto s = solver(LaplacianKind::spectral, 48, 1e-2, 1e-3);
    const auto snaps = run_to_time(s, 0.01, std::vector<double>{0.005, 0.01});
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[0].time == 0.0);
    CHECK(snaps[1].time == doctest::Approx(0.005));
    CHECK(snaps[2].energy <= snaps[1].energy);
    auto t = solver(LaplacianKind::spectral, 48, 1e-2, 1e-3);
    CHECK_THROWS_AS(run_to_time(t, 0.01, std::vector<double>{0.02}), ParameterError);
}

TEST_CASE("eulerian parameters are validated") {
    EulerianConfig cfg;
    cfg.N = 8;
    CHECK_THROWS_AS(EulerianSolver<double>(cfg, Potential<double>::double_well(1e-3), [](double x) { return x; }),
                    ParameterError);
    cfg.N = 64;
    cfg.order = 3;
    CHECK_THROWS_AS(EulerianSolver<double>(cfg, Potential<double>::double_well(1e-2), [](double x) { return x; }),
                    ParameterError);
    cfg.order = 1;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(EulerianSolver<double>(cfg, Potential<double>::double_well(1e-2), [](double x) { return x; }),
                    ParameterError);
}

TEST_CASE("divergence is detected") {
    EulerianConfig cfg;
    cfg.N = 64;
    cfg.dt = 10.0;
    cfg.laplacian = LaplacianKind::finite_difference;
    EulerianSolver<double> s(cfg, Potential<double>::double_well(0.01),
                             [](double x) { return 0.9 * std::sin(3.14159 * x); });
    CHECK_THROWS_AS(
        {
            for (int n = 0; n < 50; ++n) s.step();
        },
        DivergenceError);
}
