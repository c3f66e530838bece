#include "doctest.h"

#include <random>

#include "lagflow/schemes.hpp"

using namespace lagflow;

namespace {

FlowMapState<double> state(Vector<double> c) { return {std::move(c), 0.0, std::nullopt}; }

TrajectoryModel<double> model(SpaceKind kind, int N, double eps2, bool parabola = false) {
    auto disc = kind == SpaceKind::fem ? Discretization<double>::fem_uniform(N) : Discretization<double>::spectral(N);
    auto prof = parabola ? InitialProfile<double>::parabola() : InitialProfile<double>::linear();
    return {disc, prof, Potential<double>::double_well(eps2)};
}

// Smooth admissible displacement: x = X + a (1 - X^2) sampled through the nodes.
Vector<double> bump(const Discretization<double>& d, double a) {
    Vector<double> x = d.nodes();
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += a * (1 - x(i) * x(i)) * (1 + 0.3 * x(i));
    x(0) = d.domain().left();
    x(x.size() - 1) = d.domain().right();
    return d.coefficients_from_nodal(x);
}

}  // namespace

TEST_CASE("energy of the identity map") {
    // 1/2 int 1 dX + int (1 - X^2)^2 / (4 eps2) dX = 1 + 4 / (15 eps2)
    const auto m = model(SpaceKind::spectral, 8, 0.1);
    const auto e = energy(m, m.identity_state());
    CHECK(e.gradient_part == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.potential_part == doctest::Approx(4.0 / 1.5).epsilon(1e-13));
    CHECK(e.total == doctest::Approx(1.0 + 4.0 / 1.5).epsilon(1e-13));
    const auto mf = model(SpaceKind::fem, 400, 0.1);
    CHECK(energy(mf, mf.identity_state()).total == doctest::Approx(1.0 + 4.0 / 1.5).epsilon(1e-5));
}

TEST_CASE("residual is the gradient of the energy plus the rate term") {
    for (SpaceKind k : {SpaceKind::fem, SpaceKind::spectral}) {
        const auto m = model(k, 10, 0.05);
        const Vector<double> c = bump(m.disc(), 0.1);
        // with prev == candidate the rate term vanishes
        const Vector<double> G = residual_weak_bdf1(m, state(c), state(c), 1e-3);
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            const double h = 1e-6;
            Vector<double> cp = c, cm = c;
            cp(j) += h;
            cm(j) -= h;
            const double dE = (energy(m, state(cp)).total - energy(m, state(cm)).total) / (2 * h);
            CHECK(G(j) == doctest::Approx(-dE).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("tangent matches finite differences of the residual") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (SpaceKind k : {SpaceKind::fem, SpaceKind::spectral}) {
        const auto m = model(k, 12, 0.02, k == SpaceKind::spectral);
        const Vector<double> c = bump(m.disc(), 0.15), p = bump(m.disc(), 0.05);
        Vector<double> d(c.size());
        for (auto& v : d) v = u(rng);
        const double h = 1e-6;
        const Vector<double> fd = (residual_weak_bdf1(m, state(c + h * d), state(p), 1e-2) -
                                   residual_weak_bdf1(m, state(c - h * d), state(p), 1e-2)) / (2 * h);
        const Vector<double> an = tangent_bdf1(m, state(c), state(p), 1e-2) * d;
        CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-6 * an.cwiseAbs().maxCoeff());

        FlowMapState<double> cur{p, 0.0, Vector<double>(bump(m.disc(), 0.02))};
        const Vector<double> star =
            jacobian_star(m.disc().jacobian_at_quadrature(p), m.disc().jacobian_at_quadrature(*cur.previous));
        const Vector<double> fd2 = (residual_weak_bdf2(m, state(c + h * d), cur, star, 1e-2) -
                                    residual_weak_bdf2(m, state(c - h * d), cur, star, 1e-2)) / (2 * h);
        const Vector<double> an2 = tangent_bdf2(m, state(c), cur, star, 1e-2) * d;
        CHECK((fd2 - an2).cwiseAbs().maxCoeff() <= 1e-6 * an2.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("fem tangent is tridiagonal and spectral tangent symmetric negative definite") {
    const auto mf = model(SpaceKind::fem, 10, 0.05);
    const Matrix<double> Kf = tangent_bdf1(mf, mf.identity_state(), mf.identity_state(), 1e-3);
    for (Eigen::Index i = 0; i < Kf.rows(); ++i)
        for (Eigen::Index j = 0; j < Kf.cols(); ++j)
            if (std::abs(i - j) > 1) CHECK(Kf(i, j) == 0.0);
    const auto ms = model(SpaceKind::spectral, 10, 0.05);
    const Matrix<double> Ks = tangent_bdf1(ms, ms.identity_state(), ms.identity_state(), 1e-3);
    CHECK((Ks - Ks.transpose()).cwiseAbs().maxCoeff() < 1e-10 * Ks.cwiseAbs().maxCoeff());
    CHECK(Eigen::LLT<Matrix<double>>(-Ks).info() == Eigen::Success);
}

TEST_CASE("jacobian_star") {
    Vector<double> a(3), b(3);
    a << 1.0, 2.0, 0.5;
    b << 1.0, 1.0, 1.0;
    const Vector<double> s = jacobian_star(a, b);
    CHECK(s(0) == 1.0);
    CHECK(s(1) == 3.0);          // growing: 2a - b
    CHECK(s(2) == doctest::Approx(1.0 / 3.0));  // shrinking: 1 / (2/a - 1/b)
    b(0) = 0.0;
    CHECK_THROWS_AS(jacobian_star(a, b), ParameterError);
    CHECK_THROWS_AS(jacobian_star(a, Vector<double>(Vector<double>::Ones(2))), ShapeError);
}

TEST_CASE("dissipation audit tolerance") {
    CHECK(dissipation_tolerance(0.0) == 1e-10);
    CHECK(dissipation_audit(1.0, 1.0 + 1e-10).satisfied);
    CHECK_FALSE(dissipation_audit(1.0, 1.0 + 1e-9).satisfied);
    CHECK(dissipation_audit(2.0, 1.5).slack == 0.5);
}

TEST_CASE("bdf1 steps decrease the energy") {
    for (SpaceKind k : {SpaceKind::fem, SpaceKind::spectral}) {
        SchemeConfig cfg;
        cfg.dt = 1e-3;
        TrajectorySolver<double> solver(model(k, 16, 1e-2), cfg);
        double E = solver.current_energy().total;
        for (int s = 0; s < 50; ++s) {
            const auto rec = solver.step();
            CHECK(rec.audit_ok);
            CHECK(rec.energy.total <= E + dissipation_tolerance(E));
            CHECK(rec.min_jacobian > 0.0);
            E = rec.energy.total;
        }
        CHECK(solver.steps_taken() == 50);
        CHECK(solver.state().time == doctest::Approx(0.05));
    }
}

TEST_CASE("bdf2 starts with one bdf1 step and keeps the modified energy law") {
    SchemeConfig cfg;
    cfg.scheme = TimeScheme::bdf2;
    cfg.dt = 1e-3;
    TrajectorySolver<double> solver(model(SpaceKind::spectral, 16, 1e-2), cfg);
    const auto first = solver.step();
    CHECK(first.energy.bdf2_augmentation == 0.0);
    REQUIRE(solver.state().previous.has_value());
    for (int s = 0; s < 30; ++s) {
        const auto rec = solver.step();
        CHECK(rec.audit_ok);
        CHECK(rec.energy.bdf2_augmentation >= 0.0);
    }
    CHECK_THROWS_AS(step_bdf2(solver.model(), solver.model().identity_state(), cfg), StartupError);
}

TEST_CASE("identity is a fixed point without potential") {
    for (SpaceKind k : {SpaceKind::fem, SpaceKind::spectral}) {
        auto disc = k == SpaceKind::fem ? Discretization<double>::fem_uniform(8) : Discretization<double>::spectral(8);
        TrajectoryModel<double> m(disc, InitialProfile<double>::linear(), Potential<double>::none());
        const Vector<double> G = residual_weak_bdf1(m, m.identity_state(), m.identity_state(), 1e-2);
        CHECK(G.isZero());
    }
}

TEST_CASE("advection with zero speed is the base residual") {
    const auto m = model(SpaceKind::spectral, 10, 0.05);
    const Vector<double> c = bump(m.disc(), 0.1), p = bump(m.disc(), 0.03);
    const Vector<double> a = residual_weak_bdf1(m, state(c), state(p), 1e-3);
    const Vector<double> b = residual_advection_bdf1(m, state(c), state(p), AdvectionField{0.0}, 1e-3);
    CHECK(a == b);
    const Vector<double> moved = residual_advection_bdf1(m, state(c), state(p), AdvectionField{1.0}, 1e-3);
    CHECK_FALSE(a == moved);
}

TEST_CASE("advected identity translates the interface") {
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.advection = AdvectionField{1.0};
    TrajectorySolver<double> solver(model(SpaceKind::fem, 32, 1e-2), cfg);
    for (int s = 0; s < 100; ++s) solver.step();
    const auto& d = solver.model().disc();
    // X = 0 is the interface label; it should have moved right by about v t = 0.1
    const double x0 = d.map_at(solver.state().coeffs, 0.0);
    CHECK(x0 > 0.05);
    CHECK(x0 < 0.15);
}

TEST_CASE("residual checks its inputs") {
    const auto m = model(SpaceKind::fem, 4, 0.1);
    CHECK_THROWS_AS(residual_weak_bdf1(m, m.identity_state(), m.identity_state(), 0.0), ParameterError);
    CHECK_THROWS_AS(residual_weak_bdf1(m, state(Vector<double>::Zero(2)), m.identity_state(), 0.1), ShapeError);
    Vector<double> folded(3);
    folded << 0.0, 0.9, 0.0;  // node 2 passes node 3
    CHECK_THROWS_AS(residual_weak_bdf1(m, state(folded), m.identity_state(), 0.1), PositivityError);
}

TEST_CASE("solver runs in long double") {
    auto disc = Discretization<long double>::fem_uniform(8);
    TrajectoryModel<long double> m(disc, InitialProfile<long double>::linear(), Potential<long double>::double_well(0.05L));
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    TrajectorySolver<long double> solver(m, cfg);
    for (int s = 0; s < 10; ++s) CHECK(solver.step().audit_ok);
}

TEST_CASE("scheme config validation") {
    SchemeConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.dt = 1e-3;
    cfg.advection = AdvectionField{std::nan("")};
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
