#include "doctest.h"

#include "lagflow/discretization.hpp"
#include "lagflow/legendre.hpp"

using namespace lagflow;

TEST_CASE("legendre values at the endpoints") {
    for (int n = 0; n <= 20; ++n) {
        CHECK(legendre_eval(n, 1.0) == doctest::Approx(1.0));
        CHECK(legendre_eval(n, -1.0) == doctest::Approx(n % 2 ? -1.0 : 1.0));
        CHECK(legendre_eval_with_derivative(n, 1.0).derivative == doctest::Approx(n * (n + 1) / 2.0));
    }
    CHECK(legendre_eval(2, 0.5) == doctest::Approx(-0.125));
    CHECK_THROWS_AS(legendre_eval(-1, 0.0), ParameterError);
}

TEST_CASE("gauss-lobatto rule") {
    SUBCASE("N = 4 weights") {
        const auto q = gauss_lobatto<double>(4);
        CHECK(q.nodes(0) == -1.0);
        CHECK(q.nodes(4) == 1.0);
        CHECK(q.weights(0) == doctest::Approx(0.1));
        CHECK(q.weights(2) == doctest::Approx(32.0 / 45.0));
        CHECK(q.nodes(1) == doctest::Approx(-std::sqrt(3.0 / 7.0)));
    }
    SUBCASE("exact through degree 2N-1") {
        for (int N : {4, 8, 16}) {
            const auto q = gauss_lobatto<double>(N);
            for (int p = 0; p <= 2 * N - 1; ++p) {
                const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
                CHECK(q.weights.dot(q.nodes.array().pow(p).matrix()) == doctest::Approx(exact).epsilon(1e-13));
            }
        }
    }
    SUBCASE("x^4 needs N >= 3") {
        const auto q = gauss_lobatto<double>(2);
        CHECK(q.weights.dot(q.nodes.array().pow(4).matrix()) == doctest::Approx(2.0 / 3.0));
        const auto q4 = gauss_lobatto<double>(4);
        CHECK(q4.weights.dot(q4.nodes.array().pow(4).matrix()) == doctest::Approx(0.4));
    }
}

TEST_CASE("spectral transform round trip") {
    const int N = 12;
    const auto q = gauss_lobatto<double>(N);
    const Vector<double> v = (q.nodes.array().pow(5) - 2.0 * q.nodes.array() + 0.3).matrix();
    const Vector<double> c = spectral_analysis(v);
    CHECK((spectral_synthesis(c, q.nodes) - v).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(c(7)) < 1e-14);
    CHECK(spectral_synthesis(Vector<double>(Vector<double>::Zero(5)), q.nodes).isZero());
}

TEST_CASE("exponential filter multipliers") {
    Vector<double> c = Vector<double>::Ones(9);
    const Vector<double> f = exponential_filter(c);
    CHECK(f(0) == 1.0);
    CHECK(f(8) == doctest::Approx(std::numeric_limits<double>::epsilon()).epsilon(1e-10));
    for (int n = 1; n <= 8; ++n) CHECK(f(n) < f(n - 1));
    CHECK(exponential_filter(c, 2.0, 2.0)(4) == doctest::Approx(std::exp(-0.5)));
    CHECK_THROWS_AS(exponential_filter(c, 0.0), ParameterError);
}

TEST_CASE("fem discretization") {
    const auto d = Discretization<double>::fem_uniform(4);
    CHECK(d.dofs() == 3);
    CHECK(d.quad_points().size() == 8);
    CHECK(d.quad_weights().sum() == doctest::Approx(2.0));
    // hats sum to one away from the boundary elements
    CHECK(d.basis_values().row(3).sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(Discretization<double>::fem(Vector<double>::LinSpaced(3, 1.0, -1.0)), ParameterError);
    CHECK_THROWS_AS(Discretization<double>::fem_uniform(1), ParameterError);

    Vector<double> c(3);
    c << 0.1, -0.05, 0.02;
    const Vector<double> x = d.nodal_positions(c);
    CHECK(x(0) == -1.0);
    CHECK(x(4) == 1.0);
    CHECK(x(1) == doctest::Approx(-0.4));
    CHECK((d.coefficients_from_nodal(x) - c).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(d.map_at(c, -0.75) == doctest::Approx(0.5 * (-1.0 - 0.4)));
    CHECK(d.jacobian_at(c, -0.75) == doctest::Approx(0.6 / 0.5));
    CHECK_THROWS_AS(d.nodal_positions(Vector<double>::Zero(2)), ShapeError);
}

TEST_CASE("spectral discretization") {
    const auto d = Discretization<double>::spectral(8);
    CHECK(d.dofs() == 7);
    CHECK(d.nodes().size() == 9);
    CHECK(d.quad_weights().sum() == doctest::Approx(2.0));
    CHECK(d.basis_values().row(0).isZero());
    CHECK(d.basis_values().row(8).isZero());

    Vector<double> c = Vector<double>::Zero(7);
    c(0) = 0.1 / 1.5;  // L_0 - L_2 = 1.5 (1 - X^2)
    const Vector<double> x = d.nodal_positions(c);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double X = d.nodes()(i);
        CHECK(x(i) == doctest::Approx(X + 0.1 * (1 - X * X)));
    }
    CHECK(d.jacobian_at(c, 0.5) == doctest::Approx(1 - 0.1));
    CHECK(d.map_at(c, 0.3) == doctest::Approx(0.3 + 0.1 * 0.91));
    CHECK((d.coefficients_from_nodal(x) - c).cwiseAbs().maxCoeff() < 1e-14);
    const Vector<double> J = d.jacobian_at_quadrature(c);
    CHECK(J(0) == doctest::Approx(1.2));
    CHECK(J(8) == doctest::Approx(0.8));
}

TEST_CASE("spectral discretization on a shifted domain") {
    const auto d = Discretization<double>::spectral(6, Domain1D<double>(0.0, 1.0));
    CHECK(d.nodes()(0) == 0.0);
    CHECK(d.nodes()(6) == 1.0);
    CHECK(d.quad_weights().sum() == doctest::Approx(1.0));
    CHECK(d.quad_weights().dot(d.quad_points().cwiseAbs2()) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("discrete jacobian") {
    const auto d = Discretization<double>::fem_uniform(2);
    FlowMapState<double> s{Vector<double>::Constant(1, 0.5), 0.0, std::nullopt};
    const Vector<double> J = discrete_jacobian(s, d);
    CHECK(J(0) == doctest::Approx(1.5));
    CHECK(J(1) == doctest::Approx(0.5));
}
