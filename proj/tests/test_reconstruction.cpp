#include "doctest.h"

#include "lagflow/reconstruction.hpp"

using namespace lagflow;

namespace {

FlowMapState<double> shifted(const Discretization<double>& d, double a) {
    Vector<double> x = d.nodes();
    for (Eigen::Index i = 1; i + 1 < x.size(); ++i) x(i) += a * (1 - x(i) * x(i));
    return {d.coefficients_from_nodal(x), 0.0, std::nullopt};
}

}  // namespace

TEST_CASE("flow map inversion") {
    for (auto d : {Discretization<double>::fem_uniform(10), Discretization<double>::spectral(10)}) {
        const auto s = shifted(d, 0.2);
        for (double X : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
            const double x = d.map_at(s.coeffs, X);
            CHECK(invert_flow_map(d, s, x) == doctest::Approx(X).epsilon(1e-12));
        }
        CHECK(invert_flow_map(d, s, -1.0) == -1.0);
        CHECK(invert_flow_map(d, s, 1.0) == 1.0);
        CHECK_THROWS_AS(invert_flow_map(d, s, 1.5), DomainError);
    }
}

TEST_CASE("reconstruction composes the datum with the inverse map") {
    const auto d = Discretization<double>::spectral(12);
    const auto prof = InitialProfile<double>::linear();
    const auto id = FlowMapState<double>::identity(d.dofs());
    const Vector<double> q = Vector<double>::LinSpaced(7, -1.0, 1.0);
    CHECK((reconstruct(d, id, prof, q) - q).cwiseAbs().maxCoeff() < 1e-15);

    // x = X + 0.2 (1 - X^2) inverts in closed form
    const auto s = shifted(d, 0.2);
    const Vector<double> f = reconstruct(d, s, prof, q);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double x = q(i);
        const double X = (1 - std::sqrt(1 - 0.8 * (x - 0.2))) / 0.4;
        CHECK(f(i) == doctest::Approx(X).epsilon(1e-10));
    }
}

TEST_CASE("maximum principle holds exactly") {
    const auto d = Discretization<double>::fem_uniform(20);
    const auto prof = InitialProfile<double>::parabola();
    const auto r = max_principle_check(d, shifted(d, 0.3), prof, 500);
    CHECK(r.ok);
    CHECK(r.max_abs <= r.bound);
    CHECK(r.bound == 1.0);
    CHECK_THROWS_AS(max_principle_check(d, shifted(d, 0.3), prof, 1), ParameterError);
}

TEST_CASE("interface metrics") {
    const Vector<double> xs = Vector<double>::LinSpaced(201, -1.0, 1.0);
    Vector<double> fs(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) fs(i) = std::tanh((xs(i) - 0.1) / 0.05);
    const auto m = interface_metrics(xs, fs);
    CHECK(m.location == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(m.crossings == 1);
    CHECK(m.width == doctest::Approx(2 * 0.05 * std::atanh(0.9)).epsilon(1e-2));

    CHECK_THROWS_AS(interface_metrics(xs, Vector<double>(Vector<double>::Ones(xs.size()))), NoInterfaceError);
    CHECK(interface_metrics(xs, fs, 0.5).location > 0.1);
}

TEST_CASE("total variation") {
    Vector<double> f(4);
    f << 0.0, 1.0, -1.0, 0.5;
    CHECK(total_variation(f) == 4.5);
    CHECK(total_variation(Vector<double>(Vector<double>::Zero(1))) == 0.0);
}

TEST_CASE("filtered reconstruction of a smooth profile") {
    const auto d = Discretization<double>::spectral(16);
    const auto id = FlowMapState<double>::identity(d.dofs());
    const Vector<double> q = Vector<double>::LinSpaced(50, -1.0, 1.0);
    const auto fp = filter_reconstruction(d, id, InitialProfile<double>::linear(), q, 16);
    // the interpolant of f = x is exact, the filter shrinks the L_1 mode
    CHECK((fp.interpolant - q).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((fp.filtered - std::exp(-default_filter_strength<double>() / 16) * q).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(total_variation(fp.filtered) <= total_variation(fp.interpolant));
}
