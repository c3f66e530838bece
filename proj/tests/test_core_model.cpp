#include "doctest.h"

#include "lagflow/core_model.hpp"

using namespace lagflow;

TEST_CASE("double well values and derivative") {
    const auto F = Potential<double>::double_well(0.1);
    CHECK(F.F(1.0) == 0.0);
    CHECK(F.F(-1.0) == 0.0);
    CHECK(F.F(0.0) == doctest::Approx(1.0 / 0.4));
    CHECK(F.Fprime(0.0) == 0.0);
    const double s = 0.3, h = 1e-6;
    CHECK(F.Fprime(s) == doctest::Approx((F.F(s + h) - F.F(s - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("logarithmic potential guards its domain") {
    const auto F = Potential<double>::logarithmic();
    CHECK(F.F(0.0) == 0.0);
    CHECK(F.Fprime(0.5) == doctest::Approx(0.5 * std::log(3.0) - 1.0));
    CHECK_THROWS_AS(F.F(1.0), DomainError);
    CHECK_THROWS_AS(F.Fprime(-1.2), DomainError);
    CHECK_THROWS_AS(Potential<double>::logarithmic(0.0), ParameterError);
}

TEST_CASE("potential parameters are validated") {
    CHECK_THROWS_AS(Potential<double>::double_well(0.0), ParameterError);
    CHECK_THROWS_AS(Potential<double>::double_well(-1.0), ParameterError);
    CHECK(Potential<double>::none().F(0.7) == 0.0);
}

TEST_CASE("profiles") {
    const auto lin = InitialProfile<double>::linear();
    CHECK(lin.value(0.25) == 0.25);
    CHECK(lin.slope(-0.9) == 1.0);
    const auto par = InitialProfile<double>::parabola();
    CHECK(par.value(0.5) == 0.75);
    CHECK(par.slope(0.5) == -1.0);
    const auto half = lin.on(Domain1D<double>(0.0, 1.0));
    CHECK(half.domain().left() == 0.0);
    CHECK(profile_eval(lin, 0.5).value == 0.5);
    CHECK_THROWS_AS(profile_eval(lin, 1.5), DomainError);
}

TEST_CASE("domain rejects empty intervals") {
    CHECK_THROWS_AS(Domain1D<double>(1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(Domain1D<double>(1.0, -1.0), ParameterError);
    CHECK(Domain1D<double>(-2.0, 4.0).midpoint() == 1.0);
}

TEST_CASE("identity state has zero displacement") {
    const auto s = FlowMapState<double>::identity(5);
    CHECK(s.coeffs.size() == 5);
    CHECK(s.coeffs.isZero());
    CHECK_FALSE(s.previous.has_value());
}
