#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lagflow/errors.hpp"

namespace lagflow {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Open interval (left, right) shared by the Lagrangian and Eulerian coordinates.
template <typename Scalar = double>
class Domain1D {
public:
    Domain1D() = default;
    Domain1D(Scalar left, Scalar right) : left_(left), right_(right) {
        if (!(left < right)) throw ParameterError("Domain1D: left must be < right");
    }

    Scalar left() const { return left_; }
    Scalar right() const { return right_; }
    Scalar length() const { return right_ - left_; }
    Scalar midpoint() const { return Scalar(0.5) * (left_ + right_); }
    bool contains(Scalar x) const { return x >= left_ && x <= right_; }

    friend bool operator==(const Domain1D& a, const Domain1D& b) {
        return a.left_ == b.left_ && a.right_ == b.right_;
    }

private:
    Scalar left_{-1};
    Scalar right_{1};
};

template <typename Scalar>
struct ProfileValue {
    Scalar value;
    Scalar slope;
};

/// Initial datum f0 in Lagrangian coordinates, with its exact derivative.
///
/// The derivative is data for the scheme (it enters the mobility and the
/// gradient energy), so user profiles must supply it in closed form.
template <typename Scalar = double>
class InitialProfile {
public:
    using Function = std::function<Scalar(Scalar)>;

    InitialProfile(std::string name, Function value, Function slope, Domain1D<Scalar> domain = {})
        : name_(std::move(name)), value_(std::move(value)), slope_(std::move(slope)), domain_(domain) {}

    /// f0(X) = X
    static InitialProfile linear(Domain1D<Scalar> domain = {}) {
        return {"linear", [](Scalar X) { return X; }, [](Scalar) { return Scalar(1); }, domain};
    }

    /// f0(X) = amplitude * X
    static InitialProfile scaled_linear(Scalar amplitude, Domain1D<Scalar> domain = {}) {
        return {"scaled_linear", [amplitude](Scalar X) { return amplitude * X; },
                [amplitude](Scalar) { return amplitude; }, domain};
    }

    /// f0(X) = 1 - X^2
    static InitialProfile parabola(Domain1D<Scalar> domain = {}) {
        return {"parabola", [](Scalar X) { return Scalar(1) - X * X; },
                [](Scalar X) { return Scalar(-2) * X; }, domain};
    }

    static InitialProfile constant(Scalar c, Domain1D<Scalar> domain = {}) {
        return {"constant", [c](Scalar) { return c; }, [](Scalar) { return Scalar(0); }, domain};
    }

    const std::string& name() const { return name_; }
    const Domain1D<Scalar>& domain() const { return domain_; }

    /// Unchecked evaluation; callers that cannot guarantee X in the domain use profile_eval.
    Scalar value(Scalar X) const { return value_(X); }
    Scalar slope(Scalar X) const { return slope_(X); }

    /// Same profile on another domain (the axisymmetric runs live on (0, h)).
    InitialProfile on(Domain1D<Scalar> domain) const {
        return {name_, value_, slope_, domain};
    }

private:
    std::string name_;
    Function value_;
    Function slope_;
    Domain1D<Scalar> domain_;
};

template <typename Scalar>
ProfileValue<Scalar> profile_eval(const InitialProfile<Scalar>& profile, Scalar X) {
    if (!profile.domain().contains(X))
        throw DomainError("profile_eval: X outside the Lagrangian domain");
    return {profile.value(X), profile.slope(X)};
}

enum class PotentialKind { none, double_well, logarithmic };

template <typename Scalar>
struct PotentialValue {
    Scalar F;
    Scalar Fprime;
};

/// Bulk free-energy density F and its derivative.
///
///   double well   F(s) = (s^2 - 1)^2 / (4 eps2)
///   logarithmic   F(s) = theta/2 [(1+s) log(1+s) + (1-s) log(1-s)] - theta_c/2 s^2,  |s| < 1
template <typename Scalar = double>
class Potential {
public:
    Potential() = default;

    static Potential none() { return Potential{}; }

    static Potential double_well(Scalar eps2) {
        if (!(eps2 > 0)) throw ParameterError("double-well potential needs eps2 > 0");
        Potential p;
        p.kind_ = PotentialKind::double_well;
        p.eps2_ = eps2;
        return p;
    }

    static Potential logarithmic(Scalar theta = 1, Scalar theta_c = 2) {
        if (!(theta > 0) || !(theta_c > 0))
            throw ParameterError("logarithmic potential needs theta > 0 and theta_c > 0");
        Potential p;
        p.kind_ = PotentialKind::logarithmic;
        p.theta_ = theta;
        p.theta_c_ = theta_c;
        return p;
    }

    PotentialKind kind() const { return kind_; }
    Scalar eps2() const { return eps2_; }
    Scalar theta() const { return theta_; }
    Scalar theta_c() const { return theta_c_; }

    Scalar F(Scalar s) const {
        using std::log;
        switch (kind_) {
            case PotentialKind::double_well: {
                const Scalar w = s * s - Scalar(1);
                return w * w / (Scalar(4) * eps2_);
            }
            case PotentialKind::logarithmic:
                guard(s);
                return theta_ / 2 * ((1 + s) * log(1 + s) + (1 - s) * log(1 - s)) - theta_c_ / 2 * s * s;
            case PotentialKind::none:
                break;
        }
        return Scalar(0);
    }

    Scalar Fprime(Scalar s) const {
        using std::log;
        switch (kind_) {
            case PotentialKind::double_well:
                return s * (s * s - Scalar(1)) / eps2_;
            case PotentialKind::logarithmic:
                guard(s);
                return theta_ / 2 * (log(1 + s) - log(1 - s)) - theta_c_ * s;
            case PotentialKind::none:
                break;
        }
        return Scalar(0);
    }

private:
    static void guard(Scalar s) {
        using std::abs;
        if (!(abs(s) < Scalar(1))) throw DomainError("logarithmic potential evaluated at |s| >= 1");
    }

    PotentialKind kind_ = PotentialKind::none;
    Scalar eps2_{0};
    Scalar theta_{1};
    Scalar theta_c_{2};
};

template <typename Scalar>
PotentialValue<Scalar> potential_eval(const Potential<Scalar>& potential, Scalar s) {
    return {potential.F(s), potential.Fprime(s)};
}

/// Flow map x(X, t) = X + sum_j coeffs_j * basis_j(X), with every basis function
/// vanishing on the boundary, so boundary pinning holds by construction.
///
/// For the finite-element space the coefficients are the interior nodal
/// displacements x_i - X_i; for the Legendre space they multiply L_j - L_{j+2}.
template <typename Scalar = double>
struct FlowMapState {
    Vector<Scalar> coeffs;
    Scalar time{0};
    /// Previous time level, needed by BDF2.
    std::optional<Vector<Scalar>> previous;

    static FlowMapState identity(Eigen::Index dofs) {
        return {Vector<Scalar>::Zero(dofs), Scalar(0), std::nullopt};
    }
};

/// Lagrangian energy split. total = gradient_part + potential_part + bdf2_augmentation.
template <typename Scalar = double>
struct EnergyReport {
    Scalar total{0};
    Scalar gradient_part{0};
    Scalar potential_part{0};
    Scalar bdf2_augmentation{0};
    /// Quadratic dissipation term of the step that produced the state (0 for the initial state).
    Scalar dissipation_increment{0};
};

}  // namespace lagflow
