#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lagflow/core_model.hpp"
#include "lagflow/discretization.hpp"
#include "lagflow/newton.hpp"

namespace lagflow {

enum class Geometry { cartesian, axisymmetric };

/// How the bulk potential enters the weak form.
///
///   energy_consistent  -(F(f0), y')        exact derivative of the quadrature energy
///   chain_rule         (F'(f0), y f0')     the same pairing before integration by parts
///
/// The two agree up to quadrature error; only the first makes the discrete
/// residual the exact gradient of the discrete energy (cartesian geometry only).
enum class LoadForm { energy_consistent, chain_rule };

enum class TimeScheme { bdf1, bdf2 };

/// Constant advection speed v in (x_t - v).
struct AdvectionField {
    double v = 0.0;
};

struct SchemeConfig {
    TimeScheme scheme = TimeScheme::bdf1;
    double dt = 1e-4;
    NewtonConfig newton{};
    std::optional<AdvectionField> advection{};

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("SchemeConfig: dt must be positive");
        if (advection && !std::isfinite(advection->v)) throw ParameterError("SchemeConfig: advection speed must be finite");
        newton.validate();
    }
    double advection_speed() const { return advection ? advection->v : 0.0; }
};

/// The data of one trajectory problem: space, datum, potential and geometry.
/// Profile quantities at the quadrature points are tabulated once.
template <typename Scalar = double>
class TrajectoryModel {
public:
    TrajectoryModel(Discretization<Scalar> disc, InitialProfile<Scalar> profile, Potential<Scalar> potential,
                    Geometry geometry = Geometry::cartesian, LoadForm load = LoadForm::energy_consistent)
        : disc_(std::move(disc)),
          profile_(std::move(profile)),
          potential_(std::move(potential)),
          geometry_(geometry),
          load_(load) {
        if (!(profile_.domain() == disc_.domain()))
            throw ParameterError("TrajectoryModel: profile and discretization live on different domains");
        if (geometry_ == Geometry::axisymmetric && load_ == LoadForm::chain_rule)
            throw ParameterError("TrajectoryModel: chain_rule load form is cartesian only");
        if (geometry_ == Geometry::axisymmetric && !(disc_.domain().left() == Scalar(0)))
            throw ParameterError("TrajectoryModel: axisymmetric domain must be (0, h)");
        const Vector<Scalar>& Xq = disc_.quad_points();
        const Eigen::Index nq = Xq.size();
        on_axis_.assign(static_cast<std::size_t>(nq), false);
        if (geometry_ == Geometry::axisymmetric)
            for (Eigen::Index q = 0; q < nq; ++q) on_axis_[static_cast<std::size_t>(q)] = Xq(q) == Scalar(0);
        slope_sq_.resize(nq);
        F_.resize(nq);
        for (Eigen::Index q = 0; q < nq; ++q) {
            const auto [f, df] = profile_eval(profile_, Xq(q));
            slope_sq_(q) = df * df;
            F_(q) = potential_.F(f);
        }
        if (load_ == LoadForm::chain_rule) {
            load_density_.resize(nq);
            for (Eigen::Index q = 0; q < nq; ++q) {
                const auto [f, df] = profile_eval(profile_, Xq(q));
                load_density_(q) = potential_.Fprime(f) * df;
            }
        }
    }

    const Discretization<Scalar>& disc() const { return disc_; }
    const InitialProfile<Scalar>& profile() const { return profile_; }
    const Potential<Scalar>& potential() const { return potential_; }
    Geometry geometry() const { return geometry_; }
    LoadForm load_form() const { return load_; }

    /// (f0')^2 at the quadrature points.
    const Vector<Scalar>& slope_squared() const { return slope_sq_; }
    /// F(f0) at the quadrature points.
    const Vector<Scalar>& potential_density() const { return F_; }
    /// F'(f0) f0' at the quadrature points (chain_rule form only).
    const Vector<Scalar>& load_density() const { return load_density_; }

    FlowMapState<Scalar> identity_state() const { return FlowMapState<Scalar>::identity(disc_.dofs()); }

    /// Quadrature points on the symmetry axis R = 0 (axisymmetric only). Every
    /// integrand vanishes there with r = 0, and dr/dR is left unconstrained.
    bool on_axis(Eigen::Index q) const { return on_axis_[static_cast<std::size_t>(q)]; }

    /// min dx/dX over the quadrature points off the axis.
    Scalar min_jacobian(const Vector<Scalar>& coeffs) const {
        const Vector<Scalar> J = disc_.jacobian_at_quadrature(coeffs);
        Scalar m = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index q = 0; q < J.size(); ++q)
            if (!on_axis(q) && J(q) < m) m = J(q);
        return m;
    }

private:
    Discretization<Scalar> disc_;
    InitialProfile<Scalar> profile_;
    Potential<Scalar> potential_;
    Geometry geometry_;
    LoadForm load_;
    Vector<Scalar> slope_sq_;
    Vector<Scalar> F_;
    Vector<Scalar> load_density_;
    std::vector<bool> on_axis_;
};

/// Time-derivative term of a step, tabulated at the quadrature points:
/// the weak form gains -(mobility * rate, y), and d rate / d x = rate_slope.
template <typename Scalar>
struct RateTerm {
    Vector<Scalar> mobility;
    Vector<Scalar> rate;
    Scalar rate_slope;
};

namespace detail {

/// Positions and Jacobians at the quadrature points, with the admissibility checks.
template <typename Scalar>
struct Kinematics {
    Vector<Scalar> x;
    Vector<Scalar> J;
};

template <typename Scalar>
Kinematics<Scalar> kinematics(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& coeffs) {
    const auto& disc = model.disc();
    Kinematics<Scalar> k{disc.positions_at_quadrature(coeffs), disc.jacobian_at_quadrature(coeffs)};
    if (!(model.min_jacobian(coeffs) > Scalar(0)))
        throw PositivityError("flow map lost monotonicity: dx/dX <= 0 at a quadrature point");
    for (Eigen::Index q = 0; q < k.J.size(); ++q)
        if (model.on_axis(q)) k.J(q) = Scalar(1);
    if (model.geometry() == Geometry::axisymmetric) {
        const Vector<Scalar>& R = disc.quad_points();
        for (Eigen::Index q = 0; q < R.size(); ++q)
            if (R(q) > Scalar(0) && !(k.x(q) > Scalar(0)))
                throw GeometryError("axisymmetric map reached r <= 0 at R > 0");
    }
    return k;
}

template <typename Scalar>
bool admissible(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& coeffs) {
    const auto& disc = model.disc();
    if (!coeffs.allFinite()) return false;
    if (!(model.min_jacobian(coeffs) > Scalar(0))) return false;
    if (model.geometry() == Geometry::axisymmetric) {
        const Vector<Scalar> x = disc.positions_at_quadrature(coeffs);
        const Vector<Scalar>& R = disc.quad_points();
        for (Eigen::Index q = 0; q < R.size(); ++q)
            if (R(q) > Scalar(0) && !(x(q) > Scalar(0))) return false;
    }
    return true;
}

/// Pointwise first and second partial derivatives of the energy density e(x, J).
///   cartesian     e = a/(2J) + F J
///   axisymmetric  e = (a/(2J) + F J) r,  r = x
template <typename Scalar>
struct DensityDerivatives {
    Vector<Scalar> dJ, dx, dJJ, dxJ;
};

template <typename Scalar>
DensityDerivatives<Scalar> density_derivatives(const TrajectoryModel<Scalar>& model, const Kinematics<Scalar>& k) {
    const auto a = model.slope_squared().array();
    const auto F = model.potential_density().array();
    const auto J = k.J.array();
    DensityDerivatives<Scalar> d;
    if (model.geometry() == Geometry::cartesian) {
        d.dJ = (-Scalar(0.5) * a / J.square() + F).matrix();
        d.dx = Vector<Scalar>::Zero(J.size());
        d.dJJ = (a / J.cube()).matrix();
        d.dxJ = Vector<Scalar>::Zero(J.size());
    } else {
        const auto r = k.x.array();
        d.dJ = ((-Scalar(0.5) * a / J.square() + F) * r).matrix();
        d.dx = (Scalar(0.5) * a / J + F * J).matrix();
        d.dJJ = (a * r / J.cube()).matrix();
        d.dxJ = (-Scalar(0.5) * a / J.square() + F).matrix();
    }
    return d;
}

}  // namespace detail

/// Weak residual G(c) = -dE(c) - (mobility * rate, y) over the basis of V^0.
template <typename Scalar>
Vector<Scalar> assemble_residual(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& coeffs,
                                 const RateTerm<Scalar>& rate) {
    const auto& disc = model.disc();
    const auto k = detail::kinematics(model, coeffs);
    const auto d = detail::density_derivatives(model, k);
    const auto& w = disc.quad_weights();
    const auto& B = disc.basis_values();
    const auto& D = disc.basis_derivatives();

    Vector<Scalar> fluxJ = w.cwiseProduct(d.dJ);
    Vector<Scalar> fluxx = w.cwiseProduct(d.dx + rate.mobility.cwiseProduct(rate.rate));
    if (model.load_form() == LoadForm::chain_rule) {
        // Replace -(F, y') by (F'(f0) f0', y).
        fluxJ -= w.cwiseProduct(model.potential_density());
        fluxx -= w.cwiseProduct(model.load_density());
    }
    return -(D.transpose() * fluxJ + B.transpose() * fluxx);
}

/// dG/dc for assemble_residual.
template <typename Scalar>
Matrix<Scalar> assemble_tangent(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& coeffs,
                                const RateTerm<Scalar>& rate) {
    const auto& disc = model.disc();
    const auto k = detail::kinematics(model, coeffs);
    const auto d = detail::density_derivatives(model, k);
    const auto& w = disc.quad_weights();
    const auto& B = disc.basis_values();
    const auto& D = disc.basis_derivatives();

    Matrix<Scalar> K = D.transpose() * w.cwiseProduct(d.dJJ).asDiagonal() * D;
    K.noalias() += B.transpose() * (w.cwiseProduct(rate.mobility) * rate.rate_slope).asDiagonal() * B;
    if (model.geometry() == Geometry::axisymmetric) {
        const Matrix<Scalar> cross = D.transpose() * w.cwiseProduct(d.dxJ).asDiagonal() * B;
        K += cross + cross.transpose();
    }
    return -K;
}

/// Mobility (f0')^2 / (dx^n/dX), times r^n in the axisymmetric geometry.
template <typename Scalar>
Vector<Scalar> lagged_mobility(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& prev_coeffs) {
    const auto k = detail::kinematics(model, prev_coeffs);
    Vector<Scalar> m = model.slope_squared().cwiseQuotient(k.J);
    if (model.geometry() == Geometry::axisymmetric) m = m.cwiseProduct(k.x);
    return m;
}

template <typename Scalar>
RateTerm<Scalar> bdf1_rate(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& candidate,
                           const Vector<Scalar>& prev, Scalar dt, Scalar v = Scalar(0)) {
    const auto& B = model.disc().basis_values();
    Vector<Scalar> rate = B * (candidate - prev) / dt;
    if (v != Scalar(0)) rate.array() -= v;
    return {lagged_mobility(model, prev), std::move(rate), Scalar(1) / dt};
}

template <typename Scalar>
RateTerm<Scalar> bdf2_rate(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& candidate,
                           const Vector<Scalar>& current, const Vector<Scalar>& previous,
                           const Vector<Scalar>& star, Scalar dt) {
    const auto& B = model.disc().basis_values();
    Vector<Scalar> rate = B * (Scalar(3) * candidate - Scalar(4) * current + previous) / (Scalar(2) * dt);
    return {model.slope_squared().cwiseQuotient(star), std::move(rate), Scalar(3) / (Scalar(2) * dt)};
}

/// Fully discrete first-order residual for the candidate x^{n+1} given x^n.
template <typename Scalar>
Vector<Scalar> residual_weak_bdf1(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& candidate,
                                  const FlowMapState<Scalar>& prev, Scalar dt) {
    if (!(dt > 0)) throw ParameterError("residual_weak_bdf1: dt must be positive");
    model.disc().check(candidate.coeffs);
    return assemble_residual(model, candidate.coeffs, bdf1_rate(model, candidate.coeffs, prev.coeffs, dt));
}

/// First-order residual of the advected trajectory equation, (x_t - v) in the rate factor.
template <typename Scalar>
Vector<Scalar> residual_advection_bdf1(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& candidate,
                                       const FlowMapState<Scalar>& prev, AdvectionField field, Scalar dt) {
    if (!(dt > 0)) throw ParameterError("residual_advection_bdf1: dt must be positive");
    model.disc().check(candidate.coeffs);
    return assemble_residual(model, candidate.coeffs,
                             bdf1_rate(model, candidate.coeffs, prev.coeffs, dt, Scalar(field.v)));
}

template <typename Scalar>
Matrix<Scalar> tangent_bdf1(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& candidate,
                            const FlowMapState<Scalar>& prev, Scalar dt) {
    return assemble_tangent(model, candidate.coeffs, bdf1_rate(model, candidate.coeffs, prev.coeffs, dt));
}

/// Positivity-preserving second-order extrapolation of dx/dX:
/// linear when the Jacobian grows, harmonic when it shrinks.
template <typename Scalar>
Vector<Scalar> jacobian_star(const Vector<Scalar>& dn, const Vector<Scalar>& dnm1) {
    if (dn.size() != dnm1.size()) throw ShapeError("jacobian_star: size mismatch");
    Vector<Scalar> out(dn.size());
    for (Eigen::Index i = 0; i < dn.size(); ++i) {
        const Scalar a = dn(i), b = dnm1(i);
        if (!(a > 0) || !(b > 0)) throw ParameterError("jacobian_star: Jacobians must be positive");
        out(i) = a >= b ? Scalar(2) * a - b : Scalar(1) / (Scalar(2) / a - Scalar(1) / b);
    }
    return out;
}

/// Second-order residual. `current` must carry x^{n-1} in `previous`.
template <typename Scalar>
Vector<Scalar> residual_weak_bdf2(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& candidate,
                                  const FlowMapState<Scalar>& current, const Vector<Scalar>& star, Scalar dt) {
    if (!current.previous) throw StartupError("BDF2 needs two history levels");
    model.disc().check(candidate.coeffs);
    return assemble_residual(model, candidate.coeffs,
                             bdf2_rate(model, candidate.coeffs, current.coeffs, *current.previous, star, dt));
}

template <typename Scalar>
Matrix<Scalar> tangent_bdf2(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& candidate,
                            const FlowMapState<Scalar>& current, const Vector<Scalar>& star, Scalar dt) {
    if (!current.previous) throw StartupError("BDF2 needs two history levels");
    return assemble_tangent(model, candidate.coeffs,
                            bdf2_rate(model, candidate.coeffs, current.coeffs, *current.previous, star, dt));
}

/// Lagrangian energy  int {a/(2J) + F(f0) J} dX  (times r in the axisymmetric geometry).
template <typename Scalar>
EnergyReport<Scalar> energy(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& state) {
    const auto k = detail::kinematics(model, state.coeffs);
    const auto& w = model.disc().quad_weights();
    Vector<Scalar> grad = Scalar(0.5) * model.slope_squared().cwiseQuotient(k.J);
    Vector<Scalar> pot = model.potential_density().cwiseProduct(k.J);
    if (model.geometry() == Geometry::axisymmetric) {
        grad = grad.cwiseProduct(k.x);
        pot = pot.cwiseProduct(k.x);
    }
    EnergyReport<Scalar> e;
    e.gradient_part = w.dot(grad);
    e.potential_part = w.dot(pot);
    e.total = e.gradient_part + e.potential_part;
    return e;
}

/// int (f0')^2 / J* |u|^2 dX for a displacement field u given by coefficients.
template <typename Scalar>
Scalar weighted_square(const TrajectoryModel<Scalar>& model, const Vector<Scalar>& star,
                       const Vector<Scalar>& displacement) {
    const auto& disc = model.disc();
    const Vector<Scalar> u = disc.basis_values() * displacement;
    return disc.quad_weights().dot(model.slope_squared().cwiseQuotient(star).cwiseProduct(u.cwiseAbs2()));
}

/// BDF2 energy: energy(next) + 1/(4 dt) int (f0')^2 / J* |x^{n+1} - x^n|^2 dX.
template <typename Scalar>
EnergyReport<Scalar> energy_bdf2(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& next,
                                 const FlowMapState<Scalar>& prev, const Vector<Scalar>& star, Scalar dt) {
    if (!(dt > 0)) throw ParameterError("energy_bdf2: dt must be positive");
    if (star.size() != model.disc().quad_points().size()) throw ShapeError("energy_bdf2: star field size mismatch");
    EnergyReport<Scalar> e = energy(model, next);
    e.bdf2_augmentation = weighted_square(model, star, Vector<Scalar>(next.coeffs - prev.coeffs)) / (Scalar(4) * dt);
    e.total += e.bdf2_augmentation;
    return e;
}

template <typename Scalar>
struct DissipationReport {
    bool satisfied;
    Scalar slack;
    /// E_next + increment <= E_prev + tol, the sharper form of the law.
    bool strict_satisfied;
};

/// Tolerance used for every energy comparison: 1e-10 (1 + |E_prev|).
template <typename Scalar>
Scalar dissipation_tolerance(Scalar E_prev) {
    using std::abs;
    return Scalar(1e-10) * (Scalar(1) + abs(E_prev));
}

template <typename Scalar>
DissipationReport<Scalar> dissipation_audit(Scalar E_prev, Scalar E_next, Scalar increment = Scalar(0)) {
    const Scalar tol = dissipation_tolerance(E_prev);
    return {E_next <= E_prev + tol, E_prev - E_next, E_next + increment <= E_prev + tol};
}

template <typename Scalar>
struct StepResult {
    FlowMapState<Scalar> state;
    IterationReport newton;
    /// Energy of the new state; for BDF2 it carries the augmentation.
    EnergyReport<Scalar> energy;
    /// Energy of the old state measured with the functional of this step.
    Scalar reference_energy;
    DissipationReport<Scalar> audit;
};

namespace detail {

template <typename Scalar>
TangentStructure tangent_structure(const TrajectoryModel<Scalar>& model) {
    if (model.disc().is_fem()) return TangentStructure::tridiagonal;
    return model.geometry() == Geometry::cartesian ? TangentStructure::negative_definite
                                                   : TangentStructure::general;
}

}  // namespace detail

/// One first-order step: solves residual_weak_bdf1 = 0 (with the advection
/// speed of cfg, if any) by damped Newton from x^n.
template <typename Scalar>
StepResult<Scalar> step_bdf1(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& prev,
                             const SchemeConfig& cfg) {
    cfg.validate();
    const Scalar dt(cfg.dt);
    const Scalar v(cfg.advection_speed());
    const Vector<Scalar>& xn = prev.coeffs;
    model.disc().check(xn);
    const RateTerm<Scalar> frozen = bdf1_rate(model, xn, xn, dt, v);
    const auto& B = model.disc().basis_values();
    auto rate_at = [&](const Vector<Scalar>& c) {
        RateTerm<Scalar> r{frozen.mobility, B * (c - xn) / dt, frozen.rate_slope};
        if (v != Scalar(0)) r.rate.array() -= v;
        return r;
    };
    auto G = [&](const Vector<Scalar>& c) { return assemble_residual(model, c, rate_at(c)); };
    auto K = [&](const Vector<Scalar>& c) { return assemble_tangent(model, c, rate_at(c)); };
    auto guard = [&](const Vector<Scalar>& c) { return detail::admissible(model, c); };

    auto solved = damped_newton<Scalar>(G, K, xn, cfg.newton, detail::tangent_structure(model), guard);

    StepResult<Scalar> out{{std::move(solved.solution), prev.time + dt, xn}, std::move(solved.report), {}, {}, {}};
    out.energy = energy(model, out.state);
    const Vector<Scalar> u = B * (out.state.coeffs - xn);
    out.energy.dissipation_increment = model.disc().quad_weights().dot(frozen.mobility.cwiseProduct(u.cwiseAbs2())) / dt;
    out.reference_energy = energy(model, prev).total;
    out.audit = dissipation_audit(out.reference_energy, out.energy.total, out.energy.dissipation_increment);
    return out;
}

/// One second-order step from (x^n, x^{n-1}).
template <typename Scalar>
StepResult<Scalar> step_bdf2(const TrajectoryModel<Scalar>& model, const FlowMapState<Scalar>& current,
                             const SchemeConfig& cfg) {
    cfg.validate();
    if (!current.previous) throw StartupError("step_bdf2: the state carries no previous level");
    if (cfg.advection) throw ParameterError("step_bdf2: advection is only implemented for BDF1");
    const Scalar dt(cfg.dt);
    const auto& disc = model.disc();
    const Vector<Scalar>& xn = current.coeffs;
    const Vector<Scalar>& xnm1 = *current.previous;
    disc.check(xn);
    disc.check(xnm1);
    const Vector<Scalar> star =
        jacobian_star(disc.jacobian_at_quadrature(xn), disc.jacobian_at_quadrature(xnm1));
    const Vector<Scalar> mobility = model.slope_squared().cwiseQuotient(star);
    const auto& B = disc.basis_values();
    const Vector<Scalar> history = B * (Scalar(4) * xn - xnm1);
    auto rate_at = [&](const Vector<Scalar>& c) {
        return RateTerm<Scalar>{mobility, (Scalar(3) * (B * c) - history) / (Scalar(2) * dt),
                                Scalar(3) / (Scalar(2) * dt)};
    };
    auto G = [&](const Vector<Scalar>& c) { return assemble_residual(model, c, rate_at(c)); };
    auto K = [&](const Vector<Scalar>& c) { return assemble_tangent(model, c, rate_at(c)); };
    auto guard = [&](const Vector<Scalar>& c) { return detail::admissible(model, c); };

    auto solved = damped_newton<Scalar>(G, K, xn, cfg.newton, detail::tangent_structure(model), guard);

    StepResult<Scalar> out{{std::move(solved.solution), current.time + dt, xn}, std::move(solved.report), {}, {}, {}};
    out.energy = energy_bdf2(model, out.state, current, star, dt);
    const Vector<Scalar> second = out.state.coeffs - Scalar(2) * xn + xnm1;
    out.energy.dissipation_increment =
        (weighted_square(model, star, Vector<Scalar>(out.state.coeffs - xn)) +
         Scalar(0.25) * weighted_square(model, star, second)) / dt;
    // The old level measured with the same star field, which is what the law bounds.
    out.reference_energy = energy(model, current).total +
                           weighted_square(model, star, Vector<Scalar>(xn - xnm1)) / (Scalar(4) * dt);
    out.audit = dissipation_audit(out.reference_energy, out.energy.total, out.energy.dissipation_increment);
    return out;
}

/// Per-step diagnostics produced by TrajectorySolver.
template <typename Scalar>
struct StepRecord {
    int step = 0;
    Scalar time{0};
    EnergyReport<Scalar> energy;
    Scalar slack{0};
    bool audit_ok = true;
    IterationReport newton;
    Scalar min_jacobian{1};
    /// Max change of the map at the Lagrangian nodes during the step.
    Scalar max_displacement{0};
};

/// Time loop over step_bdf1 / step_bdf2. BDF2 starts with one BDF1 step.
template <typename Scalar = double>
class TrajectorySolver {
public:
    TrajectorySolver(TrajectoryModel<Scalar> model, SchemeConfig cfg)
        : model_(std::move(model)), cfg_(std::move(cfg)), state_(model_.identity_state()) {
        cfg_.validate();
        if (model_.geometry() == Geometry::axisymmetric && cfg_.scheme == TimeScheme::bdf2)
            throw ParameterError("TrajectorySolver: the axisymmetric geometry has a first-order scheme only");
    }

    const TrajectoryModel<Scalar>& model() const { return model_; }
    const SchemeConfig& config() const { return cfg_; }
    const FlowMapState<Scalar>& state() const { return state_; }
    int steps_taken() const { return steps_; }

    EnergyReport<Scalar> current_energy() const { return energy(model_, state_); }

    StepRecord<Scalar> step() {
        const bool second_order = cfg_.scheme == TimeScheme::bdf2 && state_.previous.has_value();
        StepResult<Scalar> r = second_order ? step_bdf2(model_, state_, cfg_) : step_bdf1(model_, state_, cfg_);
        StepRecord<Scalar> rec;
        rec.step = ++steps_;
        rec.time = Scalar(steps_) * Scalar(cfg_.dt);
        r.state.time = rec.time;
        rec.energy = r.energy;
        rec.slack = r.audit.slack;
        rec.audit_ok = r.audit.satisfied;
        rec.newton = std::move(r.newton);
        rec.min_jacobian = model_.min_jacobian(r.state.coeffs);
        const auto& disc = model_.disc();
        rec.max_displacement =
            (disc.nodal_positions(r.state.coeffs) - disc.nodal_positions(state_.coeffs)).cwiseAbs().maxCoeff();
        state_ = std::move(r.state);
        return rec;
    }

private:
    TrajectoryModel<Scalar> model_;
    SchemeConfig cfg_;
    FlowMapState<Scalar> state_;
    int steps_ = 0;
};

}  // namespace lagflow
