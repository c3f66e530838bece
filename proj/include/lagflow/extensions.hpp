#pragma once

// Axisymmetric trajectory equation on the disk of radius h, and the advected
// variant (whose residual lives with the base scheme in schemes.hpp).
//
// The radial map r(R, t) uses the same compact bases as the cartesian map on
// (0, h), so both r(0) = 0 and r(h) = h are built into the trial space. The
// energy carries the r dr measure, det(dr/dR) R dR = r r'(R) dR:
//
//   E(r) = int_0^h { (f0')^2 / (2 r') + F(f0) r' } r dR

#include "lagflow/schemes.hpp"

namespace lagflow {

template <typename Scalar>
using PolarState = FlowMapState<Scalar>;

template <typename Scalar>
TrajectoryModel<Scalar> make_axisymmetric_model(Discretization<Scalar> disc, InitialProfile<Scalar> profile,
                                                Potential<Scalar> potential) {
    return TrajectoryModel<Scalar>(std::move(disc), std::move(profile), std::move(potential), Geometry::axisymmetric);
}

template <typename Scalar>
EnergyReport<Scalar> energy_axisym(const TrajectoryModel<Scalar>& model, const PolarState<Scalar>& state) {
    if (model.geometry() != Geometry::axisymmetric) throw ParameterError("energy_axisym: model is not axisymmetric");
    return energy(model, state);
}

/// First-order step of the radial trajectory equation. The mobility is lagged,
/// (f0')^2 r^n / (dr^n/dR), so each step is the minimizing movement of E.
template <typename Scalar>
StepResult<Scalar> step_axisym_bdf1(const TrajectoryModel<Scalar>& model, const PolarState<Scalar>& prev,
                                    const SchemeConfig& cfg) {
    if (model.geometry() != Geometry::axisymmetric) throw ParameterError("step_axisym_bdf1: model is not axisymmetric");
    if (cfg.advection) throw ParameterError("step_axisym_bdf1: no advection in the radial problem");
    detail::kinematics(model, prev.coeffs);
    return step_bdf1(model, prev, cfg);
}

}  // namespace lagflow
