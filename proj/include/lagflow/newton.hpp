#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lagflow/core_model.hpp"

namespace lagflow {

enum class DampingMode {
    /// x <- x - damping * K^{-1} G
    constant,
    /// damping is further reduced so that the update max-norm never exceeds max_step
    step_limited,
};

/// Structure of the Newton tangent; selects the direct solver.
enum class TangentStructure { general, negative_definite, tridiagonal };

struct NewtonConfig {
    double damping = 1.0;
    DampingMode mode = DampingMode::constant;
    double max_step = 0.1;
    double tol_residual = 1e-10;
    /// Also converged once an undamped update is below tol_step (1 + max|x|):
    /// for stiff problems the residual has a rounding floor above tol_residual.
    double tol_step = 1e-12;
    int max_iters = 200;
    /// Halve the damping of an update whose trial iterate violates the guard.
    bool safeguard = true;
    int max_halvings = 60;

    /// damping = min(1, c * eps2), the O(eps^2) damping.
    static NewtonConfig epsilon_scaled(double eps2, double c = 1.0) {
        NewtonConfig cfg;
        cfg.damping = std::min(1.0, c * eps2);
        return cfg;
    }

    void validate() const {
        if (!(damping > 0.0 && damping <= 1.0)) throw ParameterError("NewtonConfig: damping must lie in (0, 1]");
        if (!(tol_residual > 0.0)) throw ParameterError("NewtonConfig: tol_residual must be positive");
        if (!(tol_step >= 0.0)) throw ParameterError("NewtonConfig: tol_step must be non-negative");
        if (max_iters < 1) throw ParameterError("NewtonConfig: max_iters must be positive");
        if (mode == DampingMode::step_limited && !(max_step > 0.0))
            throw ParameterError("NewtonConfig: max_step must be positive");
    }
};

template <typename Scalar>
struct NewtonResult {
    Vector<Scalar> solution;
    IterationReport report;
};

namespace detail {

template <typename Scalar>
Scalar max_norm(const Vector<Scalar>& v) {
    return v.size() == 0 ? Scalar(0) : v.template lpNorm<Eigen::Infinity>();
}

/// Thomas algorithm on the three diagonals of K. Returns false on a vanishing pivot.
template <typename Scalar>
bool solve_tridiagonal(const Matrix<Scalar>& K, const Vector<Scalar>& rhs, Vector<Scalar>& out) {
    using std::abs;
    const Eigen::Index n = rhs.size();
    out.resize(n);
    if (n == 0) return true;
    const Scalar scale = K.cwiseAbs().maxCoeff();
    const Scalar tiny = scale * Scalar(n) * std::numeric_limits<Scalar>::epsilon();
    Vector<Scalar> c(n), d(n);
    Scalar pivot = K(0, 0);
    if (!(abs(pivot) > tiny)) return false;
    c(0) = n > 1 ? K(0, 1) / pivot : Scalar(0);
    d(0) = rhs(0) / pivot;
    for (Eigen::Index i = 1; i < n; ++i) {
        pivot = K(i, i) - K(i, i - 1) * c(i - 1);
        if (!(abs(pivot) > tiny)) return false;
        c(i) = i + 1 < n ? K(i, i + 1) / pivot : Scalar(0);
        d(i) = (rhs(i) - K(i, i - 1) * d(i - 1)) / pivot;
    }
    out(n - 1) = d(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) out(i) = d(i) - c(i) * out(i + 1);
    return true;
}

template <typename Scalar>
bool solve_tangent(const Matrix<Scalar>& K, const Vector<Scalar>& rhs, TangentStructure structure,
                   Vector<Scalar>& out) {
    if (!K.allFinite() || !rhs.allFinite()) return false;
    switch (structure) {
        case TangentStructure::tridiagonal:
            if (!solve_tridiagonal(K, rhs, out)) return false;
            return out.allFinite();
        case TangentStructure::negative_definite: {
            Eigen::LLT<Matrix<Scalar>> llt(-K);
            if (llt.info() == Eigen::Success) {
                out = -llt.solve(rhs);
                if (out.allFinite()) return true;
            }
            [[fallthrough]];
        }
        case TangentStructure::general: {
            Eigen::FullPivLU<Matrix<Scalar>> lu(K);
            if (!lu.isInvertible()) return false;
            out = lu.solve(rhs);
            return out.allFinite();
        }
    }
    return false;
}

struct AlwaysAdmissible {
    template <typename V>
    bool operator()(const V&) const {
        return true;
    }
};

}  // namespace detail

/// Damped Newton iteration x <- x - alpha K(x)^{-1} G(x).
///
/// Converged when max|G| <= tol_residual, or after an undamped update of
/// max-norm <= tol_step (1 + max|x|). Every accepted iterate satisfies
/// guard; a violating trial halves alpha for that update only. Full Newton
/// steps that still contract only linearly when the tolerance is met signal a
/// singular tangent at the root and are reported as such.
template <typename Scalar, typename ResidualFn, typename TangentFn, typename GuardFn = detail::AlwaysAdmissible>
NewtonResult<Scalar> damped_newton(ResidualFn&& residual, TangentFn&& tangent, Vector<Scalar> start,
                                   const NewtonConfig& cfg,
                                   TangentStructure structure = TangentStructure::general,
                                   GuardFn&& guard = GuardFn{}) {
    using std::min;
    cfg.validate();
    IterationReport report;
    report.damping_used = cfg.damping;
    if (!guard(start)) throw GuardError("damped_newton: start violates the guard", report);

    Vector<Scalar> x = std::move(start);
    Vector<Scalar> G = residual(x);
    double norm = static_cast<double>(detail::max_norm(G));
    report.residual_trace.push_back(norm);

    // Max-norms of consecutive undamped updates, for the singular-root check.
    std::vector<double> full_steps;

    bool small_update = false;
    for (int k = 0;; ++k) {
        report.iterations = k;
        report.final_residual_norm = norm;
        if (!std::isfinite(norm)) throw ConvergenceError("damped_newton: residual is not finite", report);
        if (norm <= cfg.tol_residual || small_update) {
            const std::size_t n = full_steps.size();
            if (n >= 5) {
                bool linear = true;
                for (std::size_t i = n - 4; i < n; ++i)
                    linear = linear && full_steps[i] > 0.3 * full_steps[i - 1] && full_steps[i] < full_steps[i - 1];
                if (linear)
                    throw SingularityError("damped_newton: only linear convergence with full steps; singular tangent at the root",
                                           report);
            }
            report.converged = true;
            return {std::move(x), std::move(report)};
        }
        if (k >= cfg.max_iters)
            throw ConvergenceError("damped_newton: no convergence in " + std::to_string(cfg.max_iters) + " iterations",
                                   report);

        const Matrix<Scalar> K = tangent(x);
        Vector<Scalar> delta;
        if (!detail::solve_tangent(K, G, structure, delta))
            throw SingularityError("damped_newton: singular tangent", report);

        const double step_norm = static_cast<double>(detail::max_norm(delta));
        double alpha = cfg.damping;
        if (cfg.mode == DampingMode::step_limited && step_norm > 0.0)
            alpha = min(alpha, cfg.max_step / step_norm);

        Vector<Scalar> trial = x - Scalar(alpha) * delta;
        int halvings = 0;
        while (!guard(trial)) {
            if (!cfg.safeguard || ++halvings > cfg.max_halvings)
                throw GuardError("damped_newton: guard violated by every trial update", report);
            alpha *= 0.5;
            trial = x - Scalar(alpha) * delta;
        }
        report.damping_used = min(report.damping_used, alpha);

        if (alpha == 1.0) {
            full_steps.push_back(step_norm);
            small_update = step_norm <= cfg.tol_step * (1.0 + static_cast<double>(detail::max_norm(x)));
        } else {
            full_steps.clear();
        }

        x = std::move(trial);
        G = residual(x);
        norm = static_cast<double>(detail::max_norm(G));
        report.residual_trace.push_back(norm);
    }
}

}  // namespace lagflow
