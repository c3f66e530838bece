#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lagflow/core_model.hpp"
#include "lagflow/legendre.hpp"
#include "lagflow/newton.hpp"

namespace lagflow {

enum class LaplacianKind { spectral, finite_difference };

struct EulerianConfig {
    /// Polynomial degree (spectral) or number of intervals (finite differences).
    int N = 256;
    double dt = 1e-4;
    /// 1: backward Euler, 2: BDF2 with extrapolated nonlinearity.
    int order = 1;
    LaplacianKind laplacian = LaplacianKind::spectral;
    Domain1D<double> domain{};
    /// Constant speed v of an explicit advection term v f_x.
    double advection_v = 0.0;
};

/// Semi-implicit Allen-Cahn solver in Eulerian coordinates:
///
///   order 1  (f^{n+1} - f^n)/dt = f^{n+1}_xx - F'(f^n) - v f^n_x
///   order 2  (3f^{n+1} - 4f^n + f^{n-1})/(2dt) = f^{n+1}_xx - F'(f*) - v f*_x,  f* = 2f^n - f^{n-1}
///
/// Dirichlet data are the endpoint values of the initial field and are held fixed.
/// The spectral variant is Legendre-Galerkin with Gauss-Lobatto quadrature and a
/// linear lift of the boundary values; the field is stored at the nodes.
template <typename Scalar = double>
class EulerianSolver {
public:
    using Function = std::function<Scalar(Scalar)>;

    EulerianSolver(const EulerianConfig& cfg, Potential<Scalar> potential, const Function& initial)
        : cfg_(cfg), potential_(std::move(potential)) {
        using std::sqrt;
        if (cfg_.N < 2) throw ParameterError("EulerianSolver: N must be >= 2");
        if (!(cfg_.dt > 0.0)) throw ParameterError("EulerianSolver: dt must be positive");
        if (!std::isfinite(cfg_.advection_v)) throw ParameterError("EulerianSolver: advection speed must be finite");
        if (cfg_.order != 1 && cfg_.order != 2) throw ParameterError("EulerianSolver: order must be 1 or 2");
        if (potential_.kind() == PotentialKind::double_well &&
            Scalar(cfg_.N) < Scalar(4) / sqrt(potential_.eps2()))
            throw ParameterError("EulerianSolver: resolution below N >= 4/eps");
        const Scalar left(cfg_.domain.left()), right(cfg_.domain.right());
        const Scalar half = (right - left) / Scalar(2);
        const int N = cfg_.N;
        if (cfg_.laplacian == LaplacianKind::spectral) {
            const Quadrature<Scalar> gl = gauss_lobatto<Scalar>(N);
            grid_ = ((left + right) / Scalar(2) + half * gl.nodes.array()).matrix();
            weights_ = half * gl.weights;
            B_.resize(N + 1, N - 1);
            D_.resize(N + 1, N - 1);
            Vector<Scalar> L(N + 1), dL(N + 1);
            for (int q = 0; q <= N; ++q) {
                legendre_table<Scalar>(N, gl.nodes(q), L, dL);
                for (int j = 0; j <= N - 2; ++j) {
                    B_(q, j) = L(j) - L(j + 2);
                    D_(q, j) = (dL(j) - dL(j + 2)) / half;
                }
            }
            B_.row(0).setZero();
            B_.row(N).setZero();
        } else {
            grid_ = Vector<Scalar>::LinSpaced(N + 1, left, right);
        }
        grid_(0) = left;
        grid_(N) = right;

        values_.resize(N + 1);
        for (int i = 0; i <= N; ++i) values_(i) = initial(grid_(i));
        initial_max_ = values_.cwiseAbs().maxCoeff();
        left_value_ = values_(0);
        right_value_ = values_(N);
        lift_.resize(N + 1);
        for (int i = 0; i <= N; ++i)
            lift_(i) = left_value_ + (right_value_ - left_value_) * (grid_(i) - left) / (right - left);

        if (cfg_.laplacian == LaplacianKind::spectral) {
            const Matrix<Scalar> mass = B_.transpose() * weights_.asDiagonal() * B_;
            const Matrix<Scalar> stiff = D_.transpose() * weights_.asDiagonal() * D_;
            const Scalar dt(cfg_.dt);
            first_order_.compute(mass / dt + stiff);
            second_order_.compute(Scalar(3) * mass / (Scalar(2) * dt) + stiff);
            interior_.compute(B_.block(1, 0, N - 1, N - 1));
        }
    }

    const EulerianConfig& config() const { return cfg_; }
    const Vector<Scalar>& grid() const { return grid_; }
    const Vector<Scalar>& values() const { return values_; }
    Scalar time() const { return time_; }
    int steps_taken() const { return steps_; }

    void step() {
        const Scalar dt(cfg_.dt);
        const bool second = cfg_.order == 2 && previous_.size() == values_.size();
        Vector<Scalar> rate_part(values_.size());
        Vector<Scalar> nonlinear_arg(values_.size());
        if (second) {
            rate_part = (Scalar(4) * values_ - previous_) / (Scalar(2) * dt);
            nonlinear_arg = Scalar(2) * values_ - previous_;
        } else {
            rate_part = values_ / dt;
            nonlinear_arg = values_;
        }
        Vector<Scalar> forcing(values_.size());
        for (Eigen::Index i = 0; i < forcing.size(); ++i) forcing(i) = potential_.Fprime(nonlinear_arg(i));
        if (cfg_.advection_v != 0.0) forcing += Scalar(cfg_.advection_v) * derivative(nonlinear_arg);

        Vector<Scalar> next;
        if (cfg_.laplacian == LaplacianKind::spectral) {
            // The lift is time independent and harmonic, so it only shifts the rate term.
            const Scalar lift_coeff = second ? Scalar(3) / (Scalar(2) * dt) : Scalar(1) / dt;
            const Vector<Scalar> r = rate_part - lift_coeff * lift_ - forcing;
            const Vector<Scalar> rhs = B_.transpose() * weights_.cwiseProduct(r);
            const Vector<Scalar> w = second ? second_order_.solve(rhs) : first_order_.solve(rhs);
            next = lift_ + B_ * w;
        } else {
            next = fd_solve(rate_part - forcing, second ? Scalar(3) / (Scalar(2) * dt) : Scalar(1) / dt);
        }
        next(0) = left_value_;
        next(next.size() - 1) = right_value_;

        using std::max;
        const Scalar limit = Scalar(10) * max(initial_max_, std::numeric_limits<Scalar>::min());
        if (!next.allFinite() || next.cwiseAbs().maxCoeff() > limit)
            throw DivergenceError("EulerianSolver: max-norm exceeded 10 max|f0| at step " + std::to_string(steps_ + 1));
        previous_ = std::move(values_);
        values_ = std::move(next);
        ++steps_;
        time_ = Scalar(steps_) * dt;
    }

    /// int 1/2 |f_x|^2 + F(f) dx
    Scalar energy() const {
        if (cfg_.laplacian == LaplacianKind::spectral) {
            const Vector<Scalar> w = coefficients(values_);
            const Scalar slope = (right_value_ - left_value_) / Scalar(cfg_.domain.length());
            const Vector<Scalar> fx = (D_ * w).array() + slope;
            Scalar e = Scalar(0.5) * weights_.dot(fx.cwiseAbs2());
            for (Eigen::Index q = 0; q < grid_.size(); ++q) e += weights_(q) * potential_.F(values_(q));
            return e;
        }
        const Scalar h = grid_(1) - grid_(0);
        Scalar e(0);
        for (Eigen::Index i = 0; i + 1 < grid_.size(); ++i) {
            const Scalar d = (values_(i + 1) - values_(i)) / h;
            e += h * (Scalar(0.5) * d * d + Scalar(0.5) * (potential_.F(values_(i)) + potential_.F(values_(i + 1))));
        }
        return e;
    }

    /// The discrete solution at arbitrary points: the Legendre expansion
    /// (spectral) or the piecewise-linear interpolant (finite differences).
    Vector<Scalar> sample(const Vector<Scalar>& points) const {
        Vector<Scalar> out(points.size());
        const Scalar left(cfg_.domain.left()), right(cfg_.domain.right());
        if (cfg_.laplacian == LaplacianKind::spectral) {
            const Vector<Scalar> w = coefficients(values_);
            const int N = cfg_.N;
            Vector<Scalar> L(N + 1), dL(N + 1);
            for (Eigen::Index k = 0; k < points.size(); ++k) {
                const Scalar x = points(k);
                if (!cfg_.domain.contains(x)) throw DomainError("EulerianSolver::sample: point outside the domain");
                const Scalar xi = (Scalar(2) * x - left - right) / (right - left);
                legendre_table<Scalar>(N, xi, L, dL);
                Scalar f = left_value_ + (right_value_ - left_value_) * (x - left) / (right - left);
                for (int j = 0; j <= N - 2; ++j) f += w(j) * (L(j) - L(j + 2));
                out(k) = f;
            }
            return out;
        }
        const Scalar h = grid_(1) - grid_(0);
        for (Eigen::Index k = 0; k < points.size(); ++k) {
            const Scalar x = points(k);
            if (!cfg_.domain.contains(x)) throw DomainError("EulerianSolver::sample: point outside the domain");
            Eigen::Index i = static_cast<Eigen::Index>((x - left) / h);
            i = std::clamp<Eigen::Index>(i, 0, grid_.size() - 2);
            const Scalar t = (x - grid_(i)) / h;
            out(k) = values_(i) + t * (values_(i + 1) - values_(i));
        }
        return out;
    }

private:
    Vector<Scalar> coefficients(const Vector<Scalar>& values) const {
        const int N = cfg_.N;
        return interior_.solve(Vector<Scalar>((values - lift_).segment(1, N - 1)));
    }

    /// d/dx of a nodal field with the solver's boundary values.
    Vector<Scalar> derivative(const Vector<Scalar>& values) const {
        const Eigen::Index n = values.size();
        if (cfg_.laplacian == LaplacianKind::spectral) {
            const Scalar slope = (right_value_ - left_value_) / Scalar(cfg_.domain.length());
            return (D_ * coefficients(values)).array() + slope;
        }
        const Scalar h = grid_(1) - grid_(0);
        Vector<Scalar> d(n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (values(i + 1) - values(i - 1)) / (Scalar(2) * h);
        d(0) = (values(1) - values(0)) / h;
        d(n - 1) = (values(n - 1) - values(n - 2)) / h;
        return d;
    }

    /// (c I - Delta_h) f = rhs on the interior, boundary values fixed.
    Vector<Scalar> fd_solve(const Vector<Scalar>& rhs, Scalar c) const {
        const Eigen::Index n = grid_.size() - 2;
        const Scalar h = grid_(1) - grid_(0);
        const Scalar inv_h2 = Scalar(1) / (h * h);
        Matrix<Scalar> K = Matrix<Scalar>::Zero(n, n);
        Vector<Scalar> b = rhs.segment(1, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            K(i, i) = c + Scalar(2) * inv_h2;
            if (i > 0) K(i, i - 1) = -inv_h2;
            if (i + 1 < n) K(i, i + 1) = -inv_h2;
        }
        b(0) += inv_h2 * left_value_;
        b(n - 1) += inv_h2 * right_value_;
        Vector<Scalar> interior;
        if (!detail::solve_tridiagonal(K, b, interior)) throw ParameterError("EulerianSolver: singular system");
        Vector<Scalar> out(grid_.size());
        out(0) = left_value_;
        out.segment(1, n) = interior;
        out(n + 1) = right_value_;
        return out;
    }

    EulerianConfig cfg_;
    Potential<Scalar> potential_;
    Vector<Scalar> grid_;
    Vector<Scalar> weights_;
    Matrix<Scalar> B_;
    Matrix<Scalar> D_;
    Vector<Scalar> values_;
    Vector<Scalar> previous_;
    Vector<Scalar> lift_;
    Scalar left_value_{0};
    Scalar right_value_{0};
    Scalar initial_max_{0};
    Scalar time_{0};
    int steps_ = 0;
    Eigen::LLT<Matrix<Scalar>> first_order_;
    Eigen::LLT<Matrix<Scalar>> second_order_;
    Eigen::PartialPivLU<Matrix<Scalar>> interior_;
};

template <typename Scalar>
struct EulerianSnapshot {
    Scalar time;
    Vector<Scalar> values;
    Scalar energy;
};

/// Steps to T, capturing the initial field and one snapshot per requested time
/// (rounded to the nearest step).
template <typename Scalar>
std::vector<EulerianSnapshot<Scalar>> run_to_time(EulerianSolver<Scalar>& solver, Scalar T,
                                                  std::vector<Scalar> snapshot_times = {}) {
    using std::llround;
    if (T < 0) throw ParameterError("run_to_time: T must be nonnegative");
    const double dt = solver.config().dt;
    const long total = llround(static_cast<double>(T) / dt);
    std::vector<long> marks;
    for (Scalar t : snapshot_times) {
        if (t < 0 || t > T) throw ParameterError("run_to_time: snapshot time outside [0, T]");
        marks.push_back(llround(static_cast<double>(t) / dt));
    }
    std::vector<EulerianSnapshot<Scalar>> out;
    out.push_back({solver.time(), solver.values(), solver.energy()});
    for (long s = 1; s <= total; ++s) {
        solver.step();
        if (std::find(marks.begin(), marks.end(), s) != marks.end())
            out.push_back({solver.time(), solver.values(), solver.energy()});
    }
    return out;
}

}  // namespace lagflow
