#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>

#include "lagflow/core_model.hpp"
#include "lagflow/legendre.hpp"

namespace lagflow {

enum class SpaceKind { fem, spectral };

/// Spatial discretization of the flow map.
///
/// Both variants are described by the same data: quadrature points X_q and
/// weights w_q, and the values B(q, j) and X-derivatives D(q, j) of the basis
/// functions of V^0 at those points. The flow map and its Jacobian at the
/// quadrature points are then the affine expressions X_q + B c and 1 + D c.
///
///   fem       piecewise linear hats on the interior nodes, 2-point Gauss per element
///   spectral  phi_j = L_j - L_{j+2}, j = 0..N-2, on the Gauss-Lobatto nodes of degree N
template <typename Scalar = double>
class Discretization {
public:
    static Discretization fem(Vector<Scalar> nodes) {
        using std::sqrt;
        const Eigen::Index n = nodes.size();
        if (n < 3) throw ParameterError("fem: need at least 3 nodes");
        for (Eigen::Index i = 1; i < n; ++i)
            if (!(nodes(i) > nodes(i - 1))) throw ParameterError("fem: nodes must be strictly increasing");
        Discretization d;
        d.kind_ = SpaceKind::fem;
        d.domain_ = Domain1D<Scalar>(nodes(0), nodes(n - 1));
        d.resolution_ = static_cast<int>(n - 1);
        d.nodes_ = std::move(nodes);
        const Eigen::Index elements = n - 1;
        const Eigen::Index dofs = n - 2;
        d.quad_points_.resize(2 * elements);
        d.quad_weights_.resize(2 * elements);
        d.B_ = Matrix<Scalar>::Zero(2 * elements, dofs);
        d.D_ = Matrix<Scalar>::Zero(2 * elements, dofs);
        const Scalar g = Scalar(1) / sqrt(Scalar(3));
        for (Eigen::Index e = 0; e < elements; ++e) {
            const Scalar a = d.nodes_(e), b = d.nodes_(e + 1), h = b - a;
            for (int s = 0; s < 2; ++s) {
                const Eigen::Index q = 2 * e + s;
                const Scalar xi = s == 0 ? -g : g;
                const Scalar t = Scalar(0.5) * (xi + Scalar(1));  // local coordinate in [0, 1]
                d.quad_points_(q) = a + t * h;
                d.quad_weights_(q) = Scalar(0.5) * h;
                // Hat of node e (left) is dof e-1, hat of node e+1 (right) is dof e.
                if (e >= 1) {
                    d.B_(q, e - 1) = Scalar(1) - t;
                    d.D_(q, e - 1) = Scalar(-1) / h;
                }
                if (e + 1 <= dofs) {
                    d.B_(q, e) = t;
                    d.D_(q, e) = Scalar(1) / h;
                }
            }
        }
        return d;
    }

    static Discretization fem_uniform(int elements, Domain1D<Scalar> domain = {}) {
        if (elements < 2) throw ParameterError("fem_uniform: need at least 2 elements");
        Vector<Scalar> nodes = Vector<Scalar>::LinSpaced(elements + 1, domain.left(), domain.right());
        nodes(0) = domain.left();
        nodes(elements) = domain.right();
        return fem(std::move(nodes));
    }

    static Discretization spectral(int N, Domain1D<Scalar> domain = {}) {
        if (N < 2) throw ParameterError("spectral: degree N must be >= 2");
        Discretization d;
        d.kind_ = SpaceKind::spectral;
        d.domain_ = domain;
        d.resolution_ = N;
        const Quadrature<Scalar> gl = gauss_lobatto<Scalar>(N);
        const Scalar half = Scalar(0.5) * domain.length();
        d.quad_points_ = (domain.midpoint() + half * gl.nodes.array()).matrix();
        d.quad_points_(0) = domain.left();
        d.quad_points_(N) = domain.right();
        d.quad_weights_ = half * gl.weights;
        d.nodes_ = d.quad_points_;
        d.B_.resize(N + 1, N - 1);
        d.D_.resize(N + 1, N - 1);
        Vector<Scalar> L(N + 1), dL(N + 1);
        for (int q = 0; q <= N; ++q) {
            legendre_table<Scalar>(N, gl.nodes(q), L, dL);
            for (int j = 0; j <= N - 2; ++j) {
                d.B_(q, j) = L(j) - L(j + 2);
                d.D_(q, j) = (dL(j) - dL(j + 2)) / half;
            }
        }
        // The compact basis vanishes at +-1 exactly.
        d.B_.row(0).setZero();
        d.B_.row(N).setZero();
        return d;
    }

    SpaceKind kind() const { return kind_; }
    bool is_fem() const { return kind_ == SpaceKind::fem; }
    const Domain1D<Scalar>& domain() const { return domain_; }
    /// Number of elements (fem) or polynomial degree (spectral).
    int resolution() const { return resolution_; }
    Eigen::Index dofs() const { return B_.cols(); }

    const Vector<Scalar>& quad_points() const { return quad_points_; }
    const Vector<Scalar>& quad_weights() const { return quad_weights_; }
    const Matrix<Scalar>& basis_values() const { return B_; }
    const Matrix<Scalar>& basis_derivatives() const { return D_; }

    /// Lagrangian nodes: mesh nodes (fem) or mapped Gauss-Lobatto points (spectral).
    const Vector<Scalar>& nodes() const { return nodes_; }

    void check(const Vector<Scalar>& coeffs) const {
        if (coeffs.size() != dofs()) throw ShapeError("flow-map coefficient vector does not match the discretization");
    }

    Vector<Scalar> positions_at_quadrature(const Vector<Scalar>& coeffs) const {
        check(coeffs);
        return quad_points_ + B_ * coeffs;
    }

    Vector<Scalar> jacobian_at_quadrature(const Vector<Scalar>& coeffs) const {
        check(coeffs);
        return (D_ * coeffs).array() + Scalar(1);
    }

    /// x at the Lagrangian nodes, endpoints included.
    Vector<Scalar> nodal_positions(const Vector<Scalar>& coeffs) const {
        check(coeffs);
        if (is_fem()) {
            Vector<Scalar> x = nodes_;
            x.segment(1, coeffs.size()) += coeffs;
            return x;
        }
        Vector<Scalar> x = nodes_ + B_ * coeffs;
        x(0) = domain_.left();
        x(x.size() - 1) = domain_.right();
        return x;
    }

    /// Inverse of nodal_positions: coefficients of the map that takes the given
    /// values at the Lagrangian nodes. Endpoint values must equal the domain ends.
    Vector<Scalar> coefficients_from_nodal(const Vector<Scalar>& x) const {
        if (x.size() != nodes_.size()) throw ShapeError("nodal vector does not match the discretization");
        if (x(0) != domain_.left() || x(x.size() - 1) != domain_.right())
            throw ParameterError("flow map must pin both boundary points");
        const Eigen::Index n = dofs();
        const Vector<Scalar> disp = (x - nodes_).segment(1, n);
        if (is_fem()) return disp;
        // Interior rows of B form an invertible square matrix.
        return B_.block(1, 0, n, n).partialPivLu().solve(disp);
    }

    /// x(X) at an arbitrary Lagrangian coordinate.
    Scalar map_at(const Vector<Scalar>& coeffs, Scalar X) const {
        check(coeffs);
        if (!domain_.contains(X)) throw DomainError("map_at: X outside the domain");
        if (is_fem()) {
            const Eigen::Index e = element_of(X);
            const Scalar a = nodes_(e), b = nodes_(e + 1);
            const Scalar t = (X - a) / (b - a);
            const Vector<Scalar> x = nodal_positions(coeffs);
            return x(e) + t * (x(e + 1) - x(e));
        }
        const Scalar xi = to_reference(X);
        const int N = resolution_;
        Vector<Scalar> L(N + 1), dL(N + 1);
        legendre_table<Scalar>(N, xi, L, dL);
        Scalar x = X;
        for (int j = 0; j <= N - 2; ++j) x += coeffs(j) * (L(j) - L(j + 2));
        return x;
    }

    /// dx/dX at an arbitrary Lagrangian coordinate. On a fem node the element to the right is used.
    Scalar jacobian_at(const Vector<Scalar>& coeffs, Scalar X) const {
        check(coeffs);
        if (!domain_.contains(X)) throw DomainError("jacobian_at: X outside the domain");
        if (is_fem()) {
            const Eigen::Index e = element_of(X);
            const Vector<Scalar> x = nodal_positions(coeffs);
            return (x(e + 1) - x(e)) / (nodes_(e + 1) - nodes_(e));
        }
        const Scalar xi = to_reference(X);
        const int N = resolution_;
        Vector<Scalar> L(N + 1), dL(N + 1);
        legendre_table<Scalar>(N, xi, L, dL);
        Scalar J(1);
        const Scalar scale = Scalar(2) / domain_.length();
        for (int j = 0; j <= N - 2; ++j) J += coeffs(j) * (dL(j) - dL(j + 2)) * scale;
        return J;
    }

    /// Element index containing X (fem only).
    Eigen::Index element_of(Scalar X) const {
        const auto begin = nodes_.data();
        const auto end = nodes_.data() + nodes_.size();
        Eigen::Index e = std::distance(begin, std::upper_bound(begin, end, X)) - 1;
        return std::clamp<Eigen::Index>(e, 0, nodes_.size() - 2);
    }

private:
    Scalar to_reference(Scalar X) const {
        return (Scalar(2) * X - domain_.left() - domain_.right()) / domain_.length();
    }

    SpaceKind kind_ = SpaceKind::fem;
    Domain1D<Scalar> domain_;
    int resolution_ = 0;
    Vector<Scalar> nodes_;
    Vector<Scalar> quad_points_;
    Vector<Scalar> quad_weights_;
    Matrix<Scalar> B_;
    Matrix<Scalar> D_;
};

/// dx/dX of a state: one slope per element (fem) or the values at the
/// Gauss-Lobatto points (spectral).
template <typename Scalar>
Vector<Scalar> discrete_jacobian(const FlowMapState<Scalar>& state, const Discretization<Scalar>& disc) {
    disc.check(state.coeffs);
    if (disc.is_fem()) {
        const Vector<Scalar> x = disc.nodal_positions(state.coeffs);
        const Eigen::Index m = x.size() - 1;
        return (x.tail(m) - x.head(m)).cwiseQuotient(disc.nodes().tail(m) - disc.nodes().head(m));
    }
    return disc.jacobian_at_quadrature(state.coeffs);
}

}  // namespace lagflow
