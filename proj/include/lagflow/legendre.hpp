#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "lagflow/core_model.hpp"

namespace lagflow {

template <typename Scalar>
struct LegendreValue {
    Scalar value;
    Scalar derivative;
};

/// L_n(x) and L_n'(x) by the three-term recurrence
///   (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1},   L_{k+1}' = L_{k-1}' + (2k+1) L_k.
template <typename Scalar>
LegendreValue<Scalar> legendre_eval_with_derivative(int n, Scalar x) {
    if (n < 0) throw ParameterError("legendre_eval: negative degree");
    Scalar p_prev(1), p(x);
    Scalar d_prev(0), d(1);
    if (n == 0) return {p_prev, d_prev};
    for (int k = 1; k < n; ++k) {
        const Scalar p_next = (Scalar(2 * k + 1) * x * p - Scalar(k) * p_prev) / Scalar(k + 1);
        const Scalar d_next = d_prev + Scalar(2 * k + 1) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    return {p, d};
}

template <typename Scalar>
Scalar legendre_eval(int n, Scalar x) {
    return legendre_eval_with_derivative(n, x).value;
}

/// Values and derivatives of L_0..L_N at one point.
template <typename Scalar>
void legendre_table(int N, Scalar x, Eigen::Ref<Vector<Scalar>> values, Eigen::Ref<Vector<Scalar>> derivs) {
    values(0) = Scalar(1);
    derivs(0) = Scalar(0);
    if (N == 0) return;
    values(1) = x;
    derivs(1) = Scalar(1);
    for (int k = 1; k < N; ++k) {
        values(k + 1) = (Scalar(2 * k + 1) * x * values(k) - Scalar(k) * values(k - 1)) / Scalar(k + 1);
        derivs(k + 1) = derivs(k - 1) + Scalar(2 * k + 1) * values(k);
    }
}

template <typename Scalar>
struct Quadrature {
    Vector<Scalar> nodes;
    Vector<Scalar> weights;
};

/// Legendre-Gauss-Lobatto rule with N+1 points on [-1, 1]: the endpoints and the
/// roots of L_N'. Weights 2 / (N (N+1) L_N(x_j)^2). Exact for degree <= 2N-1.
template <typename Scalar = double>
Quadrature<Scalar> gauss_lobatto(int N) {
    using std::abs;
    using std::cos;
    if (N < 2) throw ParameterError("gauss_lobatto: N must be >= 2");
    Quadrature<Scalar> q{Vector<Scalar>(N + 1), Vector<Scalar>(N + 1)};
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon();
    q.nodes(0) = Scalar(-1);
    q.nodes(N) = Scalar(1);
    // Interior nodes: Newton on L_N' from Chebyshev-Gauss-Lobatto guesses. The
    // second derivative comes from the Legendre ODE (1-x^2) L'' = 2x L' - N(N+1) L.
    for (int j = 1; j < N; ++j) {
        Scalar x = -cos(pi * Scalar(j) / Scalar(N));
        for (int it = 0; it < 100; ++it) {
            const auto [L, dL] = legendre_eval_with_derivative(N, x);
            const Scalar d2L = (Scalar(2) * x * dL - Scalar(N) * Scalar(N + 1) * L) / (Scalar(1) - x * x);
            const Scalar step = dL / d2L;
            x -= step;
            if (abs(step) <= tol) break;
        }
        q.nodes(j) = x;
    }
    // Symmetrize to remove round-off asymmetry.
    for (int j = 0; j <= N / 2; ++j) {
        const Scalar s = Scalar(0.5) * (q.nodes(N - j) - q.nodes(j));
        q.nodes(j) = -s;
        q.nodes(N - j) = s;
    }
    if (N % 2 == 0) q.nodes(N / 2) = Scalar(0);
    const Scalar scale = Scalar(2) / (Scalar(N) * Scalar(N + 1));
    for (int j = 0; j <= N; ++j) {
        const Scalar L = legendre_eval(N, q.nodes(j));
        q.weights(j) = scale / (L * L);
    }
    return q;
}

/// sum_n coeffs_n L_n(p) at each point p.
template <typename Scalar>
Vector<Scalar> spectral_synthesis(const Vector<Scalar>& coeffs, const Vector<Scalar>& points) {
    if (coeffs.size() == 0) throw ShapeError("spectral_synthesis: empty coefficient vector");
    const int N = static_cast<int>(coeffs.size()) - 1;
    Vector<Scalar> out(points.size());
    Vector<Scalar> values(N + 1), derivs(N + 1);
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        legendre_table<Scalar>(N, points(i), values, derivs);
        out(i) = coeffs.dot(values);
    }
    return out;
}

/// Discrete Legendre transform of values sampled at the N+1 Gauss-Lobatto nodes.
/// Uses the discrete norms gamma_n = 2/(2n+1) for n < N and gamma_N = 2/N, which
/// makes the round trip exact on polynomials of degree <= N.
template <typename Scalar>
Vector<Scalar> spectral_analysis(const Vector<Scalar>& values) {
    const int N = static_cast<int>(values.size()) - 1;
    if (N < 2) throw ShapeError("spectral_analysis: need at least 3 nodal values");
    const Quadrature<Scalar> q = gauss_lobatto<Scalar>(N);
    Vector<Scalar> coeffs = Vector<Scalar>::Zero(N + 1);
    Vector<Scalar> L(N + 1), dL(N + 1);
    for (int j = 0; j <= N; ++j) {
        legendre_table<Scalar>(N, q.nodes(j), L, dL);
        coeffs += (q.weights(j) * values(j)) * L;
    }
    for (int n = 0; n <= N; ++n) {
        const Scalar gamma = n < N ? Scalar(2) / Scalar(2 * n + 1) : Scalar(2) / Scalar(N);
        coeffs(n) /= gamma;
    }
    return coeffs;
}

/// Default filter strength a = -log(machine epsilon), so the last mode is damped to eps_M.
template <typename Scalar = double>
Scalar default_filter_strength() {
    using std::log;
    return -log(std::numeric_limits<Scalar>::epsilon());
}

/// Modal filter c_n <- exp(-a (n/N)^exponent) c_n. exponent = 1 is the plain
/// exponential filter; even exponents give the usual higher-order variants.
template <typename Scalar>
Vector<Scalar> exponential_filter(const Vector<Scalar>& coeffs, Scalar a = default_filter_strength<Scalar>(),
                                  Scalar exponent = Scalar(1)) {
    using std::exp;
    using std::pow;
    if (!(a > 0)) throw ParameterError("exponential_filter: a must be positive");
    if (!(exponent > 0)) throw ParameterError("exponential_filter: exponent must be positive");
    const Eigen::Index N = coeffs.size() - 1;
    Vector<Scalar> out = coeffs;
    if (N <= 0) return out;
    for (Eigen::Index n = 0; n <= N; ++n) {
        const Scalar eta = Scalar(n) / Scalar(N);
        out(n) *= exp(-a * pow(eta, exponent));
    }
    return out;
}

}  // namespace lagflow
