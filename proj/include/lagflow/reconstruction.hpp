#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagflow/core_model.hpp"
#include "lagflow/discretization.hpp"
#include "lagflow/legendre.hpp"

namespace lagflow {

/// X with x(X) = x_query. Exact piece inversion for fem; bisection on the
/// polynomial map for spectral, bracketed by the nodal positions.
template <typename Scalar>
Scalar invert_flow_map(const Discretization<Scalar>& disc, const FlowMapState<Scalar>& state, Scalar x_query) {
    using std::abs;
    const auto& dom = disc.domain();
    if (!dom.contains(x_query)) throw DomainError("invert_flow_map: query outside the Eulerian domain");
    if (x_query == dom.left()) return dom.left();
    if (x_query == dom.right()) return dom.right();

    const Vector<Scalar> x = disc.nodal_positions(state.coeffs);
    const Vector<Scalar>& X = disc.nodes();
    const Eigen::Index n = x.size();
    // First node strictly above the query; the bracket is [i-1, i].
    Eigen::Index i = 1;
    while (i < n - 1 && !(x(i) > x_query)) ++i;
    if (x(i - 1) == x_query) return X(i - 1);
    if (x(i) == x_query) return X(i);

    if (disc.is_fem()) {
        const Scalar t = (x_query - x(i - 1)) / (x(i) - x(i - 1));
        return X(i - 1) + t * (X(i) - X(i - 1));
    }

    Scalar lo = X(i - 1), hi = X(i);
    Scalar g_lo = x(i - 1) - x_query;
    if (g_lo > 0) {  // nodal values not monotone here; fall back to the full domain
        lo = dom.left();
        hi = dom.right();
        g_lo = dom.left() - x_query;
    }
    const Scalar tiny = Scalar(2) * std::numeric_limits<Scalar>::epsilon();
    Scalar mid = Scalar(0.5) * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = Scalar(0.5) * (lo + hi);
        const Scalar g = disc.map_at(state.coeffs, mid) - x_query;
        if (g == Scalar(0)) return mid;
        if ((g < 0) == (g_lo < 0)) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
        if (hi - lo <= tiny * std::max(Scalar(1), abs(mid))) break;
    }
    return Scalar(0.5) * (lo + hi);
}

/// f(x) = f0(X(x)) at each query.
template <typename Scalar>
Vector<Scalar> reconstruct(const Discretization<Scalar>& disc, const FlowMapState<Scalar>& state,
                           const InitialProfile<Scalar>& profile, const Vector<Scalar>& queries) {
    Vector<Scalar> f(queries.size());
    for (Eigen::Index k = 0; k < queries.size(); ++k)
        f(k) = profile_eval(profile, invert_flow_map(disc, state, queries(k))).value;
    return f;
}

template <typename Scalar>
struct MaxPrincipleReport {
    Scalar max_abs;
    Scalar bound;
    bool ok;
};

/// Compares max |f| on `samples` uniform Eulerian points with max |f0| on the Lagrangian domain.
template <typename Scalar>
MaxPrincipleReport<Scalar> max_principle_check(const Discretization<Scalar>& disc, const FlowMapState<Scalar>& state,
                                               const InitialProfile<Scalar>& profile, int samples = 1000) {
    using std::abs;
    using std::max;
    if (samples < 2) throw ParameterError("max_principle_check: need at least 2 samples");
    const auto& dom = disc.domain();
    const Vector<Scalar> pts = Vector<Scalar>::LinSpaced(samples, dom.left(), dom.right());
    const Vector<Scalar> f = reconstruct(disc, state, profile, pts);
    Scalar bound(0);
    for (Eigen::Index k = 0; k < pts.size(); ++k) bound = max(bound, abs(profile.value(pts(k))));
    for (Eigen::Index k = 0; k < disc.nodes().size(); ++k) bound = max(bound, abs(profile.value(disc.nodes()(k))));
    const Scalar max_abs = f.cwiseAbs().maxCoeff();
    return {max_abs, bound, max_abs <= bound + Scalar(1e-12)};
}

template <typename Scalar>
struct InterfaceMetrics {
    Scalar location;
    Scalar width;
    int crossings;
};

/// Interface location (first crossing of `level`, linearly interpolated), the
/// number of crossings, and the measure of {|f| <= band} on the sampled profile.
template <typename Scalar>
InterfaceMetrics<Scalar> interface_metrics(const Vector<Scalar>& xs, const Vector<Scalar>& fs,
                                           Scalar level = Scalar(0), Scalar band = Scalar(0.9)) {
    using std::max;
    using std::min;
    if (xs.size() != fs.size() || xs.size() < 2) throw ShapeError("interface_metrics: need matching samples");
    InterfaceMetrics<Scalar> m{Scalar(0), Scalar(0), 0};
    bool found = false;
    int last_sign = 0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const Scalar d = fs(i) - level;
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) {
            if (!found) {
                m.location = xs(i);
                found = true;
            }
            continue;
        }
        if (last_sign != 0 && s != last_sign) {
            ++m.crossings;
            if (!found) {
                // previous nonzero sample is i-1 unless zeros intervened (then location was set there)
                const Scalar da = fs(i - 1) - level;
                m.location = xs(i - 1) + (xs(i) - xs(i - 1)) * da / (da - d);
                found = true;
            }
        }
        last_sign = s;
    }
    if (!found) throw NoInterfaceError("interface_metrics: profile never crosses the level");
    if (m.crossings == 0) m.crossings = 1;

    for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
        const Scalar fa = fs(i), fb = fs(i + 1), L = xs(i + 1) - xs(i);
        if (fa == fb) {
            if (fa <= band && fa >= -band) m.width += L;
            continue;
        }
        Scalar t1 = (-band - fa) / (fb - fa);
        Scalar t2 = (band - fa) / (fb - fa);
        if (t1 > t2) std::swap(t1, t2);
        t1 = max(t1, Scalar(0));
        t2 = min(t2, Scalar(1));
        if (t2 > t1) m.width += (t2 - t1) * L;
    }
    return m;
}

/// Sum of |f_{i+1} - f_i| over the samples.
template <typename Scalar>
Scalar total_variation(const Vector<Scalar>& fs) {
    if (fs.size() < 2) return Scalar(0);
    return (fs.tail(fs.size() - 1) - fs.head(fs.size() - 1)).cwiseAbs().sum();
}

template <typename Scalar>
struct FilteredProfile {
    /// Degree-N Legendre interpolant of the reconstruction, at the queries.
    Vector<Scalar> interpolant;
    /// The same after exponential_filter.
    Vector<Scalar> filtered;
};

/// Interpolates the reconstructed f at the N+1 Gauss-Lobatto points of the
/// Eulerian domain and evaluates the expansion with and without the filter.
template <typename Scalar>
FilteredProfile<Scalar> filter_reconstruction(const Discretization<Scalar>& disc, const FlowMapState<Scalar>& state,
                                              const InitialProfile<Scalar>& profile, const Vector<Scalar>& queries,
                                              int N, Scalar a = default_filter_strength<Scalar>(),
                                              Scalar exponent = Scalar(1)) {
    if (N < 2) throw ParameterError("filter_reconstruction: degree must be >= 2");
    const auto& dom = disc.domain();
    const Scalar mid = dom.midpoint(), half = dom.length() / Scalar(2);
    const Quadrature<Scalar> gl = gauss_lobatto<Scalar>(N);
    Vector<Scalar> nodes = (mid + half * gl.nodes.array()).matrix();
    nodes(0) = dom.left();
    nodes(N) = dom.right();
    const Vector<Scalar> coeffs = spectral_analysis(reconstruct(disc, state, profile, nodes));
    Vector<Scalar> ref(queries.size());
    for (Eigen::Index k = 0; k < queries.size(); ++k) {
        if (!dom.contains(queries(k))) throw DomainError("filter_reconstruction: query outside the domain");
        using std::clamp;
        ref(k) = clamp((queries(k) - mid) / half, Scalar(-1), Scalar(1));
    }
    return {spectral_synthesis(coeffs, ref), spectral_synthesis(exponential_filter(coeffs, a, exponent), ref)};
}

}  // namespace lagflow
