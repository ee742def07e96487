#pragma once

// Reversibility (Sigma = -Sigma) and geodesic reversibility (reversed
// geodesics are geodesics up to orientation-reversing reparametrization).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "finsler/atlas.hpp"
#include "finsler/coframe.hpp"
#include "finsler/flow.hpp"
#include "finsler/metric.hpp"
#include "finsler/parallel.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

struct ReversibilityReport {
    bool reversible = true;
    double gap = 0.0;  // sup |F(x, y) - F(x, -y)| over indicatrix vectors y
    TangentVec witness;
    double tolerance = 1e-10;
};

// Grid of n x n chart points over [-1, 1]^2 (nodes include the edges and,
// for odd n, the axes) in both charts, `fibers` directions each.
inline ReversibilityReport is_reversible(const FinslerMetric& m, int n = 17, int fibers = 64, double tol = 1e-10) {
    ReversibilityReport rep;
    rep.tolerance = tol;
    for (Chart c : {Chart::North, Chart::South}) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const ChartPoint p{c, {-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1)}};
                for (int k = 0; k < fibers; ++k) {
                    const TangentVec y = indicatrix_param(m, p, 2.0 * std::numbers::pi * k / fibers);
                    const double g = std::abs(1.0 - eval_F(m, {p, {-y.y[0], -y.y[1]}}));
                    if (g > rep.gap) {
                        rep.gap = g;
                        rep.witness = y;
                    }
                }
            }
        }
    }
    rep.reversible = rep.gap <= tol;
    return rep;
}

struct GeodesicReversibilityOptions {
    int samples = 16;
    double arc_length = std::numbers::pi - 0.1;
    int probes = 64;
    double tolerance = 1e-5;
    std::uint64_t seed = 1;
    FlowOptions flow;
};

struct ArcDeviation {
    SigmaPoint start;
    double reverse_length = 0.0;  // Finsler length of the reversed arc
    double mean = 0.0;
    double max = 0.0;
};

struct GeodesicReversibilityReport {
    bool reversible = true;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    std::vector<ArcDeviation> arcs;
};

namespace detail {

// Minimizes f on [a, b] by golden-section search.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol = 1e-12) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = fc < fd ? c : d;
    return {x, std::min(fc, fd)};
}

}  // namespace detail

// Deviation between the trace of a geodesic arc and the geodesic started at
// its endpoint with reversed velocity, flowed for the reversed arc's
// Finsler length.  Each probe on the reversed geodesic is matched to the
// nearest point of the forward trace near the arc-synchronized parameter.
inline ArcDeviation reversed_arc_deviation(const FinslerMetric& m, const SigmaPoint& u,
                                           const GeodesicReversibilityOptions& opt) {
    const double T = opt.arc_length;
    const GeodesicPath fwd(m, u, T, opt.flow);
    ArcDeviation out;
    out.start = u;
    // Simpson rule for int_0^T F(gamma, -gamma') dt
    const int n = 256;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const SigmaPoint q = fwd.at(T * k / n);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * eval_F(m, {q.base, {-q.y[0], -q.y[1]}});
    }
    out.reverse_length = acc * T / (3.0 * n);
    const SigmaPoint e = fwd.end();
    const SigmaPoint back = SigmaPoint::make(m, e.base, wrap_fiber(std::atan2(-e.y[1], -e.y[0])));
    const GeodesicPath rev(m, back, out.reverse_length, opt.flow);
    double sum = 0.0;
    for (int k = 0; k <= opt.probes; ++k) {
        const double tau = out.reverse_length * k / opt.probes;
        const Vec3 q = rev.at(tau).position();
        const double guess = T * (1.0 - tau / out.reverse_length);
        const double lo = std::max(0.0, guess - 0.15 * T), hi = std::min(T, guess + 0.15 * T);
        const auto best = detail::golden_min([&](double t) { return distance(fwd.at(t).position(), q); }, lo, hi);
        sum += best.second;
        out.max = std::max(out.max, best.second);
    }
    out.mean = sum / (opt.probes + 1);
    return out;
}

inline GeodesicReversibilityReport is_geodesically_reversible(const FinslerMetric& m,
                                                              const GeodesicReversibilityOptions& opt = {}) {
    Sampler rng(opt.seed);
    std::vector<SigmaPoint> starts;
    for (int i = 0; i < opt.samples; ++i) starts.push_back(rng.sigma_point(m));
    GeodesicReversibilityReport rep;
    rep.arcs.resize(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { rep.arcs[i] = reversed_arc_deviation(m, starts[i], opt); });
    for (const auto& a : rep.arcs) {
        rep.max_deviation = std::max(rep.max_deviation, a.max);
        rep.mean_deviation += a.mean / static_cast<double>(rep.arcs.size());
    }
    rep.reversible = rep.max_deviation <= opt.tolerance;
    return rep;
}

}  // namespace finsler
