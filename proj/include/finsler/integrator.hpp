#pragma once

// Dormand-Prince 5(4) with dense output on a two-chart state space.
//
// The state carries the active chart.  After every accepted step the
// caller-supplied `chart_switch` is applied when the base point has left
// the radius `switch_radius`; a step that lands beyond `reject_radius` is
// rejected and retried with a smaller step, so states never stray far into
// the poorly conditioned part of a chart.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "finsler/atlas.hpp"
#include "finsler/errors.hpp"

namespace finsler {

struct IntegratorOptions {
    double atol = 1e-11;
    double rtol = 1e-11;
    double initial_step = 0.05;
    double min_step = 1e-13;
    double max_step = 0.5;
    long max_steps = 2000000;
    double switch_radius = 1.2;
    double reject_radius = 1.3;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
    int chart_switches = 0;
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

template <int Dim>
struct DenseSegment {
    using State = std::array<double, Dim>;
    Chart chart = Chart::North;
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> r{};

    double t1() const { return t0 + h; }

    State eval(double t) const {
        const double th = h == 0.0 ? 0.0 : (t - t0) / h;
        const double th1 = 1.0 - th;
        State y;
        for (int i = 0; i < Dim; ++i) {
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        return y;
    }
};

template <int Dim>
struct Trajectory {
    using State = std::array<double, Dim>;
    Chart chart = Chart::North;  // chart of `state`
    State state{};
    double t = 0.0;
    IntegratorStats stats;
    std::vector<DenseSegment<Dim>> segments;  // empty unless dense output was requested

    // Dense state at time t within the integrated range, with its chart.
    std::pair<Chart, State> at(double tq) const {
        if (segments.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory has no dense output");
        const bool forward = segments.front().h >= 0.0;
        auto it = std::lower_bound(segments.begin(), segments.end(), tq, [&](const DenseSegment<Dim>& s, double v) {
            return forward ? s.t1() < v : s.t1() > v;
        });
        if (it == segments.end()) it = std::prev(segments.end());
        return {it->chart, it->eval(tq)};
    }
};

template <int Dim>
using VectorField = std::function<std::array<double, Dim>(Chart, const std::array<double, Dim>&)>;
template <int Dim>
using ChartSwitch = std::function<std::array<double, Dim>(const std::array<double, Dim>&)>;

// Integrates dz/dt = f(chart, z) from t = 0 to t = T (either sign).  The
// first two state components are the chart coordinates of the base point.
// `chart_switch` may be empty, in which case no chart changes occur.
template <int Dim>
Trajectory<Dim> integrate(Chart chart, std::array<double, Dim> z, double T, const VectorField<Dim>& f,
                          const ChartSwitch<Dim>& chart_switch, const IntegratorOptions& opt = {},
                          bool dense = false) {
    using namespace dopri;
    using State = std::array<double, Dim>;
    Trajectory<Dim> out;
    out.chart = chart;
    out.state = z;
    if (T == 0.0) return out;
    const double dir = T > 0 ? 1.0 : -1.0;
    const double span = std::abs(T);
    double t = 0.0;
    double h = std::min(opt.initial_step, span);
    auto radius = [](const State& s) { return std::hypot(s[0], s[1]); };
    if (chart_switch && radius(z) > opt.switch_radius) {
        z = chart_switch(z);
        chart = other(chart);
        out.chart = chart;
        out.state = z;
        ++out.stats.chart_switches;
    }
    State k1 = f(chart, z);
    out.stats.evaluations += 1;
    double fac_prev = 1e-4;
    while (t < span) {
        if (out.stats.accepted + out.stats.rejected >= opt.max_steps) {
            throw Error(ErrorKind::IntegratorFailure, "step budget exhausted");
        }
        if (h < opt.min_step) throw Error(ErrorKind::IntegratorFailure, "step size underflow");
        bool last = false;
        if (t + h >= span) {
            h = span - t;
            last = true;
        }
        const double hs = dir * h;
        State y2, y3, y4, y5, y6, y7;
        for (int i = 0; i < Dim; ++i) y2[i] = z[i] + hs * a21 * k1[i];
        const State k2 = f(chart, y2);
        for (int i = 0; i < Dim; ++i) y3[i] = z[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        const State k3 = f(chart, y3);
        for (int i = 0; i < Dim; ++i) y4[i] = z[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State k4 = f(chart, y4);
        for (int i = 0; i < Dim; ++i) y5[i] = z[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State k5 = f(chart, y5);
        for (int i = 0; i < Dim; ++i) {
            y6[i] = z[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        }
        const State k6 = f(chart, y6);
        for (int i = 0; i < Dim; ++i) {
            y7[i] = z[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        }
        const State k7 = f(chart, y7);
        out.stats.evaluations += 6;

        double err = 0.0;
        for (int i = 0; i < Dim; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(z[i]), std::abs(y7[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / Dim);
        if (!std::isfinite(err)) err = 1e10;

        if (err > 1.0 || (chart_switch && radius(y7) > opt.reject_radius)) {
            ++out.stats.rejected;
            const double shrink = err > 1.0 ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
            h *= shrink;
            continue;
        }

        if (dense) {
            DenseSegment<Dim> seg;
            seg.chart = chart;
            seg.t0 = dir * t;
            seg.h = hs;
            for (int i = 0; i < Dim; ++i) {
                const double dy = y7[i] - z[i];
                const double bspl = hs * k1[i] - dy;
                seg.r[0][i] = z[i];
                seg.r[1][i] = dy;
                seg.r[2][i] = bspl;
                seg.r[3][i] = dy - hs * k7[i] - bspl;
                seg.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            out.segments.push_back(seg);
        }

        ++out.stats.accepted;
        t = last ? span : t + h;
        z = y7;
        k1 = k7;
        if (chart_switch && radius(z) > opt.switch_radius) {
            z = chart_switch(z);
            chart = other(chart);
            k1 = f(chart, z);
            ++out.stats.evaluations;
            ++out.stats.chart_switches;
        }

        // Lund-stabilized step size control as in Hairer's DOPRI5.
        const double err_c = std::max(err, 1e-10);
        double fac = std::pow(err_c, 0.17) / std::pow(fac_prev, 0.04) / 0.9;
        fac = std::clamp(fac, 0.1, 5.0);
        fac_prev = err_c;
        h = std::min(h / fac, opt.max_step);
    }
    out.chart = chart;
    out.state = z;
    out.t = T;
    return out;
}

}  // namespace finsler
