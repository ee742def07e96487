#pragma once

// Checks on the space Lambda of oriented geodesics, available when the
// geodesic flow is periodic with period 2 pi (alpha^2 = id).  Points of
// Lambda are represented by orbit representatives in Sigma; no global chart
// of Lambda is built.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "finsler/antipodal.hpp"
#include "finsler/coframe.hpp"
#include "finsler/errors.hpp"
#include "finsler/flow.hpp"
#include "finsler/integrator.hpp"
#include "finsler/metric.hpp"
#include "finsler/reversibility.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

struct OrientedGeodesic {
    SigmaPoint representative;
    double period = 2.0 * std::numbers::pi;
};

struct LambdaOptions {
    int periodicity_samples = 8;
    double periodicity_tolerance = 1e-5;
    std::uint64_t seed = 7;
    FlowOptions flow;
};

struct FreeActionReport {
    double max_return = 0.0;              // max distance(Psi_2pi(u), u)
    double min_subperiod_distance = INFINITY;  // min over k = 2..5 of distance(Psi_{2pi/k}(u), u)
    int samples = 0;
    bool passed() const { return max_return <= 1e-5 && min_subperiod_distance > 0.1; }
};

struct GInvarianceReport {
    double metric = 0.0;  // omega2(v) omega2(w) + omega3(v) omega3(w)
    double area = 0.0;    // (omega3 ^ omega2)(v, w)
    double max() const { return std::max(metric, area); }
};

struct RhoInvarianceReport {
    double omega1_part = 0.0;
    double invariant_part = 0.0;  // I omega2 + J omega3
};

struct RhoCurvature {
    double curvature = 0.0;  // kappa in d rho = -kappa omega3 ^ omega2
    double residual = 0.0;   // omega1-components of d rho
};

struct ClosureReport {
    double r = 0.0;
    double length = 0.0;          // omega3-length 2 pi r(p)
    double return_distance = 0.0;
    double base_drift = 0.0;
    double min_interior_distance = INFINITY;  // no earlier return
    bool passed() const { return return_distance <= 1e-5 && base_drift <= 1e-7; }
};

// Max over sampled u of distance(Psi_2pi(u), u); throws NotPeriodic above
// the tolerance.
inline double require_periodic(const FinslerMetric& m, const LambdaOptions& opt = {}) {
    Sampler rng(opt.seed);
    double worst = 0.0;
    for (int i = 0; i < opt.periodicity_samples; ++i) {
        const SigmaPoint u = rng.sigma_point(m);
        worst = std::max(worst, sigma_distance(flow(m, u, 2.0 * std::numbers::pi, opt.flow), u));
    }
    if (worst > opt.periodicity_tolerance) {
        throw Error(ErrorKind::NotPeriodic, "Psi_2pi moves points by " + std::to_string(worst) + "; alpha^2 != id");
    }
    return worst;
}

class LambdaSpace {
public:
    explicit LambdaSpace(const FinslerMetric& m, const LambdaOptions& opt = {}) : m_(m), opt_(opt) {
        periodicity_ = require_periodic(m, opt);
    }

    const FinslerMetric& metric() const { return m_; }
    double periodicity_residual() const { return periodicity_; }

    FreeActionReport free_action_check(int samples, std::uint64_t seed) const {
        Sampler rng(seed);
        FreeActionReport rep;
        rep.samples = samples;
        for (int i = 0; i < samples; ++i) {
            const SigmaPoint u = rng.sigma_point(m_);
            const GeodesicPath path(m_, u, 2.0 * std::numbers::pi, opt_.flow);
            rep.max_return = std::max(rep.max_return, sigma_distance(path.end(), u));
            for (int k = 2; k <= 5; ++k) {
                rep.min_subperiod_distance =
                    std::min(rep.min_subperiod_distance, sigma_distance(path.at(2.0 * std::numbers::pi / k), u));
            }
        }
        if (rep.max_return > opt_.periodicity_tolerance) {
            throw Error(ErrorKind::NotPeriodic, "Psi_2pi does not return");
        }
        return rep;
    }

    GInvarianceReport g_invariance(const SigmaPoint& u, const Vector3& v, const Vector3& w,
                                   const std::vector<double>& times) const {
        const Coframe c0 = coframe(m_, u);
        const double g0 = contract(c0.omega[1], v) * contract(c0.omega[1], w) +
                          contract(c0.omega[2], v) * contract(c0.omega[2], w);
        const double a0 = area(c0, v, w);
        GInvarianceReport rep;
        for (double t : times) {
            const TangentFlow tf = flow_with_tangent(m_, u, t, opt_.flow);
            const Coframe c = coframe(m_, tf.end);
            const Vector3 vt = tf.push(v), wt = tf.push(w);
            const double g = contract(c.omega[1], vt) * contract(c.omega[1], wt) +
                             contract(c.omega[2], vt) * contract(c.omega[2], wt);
            rep.metric = std::max(rep.metric, std::abs(g - g0));
            rep.area = std::max(rep.area, std::abs(area(c, vt, wt) - a0));
        }
        return rep;
    }

    // rho = -omega1 + I omega2 + J omega3.
    double rho(const SigmaPoint& u, const Vector3& v) const {
        const LocalStructure<2> ls(m_, u);
        const Coframe c = ls.coframe();
        const Invariants inv = ls.invariants();
        return -contract(c.omega[0], v) + inv.I * contract(c.omega[1], v) + inv.J * contract(c.omega[2], v);
    }

    RhoInvarianceReport rho_invariance(const SigmaPoint& u, const Vector3& v, const std::vector<double>& times) const {
        const LocalStructure<2> l0(m_, u);
        const Coframe c0 = l0.coframe();
        const Invariants i0 = l0.invariants();
        const double w10 = contract(c0.omega[0], v);
        const double p0 = i0.I * contract(c0.omega[1], v) + i0.J * contract(c0.omega[2], v);
        RhoInvarianceReport rep;
        for (double t : times) {
            const TangentFlow tf = flow_with_tangent(m_, u, t, opt_.flow);
            const LocalStructure<2> l(m_, tf.end);
            const Coframe c = l.coframe();
            const Invariants inv = l.invariants();
            const Vector3 vt = tf.push(v);
            rep.omega1_part = std::max(rep.omega1_part, std::abs(contract(c.omega[0], vt) - w10));
            const double p = inv.I * contract(c.omega[1], vt) + inv.J * contract(c.omega[2], vt);
            rep.invariant_part = std::max(rep.invariant_part, std::abs(p - p0));
        }
        return rep;
    }

    // d rho expanded in the coframe; on the pullback of a Riemannian metric
    // with curvature kappa, d rho = -kappa omega3 ^ omega2.
    RhoCurvature rho_curvature(const SigmaPoint& u) const {
        const LocalStructure<3> ls(m_, u);
        using J = LocalStructure<3>::J;
        const auto& w = ls.omega();
        detail::Form1<J> rho;
        for (int mu = 0; mu < 3; ++mu) rho[mu] = -w[0][mu] + ls.I() * w[1][mu] + ls.Jinv() * w[2][mu];
        const auto d = detail::exterior_d(rho);
        const auto& x = ls.frame_jets();
        RhoCurvature rc;
        rc.curvature = primal(detail::eval2(d, x[1], x[2]));
        rc.residual = std::max(std::abs(primal(detail::eval2(d, x[0], x[1]))),
                               std::abs(primal(detail::eval2(d, x[0], x[2]))));
        return rc;
    }

    // Integrates X3 from u over omega3-length 2 pi r(p).
    ClosureReport nabla_geodesic_closure(const SigmaPoint& u) const {
        ClosureReport rep;
        rep.r = angle_measure(m_, u.base).r;
        rep.length = 2.0 * std::numbers::pi * rep.r;
        const FinslerMetric m = m_;
        const VectorField<3> x3 = [m](Chart c, const std::array<double, 3>& z) {
            return frame(m, SigmaPoint::make(m, {c, {z[0], z[1]}}, z[2])).X[2];
        };
        const auto tr = integrate<3>(u.base.chart, {u.base.x[0], u.base.x[1], u.s}, rep.length, x3, {},
                                     opt_.flow.integrator, true);
        for (const auto& seg : tr.segments) {
            for (double f : {0.5, 1.0}) {
                const auto z = seg.eval(seg.t0 + f * seg.h);
                rep.base_drift = std::max(rep.base_drift, std::hypot(z[0] - u.base.x[0], z[1] - u.base.x[1]));
                const double tau = seg.t0 + f * seg.h;
                if (tau > 0.05 * rep.length && tau < 0.95 * rep.length) {
                    rep.min_interior_distance =
                        std::min(rep.min_interior_distance, sigma_distance(to_sigma(m_, seg.chart, z), u));
                }
            }
        }
        rep.return_distance = sigma_distance(to_sigma(m_, tr.chart, tr.state), u);
        return rep;
    }

    // min over t in [0, period) of distance(Psi_t(a), b).
    double orbit_distance(const OrientedGeodesic& a, const OrientedGeodesic& b, int grid = 64) const {
        const GeodesicPath path(m_, a.representative, a.period, opt_.flow);
        auto f = [&](double t) { return sigma_distance(path.at(t), b.representative); };
        int best = 0;
        double fb = INFINITY;
        for (int k = 0; k < grid; ++k) {
            const double v = f(a.period * k / grid);
            if (v < fb) {
                fb = v;
                best = k;
            }
        }
        const double h = a.period / grid;
        // bracket around the best node, wrapping through t = 0
        const double lo = (best - 1) * h, hi = (best + 1) * h;
        auto fw = [&](double t) {
            double tt = std::fmod(t, a.period);
            if (tt < 0) tt += a.period;
            return f(tt);
        };
        return std::min(fb, detail::golden_min(fw, lo, hi).second);
    }

    bool equivalent(const OrientedGeodesic& a, const OrientedGeodesic& b, double tol = 1e-6) const {
        return orbit_distance(a, b) <= tol;
    }

    // Symmetric Hausdorff distance between the base traces in R^3.
    double hausdorff(const OrientedGeodesic& a, const OrientedGeodesic& b, int probes = 128) const {
        const GeodesicPath pa(m_, a.representative, a.period, opt_.flow);
        const GeodesicPath pb(m_, b.representative, b.period, opt_.flow);
        auto one_sided = [&](const GeodesicPath& from, const GeodesicPath& to, double pf, double pt) {
            const double h = pt / probes;
            // distance from from(s) to the trace of `to`
            auto gap = [&](double s) {
                double sf = std::fmod(s, pf);
                if (sf < 0) sf += pf;
                const Vec3 q = from.at(sf).position();
                double fb = INFINITY;
                int best = 0;
                for (int j = 0; j < probes; ++j) {
                    const double v = distance(to.at(pt * j / probes).position(), q);
                    if (v < fb) {
                        fb = v;
                        best = j;
                    }
                }
                auto f = [&](double t) {
                    double tt = std::fmod(t, pt);
                    if (tt < 0) tt += pt;
                    return distance(to.at(tt).position(), q);
                };
                return std::min(fb, detail::golden_min(f, (best - 1) * h, (best + 1) * h).second);
            };
            double worst = -1.0;
            int arg = 0;
            for (int k = 0; k < probes; ++k) {
                const double v = gap(pf * k / probes);
                if (v > worst) {
                    worst = v;
                    arg = k;
                }
            }
            const double hf = pf / probes;
            const auto peak = detail::golden_min([&](double s) { return -gap(s); }, (arg - 1) * hf, (arg + 1) * hf, 1e-9);
            return std::max(worst, -peak.second);
        };
        return std::max(one_sided(pa, pb, a.period, b.period), one_sided(pb, pa, b.period, a.period));
    }

    // The same curve traversed backwards.  Requires geodesic reversibility,
    // which is checked once per space.
    OrientedGeodesic beta(const OrientedGeodesic& g) const {
        if (!geodesically_reversible_) {
            GeodesicReversibilityOptions ro;
            ro.samples = 4;
            ro.flow = opt_.flow;
            geodesically_reversible_ = is_geodesically_reversible(m_, ro).reversible;
        }
        if (!*geodesically_reversible_) {
            throw Error(ErrorKind::NotGeodesicallyReversible, "beta is undefined for " + m_.name());
        }
        const SigmaPoint& u = g.representative;
        return {SigmaPoint::make(m_, u.base, wrap_fiber(std::atan2(-u.y[1], -u.y[0]))), g.period};
    }

private:
    static double area(const Coframe& c, const Vector3& v, const Vector3& w) {
        return contract(c.omega[2], v) * contract(c.omega[1], w) - contract(c.omega[1], v) * contract(c.omega[2], w);
    }

    FinslerMetric m_;
    LambdaOptions opt_;
    double periodicity_ = 0.0;
    mutable std::optional<bool> geodesically_reversible_;
};

}  // namespace finsler
