#pragma once

// The eleven acceptance criteria as runnable checks.  Each criterion uses
// its own fixed metrics, sample sizes and tolerances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "finsler/antipodal.hpp"
#include "finsler/coframe.hpp"
#include "finsler/config.hpp"
#include "finsler/flow.hpp"
#include "finsler/lambda.hpp"
#include "finsler/metric.hpp"
#include "finsler/reversibility.hpp"
#include "finsler/sampling.hpp"
#include "finsler/sweeps.hpp"

namespace finsler::acceptance {

inline constexpr int kCriteria = 11;

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::vector<std::pair<std::string, double>> measured;
    std::string detail;

    void measure(const std::string& key, double v) { measured.emplace_back(key, v); }
    // Records a requirement and folds it into `passed`.
    bool require(bool ok, const std::string& what) {
        if (!ok) detail += (detail.empty() ? "" : "; ") + what;
        passed = passed && ok;
        return ok;
    }
};

namespace detail {

inline double pi() { return std::numbers::pi; }

inline Vec3 rotate_z(const Vec3& p, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
}

// Navigation model of the Zermelo geodesics: a round great circle through p
// advected by the rotation of angle eps t about the polar axis.  Over one
// period the round circle closes, so alpha^2 = R_{2 pi eps}.
inline Vec3 advected_alpha2(double eps, const Vec3& p) {
    const Vec3 d = std::abs(p[2]) < 0.9 ? normalized(Vec3{-p[1], p[0], 0.0}) : normalized(Vec3{p[2], 0.0, -p[0]});
    const double T = 2.0 * pi();
    const Vec3 q{std::cos(T) * p[0] + std::sin(T) * d[0], std::cos(T) * p[1] + std::sin(T) * d[1],
                 std::cos(T) * p[2] + std::sin(T) * d[2]};
    return rotate_z(q, eps * T);
}

// Rotation angle of (alpha^2)' at the origin of chart c from the advection
// model.  At the poles the wind vanishes, the indicatrix is a round circle
// and the invariant inner product is a multiple of the identity.
inline double advected_theta(double eps, Chart c) {
    const double h = 1e-3;
    Mat2 L{};
    for (int j = 0; j < 2; ++j) {
        std::array<Vec2, 4> v;
        const double off[4] = {2 * h, h, -h, -2 * h};
        for (int k = 0; k < 4; ++k) {
            ChartPoint q{c, {0.0, 0.0}};
            q.x[j] = off[k];
            v[k] = ChartPoint::from_sphere(advected_alpha2(eps, q.to_sphere()), c).x;
        }
        for (int i = 0; i < 2; ++i) L[i][j] = (-v[0][i] + 8 * v[1][i] - 8 * v[2][i] + v[3][i]) / (12 * h);
    }
    double th = std::atan2(L[1][0] - L[0][1], L[0][0] + L[1][1]);
    if (th < 0) th += 2.0 * pi();
    return orientation_sign(c) > 0 ? th : 2.0 * pi() - th;
}

}  // namespace detail

inline CriterionResult structure_suite() {
    CriterionResult r{1, "structure-equation suite", true, {}, {}};
    for (const auto& m : {FinslerMetric::round(), FinslerMetric::zermelo(0.1), FinslerMetric::zermelo(0.3)}) {
        const SweepSummary s = sweep(m, sigma_grid(m, 16, 32));
        r.measure(m.name() + ".property", s.max_property);
        r.measure(m.name() + ".equation", s.max_equation);
        r.measure(m.name() + ".duality", s.max_duality);
        r.require(s.failures == 0, m.name() + ": coframe construction failed");
        r.require(s.max_property <= 1e-6, m.name() + ": property residual > 1e-6");
        r.require(s.max_equation <= 1e-6, m.name() + ": structure equation residual > 1e-6");
        r.require(s.max_duality <= 1e-8, m.name() + ": duality > 1e-8");
    }
    return r;
}

inline CriterionResult riemannian_oracle() {
    CriterionResult r{2, "Riemannian oracle", true, {}, {}};
    const auto m = FinslerMetric::round();
    const SweepSummary s = sweep(m, sigma_grid(m, 16, 32));
    const double dev = std::max({s.max_abs_I, s.max_abs_J, s.max_K_dev});
    r.measure("max |(I, J, K) - (0, 0, 1)|", dev);
    r.require(s.failures == 0 && dev <= 1e-6, "Round invariants deviate by more than 1e-6");
    return r;
}

inline CriterionResult katok_curvature() {
    CriterionResult r{3, "constant-curvature Katok check", true, {}, {}};
    const auto m = FinslerMetric::zermelo(0.3);
    const SweepSummary s = sweep(m, sigma_grid(m, 16, 32));
    r.measure("max |K - 1|", s.max_K_dev);
    r.measure("max |I|", s.max_abs_I);
    r.require(s.failures == 0 && s.max_K_dev <= 1e-5, "|K - 1| > 1e-5");
    r.require(s.max_abs_I > 0.01, "max |I| <= 0.01");
    return r;
}

inline CriterionResult bianchi_dynamics() {
    CriterionResult r{4, "Bianchi / K = 1 dynamics", true, {}, {}};
    const auto m = FinslerMetric::zermelo(0.3);
    Sampler rng(404);
    double fd_res = 0.0, x1_res = 0.0, drift = 0.0;
    const double T = 2.0 * detail::pi();
    const double h = 1e-2;
    for (int g = 0; g < 20; ++g) {
        const SigmaPoint u = rng.sigma_point(m);
        const GeodesicPath path(m, u, T);
        auto ij = [&](double t) {
            const Invariants v = invariants(m, path.at(t).canonical(m));
            return std::pair{v.I, v.J};
        };
        for (int k = 0; k < 64; ++k) {
            const double t = 2 * h + (T - 4 * h) * k / 63.0;
            const auto p2 = ij(t + 2 * h), p1 = ij(t + h), m1 = ij(t - h), m2 = ij(t - 2 * h), c = ij(t);
            const double dI = (-p2.first + 8 * p1.first - 8 * m1.first + m2.first) / (12 * h);
            const double dJ = (-p2.second + 8 * p1.second - 8 * m1.second + m2.second) / (12 * h);
            fd_res = std::max({fd_res, std::abs(dI - c.second), std::abs(dJ + c.first)});
        }
        ConservationOptions co;
        const ConservationReport cr = conservation_check(m, u, T, co);
        x1_res = std::max(x1_res, cr.harmonic_residual);
        drift = std::max(drift, cr.drift);
    }
    r.measure("max |dI/dt - J|, |dJ/dt + I| (differenced)", fd_res);
    r.measure("max |X1 I - J|, |X1 J + I| (jets)", x1_res);
    r.measure("max drift of I^2 + J^2", drift);
    r.require(fd_res <= 1e-5 && x1_res <= 1e-5, "harmonic identities violated beyond 1e-5");
    r.require(drift <= 1e-6, "I^2 + J^2 drift > 1e-6");
    return r;
}

inline CriterionResult flow_rotation() {
    CriterionResult r{5, "flow rotation", true, {}, {}};
    for (const auto& m : {FinslerMetric::round(), FinslerMetric::zermelo(0.3)}) {
        Sampler rng(505);
        std::vector<SigmaPoint> pts;
        for (int i = 0; i < 100; ++i) pts.push_back(rng.sigma_point(m));
        std::vector<double> worst(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            for (double t : {detail::pi() / 2, detail::pi(), 2 * detail::pi()}) {
                worst[i] = std::max(worst[i], pullback_rotation_check(m, pts[i], t).max());
            }
        });
        const double w = *std::max_element(worst.begin(), worst.end());
        r.measure(m.name() + ".transport residual", w);
        r.require(w <= 1e-5, m.name() + ": transport residual > 1e-5");
    }
    return r;
}

inline CriterionResult refocusing() {
    CriterionResult r{6, "quasi-antipodal refocusing", true, {}, {}};
    for (const auto& m : {FinslerMetric::round(), FinslerMetric::zermelo(0.3)}) {
        Sampler rng(606);
        std::vector<ChartPoint> pts;
        for (int i = 0; i < 50; ++i) pts.push_back(rng.chart_point());
        std::vector<double> spread(pts.size()), err(pts.size());
        std::vector<int> failed(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            try {
                const AntipodalReport a = alpha(m, pts[i]);
                spread[i] = a.spread;
                const Vec2 q = ChartPoint::from_sphere(a.alpha_p.to_sphere(), other(pts[i].chart)).x;
                err[i] = std::hypot(q[0] + pts[i].x[0], q[1] + pts[i].x[1]);
            } catch (const Error&) {
                failed[i] = 1;
            }
        });
        const double s = *std::max_element(spread.begin(), spread.end());
        r.measure(m.name() + ".max spread", s);
        r.require(std::count(failed.begin(), failed.end(), 1) == 0, m.name() + ": refocusing failure");
        r.require(s <= 1e-5, m.name() + ": spread > 1e-5");
        if (m.kind() == FinslerMetric::Kind::Round) {
            const double e = *std::max_element(err.begin(), err.end());
            r.measure("round.max |alpha(p) - (-x/|x|^2)|", e);
            r.require(e <= 1e-6, "Round alpha differs from the antipode by > 1e-6");
        }
    }
    return r;
}

inline CriterionResult alpha2_classification() {
    CriterionResult r{7, "alpha^2 classification", true, {}, {}};
    const Alpha2Classification round = alpha2_classify(FinslerMetric::round());
    r.measure("round.max displacement", round.max_displacement);
    r.require(round.identity && round.max_displacement <= 1e-7, "Round alpha^2 is not the identity within 1e-7");

    const double eps = 0.3;
    const Alpha2Classification z = alpha2_classify(FinslerMetric::zermelo(eps));
    r.measure("zermelo:0.3.basins", z.basins);
    r.require(!z.identity && z.fixed_points.size() == 2, "Zermelo 0.3 does not have exactly two fixed points");
    if (z.fixed_points.size() == 2) {
        const auto& a = z.fixed_points[0];
        const auto& b = z.fixed_points[1];
        const double origin = std::max(norm(a.n.x), norm(b.n.x));
        r.measure("zermelo:0.3.fixed point distance to chart origins", origin);
        r.require(origin <= 1e-4 && a.n.chart != b.n.chart, "fixed points are not the chart origins");
        const double sum = std::abs(a.theta_n + b.theta_n - 2 * detail::pi());
        r.measure("|theta_n + theta_alpha(n) - 2 pi|", sum);
        r.require(sum <= 1e-4, "theta_n + theta_alpha(n) differs from 2 pi by > 1e-4");
        double oracle = 0.0;
        for (const auto* f : {&a, &b}) {
            const double th = detail::advected_theta(eps, f->n.chart);
            oracle = std::max(oracle, std::abs(f->theta_n - th));
            r.measure(std::string("theta at the ") + to_string(f->n.chart) + " pole", f->theta_n);
        }
        r.measure("max |theta_n - advection oracle|", oracle);
        r.require(oracle <= 1e-4, "theta_n differs from the advection oracle by > 1e-4");
        double inv = std::max(a.invariance, b.invariance);
        r.measure("max |L^T Q L - Q|", inv);
        r.require(inv <= 1e-5, "L does not preserve Q within 1e-5");
    }

    const auto third = FinslerMetric::zermelo(1.0 / 3.0);
    Sampler rng(707);
    double closure = 0.0;
    for (int i = 0; i < 10; ++i) {
        const SigmaPoint u = rng.sigma_point(third);
        closure = std::max(closure, sigma_distance(flow(third, u, 6 * detail::pi()), u));
    }
    r.measure("zermelo:1/3.max |Psi_6pi(u) - u|", closure);
    r.require(closure <= 1e-5, "Zermelo 1/3 geodesics do not close at length 6 pi");
    return r;
}

inline CriterionResult polar_coordinates() {
    CriterionResult r{8, "polar coordinates", true, {}, {}};
    for (const auto& m : {FinslerMetric::round(), FinslerMetric::zermelo(0.3)}) {
        Sampler rng(808);
        double min_sep = INFINITY, wind = 0.0;
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            const InjectivityReport inj = injectivity_check(m, rng.chart_point());
            min_sep = std::min(min_sep, inj.min_separation);
            wind = std::max(wind, std::abs(inj.winding - 1.0));
            ok = ok && inj.passed();
        }
        r.measure(m.name() + ".min separation", min_sep);
        r.measure(m.name() + ".|winding - 1|", wind);
        r.require(ok, m.name() + ": injectivity grid failed");
    }
    const auto round = FinslerMetric::round();
    Sampler rng(809);
    double jac = 0.0;
    for (int i = 0; i < 4; ++i) {
        const AngleMeasure am = angle_measure(round, rng.chart_point());
        for (int k = 0; k < 8; ++k) {
            const double th = 2 * detail::pi() * k / 8;
            jac = std::max(jac, std::abs(polar_jacobian(round, am, th, detail::pi() / 2) - am.r));
        }
    }
    r.measure("round.max |Jacobian - r sin t| at t = pi/2", jac);
    r.require(jac <= 1e-4, "Round polar Jacobian differs from r(p) sin t by > 1e-4");
    return r;
}

inline CriterionResult reversibility_classification() {
    CriterionResult r{9, "reversibility classification", true, {}, {}};
    const auto round = FinslerMetric::round();
    const auto z = FinslerMetric::zermelo(0.3);
    const ReversibilityReport rr = is_reversible(round);
    const GeodesicReversibilityReport rg = is_geodesically_reversible(round);
    r.measure("round.gap", rr.gap);
    r.measure("round.max deviation", rg.max_deviation);
    r.require(rr.reversible && rg.reversible, "Round is not classified reversible and geodesically reversible");
    const ReversibilityReport zr = is_reversible(z);
    const GeodesicReversibilityReport zg = is_geodesically_reversible(z);
    r.measure("zermelo:0.3.gap", zr.gap);
    r.measure("zermelo:0.3.max deviation", zg.max_deviation);
    r.require(!zr.reversible && zr.gap > 0.1, "Zermelo 0.3 reversibility gap <= 0.1");
    r.require(!zg.reversible && zg.max_deviation > 1e-2, "Zermelo 0.3 geodesic deviation <= 1e-2");
    for (const auto& m : {round, FinslerMetric::zermelo(0.1), z}) {
        const bool geo = m.name() == round.name() ? rg.reversible
                         : m.name() == z.name()   ? zg.reversible
                                                  : is_geodesically_reversible(m).reversible;
        Alpha2Options ao;
        ao.grid = 6;
        const bool id = alpha2_classify(m, ao).identity;
        r.require(!geo || id, m.name() + ": geodesically reversible but alpha^2 != id");
    }
    return r;
}

inline CriterionResult lambda_suite() {
    CriterionResult r{10, "Lambda suite (Round)", true, {}, {}};
    const auto m = FinslerMetric::round();
    const LambdaSpace L(m);
    const FreeActionReport fa = L.free_action_check(20, 1010);
    r.measure("free action max return", fa.max_return);
    r.measure("free action min sub-period distance", fa.min_subperiod_distance);
    r.require(fa.passed(), "free-action check failed");

    Sampler rng(1011);
    std::vector<double> times;
    for (int k = 1; k <= 16; ++k) times.push_back(2 * detail::pi() * k / 16);
    double g = 0.0, ret = 0.0, drift = 0.0, interior = INFINITY;
    for (int i = 0; i < 10; ++i) {
        const SigmaPoint u = rng.sigma_point(m);
        const Vector3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Vector3 w{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        g = std::max(g, L.g_invariance(u, v, w, times).max());
        const ClosureReport c = L.nabla_geodesic_closure(u);
        ret = std::max(ret, c.return_distance);
        drift = std::max(drift, c.base_drift);
        interior = std::min(interior, c.min_interior_distance);
    }
    r.measure("g-invariance", g);
    r.measure("X3 orbit return distance", ret);
    r.measure("X3 orbit base drift", drift);
    r.measure("X3 orbit min interior distance", interior);
    r.require(g <= 1e-5, "g-invariance > 1e-5");
    r.require(ret <= 1e-5 && interior > 0.1, "X3 orbits do not close at length 2 pi r(p)");
    r.require(drift <= 1e-7, "X3 orbit base drift > 1e-7");

    double involution = 0.0, separation = INFINITY;
    for (int i = 0; i < 100; ++i) {
        const OrientedGeodesic G{rng.sigma_point(m)};
        const OrientedGeodesic B = L.beta(G);
        involution = std::max(involution, L.orbit_distance(G, L.beta(B)));
        separation = std::min(separation, L.orbit_distance(G, B));
    }
    r.measure("beta^2 orbit distance", involution);
    r.measure("min orbit distance G to beta(G)", separation);
    r.require(involution <= 1e-5, "beta is not an involution on orbits");
    r.require(separation > 0.1, "beta has a fixed orbit");
    return r;
}

inline CriterionResult negative_controls() {
    CriterionResult r{11, "negative controls", true, {}, {}};
    const FinslerMetric m = non_killing_randers(0.3);
    const ValidationReport v = validate(m);
    r.require(v.ok, "control metric failed validation: " + v.failure);
    const SweepSummary s = sweep(m, sigma_grid(m, 8, 8));
    r.measure("max |K - 1|", s.max_K_dev);
    r.require(s.max_K_dev > 1e-2, "control metric passes K = 1");

    Sampler rng(1111);
    double drift = 0.0;
    int rejected = 0;
    const int n = 5;
    for (int i = 0; i < n; ++i) {
        const SigmaPoint u = rng.sigma_point(m);
        ConservationOptions co;
        co.require_constant_curvature = false;
        drift = std::max(drift, conservation_check(m, u, 2 * detail::pi(), co).drift);
        try {
            conservation_check(m, u, 2 * detail::pi());
        } catch (const Error& e) {
            rejected += e.kind() == ErrorKind::NotConstantCurvature;
        }
    }
    r.measure("max drift of I^2 + J^2", drift);
    r.measure("gated conservation rejections", rejected);
    r.require(drift > 1e-3, "conservation law holds on the control");
    r.require(rejected == n, "K = 1 gate did not reject the control");

    int refocus = 0;
    for (int i = 0; i < 3; ++i) {
        try {
            alpha(m, rng.chart_point());
        } catch (const Error& e) {
            refocus += e.kind() == ErrorKind::RefocusingFailure;
        }
    }
    r.measure("alpha refocusing rejections", refocus);
    r.require(refocus == 3, "alpha accepted the control");
    return r;
}

inline CriterionResult run(int id) {
    static const std::function<CriterionResult()> table[kCriteria] = {
        structure_suite, riemannian_oracle,   katok_curvature,   bianchi_dynamics,
        flow_rotation,   refocusing,          alpha2_classification, polar_coordinates,
        reversibility_classification, lambda_suite, negative_controls};
    if (id < 1 || id > kCriteria) throw Error(ErrorKind::InvalidArgument, "no acceptance criterion " + std::to_string(id));
    try {
        return table[id - 1]();
    } catch (const Error& e) {
        CriterionResult r{id, "criterion " + std::to_string(id), false, {}, std::string("error: ") + e.what()};
        return r;
    }
}

}  // namespace finsler::acceptance
