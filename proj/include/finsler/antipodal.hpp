#pragma once

// Global consequences of K = 1: the quasi-antipodal map alpha with
// alpha' = Psi_pi, fixed points and rotation angles of alpha^2, angle
// measures on the fibers, and geodesic polar coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "finsler/atlas.hpp"
#include "finsler/coframe.hpp"
#include "finsler/errors.hpp"
#include "finsler/flow.hpp"
#include "finsler/metric.hpp"
#include "finsler/parallel.hpp"
#include "finsler/sampling.hpp"

namespace finsler {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// alpha

struct AntipodalOptions {
    int fibers = 32;
    double spread_tolerance = 1e-5;   // valid report
    double refocus_failure = 1e-4;    // RefocusingFailure above this
    FlowOptions flow;
};

struct AntipodalReport {
    ChartPoint p;
    ChartPoint alpha_p;
    double spread = 0.0;               // max chord between endpoints pi(Psi_pi(u)), u in Sigma_p
    double alpha2_displacement = 0.0;  // chord(alpha^2(p), p)
    bool valid = false;
};

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v[0] / n, v[1] / n, v[2] / n};
}

inline AntipodalReport alpha(const FinslerMetric& m, const ChartPoint& p, const AntipodalOptions& opt = {}) {
    const int n = std::max(opt.fibers, 2);
    std::vector<Vec3> ends(n);
    std::vector<Vec3> ends2(1);
    for (int k = 0; k < n; ++k) {
        const SigmaPoint u = SigmaPoint::make(m, p, kTwoPi * k / n);
        if (k == 0) {
            const GeodesicPath path(m, u, kTwoPi, opt.flow);
            ends[0] = path.at(std::numbers::pi).position();
            ends2[0] = path.end().position();
        } else {
            ends[k] = flow(m, u, std::numbers::pi, opt.flow).position();
        }
    }
    AntipodalReport rep;
    rep.p = p;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) rep.spread = std::max(rep.spread, distance(ends[i], ends[j]));
    }
    Vec3 mean{0, 0, 0};
    for (const auto& e : ends) {
        for (int k = 0; k < 3; ++k) mean[k] += e[k] / n;
    }
    const Chart c = ChartPoint::from_sphere(normalized(mean)).chart;
    Vec2 centroid{0, 0};
    for (const auto& e : ends) {
        const ChartPoint q = ChartPoint::from_sphere(e, c);
        centroid[0] += q.x[0] / n;
        centroid[1] += q.x[1] / n;
    }
    rep.alpha_p = {c, centroid};
    rep.alpha2_displacement = distance(ends2[0], p.to_sphere());
    if (rep.spread > opt.refocus_failure) {
        throw Error(ErrorKind::RefocusingFailure, "geodesics from p spread by " + std::to_string(rep.spread) +
                                                      " at distance pi");
    }
    rep.valid = rep.spread <= opt.spread_tolerance;
    return rep;
}

// alpha^2(p) = pi(Psi_2pi(u)) for the fiber point u over p at s = 0.
inline Vec3 alpha2_point(const FinslerMetric& m, const ChartPoint& p, const FlowOptions& opt = {}) {
    return flow(m, SigmaPoint::make(m, p, 0.0), kTwoPi, opt).position();
}

// alpha^2 in the coordinates of p's chart.
inline Vec2 alpha2_coords(const FinslerMetric& m, const ChartPoint& p, const FlowOptions& opt = {}) {
    return ChartPoint::from_sphere(alpha2_point(m, p, opt), p.chart).x;
}

// ---------------------------------------------------------------------------
// invariant inner product on T_n M

// M_ij = average of y_i y_j over the convex body K_n = {F(n, y) <= 1}, and
// its inverse Q, the dual inner product on T_n M.
struct InnerProduct {
    Mat2 M{};
    Mat2 Q{};
    double area = 0.0;
};

inline Mat2 inverse(const Mat2& a) {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (!(std::abs(det) > 1e-300)) throw Error(ErrorKind::SingularSystem, "singular 2x2 matrix");
    return {{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

inline Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    }
    return r;
}

inline Mat2 transpose(const Mat2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

// In polar coordinates y = rho e(phi) with boundary rho = 1 / F(n, e(phi)):
//   area = int r^2 / 2 dphi,  int y_i y_j = int r^4 / 4 e_i e_j dphi.
// The integrand is smooth and periodic, so the trapezoid rule converges
// geometrically.
inline InnerProduct invariant_inner_product(const FinslerMetric& m, const ChartPoint& n, int nodes = 512) {
    InnerProduct ip;
    double m00 = 0, m01 = 0, m11 = 0, area = 0;
    for (int k = 0; k < nodes; ++k) {
        const double phi = kTwoPi * k / nodes;
        const Vec2 e{std::cos(phi), std::sin(phi)};
        const double r = 1.0 / eval_F(m, {n, e});
        const double r2 = r * r;
        area += r2 / 2.0;
        m00 += r2 * r2 / 4.0 * e[0] * e[0];
        m01 += r2 * r2 / 4.0 * e[0] * e[1];
        m11 += r2 * r2 / 4.0 * e[1] * e[1];
    }
    const double dphi = kTwoPi / nodes;
    ip.area = area * dphi;
    ip.M = {{{m00 / area, m01 / area}, {m01 / area, m11 / area}}};
    ip.Q = inverse(ip.M);
    return ip;
}

// Rejection-sampling estimate of M (loose cross-check of the quadrature).
inline InnerProduct invariant_inner_product_monte_carlo(const FinslerMetric& m, const ChartPoint& n, int samples,
                                                        std::uint64_t seed) {
    double rmax = 0.0;
    for (int k = 0; k < 512; ++k) {
        const double phi = kTwoPi * k / 512;
        rmax = std::max(rmax, 1.0 / eval_F(m, {n, {std::cos(phi), std::sin(phi)}}));
    }
    rmax *= 1.05;
    Sampler rng(seed);
    double m00 = 0, m01 = 0, m11 = 0;
    int accepted = 0, drawn = 0;
    while (accepted < samples) {
        const Vec2 y{rng.uniform(-rmax, rmax), rng.uniform(-rmax, rmax)};
        ++drawn;
        if (std::hypot(y[0], y[1]) < kMinVectorNorm) continue;
        if (eval_F(m, {n, y}) > 1.0) continue;
        ++accepted;
        m00 += y[0] * y[0];
        m01 += y[0] * y[1];
        m11 += y[1] * y[1];
    }
    InnerProduct ip;
    ip.M = {{{m00 / accepted, m01 / accepted}, {m01 / accepted, m11 / accepted}}};
    ip.Q = inverse(ip.M);
    ip.area = 4.0 * rmax * rmax * accepted / drawn;
    return ip;
}

// Counterclockwise rotation angle in [0, 2 pi) of L in a Q-orthonormal
// basis, measured in the orientation of M.
inline double rotation_angle(const Mat2& L, const Mat2& Q, Chart chart) {
    // Q = R^T R with R upper triangular.
    const double r00 = std::sqrt(Q[0][0]);
    const double r01 = Q[0][1] / r00;
    const double r11 = std::sqrt(Q[1][1] - r01 * r01);
    const Mat2 R{{{r00, r01}, {0.0, r11}}};
    const Mat2 Rinv{{{1.0 / r00, -r01 / (r00 * r11)}, {0.0, 1.0 / r11}}};
    const Mat2 Lt = multiply(multiply(R, L), Rinv);
    double th = std::atan2(Lt[1][0] - Lt[0][1], Lt[0][0] + Lt[1][1]);
    if (th < 0.0) th += kTwoPi;
    if (orientation_sign(chart) < 0) th = th == 0.0 ? 0.0 : kTwoPi - th;
    return th;
}

// ---------------------------------------------------------------------------
// alpha^2 classification

struct FixedPointReport {
    ChartPoint n;
    ChartPoint alpha_n;
    Mat2 L{};
    Mat2 inner_product{};
    double theta_n = 0.0;
    double residual = 0.0;        // chord(alpha^2(n), n)
    double invariance = 0.0;      // max |L^T Q L - Q|
};

struct Alpha2Options {
    int grid = 12;                  // grid x grid latitude-longitude points
    double identity_tolerance = 1e-5;
    int starts = 20;
    double merge_radius = 1e-3;
    double newton_tolerance = 1e-11;
    int newton_iterations = 40;
    double derivative_step = 1e-3;
    int quadrature_nodes = 512;
    FlowOptions flow;
};

struct Alpha2Classification {
    bool identity = false;
    double max_displacement = 0.0;
    Vec3 worst_point{};
    std::vector<FixedPointReport> fixed_points;
    int basins = 0;
    bool count_mismatch = false;  // descent found a number of basins other than 2
};

// Fixed point of alpha^2 by damped Newton iteration on alpha^2(x) - x in
// chart coordinates, starting from the sphere point `start`.
inline std::optional<ChartPoint> locate_fixed_point(const FinslerMetric& m, const Vec3& start,
                                                    const Alpha2Options& opt) {
    ChartPoint p = ChartPoint::from_sphere(start);
    auto residual = [&](const ChartPoint& q) {
        const Vec2 a = alpha2_coords(m, q, opt.flow);
        return Vec2{a[0] - q.x[0], a[1] - q.x[1]};
    };
    Vec2 g = residual(p);
    for (int it = 0; it < opt.newton_iterations; ++it) {
        if (norm(g) < opt.newton_tolerance) return p;
        const double h = 1e-5;
        Mat2 J{};
        for (int j = 0; j < 2; ++j) {
            ChartPoint a = p, b = p;
            a.x[j] += h;
            b.x[j] -= h;
            const Vec2 ga = residual(a), gb = residual(b);
            J[0][j] = (ga[0] - gb[0]) / (2 * h);
            J[1][j] = (ga[1] - gb[1]) / (2 * h);
        }
        Vec2 step;
        try {
            const Mat2 Ji = inverse(J);
            step = {-(Ji[0][0] * g[0] + Ji[0][1] * g[1]), -(Ji[1][0] * g[0] + Ji[1][1] * g[1])};
        } catch (const Error&) {
            step = {-g[0], -g[1]};
        }
        double lam = 1.0;
        bool moved = false;
        for (int k = 0; k < 12; ++k, lam *= 0.5) {
            ChartPoint q{p.chart, {p.x[0] + lam * step[0], p.x[1] + lam * step[1]}};
            if (!q.valid()) continue;
            const Vec2 gq = residual(q);
            if (norm(gq) < norm(g)) {
                p = q;
                g = gq;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (p.radius() > 1.0) {
            p = p.canonical();
            g = residual(p);
        }
    }
    if (norm(g) < 1e-8) return p;
    return std::nullopt;
}

inline FixedPointReport analyze_fixed_point(const FinslerMetric& m, const ChartPoint& n, const Alpha2Options& opt) {
    FixedPointReport r;
    r.n = n;
    const double h = opt.derivative_step;
    for (int j = 0; j < 2; ++j) {
        std::array<Vec2, 4> v;
        const double off[4] = {2 * h, h, -h, -2 * h};
        for (int k = 0; k < 4; ++k) {
            ChartPoint q = n;
            q.x[j] += off[k];
            v[k] = alpha2_coords(m, q, opt.flow);
        }
        for (int i = 0; i < 2; ++i) r.L[i][j] = (-v[0][i] + 8 * v[1][i] - 8 * v[2][i] + v[3][i]) / (12 * h);
    }
    const InnerProduct ip = invariant_inner_product(m, n, opt.quadrature_nodes);
    r.inner_product = ip.Q;
    const Mat2 lql = multiply(multiply(transpose(r.L), ip.Q), r.L);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) r.invariance = std::max(r.invariance, std::abs(lql[i][j] - ip.Q[i][j]));
    }
    r.theta_n = rotation_angle(r.L, ip.Q, n.chart);
    r.residual = distance(alpha2_point(m, n, opt.flow), n.to_sphere());
    AntipodalOptions aopt;
    aopt.flow = opt.flow;
    aopt.refocus_failure = INFINITY;
    r.alpha_n = alpha(m, n, aopt).alpha_p;
    return r;
}

inline Alpha2Classification alpha2_classify(const FinslerMetric& m, const Alpha2Options& opt = {}) {
    Alpha2Classification out;
    const std::vector<Vec3> pts = latlong_grid(opt.grid);
    std::vector<double> disp(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        disp[i] = distance(alpha2_point(m, ChartPoint::from_sphere(pts[i]), opt.flow), pts[i]);
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (disp[i] > out.max_displacement) {
            out.max_displacement = disp[i];
            out.worst_point = pts[i];
        }
    }
    out.identity = out.max_displacement <= opt.identity_tolerance;
    if (out.identity) return out;

    const std::vector<Vec3> starts = fibonacci_sphere(opt.starts);
    std::vector<std::optional<ChartPoint>> found(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { found[i] = locate_fixed_point(m, starts[i], opt); });
    std::vector<ChartPoint> distinct;
    for (const auto& f : found) {
        if (!f) continue;
        const Vec3 P = f->to_sphere();
        bool dup = false;
        for (const auto& d : distinct) dup = dup || distance(d.to_sphere(), P) < opt.merge_radius;
        if (!dup) distinct.push_back(f->canonical());
    }
    out.basins = static_cast<int>(distinct.size());
    out.count_mismatch = out.basins != 2;
    std::sort(distinct.begin(), distinct.end(), [](const ChartPoint& a, const ChartPoint& b) {
        return a.to_sphere()[2] > b.to_sphere()[2];
    });
    out.fixed_points.resize(distinct.size());
    parallel_for(distinct.size(), [&](std::size_t i) { out.fixed_points[i] = analyze_fixed_point(m, distinct[i], opt); });
    return out;
}

// ---------------------------------------------------------------------------
// angle measure

// iota_p: theta -> s with iota_p^* omega3 = r(p) d theta, iota_p(0) = s0.
// omega3(d/ds) on the fiber is held as a trigonometric interpolant.
class AngleMeasure {
public:
    ChartPoint p;
    double r = 0.0;
    double s0 = 0.0;
    int sign = 1;  // sign of omega3(d/ds); negative in charts of negative orientation
    std::vector<std::pair<double, double>> table;  // (theta, s)

    AngleMeasure() = default;

    AngleMeasure(const FinslerMetric& m, const ChartPoint& base, double start, int nodes) : p(base), s0(start) {
        const int n = std::max(nodes, 8);
        std::vector<double> f(n);
        for (int k = 0; k < n; ++k) f[k] = omega3(m, SigmaPoint::make(m, base, s0 + kTwoPi * k / n))[2];
        const bool pos = f[0] > 0.0;
        for (double v : f) {
            if ((v > 0.0) != pos || v == 0.0) {
                throw Error(ErrorKind::NonOrientedFiber, "omega3 changes sign on the fiber");
            }
        }
        sign = pos ? 1 : -1;
        double mean = 0.0;
        for (double v : f) mean += v / n;
        a0_ = mean;
        r = std::abs(mean);
        const int modes = n / 2 - 1;
        a_.assign(modes + 1, 0.0);
        b_.assign(modes + 1, 0.0);
        for (int q = 1; q <= modes; ++q) {
            double ca = 0.0, cb = 0.0;
            for (int k = 0; k < n; ++k) {
                const double tau = kTwoPi * k / n;
                ca += f[k] * std::cos(q * tau);
                cb += f[k] * std::sin(q * tau);
            }
            a_[q] = 2.0 * ca / n;
            b_[q] = 2.0 * cb / n;
        }
        for (int j = 0; j < 256; ++j) {
            const double th = kTwoPi * j / 256;
            table.emplace_back(th, s_of(th));
        }
    }

    // omega3(d/ds) at fiber angle s.
    double density(double s) const {
        const double tau = s - s0;
        double v = a0_;
        for (std::size_t q = 1; q < a_.size(); ++q) v += a_[q] * std::cos(q * tau) + b_[q] * std::sin(q * tau);
        return v;
    }

    // theta(s) = (1 / r) int_{s0}^{s} omega3.
    double theta_of(double s) const {
        const double tau = s - s0;
        double v = a0_ * tau;
        for (std::size_t q = 1; q < a_.size(); ++q) {
            v += (a_[q] * std::sin(q * tau) - b_[q] * (std::cos(q * tau) - 1.0)) / static_cast<double>(q);
        }
        return v / r;
    }

    double s_of(double theta) const {
        double s = s0 + sign * theta;
        for (int it = 0; it < 50; ++it) {
            const double d = (theta_of(s) - theta) / (density(s) / r);
            s -= d;
            if (std::abs(d) < 1e-15) break;
        }
        return s;
    }

    double ds_dtheta(double theta) const { return r / density(s_of(theta)); }

private:
    double a0_ = 0.0;
    std::vector<double> a_, b_;
};

inline AngleMeasure angle_measure(const FinslerMetric& m, const ChartPoint& p, double s0 = 0.0, int nodes = 512) {
    return AngleMeasure(m, p, s0, nodes);
}

// ---------------------------------------------------------------------------
// geodesic polar coordinates

// E_p at polar angle theta and distance t: pi(Psi_t(iota_p(theta))).
inline ChartPoint exp_polar(const FinslerMetric& m, const AngleMeasure& am, double theta, double t,
                            const FlowOptions& opt = {}) {
    return flow(m, SigmaPoint::make(m, am.p, am.s_of(theta)), t, opt).base;
}

// (omega1 ^ omega2)(d/dt, d/dtheta) of R_p(theta, t) = Psi_t(iota_p(theta));
// equals r(p) sin t for K = 1.
inline double polar_jacobian(const FinslerMetric& m, const AngleMeasure& am, double theta, double t,
                             const FlowOptions& opt = {}) {
    const double s = am.s_of(theta);
    const TangentFlow tf = flow_with_tangent(m, SigmaPoint::make(m, am.p, s), t, opt);
    const Vector3 v = tf.push({0.0, 0.0, am.ds_dtheta(theta)});
    const Coframe w = coframe(m, tf.end);
    const Vector3 x1 = spray(m, tf.end);
    return contract(w.omega[0], x1) * contract(w.omega[1], v) - contract(w.omega[1], x1) * contract(w.omega[0], v);
}

struct PolarSample {
    double theta = 0.0;
    double t = 0.0;
    ChartPoint point;
};

struct InjectivityReport {
    double min_separation = 0.0;
    double winding = 0.0;         // degree of the small circle t = t_1 around p
    double refocus_spread = 0.0;  // spread of the images at t = pi
    double separation_margin = 1e-4;
    std::vector<PolarSample> grid;
    bool passed() const { return min_separation > separation_margin && std::abs(winding - 1.0) < 1e-6; }
};

inline InjectivityReport injectivity_check(const FinslerMetric& m, const ChartPoint& p, int n_theta = 64,
                                           int n_t = 31, const FlowOptions& opt = {}) {
    const AngleMeasure am = angle_measure(m, p);
    InjectivityReport rep;
    std::vector<std::vector<Vec3>> pos(n_theta, std::vector<Vec3>(n_t));
    std::vector<Vec3> tips(n_theta);
    std::vector<std::vector<ChartPoint>> pts(n_theta, std::vector<ChartPoint>(n_t));
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t i) {
        const double th = kTwoPi * static_cast<double>(i) / n_theta;
        const GeodesicPath path(m, SigmaPoint::make(m, p, am.s_of(th)), std::numbers::pi, opt);
        for (int j = 0; j < n_t; ++j) {
            const double t = std::numbers::pi * (j + 1) / (n_t + 1);
            pts[i][j] = path.at(t).base;
            pos[i][j] = pts[i][j].to_sphere();
        }
        tips[i] = path.end().position();
    });
    std::vector<Vec3> flat;
    for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_t; ++j) {
            flat.push_back(pos[i][j]);
            rep.grid.push_back({kTwoPi * i / n_theta, std::numbers::pi * (j + 1) / (n_t + 1), pts[i][j]});
        }
    }
    rep.min_separation = INFINITY;
    for (std::size_t a = 0; a < flat.size(); ++a) {
        for (std::size_t b = a + 1; b < flat.size(); ++b) {
            rep.min_separation = std::min(rep.min_separation, distance(flat[a], flat[b]));
        }
    }
    double total = 0.0;
    auto angle_at = [&](int i) {
        const ChartPoint q = ChartPoint::from_sphere(pos[i][0], p.chart);
        return std::atan2(q.x[1] - p.x[1], q.x[0] - p.x[0]);
    };
    for (int i = 0; i < n_theta; ++i) total += wrap_angle(angle_at((i + 1) % n_theta) - angle_at(i));
    rep.winding = total / kTwoPi * orientation_sign(p.chart);
    for (int i = 0; i < n_theta; ++i) {
        for (int j = i + 1; j < n_theta; ++j) rep.refocus_spread = std::max(rep.refocus_spread, distance(tips[i], tips[j]));
    }
    return rep;
}

}  // namespace finsler
