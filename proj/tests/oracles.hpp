#pragma once

// Reference computations for the tests.  None of these call into the
// jet-based machinery they check.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "finsler/atlas.hpp"
#include "finsler/coframe.hpp"
#include "finsler/metric.hpp"

namespace oracle {

using finsler::Chart;
using finsler::ChartPoint;
using finsler::Vec2;
using finsler::Vec3;

// Conformal factor and wind of the navigation data, written out by hand.
struct Nav {
    double sigma, w1, w2;
};

inline Nav round_nav(const ChartPoint& p) { return {2.0 / (1.0 + p.x[0] * p.x[0] + p.x[1] * p.x[1]), 0.0, 0.0}; }

inline Nav zermelo_nav(double eps, const ChartPoint& p) {
    Nav n = round_nav(p);
    n.w1 = -eps * p.x[1];
    n.w2 = eps * p.x[0];
    return n;
}

inline Nav radial_nav(double eps, const ChartPoint& p) {
    Nav n = round_nav(p);
    const double sgn = p.chart == Chart::North ? 1.0 : -1.0;
    n.w1 = sgn * eps * p.x[0];
    n.w2 = sgn * eps * p.x[1];
    return n;
}

// F(x, y) is the lambda > 0 with sigma^2 |y / lambda - W|^2 = 1, found by
// bisection.
inline double navigation_norm(const Nav& n, const Vec2& y) {
    auto excess = [&](double lam) {
        const double u1 = y[0] / lam - n.w1, u2 = y[1] / lam - n.w2;
        return n.sigma * n.sigma * (u1 * u1 + u2 * u2) - 1.0;
    };
    double lo = 1e-12, hi = 1.0;
    while (excess(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline Vec3 rotate_z(const Vec3& p, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
}

inline Vec3 unit(const Vec3& v) {
    const double n = finsler::norm(v);
    return {v[0] / n, v[1] / n, v[2] / n};
}

// Round geodesic: great circle through P with unit tangent D.
inline Vec3 great_circle(const Vec3& P, const Vec3& D, double t) {
    return {std::cos(t) * P[0] + std::sin(t) * D[0], std::cos(t) * P[1] + std::sin(t) * D[1],
            std::cos(t) * P[2] + std::sin(t) * D[2]};
}

// Zermelo geodesic by navigation: the round great circle with initial
// velocity y - W, carried along by the rotation the wind generates.  The
// wind eps (-x2, x1) rotates the sphere about the polar axis at rate eps in
// both charts.
inline Vec3 zermelo_geodesic(double eps, const finsler::SigmaPoint& u, double t) {
    const Nav n = zermelo_nav(eps, u.base);
    const finsler::TangentVec still{u.base, {u.y[0] - n.w1, u.y[1] - n.w2}};
    const Vec3 D = finsler::push_to_sphere(still);
    return rotate_z(great_circle(u.position(), D, t), eps * t);
}

// Fourth-order central difference of a scalar function.
inline double diff(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Coefficients of a one-form field on Sigma in (dx1, dx2, ds), as a function
// of the coordinates (x1, x2, s).
using FormField = std::function<finsler::Covector(const std::array<double, 3>&)>;

// d w (a, b) at z for coordinate vectors, by differencing the coefficients.
inline double exterior_d(const FormField& w, const std::array<double, 3>& z, int a, int b, double h = 1e-3) {
    auto component = [&](int along, int comp) {
        return diff(
            [&](double t) {
                auto q = z;
                q[along] += t;
                return w(q)[comp];
            },
            0.0, h);
    };
    return component(a, b) - component(b, a);
}

// d w (X, Y) for constant-coefficient vectors X, Y.
inline double exterior_d(const FormField& w, const std::array<double, 3>& z, const finsler::Vector3& X,
                         const finsler::Vector3& Y, double h = 1e-3) {
    double r = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const double dab = exterior_d(w, z, a, b, h);
            r += dab * (X[a] * Y[b] - X[b] * Y[a]);
        }
    }
    return r;
}

}  // namespace oracle
