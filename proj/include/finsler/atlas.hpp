#pragma once

// Two stereographic charts on the unit sphere S^2 in R^3.
//
//   North chart:  x = (P1, P2) / (1 + P3)     origin at the north pole
//   South chart:  x = (P1, P2) / (1 - P3)     origin at the south pole
//
// On the overlap the transition is the inversion x -> x / |x|^2 in both
// directions.  The inversion reverses orientation; the orientation of M is
// the one for which the North chart is positively oriented.

#include <array>
#include <cmath>
#include <string>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class Chart { North, South };

// Points with |x| < kSwitchRadius are valid chart points.
inline constexpr double kSwitchRadius = 1.5;
// Degenerate tangent vectors below this Euclidean size are rejected.
inline constexpr double kMinVectorNorm = 1e-14;

inline Chart other(Chart c) { return c == Chart::North ? Chart::South : Chart::North; }
inline int orientation_sign(Chart c) { return c == Chart::North ? 1 : -1; }
inline const char* to_string(Chart c) { return c == Chart::North ? "north" : "south"; }

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double distance(const Vec3& a, const Vec3& b) {
    return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

// Inversion (x1, x2) -> (x1, x2) / |x|^2, generic over jets.
template <class T>
std::array<T, 2> invert(const T& x1, const T& x2) {
    const T r2 = x1 * x1 + x2 * x2;
    return {x1 / r2, x2 / r2};
}

// Jacobian of the inversion at x: (|x|^2 I - 2 x x^T) / |x|^4.
inline Mat2 inversion_jacobian(const Vec2& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double r4 = r2 * r2;
    return {{{(r2 - 2 * x[0] * x[0]) / r4, -2 * x[0] * x[1] / r4},
             {-2 * x[0] * x[1] / r4, (r2 - 2 * x[1] * x[1]) / r4}}};
}

struct ChartPoint {
    Chart chart = Chart::North;
    Vec2 x{0.0, 0.0};

    double radius() const { return norm(x); }
    bool valid() const { return radius() < kSwitchRadius; }

    Vec3 to_sphere() const {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double d = 1.0 + r2;
        const double z = (1.0 - r2) / d;
        return {2.0 * x[0] / d, 2.0 * x[1] / d, chart == Chart::North ? z : -z};
    }

    // The point in the chart with the smaller coordinate radius.
    static ChartPoint from_sphere(const Vec3& p) {
        if (p[2] >= 0.0) return {Chart::North, {p[0] / (1.0 + p[2]), p[1] / (1.0 + p[2])}};
        return {Chart::South, {p[0] / (1.0 - p[2]), p[1] / (1.0 - p[2])}};
    }

    static ChartPoint from_sphere(const Vec3& p, Chart c) {
        if (c == Chart::North) return {c, {p[0] / (1.0 + p[2]), p[1] / (1.0 + p[2])}};
        return {c, {p[0] / (1.0 - p[2]), p[1] / (1.0 - p[2])}};
    }

    // Same sphere point expressed in chart `c`; the coordinates may lie
    // outside the switch radius.  Throws at the other chart's origin.
    ChartPoint in_chart(Chart c) const {
        if (c == chart) return *this;
        const double r2 = x[0] * x[0] + x[1] * x[1];
        if (r2 == 0.0) throw Error(ErrorKind::OriginNotInOverlap, "chart origin has no image in the other chart");
        return {c, {x[0] / r2, x[1] / r2}};
    }

    // Re-express in the chart where the coordinate radius is at most 1.
    ChartPoint canonical() const { return radius() <= 1.0 ? *this : in_chart(other(chart)); }
};

// Distance on the sphere between two chart points, as chord length in R^3.
inline double chord(const ChartPoint& a, const ChartPoint& b) { return distance(a.to_sphere(), b.to_sphere()); }

struct TangentVec {
    ChartPoint base;
    Vec2 y{0.0, 0.0};
};

// Chart transition for a tangent vector: base by inversion, y by the Jacobian.
inline TangentVec transition(const TangentVec& v) {
    const double r2 = v.base.x[0] * v.base.x[0] + v.base.x[1] * v.base.x[1];
    if (r2 == 0.0) throw Error(ErrorKind::OriginNotInOverlap, "transition requires |x| > 0");
    const Mat2 j = inversion_jacobian(v.base.x);
    TangentVec r;
    r.base = {other(v.base.chart), {v.base.x[0] / r2, v.base.x[1] / r2}};
    r.y = {j[0][0] * v.y[0] + j[0][1] * v.y[1], j[1][0] * v.y[0] + j[1][1] * v.y[1]};
    return r;
}

// Derivative of the chart-to-sphere map at a point: columns d P / d x^i.
inline std::array<Vec3, 2> sphere_jacobian(const ChartPoint& p) {
    using J = Jet<1, 2>;
    const J x1 = J::variable(0, p.x[0]);
    const J x2 = J::variable(1, p.x[1]);
    const J d = x1 * x1 + x2 * x2 + 1.0;
    const J px = 2.0 * x1 / d;
    const J py = 2.0 * x2 / d;
    J pz = (1.0 - x1 * x1 - x2 * x2) / d;
    if (p.chart == Chart::South) pz = -pz;
    std::array<Vec3, 2> cols{};
    for (int i = 0; i < 2; ++i) cols[i] = {px.coef(1 + i), py.coef(1 + i), pz.coef(1 + i)};
    return cols;
}

inline Vec3 push_to_sphere(const TangentVec& v) {
    const auto cols = sphere_jacobian(v.base);
    return {cols[0][0] * v.y[0] + cols[1][0] * v.y[1], cols[0][1] * v.y[0] + cols[1][1] * v.y[1],
            cols[0][2] * v.y[0] + cols[1][2] * v.y[1]};
}

// Change of unit-tangent-bundle coordinates (x1, x2, s) -> (x1', x2', s')
// between charts, where s is the polar angle of the velocity direction.
template <class T>
std::array<T, 3> switch_coordinates(const T& x1, const T& x2, const T& s) {
    using std::atan2;
    using std::cos;
    using std::sin;
    const T r2 = x1 * x1 + x2 * x2;
    const T r4 = r2 * r2;
    const T e1 = cos(s);
    const T e2 = sin(s);
    const T j11 = (r2 - 2.0 * x1 * x1) / r4;
    const T j12 = -2.0 * x1 * x2 / r4;
    const T j22 = (r2 - 2.0 * x2 * x2) / r4;
    const T v1 = j11 * e1 + j12 * e2;
    const T v2 = j12 * e1 + j22 * e2;
    return {x1 / r2, x2 / r2, atan2(v2, v1)};
}

// Angle wrapped to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    a = std::fmod(a, two_pi);
    if (a > 3.14159265358979323846) a -= two_pi;
    if (a <= -3.14159265358979323846) a += two_pi;
    return a;
}

}  // namespace finsler
