#pragma once

// Cartan's canonical coframing on the unit tangent bundle Sigma of a Finsler
// surface, in local coordinates (x1, x2, s) where s is the polar angle of
// the velocity direction in the chart.
//
//   omega1 = F_{y^i}(x, y) dx^i                   (Hilbert form)
//   omega2 = o sqrt(det g) (y^1 dx^2 - y^2 dx^1)  (g_y-unit normal to y)
//   omega3 = the unique 1-form with d omega1 = omega3 ^ omega2 and
//            omega3 ^ d omega2 = 0
//
// with o = +1 in the North chart and -1 in the South chart so that all
// charts induce the same orientation of M.  The structure functions I, J, K
// are read off from d omega2 and d omega3.
//
// Every quantity is carried as a truncated Taylor jet in (x1, x2, s) around
// the base point, so exterior derivatives are exact polynomial operations
// rather than difference quotients.  A jet of order N yields omega1, omega2
// to order N, omega3 and I to order N-1, and J, K to order N-2.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "finsler/atlas.hpp"
#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Point of Sigma: base point, fiber angle, and the unit velocity
// y(s) = e(s) / F(x, e(s)).
struct SigmaPoint {
    ChartPoint base;
    double s = 0.0;
    Vec2 y{0.0, 0.0};

    static SigmaPoint make(const FinslerMetric& m, const ChartPoint& base, double s) {
        const TangentVec v = indicatrix_param(m, base, s);
        return {base, s, v.y};
    }

    // Sigma point over the sphere point `p` with round-unit direction `dir`
    // (a tangent vector of S^2 in R^3).
    static SigmaPoint from_sphere(const FinslerMetric& m, const Vec3& p, const Vec3& dir) {
        const ChartPoint base = ChartPoint::from_sphere(p);
        const auto cols = sphere_jacobian(base);
        // Solve cols * v = dir in the least-squares sense (cols are orthogonal).
        Vec2 v{};
        for (int i = 0; i < 2; ++i) {
            double num = 0.0, den = 0.0;
            for (int k = 0; k < 3; ++k) {
                num += cols[i][k] * dir[k];
                den += cols[i][k] * cols[i][k];
            }
            v[i] = num / den;
        }
        return make(m, base, std::atan2(v[1], v[0]));
    }

    TangentVec velocity() const { return {base, y}; }
    Vec3 position() const { return base.to_sphere(); }

    // Round-unit direction of the velocity in R^3.
    Vec3 direction() const {
        Vec3 d = push_to_sphere(velocity());
        const double n = norm(d);
        return {d[0] / n, d[1] / n, d[2] / n};
    }

    SigmaPoint in_chart(const FinslerMetric& m, Chart c) const {
        if (c == base.chart) return *this;
        if (base.radius() == 0.0) throw Error(ErrorKind::OriginNotInOverlap, "chart origin");
        const auto z = switch_coordinates(base.x[0], base.x[1], s);
        return make(m, {c, {z[0], z[1]}}, z[2]);
    }

    SigmaPoint canonical(const FinslerMetric& m) const {
        return base.radius() <= 1.0 ? *this : in_chart(m, other(base.chart));
    }
};

// Chart-independent distance on Sigma: base points and round-unit velocity
// directions compared in R^3.
inline double sigma_distance(const SigmaPoint& a, const SigmaPoint& b) {
    const double dp = distance(a.position(), b.position());
    const double dd = distance(a.direction(), b.direction());
    return std::sqrt(dp * dp + dd * dd);
}

using Covector = std::array<double, 3>;  // components on (dx1, dx2, ds)
using Vector3 = std::array<double, 3>;   // components on (d/dx1, d/dx2, d/ds)

inline double contract(const Covector& w, const Vector3& v) { return w[0] * v[0] + w[1] * v[1] + w[2] * v[2]; }

struct Coframe {
    std::array<Covector, 3> omega{};
    double volume() const {
        const auto& w = omega;
        return w[0][0] * (w[1][1] * w[2][2] - w[1][2] * w[2][1]) - w[0][1] * (w[1][0] * w[2][2] - w[1][2] * w[2][0]) +
               w[0][2] * (w[1][0] * w[2][1] - w[1][1] * w[2][0]);
    }
};

// Vector fields X1, X2, X3 dual to the coframing.
struct Frame {
    std::array<Vector3, 3> X{};
};

struct Invariants {
    double I = 0.0;
    double J = 0.0;
    double K = 0.0;
};

// dI = J w1 + I2 w2 + I3 w3, dJ = (-K3 - K I) w1 + J2 w2 + J3 w3,
// dK = K1 w1 + K2 w2 + K3 w3.  The X1-derivatives are kept separately so
// the first-column identities can be checked.
struct BianchiCoefficients {
    double I2 = 0.0, I3 = 0.0, J2 = 0.0, J3 = 0.0, K1 = 0.0, K2 = 0.0, K3 = 0.0;
    double X1I = 0.0, X1J = 0.0, X1K = 0.0;

    double residual_I(const Invariants& v) const { return std::abs(X1I - v.J); }
    double residual_J(const Invariants& v) const { return std::abs(X1J + K3 + v.K * v.I); }
    double residual_K() const { return std::abs(X1K - K1); }
};

struct StructureResiduals {
    // properties (1)-(5) of the canonical coframing
    double orientation = 0.0;   // zero when omega1 ^ omega2 is positive
    double tangential = 0.0;    // |omega1(y) - 1|, |omega2(y)|, ds-components
    double dw1_w2 = 0.0;        // d omega1 ^ omega2
    double normalization = 0.0; // omega1 ^ d omega1 - omega2 ^ d omega2
    double omega3_def = 0.0;    // d omega1 - omega3 ^ omega2, omega3 ^ d omega2
    // structure equations
    double eq1 = 0.0;
    double eq2 = 0.0;
    double eq3 = 0.0;
    double duality = 0.0;

    double max_property() const { return std::max({orientation, tangential, dw1_w2, normalization, omega3_def}); }
    double max_equation() const { return std::max({eq1, eq2, eq3}); }
    double max() const { return std::max(max_property(), max_equation()); }
};

struct CoframeOptions {
    int orientation = 1;        // -1 rebuilds with the opposite orientation of M
    double omega2_scale = 1.0;  // test hook for corrupting omega2
};

// Threshold on the omega1 ^ nu coefficient of d omega1 (nu = ds).
inline constexpr double kStructureConsistency = 1e-5;

namespace detail {

template <class J>
using Form1 = std::array<J, 3>;

// 2-form components on dz0^dz1, dz0^dz2, dz1^dz2.
template <class J>
using Form2 = std::array<J, 3>;

template <class J>
Form2<J> exterior_d(const Form1<J>& a) {
    return {a[1].partial(0) - a[0].partial(1), a[2].partial(0) - a[0].partial(2), a[2].partial(1) - a[1].partial(2)};
}

template <class J>
Form2<J> wedge(const Form1<J>& a, const Form1<J>& b) {
    return {a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1]};
}

// Coefficient of dz0^dz1^dz2 in a ^ w.
template <class J>
J wedge3(const Form1<J>& a, const Form2<J>& w) {
    return a[0] * w[2] - a[1] * w[1] + a[2] * w[0];
}

template <class J>
J eval2(const Form2<J>& w, const std::array<J, 3>& v, const std::array<J, 3>& u) {
    return w[0] * (v[0] * u[1] - v[1] * u[0]) + w[1] * (v[0] * u[2] - v[2] * u[0]) +
           w[2] * (v[1] * u[2] - v[2] * u[1]);
}

template <class J>
J eval1(const Form1<J>& w, const std::array<J, 3>& v) {
    return w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
}

template <class J>
Form1<J> combine(const J& a, const Form1<J>& u, const J& b, const Form1<J>& v) {
    return {a * u[0] + b * v[0], a * u[1] + b * v[1], a * u[2] + b * v[2]};
}

template <class J>
Form2<J> sub(const Form2<J>& a, const Form2<J>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Columns of the inverse of the matrix with rows r0, r1, r2.
template <class J>
std::array<std::array<J, 3>, 3> dual_vectors(const Form1<J>& r0, const Form1<J>& r1, const Form1<J>& r2) {
    const std::array<Form1<J>, 3> m{r0, r1, r2};
    std::array<std::array<J, 3>, 3> cof;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            cof[i][j] = m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
        }
    }
    const J det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    if (!(std::abs(primal(det)) > 1e-300)) {
        throw Error(ErrorKind::SingularSystem, "coframe is degenerate");
    }
    const J inv = reciprocal(det);
    // inverse[mu][a] = cof[a][mu] / det; vector a has components inverse[.][a]
    std::array<std::array<J, 3>, 3> vecs;
    for (int a = 0; a < 3; ++a) {
        for (int mu = 0; mu < 3; ++mu) vecs[a][mu] = cof[a][mu] * inv;
    }
    return vecs;
}

template <class J>
double max_abs(const Form2<J>& w) {
    return std::max({std::abs(primal(w[0])), std::abs(primal(w[1])), std::abs(primal(w[2]))});
}

}  // namespace detail

// Coframe jets of order `Order` around a Sigma point.
template <int Order>
class LocalStructure {
public:
    using J = Jet<Order, 3>;
    using Form1 = detail::Form1<J>;
    using Form2 = detail::Form2<J>;
    using Vecs = std::array<std::array<J, 3>, 3>;

    LocalStructure(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) : point_(u) {
        build_semibasic(m, u, opts);
        if constexpr (Order >= 1) build_omega3();
        if constexpr (Order >= 2) build_invariants();
    }

    const SigmaPoint& point() const { return point_; }
    const std::array<Form1, 3>& omega() const { return w_; }
    const Vecs& frame_jets() const { return x_; }
    const J& I() const { return I_; }
    const J& Jinv() const { return J_; }
    const J& K() const { return K_; }
    const Form2& d_omega(int a) const { return dw_[a]; }
    // q coefficient (omega1 ^ ds) of d omega1; must vanish.
    double consistency() const { return consistency_; }

    Coframe coframe() const {
        Coframe c;
        for (int a = 0; a < 3; ++a) {
            for (int mu = 0; mu < 3; ++mu) c.omega[a][mu] = w_[a][mu].value();
        }
        return c;
    }

    Frame frame() const {
        Frame f;
        for (int a = 0; a < 3; ++a) {
            for (int mu = 0; mu < 3; ++mu) f.X[a][mu] = x_[a][mu].value();
        }
        return f;
    }

    Invariants invariants() const
        requires(Order >= 2)
    {
        return {I_.value(), J_.value(), K_.value()};
    }

    BianchiCoefficients bianchi() const
        requires(Order >= 3)
    {
        auto along = [&](const J& f, int a) {
            double v = 0.0;
            for (int mu = 0; mu < 3; ++mu) v += f.partial(mu).value() * x_[a][mu].value();
            return v;
        };
        BianchiCoefficients b;
        b.X1I = along(I_, 0);
        b.I2 = along(I_, 1);
        b.I3 = along(I_, 2);
        b.X1J = along(J_, 0);
        b.J2 = along(J_, 1);
        b.J3 = along(J_, 2);
        b.X1K = along(K_, 0);
        b.K1 = b.X1K;
        b.K2 = along(K_, 1);
        b.K3 = along(K_, 2);
        return b;
    }

    StructureResiduals residuals() const
        requires(Order >= 2)
    {
        using detail::max_abs;
        using detail::sub;
        using detail::wedge;
        using detail::wedge3;
        StructureResiduals r;
        const Form1& w1 = w_[0];
        const Form1& w2 = w_[1];
        const Form1& w3 = w_[2];

        const double area = primal(wedge(w1, w2)[0]) * orientation_;
        r.orientation = area > 0.0 ? 0.0 : 1.0 + std::abs(area);

        const Vector3 lift{point_.y[0], point_.y[1], 0.0};
        const Coframe c = coframe();
        r.tangential = std::max({std::abs(contract(c.omega[0], lift) - 1.0), std::abs(contract(c.omega[1], lift)),
                                 std::abs(c.omega[0][2]), std::abs(c.omega[1][2])});

        r.dw1_w2 = std::abs(primal(wedge3(w2, dw_[0])));
        r.normalization = std::abs(primal(wedge3(w1, dw_[0]) - wedge3(w2, dw_[1])));
        r.omega3_def = std::max(max_abs(sub(dw_[0], wedge(w3, w2))), std::abs(primal(wedge3(w3, dw_[1]))));

        // d w1 = -w2 ^ w3
        const Form2 w23 = wedge(w2, w3);
        r.eq1 = max_abs(Form2{dw_[0][0] + w23[0], dw_[0][1] + w23[1], dw_[0][2] + w23[2]});
        // d w2 = -w3 ^ (w1 - I w2)
        const Form1 t2 = detail::combine(J(1.0), w1, -I_, w2);
        const Form2 w3t2 = wedge(w3, t2);
        r.eq2 = max_abs(Form2{dw_[1][0] + w3t2[0], dw_[1][1] + w3t2[1], dw_[1][2] + w3t2[2]});
        // d w3 = -(K w1 - J w3) ^ w2
        const Form1 t3 = detail::combine(K_, w1, -J_, w3);
        const Form2 t3w2 = wedge(t3, w2);
        r.eq3 = max_abs(Form2{dw_[2][0] + t3w2[0], dw_[2][1] + t3w2[1], dw_[2][2] + t3w2[2]});

        const Frame f = frame();
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                r.duality = std::max(r.duality, std::abs(contract(c.omega[a], f.X[b]) - (a == b ? 1.0 : 0.0)));
            }
        }
        return r;
    }

private:
    void build_semibasic(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts) {
        using In = Jet<2, 2>;
        using O = Jet<Order, 3, In>;
        const O x1 = O::variable(0, In(u.base.x[0]));
        const O x2 = O::variable(1, In(u.base.x[1]));
        const O s = O::variable(2, In(u.s));
        const O y1 = cos(s) + O(In::variable(0, 0.0));
        const O y2 = sin(s) + O(In::variable(1, 0.0));
        const O f = m.norm<O>(u.base.chart, x1, x2, y1, y2);
        const O f2 = f * f;

        J a1, a2, g11, g12, g22, f0;
        for (int k = 0; k < J::size; ++k) {
            const In& fk = f.coef(k);
            const In& f2k = f2.coef(k);
            f0.coef(k) = fk.coef(0);
            a1.coef(k) = fk.coef(1);
            a2.coef(k) = fk.coef(2);
            g11.coef(k) = f2k.coef(3);
            g12.coef(k) = 0.5 * f2k.coef(4);
            g22.coef(k) = f2k.coef(5);
        }
        if (!(f0.value() > 0.0)) throw Error(ErrorKind::NonPositiveNorm, "F <= 0 on the fiber");
        const J det = g11 * g22 - g12 * g12;
        if (!(det.value() > 0.0)) throw Error(ErrorKind::NotStronglyConvex, "det g <= 0");

        const J sd = J::variable(2, u.s);
        const J inv_f = reciprocal(f0);
        const J yy1 = cos(sd) * inv_f;
        const J yy2 = sin(sd) * inv_f;
        orientation_ = orientation_sign(u.base.chart) * opts.orientation;
        const J root = sqrt(det) * (orientation_ * opts.omega2_scale);

        w_[0] = {a1, a2, J(0.0)};
        w_[1] = {-root * yy2, root * yy1, J(0.0)};
    }

    void build_omega3() {
        using detail::eval2;
        const Form1 nu{J(0.0), J(0.0), J(1.0)};
        const Vecs e = detail::dual_vectors(w_[0], w_[1], nu);
        dw_[0] = detail::exterior_d(w_[0]);
        dw_[1] = detail::exterior_d(w_[1]);
        const J p = eval2(dw_[0], e[0], e[1]);
        const J q = eval2(dw_[0], e[0], e[2]);
        const J r = eval2(dw_[0], e[1], e[2]);
        const J p2 = eval2(dw_[1], e[0], e[1]);
        const J q2 = eval2(dw_[1], e[0], e[2]);
        const J r2 = eval2(dw_[1], e[1], e[2]);
        consistency_ = std::abs(q.value());
        if (consistency_ > kStructureConsistency) {
            throw Error(ErrorKind::InconsistentStructure, "d omega1 has an omega1 ^ ds component");
        }
        if (!(std::abs(q2.value()) > 1e-300)) {
            throw Error(ErrorKind::InconsistentStructure, "d omega2 has no omega1 ^ ds component");
        }
        const J c1 = p;
        const J c3 = -r;
        const J c2 = (p * r2 - r * p2) / q2;
        for (int mu = 0; mu < 3; ++mu) w_[2][mu] = c1 * w_[0][mu] + c2 * w_[1][mu];
        w_[2][2] += c3;
        x_ = detail::dual_vectors(w_[0], w_[1], w_[2]);
    }

    void build_invariants() {
        using detail::eval2;
        dw_[2] = detail::exterior_d(w_[2]);
        I_ = -eval2(dw_[1], x_[1], x_[2]);
        K_ = -eval2(dw_[2], x_[0], x_[1]);
        J_ = -eval2(dw_[2], x_[1], x_[2]);
    }

    SigmaPoint point_;
    int orientation_ = 1;
    std::array<Form1, 3> w_;
    std::array<Form2, 3> dw_;
    Vecs x_;
    J I_, J_, K_;
    double consistency_ = 0.0;
};

// omega1 at u (components on dx1, dx2, ds).
inline Covector hilbert_form(const FinslerMetric& m, const SigmaPoint& u) {
    return LocalStructure<0>(m, u).coframe().omega[0];
}

inline Covector omega2(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) {
    return LocalStructure<0>(m, u, opts).coframe().omega[1];
}

inline Covector omega3(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) {
    return LocalStructure<1>(m, u, opts).coframe().omega[2];
}

inline Coframe coframe(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) {
    return LocalStructure<1>(m, u, opts).coframe();
}

inline Frame frame(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) {
    return LocalStructure<1>(m, u, opts).frame();
}

inline Invariants invariants(const FinslerMetric& m, const SigmaPoint& u) {
    return LocalStructure<2>(m, u).invariants();
}

inline BianchiCoefficients bianchi_coefficients(const FinslerMetric& m, const SigmaPoint& u) {
    return LocalStructure<3>(m, u).bianchi();
}

inline StructureResiduals structure_residuals(const FinslerMetric& m, const SigmaPoint& u,
                                              const CoframeOptions& opts = {}) {
    try {
        return LocalStructure<2>(m, u, opts).residuals();
    } catch (const Error&) {
        StructureResiduals r;
        r.orientation = r.tangential = r.dw1_w2 = r.normalization = r.omega3_def = INFINITY;
        r.eq1 = r.eq2 = r.eq3 = r.duality = INFINITY;
        return r;
    }
}

// Everything the structure equations give at one point.
struct PointAnalysis {
    SigmaPoint point;
    Coframe coframe;
    Frame frame;
    Invariants invariants;
    BianchiCoefficients bianchi;
    StructureResiduals residuals;
};

inline PointAnalysis analyze(const FinslerMetric& m, const SigmaPoint& u, const CoframeOptions& opts = {}) {
    const LocalStructure<3> ls(m, u, opts);
    return {u, ls.coframe(), ls.frame(), ls.invariants(), ls.bianchi(), ls.residuals()};
}

// Geodesic spray in (x1, x2, s) from the Euler-Lagrange equations of F^2/2:
//
//   x'' + 2 G(x, x') = 0,  G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}).
//
// Returns (dx1/dt, dx2/dt, ds/dt) at the unit velocity over (x, s).
template <class T>
std::array<T, 3> spray_field(const FinslerMetric& m, Chart c, const T& x1, const T& x2, const T& s) {
    using std::cos;
    using std::sin;
    using In = Jet<2, 4, T>;
    const T e1 = cos(s);
    const T e2 = sin(s);
    const In f = m.norm<In>(c, In::variable(0, x1), In::variable(1, x2), In::variable(2, e1), In::variable(3, e2));
    const T f0 = f.value();
    const In f2 = f * f;
    // second-order Taylor coefficients of F^2 (index layout of Jet<2, 4>)
    auto coef = [&](int a, int b, int c2, int d) { return f2.taylor({a, b, c2, d}); };
    const T g11 = coef(0, 0, 2, 0);
    const T g12 = coef(0, 0, 1, 1) * 0.5;
    const T g22 = coef(0, 0, 0, 2);
    const T det = g11 * g22 - g12 * g12;
    if (!(primal(det) > 0.0)) throw Error(ErrorKind::SingularSystem, "fundamental tensor is singular");
    // [F^2]_{x^k y^l} e^k and [F^2]_{x^l}
    const T a11 = coef(1, 0, 1, 0), a12 = coef(1, 0, 0, 1), a21 = coef(0, 1, 1, 0), a22 = coef(0, 1, 0, 1);
    const T r1 = (a11 * e1 + a21 * e2) - coef(1, 0, 0, 0);
    const T r2 = (a12 * e1 + a22 * e2) - coef(0, 1, 0, 0);
    // G at e, then rescaled to the unit vector y = e / f0
    const T inv_det = T(1.0) / det;
    const T G1 = (g22 * r1 - g12 * r2) * inv_det * 0.25;
    const T G2 = (g11 * r2 - g12 * r1) * inv_det * 0.25;
    const T inv_f = T(1.0) / f0;
    const T inv_f2 = inv_f * inv_f;
    const T yd1 = G1 * inv_f2 * (-2.0);
    const T yd2 = G2 * inv_f2 * (-2.0);
    return {e1 * inv_f, e2 * inv_f, (e1 * yd2 - e2 * yd1) * f0};
}

// X1 at u from the geodesic equations, components on (d/dx1, d/dx2, d/ds).
inline Vector3 spray(const FinslerMetric& m, const SigmaPoint& u) {
    return spray_field<double>(m, u.base.chart, u.base.x[0], u.base.x[1], u.s);
}

}  // namespace finsler
