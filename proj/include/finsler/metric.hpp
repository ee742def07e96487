#pragma once

// Finsler norms on S^2 given by Zermelo navigation data (h, W): a
// conformally flat Riemannian metric h = sigma(x)^2 |dx|^2 in each chart and
// a wind field W with |W|_h < 1.  The norm is
//
//   F(x, y) = ( sqrt(lambda h(y,y) + W0(y)^2) - W0(y) ) / lambda,
//   W0 = h(W, .),  lambda = 1 - |W|_h^2,
//
// which is the unique positive solution of h(y/F - W, y/F - W) = 1.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "finsler/atlas.hpp"
#include "finsler/errors.hpp"
#include "finsler/expression.hpp"
#include "finsler/jet.hpp"

namespace finsler {

template <class T>
struct NavigationData {
    T sigma;  // conformal factor, h = sigma^2 |dx|^2
    T w1;
    T w2;
};

// User-supplied navigation data.  Index 0 holds the North-chart expressions,
// index 1 the South-chart ones.
struct RandersExpressions {
    std::array<Expression, 2> conformal;
    std::array<Expression, 2> wind1;
    std::array<Expression, 2> wind2;
    double eps = 1.0;
};

class FinslerMetric {
public:
    enum class Kind { Round, Zermelo, Randers };

    static FinslerMetric round() { return FinslerMetric(Kind::Round, 0.0, nullptr); }

    // Round metric with the rotational wind W = eps (-x2, x1) in both charts.
    static FinslerMetric zermelo(double eps) {
        if (!(eps >= 0.0 && eps < 1.0)) {
            throw Error(ErrorKind::WindTooStrong, "Zermelo parameter must lie in [0, 1)");
        }
        return FinslerMetric(Kind::Zermelo, eps, nullptr);
    }

    static FinslerMetric randers(RandersExpressions data) {
        const double eps = data.eps;
        return FinslerMetric(Kind::Randers, eps, std::make_shared<const RandersExpressions>(std::move(data)));
    }

    Kind kind() const { return kind_; }
    double eps() const { return eps_; }
    bool has_wind() const { return kind_ != Kind::Round && eps_ != 0.0; }

    std::string name() const {
        switch (kind_) {
            case Kind::Round: return "round";
            case Kind::Zermelo: {
                char buf[32];
                const auto res = std::to_chars(buf, buf + sizeof buf, eps_);
                return "zermelo:" + std::string(buf, res.ptr);
            }
            case Kind::Randers: return label_.empty() ? "randers" : label_;
        }
        return "unknown";
    }
    void set_label(std::string label) { label_ = std::move(label); }

    template <class T>
    NavigationData<T> navigation(Chart c, const T& x1, const T& x2) const {
        switch (kind_) {
            case Kind::Round: return {T(2.0) / (x1 * x1 + x2 * x2 + 1.0), T(0.0), T(0.0)};
            case Kind::Zermelo: return {T(2.0) / (x1 * x1 + x2 * x2 + 1.0), -x2 * eps_, x1 * eps_};
            case Kind::Randers: {
                const int i = c == Chart::North ? 0 : 1;
                return {randers_->conformal[i].eval(x1, x2), randers_->wind1[i].eval(x1, x2) * eps_,
                        randers_->wind2[i].eval(x1, x2) * eps_};
            }
        }
        return {T(1.0), T(0.0), T(0.0)};
    }

    // F(x, y) for any scalar type supporting the field operations and sqrt.
    template <class T>
    T norm(Chart c, const T& x1, const T& x2, const T& y1, const T& y2) const {
        using std::sqrt;
        const NavigationData<T> nav = navigation(c, x1, x2);
        const T s2 = nav.sigma * nav.sigma;
        if (!has_wind()) return nav.sigma * sqrt(y1 * y1 + y2 * y2);
        const T hyy = s2 * (y1 * y1 + y2 * y2);
        const T w0 = s2 * (nav.w1 * y1 + nav.w2 * y2);
        const T lambda = 1.0 - s2 * (nav.w1 * nav.w1 + nav.w2 * nav.w2);
        return (sqrt(lambda * hyy + w0 * w0) - w0) / lambda;
    }

    // |W|_h at a chart point.
    double wind_norm(const ChartPoint& p) const {
        const auto nav = navigation<double>(p.chart, p.x[0], p.x[1]);
        return std::abs(nav.sigma) * std::hypot(nav.w1, nav.w2);
    }

private:
    FinslerMetric(Kind k, double eps, std::shared_ptr<const RandersExpressions> r)
        : kind_(k), eps_(eps), randers_(std::move(r)) {}

    Kind kind_;
    double eps_;
    std::shared_ptr<const RandersExpressions> randers_;
    std::string label_;
};

inline void require_nonzero(const Vec2& y) {
    if (!(std::hypot(y[0], y[1]) >= kMinVectorNorm)) {
        throw Error(ErrorKind::ZeroVector, "tangent vector below 1e-14");
    }
}

inline double eval_F(const FinslerMetric& m, const TangentVec& v) {
    require_nonzero(v.y);
    const double f = m.norm<double>(v.base.chart, v.base.x[0], v.base.x[1], v.y[0], v.y[1]);
    if (!(f > 0.0)) throw Error(ErrorKind::NonPositiveNorm, "F(x, y) <= 0; metric data is not a norm");
    return f;
}

// Smallest eigenvalue of a symmetric 2x2 matrix.
inline double min_eigenvalue(const Mat2& g) {
    const double tr = g[0][0] + g[1][1];
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}

// Strong-convexity threshold for the fundamental tensor.
inline constexpr double kConvexityFloor = 1e-9;

// g_ij = 1/2 d^2(F^2) / dy^i dy^j.
inline Mat2 fundamental_tensor(const FinslerMetric& m, const TangentVec& v) {
    require_nonzero(v.y);
    using J = Jet<2, 2>;
    const J y1 = J::variable(0, v.y[0]);
    const J y2 = J::variable(1, v.y[1]);
    const J f = m.norm<J>(v.base.chart, J(v.base.x[0]), J(v.base.x[1]), y1, y2);
    if (!(f.value() > 0.0)) throw Error(ErrorKind::NonPositiveNorm, "F(x, y) <= 0");
    const J f2 = f * f;
    // Taylor coefficients: index 3 = y1^2, 4 = y1 y2, 5 = y2^2.
    Mat2 g{{{f2.coef(3), 0.5 * f2.coef(4)}, {0.5 * f2.coef(4), f2.coef(5)}}};
    if (!(min_eigenvalue(g) > kConvexityFloor)) {
        throw Error(ErrorKind::NotStronglyConvex, "fundamental tensor is not positive definite");
    }
    return g;
}

// Derivatives of F in (x1, x2, y1, y2) to total order 3 at a tangent vector.
class FJet {
public:
    using J = Jet<3, 4>;

    FJet(const FinslerMetric& m, const TangentVec& v) {
        require_nonzero(v.y);
        const J x1 = J::variable(0, v.base.x[0]);
        const J x2 = J::variable(1, v.base.x[1]);
        const J y1 = J::variable(2, v.y[0]);
        const J y2 = J::variable(3, v.y[1]);
        jet_ = m.norm<J>(v.base.chart, x1, x2, y1, y2);
    }

    double value() const { return jet_.value(); }

    // d^(a1+a2+b1+b2) F / dx1^a1 dx2^a2 dy1^b1 dy2^b2
    double d(int a1, int a2, int b1, int b2) const { return jet_.derivative({a1, a2, b1, b2}); }

private:
    J jet_;
};

// Randers form of navigation data at a point: F = sqrt(a(y, y)) + b(y).
struct RandersData {
    Mat2 a{};
    Vec2 b{};

    double norm(const Vec2& y) const {
        const double q = a[0][0] * y[0] * y[0] + 2.0 * a[0][1] * y[0] * y[1] + a[1][1] * y[1] * y[1];
        return std::sqrt(q) + b[0] * y[0] + b[1] * y[1];
    }
};

// a_ij = h_ij / lambda + W0_i W0_j / lambda^2,  b_i = -W0_i / lambda.
inline RandersData zermelo_to_randers(double sigma, const Vec2& wind) {
    const double s2 = sigma * sigma;
    const double w2 = s2 * (wind[0] * wind[0] + wind[1] * wind[1]);
    if (!(w2 < 1.0)) throw Error(ErrorKind::WindTooStrong, "|W|_h >= 1");
    const double lambda = 1.0 - w2;
    const Vec2 w0{s2 * wind[0], s2 * wind[1]};
    RandersData r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r.a[i][j] = (i == j ? s2 : 0.0) / lambda + w0[i] * w0[j] / (lambda * lambda);
        }
        r.b[i] = -w0[i] / lambda;
    }
    return r;
}

inline RandersData zermelo_to_randers(const FinslerMetric& m, const ChartPoint& p) {
    const auto nav = m.navigation<double>(p.chart, p.x[0], p.x[1]);
    return zermelo_to_randers(nav.sigma, {nav.w1, nav.w2});
}

// h(y/F - W, y/F - W) - 1 for the metric's own F.
inline double navigation_residual(const FinslerMetric& m, const TangentVec& v) {
    const auto nav = m.navigation<double>(v.base.chart, v.base.x[0], v.base.x[1]);
    const double f = eval_F(m, v);
    const double u1 = v.y[0] / f - nav.w1;
    const double u2 = v.y[1] / f - nav.w2;
    return nav.sigma * nav.sigma * (u1 * u1 + u2 * u2) - 1.0;
}

// Point y(s) = e(s) / F(x, e(s)) of the indicatrix over x.
inline TangentVec indicatrix_param(const FinslerMetric& m, const ChartPoint& x, double s) {
    const Vec2 e{std::cos(s), std::sin(s)};
    const double f = eval_F(m, {x, e});
    return {x, {e[0] / f, e[1] / f}};
}

struct ValidationReport {
    bool ok = true;
    int samples = 0;
    double min_F = INFINITY;
    double min_eigenvalue = INFINITY;
    double max_wind = 0.0;
    double max_chart_mismatch = 0.0;
    std::string failure;
};

// Sample each chart on an n x n grid over [-1, 1]^2 with `fibers` directions,
// checking positivity, strong convexity, |W|_h < 1 and, on the overlap,
// that both charts describe the same norm.
inline ValidationReport validate(const FinslerMetric& m, int n = 32, int fibers = 64) {
    ValidationReport rep;
    auto fail = [&](const std::string& why) {
        if (rep.ok) rep.failure = why;
        rep.ok = false;
    };
    for (Chart c : {Chart::North, Chart::South}) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const ChartPoint p{c, {-1.0 + 2.0 * (i + 0.5) / n, -1.0 + 2.0 * (j + 0.5) / n}};
                const double w = m.wind_norm(p);
                rep.max_wind = std::max(rep.max_wind, w);
                if (!(w < 1.0)) fail("|W|_h >= 1");
                for (int k = 0; k < fibers; ++k) {
                    const double s = 2.0 * std::numbers::pi * k / fibers;
                    const Vec2 e{std::cos(s), std::sin(s)};
                    ++rep.samples;
                    const double f = m.norm<double>(c, p.x[0], p.x[1], e[0], e[1]);
                    rep.min_F = std::min(rep.min_F, f);
                    if (!(f > 0.0)) {
                        fail("F <= 0");
                        continue;
                    }
                    try {
                        const Mat2 g = fundamental_tensor(m, {p, e});
                        rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_eigenvalue(g));
                    } catch (const Error& err) {
                        fail(err.what());
                    }
                    const double r = p.radius();
                    if (r > 1.0 / kSwitchRadius && r < kSwitchRadius) {
                        const TangentVec t = transition({p, e});
                        const double f2 = m.norm<double>(t.base.chart, t.base.x[0], t.base.x[1], t.y[0], t.y[1]);
                        const double mis = std::abs(f - f2) / f;
                        rep.max_chart_mismatch = std::max(rep.max_chart_mismatch, mis);
                        if (!(mis < 1e-9)) fail("charts disagree on the overlap");
                    }
                }
            }
        }
    }
    return rep;
}

inline void require_valid(const FinslerMetric& m) {
    const ValidationReport r = validate(m);
    if (!r.ok) throw Error(ErrorKind::MetricValidationError, m.name() + ": " + r.failure);
}

}  // namespace finsler
