#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/config.hpp"
#include "finsler/metric.hpp"
#include "finsler/sampling.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

std::vector<TangentVec> sample_vectors(int n, std::uint64_t seed) {
    Sampler rng(seed);
    std::vector<TangentVec> out;
    for (int i = 0; i < n; ++i) {
        const ChartPoint p = rng.chart_point();
        const double a = rng.uniform(0.0, 2 * std::numbers::pi), r = rng.uniform(0.2, 3.0);
        out.push_back({p, {r * std::cos(a), r * std::sin(a)}});
    }
    return out;
}

}  // namespace

TEST(Metric, RoundIsConformalFactorTimesEuclidean) {
    for (const auto& v : sample_vectors(50, 1)) {
        const double sigma = 2.0 / (1.0 + v.base.x[0] * v.base.x[0] + v.base.x[1] * v.base.x[1]);
        EXPECT_NEAR(eval_F(FinslerMetric::round(), v), sigma * norm(v.y), 1e-14);
    }
}

TEST(Metric, NavigationNormMatchesBisection) {
    const auto z = FinslerMetric::zermelo(0.3);
    const auto radial = non_killing_randers(0.3);
    for (const auto& v : sample_vectors(100, 2)) {
        EXPECT_NEAR(eval_F(z, v), oracle::navigation_norm(oracle::zermelo_nav(0.3, v.base), v.y), 1e-12);
        EXPECT_NEAR(eval_F(radial, v), oracle::navigation_norm(oracle::radial_nav(0.3, v.base), v.y), 1e-12);
        EXPECT_NEAR(navigation_residual(z, v), 0.0, 1e-13);
    }
}

TEST(Metric, RandersFormAgreesWithNavigation) {
    const auto z = FinslerMetric::zermelo(0.25);
    for (const auto& v : sample_vectors(50, 3)) {
        EXPECT_NEAR(zermelo_to_randers(z, v.base).norm(v.y), eval_F(z, v), 1e-13);
    }
    EXPECT_THROW(zermelo_to_randers(1.0, {1.0, 0.0}), Error);
}

TEST(Metric, PositiveHomogeneityAndTriangleInequality) {
    const auto z = FinslerMetric::zermelo(0.3);
    const auto vs = sample_vectors(60, 4);
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        const TangentVec& v = vs[i];
        const double f = eval_F(z, v);
        EXPECT_GT(f, 0.0);
        EXPECT_NEAR(eval_F(z, {v.base, {3.5 * v.y[0], 3.5 * v.y[1]}}), 3.5 * f, 1e-13 * f);
        const Vec2 w = vs[i + 1].y;
        const double sum = eval_F(z, {v.base, {v.y[0] + w[0], v.y[1] + w[1]}});
        EXPECT_LE(sum, f + eval_F(z, {v.base, w}) + 1e-13);
    }
}

TEST(Metric, ZeroVectorAndWindLimits) {
    EXPECT_THROW(eval_F(FinslerMetric::round(), {{Chart::North, {0.1, 0.1}}, {0.0, 0.0}}), Error);
    EXPECT_THROW(FinslerMetric::zermelo(1.0), Error);
    EXPECT_THROW(FinslerMetric::zermelo(-0.1), Error);
    try {
        FinslerMetric::zermelo(1.5);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindTooStrong);
    }
}

TEST(Metric, JetDerivativesMatchFiniteDifferences) {
    const auto z = FinslerMetric::zermelo(0.3);
    const TangentVec v{{Chart::South, {0.4, -0.7}}, {0.8, 0.5}};
    const FJet J(z, v);
    auto F = [&](double a, double b, double c, double d) {
        return eval_F(z, {{v.base.chart, {v.base.x[0] + a, v.base.x[1] + b}}, {v.y[0] + c, v.y[1] + d}});
    };
    EXPECT_NEAR(J.value(), eval_F(z, v), 1e-15);
    EXPECT_NEAR(J.d(1, 0, 0, 0), oracle::diff([&](double h) { return F(h, 0, 0, 0); }, 0.0, 1e-3), 1e-10);
    EXPECT_NEAR(J.d(0, 1, 0, 0), oracle::diff([&](double h) { return F(0, h, 0, 0); }, 0.0, 1e-3), 1e-10);
    EXPECT_NEAR(J.d(0, 0, 1, 0), oracle::diff([&](double h) { return F(0, 0, h, 0); }, 0.0, 1e-3), 1e-10);
    const double fx1y2 = oracle::diff(
        [&](double h) { return oracle::diff([&](double k) { return F(h, 0, 0, k); }, 0.0, 1e-3); }, 0.0, 1e-3);
    EXPECT_NEAR(J.d(1, 0, 0, 1), fx1y2, 1e-7);
}

TEST(Metric, FundamentalTensorIsHessianOfHalfFSquared) {
    const auto radial = non_killing_randers(0.3);
    const TangentVec v{{Chart::North, {-0.2, 0.6}}, {0.3, -1.1}};
    const Mat2 g = fundamental_tensor(radial, v);
    auto E = [&](double a, double b) {
        const double f = eval_F(radial, {v.base, {v.y[0] + a, v.y[1] + b}});
        return 0.5 * f * f;
    };
    const double h = 1e-4;
    const double g00 = (E(h, 0) - 2 * E(0, 0) + E(-h, 0)) / (h * h);
    const double g11 = (E(0, h) - 2 * E(0, 0) + E(0, -h)) / (h * h);
    const double g01 = (E(h, h) - E(h, -h) - E(-h, h) + E(-h, -h)) / (4 * h * h);
    EXPECT_NEAR(g[0][0], g00, 1e-6);
    EXPECT_NEAR(g[1][1], g11, 1e-6);
    EXPECT_NEAR(g[0][1], g01, 1e-6);
    EXPECT_NEAR(g[0][1], g[1][0], 1e-15);
    // Euler: g(y, y) = F^2
    const double gyy = g[0][0] * v.y[0] * v.y[0] + 2 * g[0][1] * v.y[0] * v.y[1] + g[1][1] * v.y[1] * v.y[1];
    const double f = eval_F(radial, v);
    EXPECT_NEAR(gyy, f * f, 1e-13);
}

TEST(Metric, ChartIndependence) {
    for (const auto& m : {FinslerMetric::zermelo(0.3), non_killing_randers(0.2)}) {
        for (const auto& v : sample_vectors(40, 5)) {
            if (v.base.radius() < 0.2) continue;
            EXPECT_NEAR(eval_F(m, transition(v)), eval_F(m, v), 1e-13 * eval_F(m, v));
        }
    }
}

TEST(Metric, IndicatrixParametrization) {
    const auto z = FinslerMetric::zermelo(0.3);
    const ChartPoint p{Chart::North, {0.5, 0.1}};
    for (int k = 0; k < 16; ++k) {
        const double s = 2 * std::numbers::pi * k / 16;
        const TangentVec y = indicatrix_param(z, p, s);
        EXPECT_NEAR(eval_F(z, y), 1.0, 1e-14);
        EXPECT_NEAR(std::atan2(y.y[1], y.y[0]), std::atan2(std::sin(s), std::cos(s)), 1e-14);
    }
}

TEST(Metric, Validation) {
    EXPECT_TRUE(validate(FinslerMetric::round()).ok);
    const ValidationReport z = validate(FinslerMetric::zermelo(0.3), 16, 16);
    EXPECT_TRUE(z.ok);
    EXPECT_LT(z.max_wind, 0.3 + 1e-12);
    EXPECT_GT(z.max_wind, 0.29);
    EXPECT_LT(z.max_chart_mismatch, 1e-12);
    EXPECT_TRUE(validate(non_killing_randers(0.3), 16, 16).ok);

    // wind stronger than the metric at the equator
    const auto strong = parse_metric_config("kind = randers\neps = 1.2\nwind1 = -x2\nwind2 = x1\n");
    const ValidationReport s = validate(strong, 16, 16);
    EXPECT_FALSE(s.ok);
    try {
        require_valid(strong);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MetricValidationError);
    }

    // the South expressions disagree with the North ones
    const auto inconsistent = parse_metric_config("kind = randers\neps = 0.2\nwind1 = -x2\nwind2 = x1\nwind1_south = 0\n");
    const ValidationReport i = validate(inconsistent, 16, 16);
    EXPECT_FALSE(i.ok);
    EXPECT_GT(i.max_chart_mismatch, 1e-6);
}

TEST(Metric, Names) {
    EXPECT_EQ(FinslerMetric::round().name(), "round");
    EXPECT_EQ(FinslerMetric::zermelo(0.3).name(), "zermelo:0.3");
    EXPECT_EQ(non_killing_randers(0.3).name(), "radial-wind:0.3");
}
