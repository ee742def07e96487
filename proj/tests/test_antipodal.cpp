#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "finsler/antipodal.hpp"
#include "finsler/config.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 neg(const Vec3& p) { return {-p[0], -p[1], -p[2]}; }

std::vector<ChartPoint> sample_bases(int n, std::uint64_t seed) {
    Sampler rng(seed);
    std::vector<ChartPoint> out;
    for (int i = 0; i < n; ++i) out.push_back(rng.chart_point());
    return out;
}

Mat2 rot(double a) { return {{{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}}}; }

}  // namespace

TEST(Alpha, RoundIsTheAntipodalMap) {
    const auto m = FinslerMetric::round();
    for (const ChartPoint& p : sample_bases(6, 51)) {
        const AntipodalReport r = alpha(m, p);
        EXPECT_TRUE(r.valid);
        EXPECT_LT(r.spread, 1e-8);
        EXPECT_LT(distance(r.alpha_p.to_sphere(), neg(p.to_sphere())), 1e-8);
        EXPECT_LT(r.alpha2_displacement, 1e-8);
    }
}

TEST(Alpha, ZermeloIsTheAntipodeRotatedByTheWind) {
    for (double eps : {0.1, 0.3}) {
        const auto m = FinslerMetric::zermelo(eps);
        for (const ChartPoint& p : sample_bases(5, 52)) {
            const AntipodalReport r = alpha(m, p);
            EXPECT_TRUE(r.valid);
            const Vec3 expect = oracle::rotate_z(neg(p.to_sphere()), eps * kPi);
            EXPECT_LT(distance(r.alpha_p.to_sphere(), expect), 1e-8);
            const Vec3 twice = oracle::rotate_z(p.to_sphere(), 2 * kPi * eps);
            EXPECT_LT(distance(alpha2_point(m, p), twice), 1e-8);
            EXPECT_NEAR(r.alpha2_displacement, distance(twice, p.to_sphere()), 1e-8);
        }
    }
}

TEST(Alpha, RadialWindDoesNotRefocus) {
    const auto m = non_killing_randers(0.3);
    try {
        alpha(m, {Chart::North, {0.4, 0.2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RefocusingFailure);
    }
    AntipodalOptions opt;
    opt.refocus_failure = INFINITY;
    const AntipodalReport r = alpha(m, {Chart::North, {0.4, 0.2}}, opt);
    EXPECT_FALSE(r.valid);
    EXPECT_GT(r.spread, 1e-3);
}

TEST(InnerProduct, QuadratureAgreesWithMonteCarlo) {
    const auto m = FinslerMetric::zermelo(0.3);
    const ChartPoint p{Chart::North, {0.6, -0.2}};
    const InnerProduct q = invariant_inner_product(m, p);
    const InnerProduct mc = invariant_inner_product_monte_carlo(m, p, 200000, 5);
    EXPECT_NEAR(q.area, mc.area, 0.01 * q.area);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(q.M[i][j], mc.M[i][j], 0.02 * std::abs(q.M[0][0]));
    }
}

TEST(InnerProduct, RoundIndicatrixAtTheOriginIsADisc) {
    // sigma = 2 at the origin, so the indicatrix is the disc of radius 1/2
    const InnerProduct q = invariant_inner_product(FinslerMetric::round(), {Chart::North, {0.0, 0.0}});
    EXPECT_NEAR(q.area, kPi / 4, 1e-12);
    EXPECT_NEAR(q.M[0][0], 1.0 / 16, 1e-12);
    EXPECT_NEAR(q.M[0][1], 0.0, 1e-12);
    EXPECT_NEAR(q.M[1][1], 1.0 / 16, 1e-12);
}

TEST(RotationAngle, RecoversConjugatedRotations) {
    // Q = R^T R with R upper triangular
    const Mat2 R{{{2.0, 0.5}, {0.0, std::sqrt(1.75)}}};
    const Mat2 Q = multiply(transpose(R), R);
    for (double th : {0.3, 2.0, 4.5}) {
        const Mat2 L = multiply(multiply(inverse(R), rot(th)), R);
        const Mat2 lql = multiply(multiply(transpose(L), Q), L);
        EXPECT_NEAR(lql[0][1], Q[0][1], 1e-12);
        const double north = rotation_angle(L, Q, Chart::North);
        EXPECT_NEAR(north, th, 1e-12);
        EXPECT_NEAR(2 * std::cos(north), L[0][0] + L[1][1], 1e-12);
        EXPECT_NEAR(rotation_angle(L, Q, Chart::South), 2 * kPi - th, 1e-12);
    }
    EXPECT_EQ(rotation_angle({{{1.0, 0.0}, {0.0, 1.0}}}, Q, Chart::South), 0.0);
}

TEST(Alpha2, RoundIsTheIdentity) {
    const Alpha2Classification c = alpha2_classify(FinslerMetric::round());
    EXPECT_TRUE(c.identity);
    EXPECT_LT(c.max_displacement, 1e-8);
    EXPECT_TRUE(c.fixed_points.empty());
}

TEST(Alpha2, ZermeloRotatesAboutThePoles) {
    const double eps = 0.3;
    const Alpha2Classification c = alpha2_classify(FinslerMetric::zermelo(eps));
    EXPECT_FALSE(c.identity);
    // the largest displacement of a rotation by 2 pi eps is its equatorial chord
    EXPECT_NEAR(c.max_displacement, 2 * std::sin(kPi * eps), 0.05);
    ASSERT_EQ(c.basins, 2);
    EXPECT_FALSE(c.count_mismatch);
    ASSERT_EQ(c.fixed_points.size(), 2u);
    double sum = 0.0;
    for (const FixedPointReport& f : c.fixed_points) {
        const Vec3 n = f.n.to_sphere();
        EXPECT_NEAR(std::abs(n[2]), 1.0, 1e-8);
        const double expect = n[2] > 0 ? 2 * kPi * eps : 2 * kPi - 2 * kPi * eps;
        EXPECT_NEAR(f.theta_n, expect, 1e-6);
        EXPECT_LT(f.residual, 1e-8);
        EXPECT_LT(f.invariance, 1e-5);
        // alpha swaps the poles
        EXPECT_LT(distance(f.alpha_n.to_sphere(), neg(n)), 1e-6);
        sum += f.theta_n;
    }
    EXPECT_NEAR(sum, 2 * kPi, 1e-6);
}

TEST(AngleMeasure, RoundFibersHaveUnitRadius) {
    const auto m = FinslerMetric::round();
    for (const ChartPoint& p : sample_bases(6, 53)) {
        const AngleMeasure am = angle_measure(m, p, 0.4);
        EXPECT_NEAR(am.r, 1.0, 1e-10);
        EXPECT_EQ(am.sign, orientation_sign(p.chart));
    }
}

TEST(AngleMeasure, RoundTripsAndFullTurn) {
    const auto m = FinslerMetric::zermelo(0.3);
    for (const ChartPoint& p : sample_bases(4, 54)) {
        const AngleMeasure am = angle_measure(m, p, 1.0);
        EXPECT_GT(am.r, 0.0);
        EXPECT_NEAR(am.s_of(0.0), 1.0, 1e-14);
        EXPECT_NEAR(am.theta_of(1.0 + am.sign * 2 * kPi), 2 * kPi, 1e-10);
        for (double th : {0.5, 2.0, 5.5}) {
            EXPECT_NEAR(am.theta_of(am.s_of(th)), th, 1e-12);
            // ds/dtheta against a central difference of s(theta)
            const double fd = oracle::diff([&](double x) { return am.s_of(x); }, th, 1e-3);
            EXPECT_NEAR(am.ds_dtheta(th), fd, 1e-9);
        }
    }
}

TEST(Polar, JacobianIsRSinT) {
    for (const auto& m : {FinslerMetric::round(), FinslerMetric::zermelo(0.3)}) {
        const ChartPoint p{Chart::South, {0.3, 0.5}};
        const AngleMeasure am = angle_measure(m, p);
        for (double th : {0.0, 1.3, 4.0}) {
            for (double t : {0.5, 1.5, 2.8}) {
                EXPECT_NEAR(polar_jacobian(m, am, th, t), am.r * std::sin(t), 1e-7) << m.name();
            }
        }
    }
}

TEST(Polar, ExponentialFollowsTheGeodesicOracle) {
    const double eps = 0.3;
    const auto m = FinslerMetric::zermelo(eps);
    const ChartPoint p{Chart::North, {-0.2, 0.7}};
    const AngleMeasure am = angle_measure(m, p);
    for (double th : {0.2, 3.0}) {
        for (double t : {0.7, 2.0}) {
            const SigmaPoint u = SigmaPoint::make(m, p, am.s_of(th));
            EXPECT_LT(distance(exp_polar(m, am, th, t).to_sphere(), oracle::zermelo_geodesic(eps, u, t)), 1e-8);
        }
    }
    // round: the point at polar distance t is at chord 2 sin(t/2) from p
    const auto r = FinslerMetric::round();
    const AngleMeasure ar = angle_measure(r, p);
    EXPECT_NEAR(distance(exp_polar(r, ar, 1.0, 2.0).to_sphere(), p.to_sphere()), 2 * std::sin(1.0), 1e-9);
}

TEST(Polar, InjectiveBelowPi) {
    const InjectivityReport z = injectivity_check(FinslerMetric::zermelo(0.3), {Chart::North, {0.2, 0.1}}, 24, 11);
    EXPECT_TRUE(z.passed());
    EXPECT_NEAR(z.winding, 1.0, 1e-9);
    EXPECT_LT(z.refocus_spread, 1e-7);
    EXPECT_EQ(z.grid.size(), 24u * 11u);
    const InjectivityReport s = injectivity_check(FinslerMetric::round(), {Chart::South, {0.5, 0.0}}, 24, 11);
    EXPECT_TRUE(s.passed());
}
