#include <gtest/gtest.h>

#include <cmath>

#include "finsler/jet.hpp"

using finsler::Jet;

TEST(Jet, UnivariateDerivativesOfComposite) {
    // f(x) = exp(sin x): f' = cos x f, f'' = (cos^2 x - sin x) f
    using J = Jet<3, 1>;
    const double x0 = 0.7;
    const J x = J::variable(0, x0);
    const J f = exp(sin(x));
    const double e = std::exp(std::sin(x0)), c = std::cos(x0), s = std::sin(x0);
    EXPECT_NEAR(f.value(), e, 1e-15);
    EXPECT_NEAR(f.derivative({1}), c * e, 1e-14);
    EXPECT_NEAR(f.derivative({2}), (c * c - s) * e, 1e-14);
    EXPECT_NEAR(f.derivative({3}), (c * c * c - 3 * s * c - c) * e, 1e-13);
}

TEST(Jet, MultivariateMonomial) {
    using J = Jet<3, 2>;
    const J x = J::variable(0, 1.5), y = J::variable(1, -2.0);
    const J f = x * y * y;
    EXPECT_DOUBLE_EQ(f.value(), 6.0);
    EXPECT_DOUBLE_EQ(f.derivative({1, 0}), 4.0);
    EXPECT_DOUBLE_EQ(f.derivative({0, 1}), -6.0);
    EXPECT_DOUBLE_EQ(f.derivative({1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(f.derivative({0, 2}), 3.0);
    EXPECT_DOUBLE_EQ(f.derivative({2, 1}), 0.0);
}

TEST(Jet, ElementaryFunctionsMatchClosedForms) {
    using J = Jet<2, 1>;
    const double x0 = 0.4;
    const J x = J::variable(0, x0);
    EXPECT_NEAR(sqrt(x).derivative({1}), 0.5 / std::sqrt(x0), 1e-14);
    EXPECT_NEAR(sqrt(x).derivative({2}), -0.25 * std::pow(x0, -1.5), 1e-13);
    EXPECT_NEAR(log(x).derivative({2}), -1.0 / (x0 * x0), 1e-13);
    EXPECT_NEAR(pow(x, 2.5).derivative({2}), 2.5 * 1.5 * std::pow(x0, 0.5), 1e-13);
    EXPECT_NEAR(cos(x).derivative({1}), -std::sin(x0), 1e-15);
    EXPECT_NEAR(atan(x).derivative({1}), 1.0 / (1.0 + x0 * x0), 1e-15);
    EXPECT_NEAR((1.0 / x).derivative({2}), 2.0 / (x0 * x0 * x0), 1e-12);
}

TEST(Jet, Atan2AllQuadrants) {
    using J = Jet<2, 2>;
    for (double a : {0.3, 1.9, 3.0, -2.5, -0.4}) {
        const double r = 1.7;
        const J x = J::variable(0, r * std::cos(a)), y = J::variable(1, r * std::sin(a));
        const J t = atan2(y, x);
        EXPECT_NEAR(t.value(), a, 1e-14);
        // d atan2 = (x dy - y dx) / r^2
        EXPECT_NEAR(t.derivative({1, 0}), -std::sin(a) / r, 1e-14);
        EXPECT_NEAR(t.derivative({0, 1}), std::cos(a) / r, 1e-14);
        // Laplacian of a harmonic function vanishes
        EXPECT_NEAR(t.derivative({2, 0}) + t.derivative({0, 2}), 0.0, 1e-13);
    }
}

TEST(Jet, AlgebraicIdentities) {
    using J = Jet<4, 2>;
    const J x = J::variable(0, 0.3), y = J::variable(1, 1.1);
    const J a = sin(x) + y * y;
    const J b = exp(x * y);
    const J back = (a * b) / b - a;
    const J roundtrip = exp(log(b)) - b;
    for (int k = 0; k < J::size; ++k) {
        EXPECT_NEAR(back.coef(k), 0.0, 1e-12);
        EXPECT_NEAR(roundtrip.coef(k), 0.0, 1e-12);
    }
}

TEST(Jet, PartialMatchesDerivative) {
    using J = Jet<3, 2>;
    const J x = J::variable(0, 0.2), y = J::variable(1, 0.9);
    const J f = sin(x * y) * exp(y);
    const J fx = f.partial(0);
    EXPECT_NEAR(fx.value(), f.derivative({1, 0}), 1e-14);
    EXPECT_NEAR(fx.derivative({0, 1}), f.derivative({1, 1}), 1e-13);
    EXPECT_NEAR(fx.derivative({1, 1}), f.derivative({2, 1}), 1e-12);
}

TEST(Jet, NestedJetMixedDerivativeMatchesFiniteDifference) {
    // Outer variables (x, y), inner variable e; f = sqrt(1 + x^2 e + y e^2).
    using Inner = Jet<1, 1>;
    using Outer = Jet<2, 2, Inner>;
    const double x0 = 0.6, y0 = -0.3, e0 = 0.8;
    const Inner e = Inner::variable(0, e0);
    const Outer x = Outer::variable(0, Inner(x0)), y = Outer::variable(1, Inner(y0));
    const Outer f = sqrt(1.0 + x * x * e + y * e * e);
    const double analytic = f.derivative({1, 1}).derivative({1});

    auto g = [](double xx, double yy, double ee) { return std::sqrt(1.0 + xx * xx * ee + yy * ee * ee); };
    const double h = 1e-3;
    auto fxy = [&](double ee) {
        return (g(x0 + h, y0 + h, ee) - g(x0 + h, y0 - h, ee) - g(x0 - h, y0 + h, ee) + g(x0 - h, y0 - h, ee)) /
               (4 * h * h);
    };
    const double fd = (fxy(e0 + h) - fxy(e0 - h)) / (2 * h);
    EXPECT_NEAR(analytic, fd, 1e-5);
}
