#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "finsler/config.hpp"
#include "finsler/expression.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

// Runs f and returns the (line, column) of the ConfigParseError it throws.
template <class F>
std::pair<int, int> parse_error_location(F&& f) {
    try {
        f();
    } catch (const ConfigParseError& e) {
        return {e.line(), e.column()};
    }
    ADD_FAILURE() << "no ConfigParseError";
    return {0, 0};
}

}  // namespace

TEST(KeyValue, EntriesCommentsAndColumns) {
    const auto cfg = KeyValueConfig::parse("# header\n\n  kind = zermelo   # trailing\neps=0.25\n");
    ASSERT_EQ(cfg.entries().size(), 2u);
    const ConfigEntry* k = cfg.find("kind");
    ASSERT_NE(k, nullptr);
    EXPECT_EQ(k->value, "zermelo");
    EXPECT_EQ(k->line, 3);
    EXPECT_EQ(k->key_column, 3);
    EXPECT_EQ(k->value_column, 10);
    EXPECT_DOUBLE_EQ(cfg.number(*cfg.find("eps")), 0.25);
}

TEST(KeyValue, SyntaxErrorsCarryLocation) {
    EXPECT_EQ(parse_error_location([] { KeyValueConfig::parse("kind = round\n  eps 0.3\n"); }), std::pair(2, 7));
    EXPECT_EQ(parse_error_location([] { KeyValueConfig::parse("kind = round\nkind = zermelo\n"); }), std::pair(2, 1));
    EXPECT_EQ(parse_error_location([] { KeyValueConfig::parse("kind =   \n"); }), std::pair(1, 10));
    EXPECT_EQ(parse_error_location([] { KeyValueConfig::parse("\n 3x = 1\n"); }), std::pair(2, 2));
}

TEST(MetricConfig, MissingKindIsReportedAfterTheLastLine) {
    EXPECT_EQ(parse_error_location([] { parse_metric_config("eps = 0.3\n# no kind\n"); }), std::pair(3, 1));
}

TEST(MetricConfig, UnknownKeyAndBadValues) {
    EXPECT_EQ(parse_error_location([] { parse_metric_config("kind = zermelo\neps = 0.3\ncolour = red\n"); }),
              std::pair(3, 1));
    EXPECT_EQ(parse_error_location([] { parse_metric_config("kind = zermelo\neps = 1.5\n"); }), std::pair(2, 7));
    EXPECT_EQ(parse_error_location([] { parse_metric_config("kind = zermelo\neps = abc\n"); }), std::pair(2, 7));
    EXPECT_EQ(parse_error_location([] { parse_metric_config("kind = round\neps = 0.3\n"); }), std::pair(2, 1));
    EXPECT_EQ(parse_error_location([] { parse_metric_config("kind = spline\n"); }), std::pair(1, 8));
}

TEST(MetricConfig, ExpressionErrorPointsAtTheCharacter) {
    // "x1 + * x2" starts at column 9; the stray '*' is at column 14
    const auto loc = parse_error_location([] { parse_metric_config("kind = randers\nwind1 = x1 + * x2\n"); });
    EXPECT_EQ(loc.first, 2);
    EXPECT_EQ(loc.second, 14);
}

TEST(MetricConfig, KindsBuildTheExpectedMetrics) {
    EXPECT_EQ(parse_metric_config("kind = round").kind(), FinslerMetric::Kind::Round);
    const FinslerMetric z = parse_metric_config("kind = zermelo\neps = 0.3");
    EXPECT_EQ(z.name(), "zermelo:0.3");

    // Randers file describing the same Zermelo metric
    const FinslerMetric r = parse_metric_config("kind = randers\neps = 0.3\nwind1 = -x2\nwind2 = x1\n");
    const TangentVec v{{Chart::South, {0.3, -0.5}}, {0.2, 0.9}};
    EXPECT_NEAR(eval_F(r, v), eval_F(z, v), 1e-14);
}

TEST(MetricConfig, LoadMetricSpecs) {
    EXPECT_EQ(load_metric("round").name(), "round");
    EXPECT_EQ(load_metric("zermelo:0.1").name(), "zermelo:0.1");
    EXPECT_THROW(load_metric("zermelo:x"), ConfigParseError);
    EXPECT_THROW(load_metric("/nonexistent/metric.cfg"), Error);
    try {
        load_metric("zermelo:1.2");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindTooStrong);
    }
}

TEST(Expression, EvaluatesTheGrammar) {
    const Expression e = Expression::parse("2/(1 + x1^2 + x2^2) - sin(pi*x1)*exp(-x2) + sqrt(4)^3^0.5");
    const double x1 = 0.3, x2 = -0.8;
    const double expect = 2.0 / (1 + x1 * x1 + x2 * x2) - std::sin(std::numbers::pi * x1) * std::exp(-x2) +
                          std::pow(2.0, std::pow(3.0, 0.5));
    EXPECT_NEAR(e.eval(x1, x2), expect, 1e-14);
    EXPECT_NEAR(Expression::parse("-x1^2").eval(3.0, 0.0), -9.0, 1e-15);
    EXPECT_NEAR(Expression::parse("cos(x2) * 1e-1").eval(0.0, 0.0), 0.1, 1e-15);
}

TEST(Expression, JetEvaluationDifferentiates) {
    using J = Jet<2, 2>;
    const Expression e = Expression::parse("x1^2 * x2 + cos(x2)");
    const J r = e.eval(J::variable(0, 0.5), J::variable(1, 0.2));
    EXPECT_NEAR(r.derivative({1, 0}), 2 * 0.5 * 0.2, 1e-15);
    EXPECT_NEAR(r.derivative({0, 2}), -std::cos(0.2), 1e-14);
}

TEST(Expression, RejectsMalformedInput) {
    for (const char* bad : {"", "x1 +", "(x1", "x3", "foo(x1)", "1..2", "x1 x2"}) {
        EXPECT_THROW(Expression::parse(bad), ConfigParseError) << bad;
    }
}

TEST(MetricConfig, RadialWindControl) {
    const FinslerMetric m = non_killing_randers(0.3);
    EXPECT_EQ(m.kind(), FinslerMetric::Kind::Randers);
    const TangentVec v{{Chart::South, {0.6, 0.2}}, {1.0, 0.4}};
    EXPECT_NEAR(eval_F(m, v), oracle::navigation_norm(oracle::radial_nav(0.3, v.base), v.y), 1e-12);
}
