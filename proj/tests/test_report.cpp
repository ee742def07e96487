#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "finsler/suite.hpp"

using namespace finsler;

namespace {

std::pair<int, int> parse_error_location(std::string_view text) {
    try {
        ExperimentConfig::parse(text);
    } catch (const ConfigParseError& e) {
        return {e.line(), e.column()};
    }
    ADD_FAILURE() << "no ConfigParseError for: " << text;
    return {0, 0};
}

const CheckRecord* find_check(const Report& r, const std::string& name) {
    for (const auto& c : r.checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ExperimentConfig quick(const std::string& metric, std::vector<std::string> checks) {
    ExperimentConfig c;
    c.metric = metric;
    c.checks = std::move(checks);
    c.grid = 6;
    c.samples = 4;
    return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("finsler_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(ExperimentConfig, ParsesAllKeys) {
    const ExperimentConfig c = ExperimentConfig::parse(
        "metric = zermelo:0.3\nchecks = structure, flow\ngrid = 8\nsamples = 5\nseed = 42\n"
        "point = south, 0.1, -0.2, 1.5\ntime = 3\ntol_structure = 1e-7\n");
    EXPECT_EQ(c.metric, "zermelo:0.3");
    ASSERT_TRUE(c.checks);
    EXPECT_EQ(*c.checks, (std::vector<std::string>{"structure", "flow"}));
    EXPECT_EQ(c.grid, 8);
    EXPECT_EQ(c.samples, 5);
    EXPECT_EQ(c.seed, 42u);
    ASSERT_TRUE(c.point);
    EXPECT_EQ(c.point->p.chart, Chart::South);
    EXPECT_DOUBLE_EQ(c.point->p.x[1], -0.2);
    EXPECT_DOUBLE_EQ(c.point->s, 1.5);
    EXPECT_DOUBLE_EQ(c.time, 3.0);
    EXPECT_DOUBLE_EQ(c.tol.structure, 1e-7);
    EXPECT_DOUBLE_EQ(c.tol.duality, Tolerances{}.duality);
}

TEST(ExperimentConfig, NoneSelectsNothing) {
    const ExperimentConfig c = ExperimentConfig::parse("checks = none\n");
    ASSERT_TRUE(c.checks);
    EXPECT_TRUE(c.checks->empty());
    EXPECT_FALSE(ExperimentConfig::parse("metric = round\n").checks);
}

TEST(ExperimentConfig, ErrorsCarryLocation) {
    EXPECT_EQ(parse_error_location("metric = round\ngrid = 0\n"), std::pair(2, 8));
    EXPECT_EQ(parse_error_location("seed = -3\n"), std::pair(1, 8));
    EXPECT_EQ(parse_error_location("metric = round\n\ncolour = red\n"), std::pair(3, 1));
    EXPECT_EQ(parse_error_location("point = east,0,0\n"), std::pair(1, 9));
    EXPECT_EQ(parse_error_location("time = -1\n"), std::pair(1, 8));
}

TEST(SigmaStart, ParsesChartAndCoordinates) {
    const SigmaStart s = SigmaStart::parse("north,0.5,-0.25");
    EXPECT_EQ(s.p.chart, Chart::North);
    EXPECT_DOUBLE_EQ(s.p.x[0], 0.5);
    EXPECT_DOUBLE_EQ(s.s, 0.0);
    for (const char* bad : {"north,1", "north,a,0", "up,0,0", "north,0,0,0,0"}) {
        EXPECT_THROW(SigmaStart::parse(bad), Error) << bad;
    }
}

TEST(Checks, ResolveNames) {
    EXPECT_EQ(resolve_checks({"all"}), suite_checks());
    const auto acc = resolve_checks({"acceptance"});
    ASSERT_EQ(acc.size(), 11u);
    EXPECT_EQ(acc.front(), "acceptance.1");
    EXPECT_EQ(acc.back(), "acceptance.11");
    EXPECT_EQ(resolve_checks({"lambda.rho", "flow"}), (std::vector<std::string>{"lambda.rho", "flow"}));
    for (const char* bad : {"acceptance.12", "acceptance.0", "lambda.nope", "flux"}) {
        EXPECT_THROW(resolve_checks({bad}), Error) << bad;
    }
}

TEST(Suite, RoundChecksPass) {
    const Report r = run_suite(quick("round", {"validate", "structure", "invariants", "rotation", "reversibility"}));
    EXPECT_EQ(r.metric, "round");
    ASSERT_EQ(r.checks.size(), 5u);
    for (const auto& c : r.checks) EXPECT_EQ(c.status, Status::Pass) << c.name << ": " << c.message;
    EXPECT_TRUE(r.all_passed());
}

TEST(Suite, JsonIsDeterministic) {
    const ExperimentConfig c = quick("zermelo:0.3", {"structure", "flow"});
    const std::string a = run_suite(c).to_json().dump();
    const std::string b = run_suite(c).to_json().dump();
    EXPECT_EQ(a, b);
    const Json j = Json::parse(a);
    EXPECT_EQ(j["metric"], "zermelo:0.3");
    EXPECT_EQ(j["summary"]["total"], 2);
    EXPECT_FALSE(j["checks"][0].contains("runtime"));
    EXPECT_TRUE(run_suite(c).to_json(true)["checks"][0].contains("runtime"));
}

TEST(Suite, LambdaIsSkippedForNonPeriodicFlows) {
    const Report r = run_suite(quick("zermelo:0.3", {"lambda"}));
    ASSERT_EQ(r.checks.size(), 1u);
    EXPECT_EQ(r.checks[0].status, Status::Skip);
    EXPECT_TRUE(r.all_passed());
    EXPECT_EQ(r.to_json()["summary"]["skip"], 1);
}

TEST(Suite, LambdaPartsOnTheRoundSphere) {
    const Report r = run_suite(quick("round", {"lambda.free_action", "lambda.beta"}));
    ASSERT_EQ(r.checks.size(), 2u);
    EXPECT_EQ(r.checks[0].name, "lambda.free_action");
    for (const auto& c : r.checks) EXPECT_EQ(c.status, Status::Pass) << c.name << ": " << c.message;
}

TEST(Suite, RadialWindFailsTheCurvatureChecks) {
    const Report r = run_suite(quick("radial-wind", {"validate", "curvature", "conserve"}));
    const CheckRecord* v = find_check(r, "validate");
    const CheckRecord* k = find_check(r, "curvature");
    const CheckRecord* c = find_check(r, "conserve");
    ASSERT_TRUE(v && k && c);
    EXPECT_EQ(v->status, Status::Pass);
    EXPECT_EQ(k->status, Status::Fail);
    EXPECT_EQ(c->status, Status::Fail);
    EXPECT_FALSE(r.all_passed());
}

TEST(Suite, InvalidMetricIsRejected) {
    const auto dir = scratch_dir("invalid");
    std::filesystem::create_directories(dir);
    const auto file = dir / "strong.cfg";
    std::ofstream(file) << "kind = randers\neps = 1.2\nwind1 = -x2\nwind2 = x1\n";
    try {
        run_suite(quick(file.string(), {"structure"}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MetricValidationError);
    }
    const Report only = run_suite(quick(file.string(), {"validate"}));
    EXPECT_EQ(only.checks[0].status, Status::Fail);
}

TEST(PlotData, ConserveSeriesIsConstant) {
    ExperimentConfig c = quick("zermelo:0.3", {"conserve"});
    c.point = SigmaStart::parse("north,0.3,0.2,1.0");
    const Report r = run_suite(c);
    ASSERT_EQ(r.checks[0].status, Status::Pass) << r.checks[0].message;
    const auto dir = scratch_dir("conserve");
    const auto file = emit_plot_data(r, "conserve", dir);
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,I,J,I2_plus_J2");
    std::string line;
    double first = NAN;
    int rows = 0;
    while (std::getline(in, line)) {
        const double q = std::stod(line.substr(line.rfind(',') + 1));
        if (rows++ == 0) first = q;
        EXPECT_NEAR(q, first, 1e-8);
    }
    EXPECT_GT(rows, 10);
    EXPECT_THROW(emit_plot_data(r, "flow", dir), Error);
    try {
        emit_plot_data(r, "polar", dir);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingSeries);
    }
}

TEST(PlotData, FlowSeriesColumns) {
    ExperimentConfig c = quick("round", {"flow"});
    c.point = SigmaStart::parse("south,0.2,0.4");
    const Report r = run_suite(c);
    const Series* s = r.find_series("flow");
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->columns, (std::vector<std::string>{"t", "chart", "x1", "x2", "s", "I", "J", "K"}));
    EXPECT_EQ(s->rows.size(), 257u);
    const auto files = emit_all_plot_data(r, scratch_dir("flow"));
    ASSERT_EQ(files.size(), 1u);
    EXPECT_EQ(files[0].filename(), "flow.csv");
}
