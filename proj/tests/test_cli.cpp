#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr discarded unless `keep_stderr`.
Result run(const std::string& args, bool keep_stderr = false) {
    const std::string cmd = std::string(FINSLER_CLI) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string config(const char* name) { return std::string(FINSLER_CONFIGS) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("finsler_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, ValidatePasses) {
    const Result r = run("validate --metric round");
    EXPECT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["metric"], "round");
    EXPECT_EQ(j["checks"][0]["name"], "validate");
    EXPECT_EQ(j["checks"][0]["status"], "pass");
}

TEST(Cli, MetricFiles) {
    EXPECT_EQ(run("validate --metric " + config("zermelo_0.3.cfg")).status, 0);
    EXPECT_EQ(run("validate --metric " + config("rotation_wind.cfg")).status, 0);
    EXPECT_EQ(run("validate --metric " + config("radial_wind.cfg")).status, 0);
    EXPECT_EQ(run("validate --metric " + config("round.cfg")).status, 0);
}

TEST(Cli, LambdaSkipIsNotAFailure) {
    const Result r = run("lambda --metric zermelo:0.3");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["checks"][0]["status"], "skip");
}

TEST(Cli, LambdaPartsArePrefixed) {
    const Result r = run("lambda --metric round --samples 3 --checks rho");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["checks"][0]["name"], "lambda.rho");
}

TEST(Cli, EmptySuiteWritesNothing) {
    const fs::path dir = scratch("empty");
    const fs::path out = dir / "report.json";
    const Result r = run("suite --checks none --out " + out.string(), true);
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("warning"), std::string::npos);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, BadInputExitsWithTwo) {
    const Result bad = run("suite --config " + config("bad.cfg"), true);
    EXPECT_EQ(bad.status, 2);
    EXPECT_NE(bad.out.find("line 2"), std::string::npos) << bad.out;
    EXPECT_EQ(run("suite --checks flux").status, 2);
    EXPECT_EQ(run("validate --metric zermelo:1.5").status, 2);
    EXPECT_EQ(run("flow --point up,0,0").status, 2);
    EXPECT_EQ(run("nonsense").status, 2);
    EXPECT_EQ(run("").status, 2);
}

TEST(Cli, FailingChecksExitWithOne) {
    EXPECT_EQ(run("suite --metric radial-wind --grid 6 --samples 3 --checks curvature").status, 1);
}

TEST(Cli, CsvAndOutFiles) {
    const fs::path dir = scratch("csv");
    const fs::path out = dir / "report.json";
    const Result r = run("flow --metric zermelo:0.3 --point north,0.2,0.1,0.5 --time 3 --csv " + (dir / "plots").string() +
                         " --out " + out.string());
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    ASSERT_TRUE(fs::exists(out));
    std::ifstream csv(dir / "plots" / "flow.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "t,chart,x1,x2,s,I,J,K");
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const fs::path dir = scratch("override");
    const fs::path exp = dir / "exp.cfg";
    std::ofstream(exp) << "metric = round\nchecks = validate\nseed = 3\n";
    const Result r = run("suite --config " + exp.string() + " --metric zermelo:0.2 --seed 9");
    EXPECT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["metric"], "zermelo:0.2");
    EXPECT_EQ(j["seed"], 9);
}

TEST(Cli, ReportsAreByteIdentical) {
    const std::string args = "invariants --metric zermelo:0.3 --grid 4";
    EXPECT_EQ(run(args).out, run(args).out);
}
