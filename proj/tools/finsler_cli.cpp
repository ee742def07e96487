// finsler: command-line front end for the structure-equation checks.
//
// Exit status: 0 when every executed check passes or is skipped, 1 when a
// check fails, 2 on usage, configuration or metric errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/report.hpp"
#include "finsler/suite.hpp"

namespace {

struct Options {
    std::string config;
    std::string metric;
    std::string out;
    std::string csv;
    std::string point;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<int> samples;
    std::optional<double> time;
    std::optional<double> tol_structure, tol_duality, tol_invariant, tol_global, tol_classification;
    std::optional<std::string> checks;
    bool timings = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "experiment file (key = value)");
    cmd->add_option("--metric", o.metric, "round | zermelo:EPS | radial-wind | metric file");
    cmd->add_option("--out", o.out, "write the JSON report here instead of stdout");
    cmd->add_option("--csv", o.csv, "directory for CSV series");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--grid", o.grid, "grid density")->check(CLI::PositiveNumber);
    cmd->add_option("--samples", o.samples, "random samples per check")->check(CLI::PositiveNumber);
    cmd->add_option("--point", o.point, "start point CHART,X1,X2[,S]");
    cmd->add_option("--time", o.time, "flow length for flow and conserve")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-structure", o.tol_structure, "structure residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-duality", o.tol_duality, "duality tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-invariant", o.tol_invariant, "invariant tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-global", o.tol_global, "global-map tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-classification", o.tol_classification, "classification tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--timings", o.timings, "include per-check runtimes (breaks byte-identical reports)");
}

finsler::ExperimentConfig build_config(const Options& o, const std::vector<std::string>& default_checks) {
    using finsler::ExperimentConfig;
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
    if (!default_checks.empty()) c.checks = default_checks;
    if (o.checks) c.checks = *o.checks == "none" ? std::vector<std::string>{} : ExperimentConfig::split_list(*o.checks);
    if (!o.metric.empty()) c.metric = o.metric;
    if (!o.out.empty()) c.out = o.out;
    if (!o.csv.empty()) c.csv_dir = o.csv;
    if (!o.point.empty()) c.point = finsler::SigmaStart::parse(o.point);
    if (o.seed) c.seed = *o.seed;
    if (o.grid) c.grid = *o.grid;
    if (o.samples) c.samples = *o.samples;
    if (o.time) c.time = *o.time;
    if (o.tol_structure) c.tol.structure = *o.tol_structure;
    if (o.tol_duality) c.tol.duality = *o.tol_duality;
    if (o.tol_invariant) c.tol.invariant = *o.tol_invariant;
    if (o.tol_global) c.tol.global = *o.tol_global;
    if (o.tol_classification) c.tol.classification = *o.tol_classification;
    c.timings = o.timings;
    return c;
}

int run(const finsler::ExperimentConfig& cfg) {
    if (cfg.checks && cfg.checks->empty()) {
        std::cerr << "warning: empty suite, nothing to run and no files written\n";
        return 0;
    }
    const finsler::Report rep = finsler::run_suite(cfg);
    const std::string text = rep.to_json(cfg.timings).dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw finsler::Error(finsler::ErrorKind::InvalidArgument, "cannot write '" + cfg.out + "'");
        f << text;
    }
    if (!cfg.csv_dir.empty()) {
        for (const auto& file : finsler::emit_all_plot_data(rep, cfg.csv_dir)) std::cerr << "wrote " << file.string() << "\n";
    }
    for (const auto& c : rep.checks) {
        std::cerr << finsler::to_string(c.status) << "  " << c.name;
        if (!c.message.empty()) std::cerr << "  (" << c.message << ")";
        std::cerr << "\n";
    }
    return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-equation checks for Finsler metrics on the 2-sphere"};
    app.require_subcommand(1);

    // subcommand -> checks it runs
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"validate", {"validate"}},
        {"invariants", {"structure", "invariants", "curvature", "bianchi"}},
        {"flow", {"flow", "rotation"}},
        {"antipodal", {"antipodal", "isometry"}},
        {"fixed-points", {"alpha2"}},
        {"polar", {"polar"}},
        {"reversibility", {"reversibility"}},
        {"conserve", {"conserve"}},
        {"lambda", {"lambda"}},
        {"suite", {}},
    };
    const std::map<std::string, std::string> help = {
        {"validate", "check positivity, strong convexity and chart consistency"},
        {"invariants", "structure residuals and the invariants I, J, K over a grid"},
        {"flow", "integrate a geodesic and check the flow rotation law"},
        {"antipodal", "quasi-antipodal refocusing and the isometry lifts"},
        {"fixed-points", "classify alpha^2: identity or two fixed points with rotation angles"},
        {"polar", "polar coordinates: injectivity and Jacobian"},
        {"reversibility", "reversibility and geodesic reversibility"},
        {"conserve", "I^2 + J^2 along geodesics"},
        {"lambda", "space of geodesics checks (requires alpha^2 = id)"},
        {"suite", "run a list of checks, by default the full suite"},
    };

    std::vector<Options> opts(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, help.at(commands[i].first));
        add_common(sub, opts[i]);
        if (commands[i].first == "suite") {
            sub->add_option("--checks", opts[i].checks,
                            "comma-separated checks; 'all', 'acceptance', acceptance.N, lambda.PART or 'none'");
        }
        if (commands[i].first == "lambda") {
            sub->add_option("--checks", opts[i].checks, "parts: free_action, g_invariance, rho, closure, beta");
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            finsler::ExperimentConfig cfg = build_config(opts[i], commands[i].second);
            if (commands[i].first == "lambda" && opts[i].checks) {
                for (auto& c : *cfg.checks) {
                    if (c.rfind("lambda.", 0) != 0) c = "lambda." + c;
                }
            }
            return run(cfg);
        } catch (const finsler::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
