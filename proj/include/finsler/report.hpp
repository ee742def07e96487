#pragma once

// Experiment configuration, check records, JSON reports and CSV series.
//
// Experiment files use the key-value grammar of config.hpp with keys
//
//   metric        round | zermelo:EPS | path of a metric file
//   checks        comma-separated check names, or none (default: the
//                 full suite)
//   grid          grid density (default 16)
//   samples       random samples per check (default 20)
//   seed          unsigned integer (default 1)
//   out           report path (default: stdout)
//   csv_dir       directory for CSV series (default: none)
//   point         CHART,X1,X2[,S] start for the point-based checks
//                 (default: seeded random samples)
//   time          flow length for flow and conserve (default 2 pi)
//   tol_structure, tol_duality, tol_invariant, tol_global, tol_classification

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "finsler/coframe.hpp"
#include "finsler/config.hpp"
#include "finsler/errors.hpp"

namespace finsler {

using Json = nlohmann::ordered_json;

struct Tolerances {
    double integrator = 1e-11;
    double structure = 1e-6;
    double duality = 1e-8;
    double invariant = 1e-5;
    double global = 1e-5;
    double classification = 1e-4;

    Json to_json() const {
        return Json{{"integrator", integrator}, {"structure", structure},     {"duality", duality},
                    {"invariant", invariant},   {"global", global},           {"classification", classification}};
    }
};

// Start point given as CHART,X1,X2[,S]; without S only the base point is
// fixed and the fiber angle defaults to 0.
struct SigmaStart {
    ChartPoint p;
    double s = 0.0;

    static SigmaStart parse(const std::string& text) {
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : text + ",") {
            if (ch == ',') {
                parts.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                cur += ch;
            }
        }
        if (parts.size() != 3 && parts.size() != 4) {
            throw Error(ErrorKind::InvalidArgument, "point must be CHART,X1,X2[,S]");
        }
        SigmaStart out;
        if (parts[0] == "north") {
            out.p.chart = Chart::North;
        } else if (parts[0] == "south") {
            out.p.chart = Chart::South;
        } else {
            throw Error(ErrorKind::InvalidArgument, "chart must be north or south, got '" + parts[0] + "'");
        }
        double v[3] = {0.0, 0.0, 0.0};
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v[i - 1]);
            if (ec != std::errc() || ptr != parts[i].data() + parts[i].size() || !std::isfinite(v[i - 1])) {
                throw Error(ErrorKind::InvalidArgument, "bad number '" + parts[i] + "' in point");
            }
        }
        out.p.x = {v[0], v[1]};
        out.s = v[2];
        return out;
    }

    SigmaPoint sigma(const FinslerMetric& m) const { return SigmaPoint::make(m, p, s); }
};

struct ExperimentConfig {
    std::string metric = "round";
    std::optional<std::vector<std::string>> checks;  // unset: full suite; empty: nothing to run
    int grid = 16;
    int samples = 20;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv_dir;
    std::optional<SigmaStart> point;
    double time = 2.0 * std::numbers::pi;
    bool timings = false;
    Tolerances tol;

    static ExperimentConfig parse(std::string_view text) {
        const KeyValueConfig kv = KeyValueConfig::parse(text);
        kv.reject_unknown({"metric", "checks", "grid", "samples", "seed", "out", "csv_dir", "point", "time", "tol_structure",
                           "tol_duality", "tol_invariant", "tol_global", "tol_classification"});
        ExperimentConfig c;
        auto positive_int = [&](const ConfigEntry& e) {
            const double v = kv.number(e);
            if (!(v >= 1 && v == static_cast<int>(v))) {
                throw ConfigParseError("'" + e.key + "' must be a positive integer", e.line, e.value_column);
            }
            return static_cast<int>(v);
        };
        for (const auto& e : kv.entries()) {
            if (e.key == "metric") {
                c.metric = e.value;
            } else if (e.key == "checks") {
                c.checks = e.value == "none" ? std::vector<std::string>{} : split_list(e.value);
            } else if (e.key == "grid") {
                c.grid = positive_int(e);
            } else if (e.key == "samples") {
                c.samples = positive_int(e);
            } else if (e.key == "seed") {
                std::uint64_t v = 0;
                const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
                if (ec != std::errc() || p != e.value.data() + e.value.size()) {
                    throw ConfigParseError("'seed' must be an unsigned integer", e.line, e.value_column);
                }
                c.seed = v;
            } else if (e.key == "out") {
                c.out = e.value;
            } else if (e.key == "csv_dir") {
                c.csv_dir = e.value;
            } else if (e.key == "point") {
                try {
                    c.point = SigmaStart::parse(e.value);
                } catch (const Error& err) {
                    throw ConfigParseError(err.what(), e.line, e.value_column);
                }
            } else if (e.key == "time") {
                const double v = kv.number(e);
                if (!(v > 0.0)) throw ConfigParseError("'time' must be positive", e.line, e.value_column);
                c.time = v;
            } else {
                const double v = kv.number(e);
                if (!(v > 0.0)) throw ConfigParseError("tolerances must be positive", e.line, e.value_column);
                if (e.key == "tol_structure") c.tol.structure = v;
                if (e.key == "tol_duality") c.tol.duality = v;
                if (e.key == "tol_invariant") c.tol.invariant = v;
                if (e.key == "tol_global") c.tol.global = v;
                if (e.key == "tol_classification") c.tol.classification = v;
            }
        }
        return c;
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open experiment file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : s + ",") {
            if (ch == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                cur += ch;
            }
        }
        return out;
    }
};

enum class Status { Pass, Fail, Skip };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skip: return "skip";
    }
    return "?";
}

inline Json point_json(const SigmaPoint& u) {
    return Json{{"chart", to_string(u.base.chart)}, {"x1", u.base.x[0]}, {"x2", u.base.x[1]}, {"s", u.s}};
}

inline Json point_json(const ChartPoint& p) {
    return Json{{"chart", to_string(p.chart)}, {"x1", p.x[0]}, {"x2", p.x[1]}};
}

struct CheckRecord {
    std::string name;
    Status status = Status::Pass;
    std::vector<std::pair<std::string, double>> residuals;
    Json values = Json::object();
    std::string message;
    Json failure_point;  // null unless the check failed at a specific sample
    double runtime = 0.0;

    void residual(const std::string& key, double v) { residuals.emplace_back(key, v); }
    void value(const std::string& key, Json v) { values[key] = std::move(v); }

    Json to_json(bool timings) const {
        Json j{{"name", name}, {"status", to_string(status)}};
        Json r = Json::object();
        for (const auto& [k, v] : residuals) r[k] = v;
        j["residuals"] = r;
        j["values"] = values;
        if (!message.empty()) j["message"] = message;
        if (!failure_point.is_null()) j["failure_point"] = failure_point;
        if (timings) j["runtime"] = runtime;
        return j;
    }
};

// Plot-ready table; cells are preformatted strings.
struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    static std::string cell(double v) {
        char buf[40];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    template <class... Args>
    void add(const Args&... args) {
        rows.push_back({cell(args)...});
    }
};

struct Report {
    std::string metric;
    std::uint64_t seed = 1;
    Tolerances tol;
    std::vector<CheckRecord> checks;
    std::vector<Series> series;

    bool all_passed() const {
        for (const auto& c : checks) {
            if (c.status == Status::Fail) return false;
        }
        return true;
    }

    const Series* find_series(const std::string& name) const {
        for (const auto& s : series) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }

    Json to_json(bool timings = false) const {
        Json j;
        j["metric"] = metric;
        j["seed"] = seed;
        j["tolerances"] = tol.to_json();
        Json arr = Json::array();
        int pass = 0, fail = 0, skip = 0;
        for (const auto& c : checks) {
            arr.push_back(c.to_json(timings));
            pass += c.status == Status::Pass;
            fail += c.status == Status::Fail;
            skip += c.status == Status::Skip;
        }
        j["checks"] = arr;
        j["summary"] = Json{{"total", checks.size()}, {"pass", pass}, {"fail", fail}, {"skip", skip},
                            {"ok", fail == 0}};
        return j;
    }
};

inline void write_csv(const Series& s, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + file.string() + "'");
    for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
    out << '\n';
    for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

// Writes <dir>/<what>.csv.  Throws MissingSeries if the report has no such
// series.
inline std::filesystem::path emit_plot_data(const Report& r, const std::string& what,
                                            const std::filesystem::path& dir) {
    const Series* s = r.find_series(what);
    if (!s) throw Error(ErrorKind::MissingSeries, "report has no series '" + what + "'");
    std::filesystem::create_directories(dir);
    const auto file = dir / (what + ".csv");
    write_csv(*s, file);
    return file;
}

// Writes every series; returns the files written.
inline std::vector<std::filesystem::path> emit_all_plot_data(const Report& r, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& s : r.series) files.push_back(emit_plot_data(r, s.name, dir));
    return files;
}

}  // namespace finsler
