#pragma once

// Key-value configuration text and metric definitions.
//
// File grammar, one entry per line:
//
//   line  := [ key '=' value ] [ '#' comment ]
//   key   := [A-Za-z_][A-Za-z0-9_]*
//
// Blank lines and comments are ignored; keys may appear at most once.
//
// Metric files use the keys
//
//   kind             round | zermelo | randers        (required)
//   eps              real; Zermelo parameter, or wind scale for randers
//   conformal        sigma(x1, x2) with h = sigma^2 |dx|^2  (default round)
//   wind1, wind2     wind components W = eps (wind1, wind2) (default 0)
//   conformal_south, wind1_south, wind2_south
//                    South-chart expressions; default to the North ones
//
// Expressions follow the grammar in expression.hpp.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/expression.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
    int key_column = 0;
    int value_column = 0;
};

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig cfg;
        int line_no = 0;
        std::size_t start = 0;
        while (start < text.size() || (start == 0 && text.empty())) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            ++line_no;
            std::string_view line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            cfg.parse_line(line, line_no);
            cfg.last_line_ = line_no;
            if (end == text.size()) break;
            start = end + 1;
        }
        return cfg;
    }

    const std::vector<ConfigEntry>& entries() const { return entries_; }
    int last_line() const { return last_line_; }

    const ConfigEntry* find(std::string_view key) const {
        for (const auto& e : entries_) {
            if (e.key == key) return &e;
        }
        return nullptr;
    }

    void reject_unknown(const std::set<std::string>& allowed) const {
        for (const auto& e : entries_) {
            if (!allowed.count(e.key)) throw ConfigParseError("unknown key '" + e.key + "'", e.line, e.key_column);
        }
    }

    double number(const ConfigEntry& e) const {
        double v = 0.0;
        const char* b = e.value.data();
        const char* end = b + e.value.size();
        auto [ptr, ec] = std::from_chars(b, end, v);
        if (ec != std::errc() || ptr != end) {
            throw ConfigParseError("expected a number for '" + e.key + "'", e.line, e.value_column);
        }
        return v;
    }

private:
    void parse_line(std::string_view line, int line_no) {
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t i = 0;
        auto skip = [&] {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        };
        skip();
        if (i == line.size()) return;
        const std::size_t key_start = i;
        if (!(std::isalpha(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
            throw ConfigParseError("expected a key", line_no, static_cast<int>(i) + 1);
        }
        while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
        std::string key(line.substr(key_start, i - key_start));
        skip();
        if (i == line.size() || line[i] != '=') {
            throw ConfigParseError("expected '=' after '" + key + "'", line_no, static_cast<int>(i) + 1);
        }
        ++i;
        skip();
        std::size_t vend = line.size();
        while (vend > i && std::isspace(static_cast<unsigned char>(line[vend - 1]))) --vend;
        if (vend == i) throw ConfigParseError("missing value for '" + key + "'", line_no, static_cast<int>(i) + 1);
        if (find(key)) {
            throw ConfigParseError("duplicate key '" + key + "'", line_no, static_cast<int>(key_start) + 1);
        }
        entries_.push_back({key, std::string(line.substr(i, vend - i)), line_no, static_cast<int>(key_start) + 1,
                            static_cast<int>(i) + 1});
    }

    std::vector<ConfigEntry> entries_;
    int last_line_ = 0;
};

inline FinslerMetric parse_metric_config(std::string_view text) {
    const KeyValueConfig cfg = KeyValueConfig::parse(text);
    cfg.reject_unknown(
        {"kind", "eps", "conformal", "wind1", "wind2", "conformal_south", "wind1_south", "wind2_south"});
    const ConfigEntry* kind = cfg.find("kind");
    if (!kind) throw ConfigParseError("missing required key 'kind'", cfg.last_line() + 1, 1);
    const ConfigEntry* eps = cfg.find("eps");

    if (kind->value == "round") {
        for (const auto& e : cfg.entries()) {
            if (e.key != "kind") throw ConfigParseError("key '" + e.key + "' not used by kind round", e.line, e.key_column);
        }
        return FinslerMetric::round();
    }
    if (kind->value == "zermelo") {
        for (const auto& e : cfg.entries()) {
            if (e.key != "kind" && e.key != "eps") {
                throw ConfigParseError("key '" + e.key + "' not used by kind zermelo", e.line, e.key_column);
            }
        }
        if (!eps) throw ConfigParseError("kind zermelo requires 'eps'", cfg.last_line() + 1, 1);
        const double v = cfg.number(*eps);
        if (!(v >= 0.0 && v < 1.0)) throw ConfigParseError("eps must lie in [0, 1)", eps->line, eps->value_column);
        return FinslerMetric::zermelo(v);
    }
    if (kind->value != "randers") {
        throw ConfigParseError("unknown kind '" + kind->value + "'", kind->line, kind->value_column);
    }

    auto expr = [&](const char* key, const char* fallback_key, const char* fallback) -> Expression {
        const ConfigEntry* e = cfg.find(key);
        if (!e && fallback_key) e = cfg.find(fallback_key);
        if (!e) return Expression::parse(fallback);
        return Expression::parse(e->value, e->line, e->value_column);
    };
    RandersExpressions r;
    r.eps = eps ? cfg.number(*eps) : 1.0;
    r.conformal[0] = expr("conformal", nullptr, "2/(1+x1^2+x2^2)");
    r.wind1[0] = expr("wind1", nullptr, "0");
    r.wind2[0] = expr("wind2", nullptr, "0");
    r.conformal[1] = expr("conformal_south", "conformal", "2/(1+x1^2+x2^2)");
    r.wind1[1] = expr("wind1_south", "wind1", "0");
    r.wind2[1] = expr("wind2_south", "wind2", "0");
    return FinslerMetric::randers(std::move(r));
}

// `round`, `zermelo:EPS`, or the path of a metric file.  The result is
// validated before it is returned.
inline FinslerMetric load_metric(const std::string& spec, bool validate_metric = true) {
    FinslerMetric m = FinslerMetric::round();
    if (spec == "round") {
        m = FinslerMetric::round();
    } else if (spec.rfind("zermelo:", 0) == 0) {
        const std::string num = spec.substr(8);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc() || ptr != num.data() + num.size()) {
            throw ConfigParseError("malformed Zermelo parameter '" + num + "'", 1, 9);
        }
        m = FinslerMetric::zermelo(v);
    } else {
        std::ifstream in(spec);
        if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open metric file '" + spec + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        m = parse_metric_config(ss.str());
        m.set_label(spec);
    }
    if (validate_metric) require_valid(m);
    return m;
}

// Randers metric with the radial wind eps (x1, x2) in the North chart,
// written as -eps (x1, x2) in the South chart.  The wind is not Killing, so
// the flag curvature is not constant.
inline FinslerMetric non_killing_randers(double eps = 0.3) {
    char buf[32];
    const std::string e(buf, std::to_chars(buf, buf + sizeof buf, eps).ptr);
    FinslerMetric m = parse_metric_config("kind = randers\neps = " + e +
                                          "\nwind1 = x1\nwind2 = x2\nwind1_south = -x1\nwind2_south = -x2\n");
    m.set_label("radial-wind:" + e);
    return m;
}

}  // namespace finsler
