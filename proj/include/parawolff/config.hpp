// Scenario configuration: flat key = value text with [[scenario]] tables,
// single-line arrays [..] and inline tables {..}. Parse errors carry the
// line number and the offending key.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "parawolff/verify.hpp"

namespace parawolff {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

struct ConfigValue {
    enum class Kind { Number, String, Boolean, Array, Table };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;
    bool boolean = false;
    std::vector<ConfigValue> array;
    std::vector<std::pair<std::string, ConfigValue>> table;
    int line = 0;

    const ConfigValue* find(const std::string& key) const {
        for (const auto& [k, v] : table)
            if (k == key) return &v;
        return nullptr;
    }
};

namespace detail {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    void skip_ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() { return i < s.size() ? s[i] : '\0'; }
};

inline ConfigValue parse_value(Cursor& c);

inline std::string parse_key(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    while (c.i < c.s.size() &&
           (std::isalnum(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '_')) ++c.i;
    if (c.i == start) throw ConfigError(c.line, "expected a key");
    return c.s.substr(start, c.i - start);
}

inline ConfigValue parse_value(Cursor& c) {
    c.skip_ws();
    ConfigValue v;
    v.line = c.line;
    const char ch = c.peek();
    if (ch == '[') {
        v.kind = ConfigValue::Kind::Array;
        ++c.i;
        c.skip_ws();
        if (c.peek() == ']') { ++c.i; return v; }
        for (;;) {
            v.array.push_back(parse_value(c));
            c.skip_ws();
            if (c.peek() == ',') { ++c.i; continue; }
            if (c.peek() == ']') { ++c.i; return v; }
            throw ConfigError(c.line, "expected ',' or ']' in array");
        }
    }
    if (ch == '{') {
        v.kind = ConfigValue::Kind::Table;
        ++c.i;
        c.skip_ws();
        if (c.peek() == '}') { ++c.i; return v; }
        for (;;) {
            std::string key = parse_key(c);
            c.skip_ws();
            if (c.peek() != '=') throw ConfigError(c.line, "expected '=' after key '" + key + "'");
            ++c.i;
            v.table.emplace_back(std::move(key), parse_value(c));
            c.skip_ws();
            if (c.peek() == ',') { ++c.i; continue; }
            if (c.peek() == '}') { ++c.i; return v; }
            throw ConfigError(c.line, "expected ',' or '}' in inline table");
        }
    }
    if (ch == '"') {
        v.kind = ConfigValue::Kind::String;
        ++c.i;
        while (c.i < c.s.size() && c.s[c.i] != '"') v.text.push_back(c.s[c.i++]);
        if (c.i >= c.s.size()) throw ConfigError(c.line, "unterminated string");
        ++c.i;
        return v;
    }
    // bare token: boolean or number
    std::size_t start = c.i;
    while (c.i < c.s.size() && c.s[c.i] != ',' && c.s[c.i] != ']' && c.s[c.i] != '}' &&
           c.s[c.i] != ' ' && c.s[c.i] != '\t') ++c.i;
    std::string tok = c.s.substr(start, c.i - start);
    if (tok == "true" || tok == "false") {
        v.kind = ConfigValue::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    char* end = nullptr;
    v.number = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ConfigError(c.line, "cannot parse value '" + tok + "'");
    v.kind = ConfigValue::Kind::Number;
    return v;
}

}  // namespace detail

/// Raw parsed config: top-level keys plus one key list per [[scenario]].
struct RawConfig {
    std::vector<std::pair<std::string, ConfigValue>> top;
    std::vector<std::vector<std::pair<std::string, ConfigValue>>> scenarios;
    std::vector<int> scenario_lines;
};

inline RawConfig parse_config_text(std::istream& in) {
    RawConfig raw;
    std::string line;
    int lineno = 0;
    std::vector<std::pair<std::string, ConfigValue>>* current = &raw.top;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            else if (line[i] == '#' && !quoted) { line.erase(i); break; }
        }
        detail::Cursor c{line, 0, lineno};
        if (c.done()) continue;
        if (c.peek() == '[') {
            std::string trimmed = line.substr(c.i);
            while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t'))
                trimmed.pop_back();
            if (trimmed != "[[scenario]]")
                throw ConfigError(lineno, "unknown section '" + trimmed + "' (only [[scenario]])");
            raw.scenarios.emplace_back();
            raw.scenario_lines.push_back(lineno);
            current = &raw.scenarios.back();
            continue;
        }
        std::string key = detail::parse_key(c);
        c.skip_ws();
        if (c.peek() != '=') throw ConfigError(lineno, "expected '=' after key '" + key + "'");
        ++c.i;
        ConfigValue v = detail::parse_value(c);
        if (!c.done()) throw ConfigError(lineno, "trailing characters after value of '" + key + "'");
        current->emplace_back(std::move(key), std::move(v));
    }
    return raw;
}

inline RawConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config_text(in);
}

namespace detail {

inline double want_number(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::Number)
        throw ConfigError(v.line, "key '" + key + "' expects a number");
    return v.number;
}

inline std::string want_string(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::String)
        throw ConfigError(v.line, "key '" + key + "' expects a string");
    return v.text;
}

inline Point want_point(const ConfigValue& v, const std::string& key, int n) {
    if (v.kind != ConfigValue::Kind::Array || static_cast<int>(v.array.size()) != n)
        throw ConfigError(v.line, "key '" + key + "' expects an array of " + std::to_string(n) +
                                      " coordinates");
    Point p{0.0, 0.0};
    for (int a = 0; a < n; ++a) p[a] = want_number(v.array[a], key);
    return p;
}

}  // namespace detail

struct ConfigFile {
    std::string out_dir = "out";
    std::vector<Scenario> scenarios;
};

/// Maps the raw key lists onto scenarios, checking names, types and the
/// parameter/point invariants. Unknown keys are errors naming the key.
inline ConfigFile load_config(const std::string& path) {
    const RawConfig raw = parse_config_file(path);
    ConfigFile cfg;
    for (const auto& [key, value] : raw.top) {
        if (key == "out_dir") cfg.out_dir = detail::want_string(value, key);
        else throw ConfigError(value.line, "unknown top-level key '" + key + "'");
    }

    for (std::size_t si = 0; si < raw.scenarios.size(); ++si) {
        Scenario scn;
        scn.name = "scenario" + std::to_string(si);
        // first pass: dimension, needed to type-check point arrays
        for (const auto& [key, value] : raw.scenarios[si])
            if (key == "n") scn.params.n = static_cast<int>(detail::want_number(value, key));
        const int n = scn.params.n;

        bool seen_initial = false;
        for (const auto& [key, value] : raw.scenarios[si]) {
            using detail::want_number;
            using detail::want_point;
            using detail::want_string;
            if (key == "name") scn.name = want_string(value, key);
            else if (key == "n") { /* handled above */ }
            else if (key == "p") scn.params.p = want_number(value, key);
            else if (key == "lambda") scn.params.lambda = want_number(value, key);
            else if (key == "kappa") scn.params.kappa = want_number(value, key);
            else if (key == "eps_split") scn.params.eps_split = want_number(value, key);
            else if (key == "c1") scn.params.c1 = want_number(value, key);
            else if (key == "c2") scn.params.c2 = want_number(value, key);
            else if (key == "k_cutoff") scn.params.k_cutoff = want_number(value, key);
            else if (key == "eps_reg") scn.params.eps_reg = want_number(value, key);
            else if (key == "tol_root") scn.params.tol_root = want_number(value, key);
            else if (key == "tol_newton") scn.params.tol_newton = want_number(value, key);
            else if (key == "gamma_cap") scn.params.gamma_cap = want_number(value, key);
            else if (key == "side_length") scn.base_domain.side_length = want_number(value, key);
            else if (key == "cells_per_axis")
                scn.base_domain.cells_per_axis = static_cast<int>(want_number(value, key));
            else if (key == "dt") scn.base_domain.dt = want_number(value, key);
            else if (key == "t_final") scn.base_domain.t_final = want_number(value, key);
            else if (key == "j_max") scn.j_max = static_cast<int>(want_number(value, key));
            else if (key == "boundary") scn.boundary_const = want_number(value, key);
            else if (key == "initial") {
                const std::string kind = want_string(value, key);
                if (kind == "constant") scn.initial.kind = InitialSpec::Kind::Constant;
                else if (kind == "gaussian") scn.initial.kind = InitialSpec::Kind::Gaussian;
                else if (kind == "linear") scn.initial.kind = InitialSpec::Kind::Linear;
                else throw ConfigError(value.line, "key 'initial' expects constant|gaussian|linear");
                seen_initial = true;
            }
            else if (key == "initial_value") scn.initial.value = want_number(value, key);
            else if (key == "initial_center") scn.initial.center = want_point(value, key, n);
            else if (key == "initial_width") scn.initial.width = want_number(value, key);
            else if (key == "initial_amplitude") scn.initial.amplitude = want_number(value, key);
            else if (key == "density") scn.measure.density_const = want_number(value, key);
            else if (key == "atom") {
                if (value.kind != ConfigValue::Kind::Table)
                    throw ConfigError(value.line, "key 'atom' expects {x = [...], mass = ...}");
                Atom atom;
                const ConfigValue* x = value.find("x");
                const ConfigValue* mass = value.find("mass");
                if (!x || !mass)
                    throw ConfigError(value.line, "key 'atom' requires fields 'x' and 'mass'");
                atom.x = want_point(*x, "atom.x", n);
                atom.mass = want_number(*mass, "atom.mass");
                scn.measure.atoms.push_back(atom);
            }
            else if (key == "point") {
                if (value.kind != ConfigValue::Kind::Table)
                    throw ConfigError(value.line, "key 'point' expects {y = [...], s = ..., rho = ...}");
                VerificationPoint pt;
                const ConfigValue* y = value.find("y");
                const ConfigValue* s = value.find("s");
                const ConfigValue* rho = value.find("rho");
                if (!y || !s || !rho)
                    throw ConfigError(value.line, "key 'point' requires fields 'y', 's' and 'rho'");
                pt.y = want_point(*y, "point.y", n);
                pt.s = want_number(*s, "point.s");
                pt.rho = want_number(*rho, "point.rho");
                scn.points.push_back(pt);
            }
            else if (key == "rung") {
                if (value.kind != ConfigValue::Kind::Table)
                    throw ConfigError(value.line, "key 'rung' expects {cells_per_axis = ..., dt = ...}");
                const ConfigValue* cells = value.find("cells_per_axis");
                const ConfigValue* dt = value.find("dt");
                if (!cells || !dt)
                    throw ConfigError(value.line, "key 'rung' requires 'cells_per_axis' and 'dt'");
                scn.rungs.push_back(Rung{static_cast<int>(want_number(*cells, "rung.cells_per_axis")),
                                         want_number(*dt, "rung.dt")});
            }
            else if (key == "wolff_query") {
                if (value.kind != ConfigValue::Kind::Table)
                    throw ConfigError(value.line, "key 'wolff_query' expects {x = [...], R = ...}");
                const ConfigValue* x = value.find("x");
                const ConfigValue* R = value.find("R");
                if (!x || !R)
                    throw ConfigError(value.line, "key 'wolff_query' requires fields 'x' and 'R'");
                scn.wolff_queries.push_back(
                    WolffQuerySpec{want_point(*x, "wolff_query.x", n), want_number(*R, "wolff_query.R")});
            }
            else throw ConfigError(value.line, "unknown scenario key '" + key + "'");
        }
        (void)seen_initial;

        for (const auto& rung : scn.ladder()) {
            const auto check = validate(scn.params, scn.domain_for(rung));
            if (!check.ok())
                throw ConfigError(raw.scenario_lines[si],
                                  "scenario '" + scn.name + "' violates: " + check.violations.front());
        }
        const auto finest = scn.domain_for(scn.ladder().back());
        for (std::size_t pi = 0; pi < scn.points.size(); ++pi) {
            bool ok = true;
            for (const auto& rung : scn.ladder())
                ok = ok && point_admissible(scn.points[pi], scn.domain_for(rung), scn.params.n);
            (void)finest;
            if (!ok)
                throw ConfigError(raw.scenario_lines[si],
                                  "scenario '" + scn.name + "' point " + std::to_string(pi) +
                                      " violates the containment hypothesis");
        }
        cfg.scenarios.push_back(std::move(scn));
    }
    return cfg;
}

}  // namespace parawolff
