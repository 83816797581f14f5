#pragma once

// Run configuration: a flat, sectioned key = value text format.
//
//   [stack]      l1 l2 l3 n1 n2 n3 lambda1 lambda2 lambda3 frequency   (all required)
//   [geometry]   J d L (required); J_bound G_t G_r r (optional)
//   [approx]     t_c (required if section present); v, use_min_refraction,
//                use_coherence_cutoff (optional)
//   [solver]     q, theta_bound (optional)
//   [sweep]      variable in {J, d, J_bound, r}; values = comma-separated list
//   [output]     path; format in {csv, tsv}
//
// '#' or ';' at line start or after whitespace begins a comment.  All
// physical quantities are SI units.  Unknown sections or keys are errors,
// as are duplicate keys; parse errors carry source:line:column, validation
// errors carry the dotted key path.

#include "winoc/csv.hpp"
#include "winoc/errors.hpp"
#include "winoc/gain.hpp"
#include "winoc/geometry.hpp"
#include "winoc/materials.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace winoc {

enum class SweepVariable { J, d, J_bound, r };

inline const char* sweep_variable_name(SweepVariable v) {
    switch (v) {
    case SweepVariable::J: return "J";
    case SweepVariable::d: return "d";
    case SweepVariable::J_bound: return "J_bound";
    case SweepVariable::r: return "r";
    }
    return "?";
}

struct SweepSpec {
    SweepVariable variable = SweepVariable::J;
    std::vector<double> values;
};

struct OutputSpec {
    std::string path;                        // empty = stdout
    OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
    StackSpec stack;
    Geometry geometry;
    ApproxConfig approx;
    bool approx_present = false; // [approx] section appeared (enables the cutoff)
    SolveOptions solve;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
};

namespace detail {

struct ConfigToken {
    std::string value;
    int line = 0;
    int column = 0; // 1-based column of the value text
};

struct ConfigDocument {
    std::string source;
    // section -> key -> token; insertion-ordered duplicates rejected at parse
    std::map<std::string, std::map<std::string, ConfigToken>> sections;
};

[[noreturn]] inline void parse_fail(const std::string& source, int line, int col,
                                    const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": " << msg;
    throw invalid_config(os.str());
}

inline bool identifier_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline ConfigDocument tokenize_config(const std::string& text, const std::string& source) {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"stack", {"l1", "l2", "l3", "n1", "n2", "n3", "lambda1", "lambda2", "lambda3", "frequency"}},
        {"geometry", {"J", "J_bound", "d", "L", "G_t", "G_r", "r"}},
        {"approx", {"t_c", "v", "use_min_refraction", "use_coherence_cutoff"}},
        {"solver", {"q", "theta_bound"}},
        {"sweep", {"variable", "values"}},
        {"output", {"path", "format"}},
    };

    ConfigDocument doc;
    doc.source = source;
    std::istringstream stream(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();

        // strip comments: '#'/';' at start or after whitespace
        std::string line = raw;
        for (std::size_t i = 0; i < line.size(); ++i)
            if ((line[i] == '#' || line[i] == ';')
                && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }

        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos)
            continue;
        std::size_t end = line.find_last_not_of(" \t");

        if (line[begin] == '[') {
            if (line[end] != ']')
                parse_fail(source, line_no, static_cast<int>(begin) + 1,
                           "unterminated section header");
            section = line.substr(begin + 1, end - begin - 1);
            if (!schema.count(section))
                parse_fail(source, line_no, static_cast<int>(begin) + 1,
                           "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=', begin);
        if (eq == std::string::npos)
            parse_fail(source, line_no, static_cast<int>(begin) + 1,
                       "expected 'key = value'");
        if (section.empty())
            parse_fail(source, line_no, static_cast<int>(begin) + 1,
                       "key outside of any [section]");

        std::size_t key_end = line.find_last_not_of(" \t", eq - 1);
        if (key_end == std::string::npos || key_end < begin)
            parse_fail(source, line_no, static_cast<int>(begin) + 1, "empty key");
        const std::string key = line.substr(begin, key_end - begin + 1);
        for (char c : key)
            if (!identifier_char(c))
                parse_fail(source, line_no, static_cast<int>(begin) + 1,
                           "malformed key '" + key + "'");

        const auto& known = schema.at(section);
        if (std::find(known.begin(), known.end(), key) == known.end())
            parse_fail(source, line_no, static_cast<int>(begin) + 1,
                       "unknown key '" + section + "." + key + "'");

        std::size_t val_begin = line.find_first_not_of(" \t", eq + 1);
        std::string value;
        int val_col = static_cast<int>(eq) + 2;
        if (val_begin != std::string::npos) {
            value = line.substr(val_begin, end - val_begin + 1);
            val_col = static_cast<int>(val_begin) + 1;
        }
        if (value.empty())
            parse_fail(source, line_no, val_col, "empty value for '" + section + "." + key + "'");

        auto [it, inserted] = doc.sections[section].emplace(
            key, ConfigToken{value, line_no, val_col});
        if (!inserted)
            parse_fail(source, line_no, static_cast<int>(begin) + 1,
                       "duplicate key '" + section + "." + key + "' (first at line "
                           + std::to_string(it->second.line) + ")");
    }
    return doc;
}

// typed readers; all report source:line:column on malformed values
inline double token_double(const ConfigDocument& doc, const ConfigToken& t,
                           const std::string& path) {
    errno = 0;
    char* tail = nullptr;
    const double v = std::strtod(t.value.c_str(), &tail);
    if (tail == t.value.c_str() || *tail != '\0' || errno == ERANGE)
        parse_fail(doc.source, t.line, t.column, path + ": not a real number: '" + t.value + "'");
    return v;
}

inline long token_int(const ConfigDocument& doc, const ConfigToken& t, const std::string& path) {
    errno = 0;
    char* tail = nullptr;
    const long v = std::strtol(t.value.c_str(), &tail, 10);
    if (tail == t.value.c_str() || *tail != '\0' || errno == ERANGE)
        parse_fail(doc.source, t.line, t.column, path + ": not an integer: '" + t.value + "'");
    return v;
}

inline bool token_bool(const ConfigDocument& doc, const ConfigToken& t, const std::string& path) {
    if (t.value == "true" || t.value == "1")
        return true;
    if (t.value == "false" || t.value == "0")
        return false;
    parse_fail(doc.source, t.line, t.column, path + ": expected true/false: '" + t.value + "'");
}

struct SectionReader {
    const ConfigDocument& doc;
    const std::string name;
    const std::map<std::string, ConfigToken>* keys; // null if section absent

    const ConfigToken* find(const std::string& key) const {
        if (!keys)
            return nullptr;
        auto it = keys->find(key);
        return it == keys->end() ? nullptr : &it->second;
    }

    const ConfigToken& require(const std::string& key) const {
        const ConfigToken* t = find(key);
        if (!t)
            throw invalid_config(name + "." + key + ": missing required key");
        return *t;
    }

    double number(const std::string& key) const {
        return token_double(doc, require(key), name + "." + key);
    }
    void number_into(const std::string& key, double& out) const {
        if (const ConfigToken* t = find(key))
            out = token_double(doc, *t, name + "." + key);
    }
    void integer_into(const std::string& key, int& out) const {
        if (const ConfigToken* t = find(key))
            out = static_cast<int>(token_int(doc, *t, name + "." + key));
    }
    void boolean_into(const std::string& key, bool& out) const {
        if (const ConfigToken* t = find(key))
            out = token_bool(doc, *t, name + "." + key);
    }
};

inline SectionReader section(const ConfigDocument& doc, const std::string& name) {
    auto it = doc.sections.find(name);
    return SectionReader{doc, name, it == doc.sections.end() ? nullptr : &it->second};
}

} // namespace detail

// Parse and fully validate a config document.  `source` names the document
// in diagnostics (a path, or "<inline>" in tests).
inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
    const detail::ConfigDocument doc = detail::tokenize_config(text, source);
    RunConfig cfg;

    const auto stack = detail::section(doc, "stack");
    if (!stack.keys)
        throw invalid_config("stack: missing required section");
    cfg.stack.l1 = stack.number("l1");
    cfg.stack.l2 = stack.number("l2");
    cfg.stack.l3 = stack.number("l3");
    cfg.stack.n1 = stack.number("n1");
    cfg.stack.n2 = stack.number("n2");
    cfg.stack.n3 = stack.number("n3");
    cfg.stack.lambda1 = stack.number("lambda1");
    cfg.stack.lambda2 = stack.number("lambda2");
    cfg.stack.lambda3 = stack.number("lambda3");
    cfg.stack.frequency = stack.number("frequency");

    const auto geometry = detail::section(doc, "geometry");
    if (!geometry.keys)
        throw invalid_config("geometry: missing required section");
    cfg.geometry.J = static_cast<int>(detail::token_int(doc, geometry.require("J"), "geometry.J"));
    cfg.geometry.d = geometry.number("d");
    cfg.geometry.L = geometry.number("L");
    if (const auto* t = geometry.find("J_bound"))
        cfg.geometry.J_bound = static_cast<int>(detail::token_int(doc, *t, "geometry.J_bound"));
    geometry.number_into("G_t", cfg.geometry.G_t);
    geometry.number_into("G_r", cfg.geometry.G_r);
    geometry.integer_into("r", cfg.geometry.r);

    const auto approx = detail::section(doc, "approx");
    if (approx.keys) {
        cfg.approx_present = true;
        cfg.approx.t_c = approx.number("t_c");
        approx.number_into("v", cfg.approx.v);
        approx.boolean_into("use_min_refraction", cfg.approx.use_min_refraction);
        approx.boolean_into("use_coherence_cutoff", cfg.approx.use_coherence_cutoff);
    } else {
        // without a coherence time the cutoff has no meaning
        cfg.approx.use_coherence_cutoff = false;
    }

    const auto solver = detail::section(doc, "solver");
    if (solver.keys) {
        solver.integer_into("q", cfg.solve.q);
        if (const auto* t = solver.find("theta_bound"))
            cfg.solve.theta_bound = detail::token_double(doc, *t, "solver.theta_bound");
    }

    const auto sweep = detail::section(doc, "sweep");
    if (sweep.keys) {
        SweepSpec spec;
        const detail::ConfigToken& var = sweep.require("variable");
        if (var.value == "J")
            spec.variable = SweepVariable::J;
        else if (var.value == "d")
            spec.variable = SweepVariable::d;
        else if (var.value == "J_bound")
            spec.variable = SweepVariable::J_bound;
        else if (var.value == "r")
            spec.variable = SweepVariable::r;
        else
            detail::parse_fail(doc.source, var.line, var.column,
                               "sweep.variable: must be one of J, d, J_bound, r");
        const detail::ConfigToken& values = sweep.require("values");
        std::string item;
        std::istringstream list(values.value);
        while (std::getline(list, item, ',')) {
            const std::size_t b = item.find_first_not_of(" \t");
            if (b == std::string::npos)
                detail::parse_fail(doc.source, values.line, values.column,
                                   "sweep.values: empty list entry");
            const std::size_t e = item.find_last_not_of(" \t");
            detail::ConfigToken entry{item.substr(b, e - b + 1), values.line, values.column};
            spec.values.push_back(detail::token_double(doc, entry, "sweep.values"));
        }
        if (spec.values.empty())
            throw invalid_config("sweep.values: must list at least one value");
        const bool integral_axis = spec.variable != SweepVariable::d;
        for (double v : spec.values) {
            if (integral_axis && v != std::floor(v))
                throw invalid_config(std::string("sweep.values: ") + sweep_variable_name(spec.variable)
                                     + " takes integer values");
        }
        cfg.sweep = std::move(spec);
    }

    const auto output = detail::section(doc, "output");
    if (output.keys) {
        if (const auto* t = output.find("path"))
            cfg.output.path = t->value;
        if (const auto* t = output.find("format")) {
            if (t->value == "csv")
                cfg.output.format = OutputFormat::csv;
            else if (t->value == "tsv")
                cfg.output.format = OutputFormat::tsv;
            else
                detail::parse_fail(doc.source, t->line, t->column,
                                   "output.format: must be csv or tsv");
        }
    }

    // module-level invariants, reported by dotted key path
    validate(cfg.stack);
    validate(cfg.geometry);
    validate(cfg.approx);
    if (cfg.solve.q < 0)
        throw invalid_config("solver.q: must be an integer >= 0");
    if (cfg.solve.theta_bound && !(*cfg.solve.theta_bound > 0 && *cfg.solve.theta_bound < M_PI / 2))
        throw invalid_config("solver.theta_bound: must lie in (0, pi/2)");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw invalid_config(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

} // namespace winoc
