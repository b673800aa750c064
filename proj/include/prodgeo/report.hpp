#pragma once

// Deterministic run reports: fixed key order, fixed 12-significant-digit float
// formatting, no timestamps, so identical configs produce identical bytes.

#include "prodgeo/errors.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace prodgeo {

inline constexpr const char* kToolVersion = "prodgeo 0.1.0";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<Check> checks;

    void echo(std::string key, std::string value) {
        config.emplace_back(std::move(key), std::move(value));
    }

    /// Threshold check: passes when measured <= tolerance.
    void add(std::string name, double measured, double tolerance, std::string note = "") {
        checks.push_back({std::move(name), measured <= tolerance, measured, tolerance, std::move(note)});
    }

    /// Boolean check, reported with measured 0/1 against tolerance 0.
    void add_flag(std::string name, bool ok, std::string note = "") {
        checks.push_back({std::move(name), ok, ok ? 0.0 : 1.0, 0.0, std::move(note)});
    }

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline std::string render_text(const Report& r) {
    std::string out;
    out += std::string("tool: ") + kToolVersion + "\n";
    out += "command: " + r.command + "\n";
    out += "config:\n";
    for (const auto& [k, v] : r.config) out += "  " + k + ": " + v + "\n";
    out += "checks:\n";
    for (const auto& c : r.checks) {
        out += std::string("  [") + (c.pass ? "pass" : "fail") + "] " + c.name +
               " measured=" + format_double(c.measured) + " tolerance=" + format_double(c.tolerance);
        if (!c.note.empty()) out += " note=" + c.note;
        out += "\n";
    }
    out += std::string("summary: ") + (r.pass() ? "pass" : "fail") + "\n";
    return out;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
            out += ch;
        } else if (ch == '\n') {
            out += "\\n";
        } else {
            out += ch;
        }
    }
    return out;
}

} // namespace detail

inline std::string render_structured(const Report& r) {
    std::string out = "{\n";
    out += std::string("  \"tool\": \"") + kToolVersion + "\",\n";
    out += "  \"command\": \"" + detail::json_escape(r.command) + "\",\n";
    out += "  \"config\": {";
    for (size_t i = 0; i < r.config.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + detail::json_escape(r.config[i].first) + "\": \"" +
               detail::json_escape(r.config[i].second) + "\"";
    }
    out += "},\n  \"checks\": [\n";
    for (size_t i = 0; i < r.checks.size(); ++i) {
        const auto& c = r.checks[i];
        out += "    {\"name\": \"" + detail::json_escape(c.name) + "\", \"status\": \"" +
               (c.pass ? "pass" : "fail") + "\", \"measured\": " + format_double(c.measured) +
               ", \"tolerance\": " + format_double(c.tolerance);
        if (!c.note.empty()) out += ", \"note\": \"" + detail::json_escape(c.note) + "\"";
        out += i + 1 < r.checks.size() ? "},\n" : "}\n";
    }
    out += "  ],\n";
    out += std::string("  \"summary\": \"") + (r.pass() ? "pass" : "fail") + "\"\n}\n";
    return out;
}

/// Curvature-vs-t curve rows for CSV output.
struct CurveRow {
    double t = 0.0;
    int lambda_index = 0;
    double predicted = 0.0;
    double measured = 0.0;
};

inline std::string render_curve_csv(const std::vector<CurveRow>& rows) {
    std::string out = "t,lambda_index,predicted,measured\n";
    for (const auto& row : rows)
        out += format_double(row.t) + "," + std::to_string(row.lambda_index) + "," +
               format_double(row.predicted) + "," + format_double(row.measured) + "\n";
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    f << content;
    if (!f.good()) throw UsageError("failed writing output file '" + path + "'");
}

} // namespace prodgeo
