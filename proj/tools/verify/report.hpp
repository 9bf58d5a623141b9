#pragma once

// report.json and residuals.csv writers.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "suites.hpp"

namespace verify {

/// Shortest round-trip decimal, so reruns produce identical bytes.
inline std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string residuals_csv(const std::vector<SuiteResult>& results)
{
    std::string out = "suite,check,paper_tag,value,tolerance,pass\r\n";
    for (const auto& r : results) {
        for (const auto& c : r.checks) {
            out += csv_field(r.name) + "," + csv_field(c.name) + "," + csv_field(c.tag) + "," +
                   format_number(c.value) + "," + format_number(c.tolerance) + "," + (c.pass ? "true" : "false") +
                   "\r\n";
        }
    }
    return out;
}

inline json suite_json(const SuiteResult& r)
{
    json checks = json::array();
    for (const auto& c : r.checks) {
        // JSON has no infinity; keep the text form
        json value = std::isfinite(c.value) ? json(c.value) : json(format_number(c.value));
        checks.push_back(
            {{"check", c.name}, {"paper_tag", c.tag}, {"value", value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    return {{"name", r.name},
            {"statement", suite_statement(r.name)},
            {"passed", r.passed()},
            {"seconds", r.seconds},
            {"checks", checks},
            {"values", r.values}};
}

inline json seed_trail(const ExperimentConfig& c)
{
    json pots = json::array();
    for (int i = 0; i < c.potentials.count; ++i) pots.push_back(potential_seed(c, i));
    json vb = json::array();
    for (int i = 0; i < c.volume_bounds.potentials; ++i) vb.push_back(volume_bound_seed(c, i));
    json es = json::array();
    for (int i = 1; i < c.err_survey.samples; ++i) es.push_back(err_survey_seed(c, i));
    return {{"generator", "64-bit LCG, MMIX constants"},
            {"metric", c.metric.seed},
            {"potentials", pots},
            {"volume_bounds_potentials", vb},
            {"err_survey_potentials", es}};
}

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw ConfigError("cannot write " + path.string());
}

} // namespace verify
