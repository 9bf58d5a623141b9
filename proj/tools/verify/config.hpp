#pragma once

// Experiment configuration: YAML schema, defaults, validation and JSON echo.
// The schema is documented in tools/CONFIG.md.

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "threefold/threefold.hpp"

namespace verify {

using json = nlohmann::ordered_json;

/// Bad configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {
        "path_independence", "cocycle", "closed_form", "identities", "inequalities",
        "constants", "gauduchon", "volume_bounds", "err_survey"};
    return names;
}

inline const std::vector<std::string>& path_names()
{
    static const std::vector<std::string> names = {"linear", "radial", "quadratic", "two_segment"};
    return names;
}

struct PotentialConfig {
    int count = 5;
    double amplitude = 0.1;
    std::uint64_t seed = 1;
    bool normalized = false;
};

struct QuadratureConfig {
    int time_nodes = threefold::kDefaultTimeNodes;
    int s_nodes = threefold::kDefaultScaleNodes;
};

struct VolumeBoundsConfig {
    /// Perturbation size of the ∂∂̄-closed metric used when the configured one is not.
    double epsilon = 0.05;
    int potentials = 10;
    double amplitude = 0.3;
};

struct ErrSurveyConfig {
    int samples = 20;
    double amplitude = 0.3;
};

/// Tolerance overrides, kept in declaration order for the report echo.
struct Tolerances {
    std::vector<std::pair<std::string, double>> values = {
        {"path_independence", 1e-8}, {"cocycle", 1e-9},          {"closed_form", 1e-10},
        {"identities", 1e-8},        {"inequalities", 1e-9},      {"constants", 0.0},
        {"assembly", 1e-10},         {"gauduchon_residual", 1e-8}, {"gauduchon_recovery", 1e-6},
        {"volume_bounds", 1e-10},    {"err_kahler", 1e-9}};

    double get(const std::string& name) const
    {
        for (const auto& [k, v] : values) {
            if (k == name) return v;
        }
        throw std::logic_error("no tolerance " + name);
    }
    double* find(const std::string& name)
    {
        for (auto& [k, v] : values) {
            if (k == name) return &v;
        }
        return nullptr;
    }
};

struct ExperimentConfig {
    int grid_n = 8;
    threefold::MetricSpec metric;
    PotentialConfig potentials;
    std::vector<std::string> paths = path_names();
    std::vector<std::string> suites = suite_names();
    QuadratureConfig quadrature;
    VolumeBoundsConfig volume_bounds;
    ErrSurveyConfig err_survey;
    Tolerances tolerances;
};

namespace detail {

inline std::string where(const YAML::Node& node, const std::string& field)
{
    const auto m = node.Mark();
    if (m.is_null()) return field;
    return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + " (" + field + ")";
}

inline void require_map(const YAML::Node& node, const std::string& field)
{
    if (!node.IsMap()) throw ConfigError(where(node, field) + ": expected a mapping");
}

inline void reject_unknown(const YAML::Node& node, const std::string& field, const std::set<std::string>& allowed)
{
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            const std::string path = field.empty() ? key : field + "." + key;
            throw ConfigError(where(kv.first, path) + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& field, T& out)
{
    const auto node = parent[key];
    if (!node) return;
    const std::string path = field.empty() ? std::string(key) : field + "." + key;
    try {
        out = node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where(node, path) + ": cannot read value '" + (node.IsScalar() ? node.Scalar() : "<non-scalar>") +
                          "'");
    }
}

inline std::vector<std::string> read_names(const YAML::Node& node, const std::string& field,
                                           const std::vector<std::string>& allowed)
{
    if (!node.IsSequence()) throw ConfigError(where(node, field) + ": expected a list");
    std::vector<std::string> out;
    for (const auto& item : node) {
        std::string name;
        try {
            name = item.as<std::string>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where(item, field) + ": expected a name");
        }
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            throw ConfigError(where(item, field) + ": unknown name '" + name + "'");
        }
        if (std::find(out.begin(), out.end(), name) != out.end()) {
            throw ConfigError(where(item, field) + ": duplicate name '" + name + "'");
        }
        out.push_back(name);
    }
    return out;
}

} // namespace detail

/// Parses a comma separated suite list, as given to --suites.
inline std::vector<std::string> parse_suite_list(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto stop = std::min(text.find(',', start), text.size());
        const auto name = text.substr(start, stop - start);
        if (name.empty()) throw ConfigError("--suites: empty suite name");
        const auto& all = suite_names();
        if (std::find(all.begin(), all.end(), name) == all.end()) {
            throw ConfigError("--suites: unknown suite '" + name + "'");
        }
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
        start = stop + 1;
    }
    return out;
}

/// Range checks shared by file and command-line configuration.
inline void validate(const ExperimentConfig& c)
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (c.grid_n < 4 || c.grid_n > 64 || c.grid_n % 2 != 0) {
        fail("grid_n: must be an even integer in [4, 64], got " + std::to_string(c.grid_n));
    }
    if (c.metric.bandlimit < 1) fail("metric.bandlimit: must be at least 1");
    // four-factor integrands carry frequencies up to 4B per axis
    if (4 * c.metric.bandlimit >= c.grid_n) {
        fail("metric.bandlimit: " + std::to_string(c.metric.bandlimit) + " aliases on grid_n = " +
             std::to_string(c.grid_n) + " (need 4 * bandlimit < grid_n)");
    }
    if (!(c.metric.epsilon >= 0.0)) fail("metric.epsilon: must be non-negative");
    if (!(c.metric.conformal_amplitude >= 0.0)) fail("metric.conformal_amplitude: must be non-negative");
    if (c.potentials.count < 1) fail("potentials.count: must be at least 1");
    if (!(c.potentials.amplitude > 0.0)) fail("potentials.amplitude: must be positive");
    if (c.quadrature.time_nodes < 1 || c.quadrature.time_nodes > 64) fail("quadrature.time_nodes: must be in [1, 64]");
    if (c.quadrature.s_nodes < 1 || c.quadrature.s_nodes > 64) fail("quadrature.s_nodes: must be in [1, 64]");
    if (!(c.volume_bounds.epsilon >= 0.0)) fail("volume_bounds.epsilon: must be non-negative");
    if (c.volume_bounds.potentials < 1) fail("volume_bounds.potentials: must be at least 1");
    if (!(c.volume_bounds.amplitude > 0.0)) fail("volume_bounds.amplitude: must be positive");
    if (c.err_survey.samples < 1) fail("err_survey.samples: must be at least 1");
    if (!(c.err_survey.amplitude > 0.0)) fail("err_survey.amplitude: must be positive");
    for (const auto& [k, v] : c.tolerances.values) {
        if (!(v >= 0.0)) fail("tolerances." + k + ": must be non-negative");
    }
}

inline ExperimentConfig parse_config(const YAML::Node& root)
{
    using namespace detail;
    ExperimentConfig c;
    if (root.IsNull()) return c;
    require_map(root, "<root>");
    reject_unknown(root, "",
                   {"grid_n", "metric", "potentials", "paths", "suites", "quadrature", "volume_bounds", "err_survey",
                    "tolerances"});
    read(root, "grid_n", "", c.grid_n);

    if (const auto m = root["metric"]) {
        require_map(m, "metric");
        reject_unknown(m, "metric", {"family", "epsilon", "seed", "bandlimit", "conformal_amplitude"});
        if (const auto f = m["family"]) {
            const auto name = f.as<std::string>();
            const auto family = threefold::parse_metric_family(name);
            if (!family) throw ConfigError(where(f, "metric.family") + ": unknown metric family '" + name + "'");
            c.metric.family = *family;
        }
        read(m, "epsilon", "metric", c.metric.epsilon);
        read(m, "seed", "metric", c.metric.seed);
        read(m, "bandlimit", "metric", c.metric.bandlimit);
        read(m, "conformal_amplitude", "metric", c.metric.conformal_amplitude);
    }
    if (const auto p = root["potentials"]) {
        require_map(p, "potentials");
        reject_unknown(p, "potentials", {"count", "amplitude", "seed", "normalized"});
        read(p, "count", "potentials", c.potentials.count);
        read(p, "amplitude", "potentials", c.potentials.amplitude);
        read(p, "seed", "potentials", c.potentials.seed);
        read(p, "normalized", "potentials", c.potentials.normalized);
    }
    if (const auto p = root["paths"]) c.paths = read_names(p, "paths", path_names());
    if (const auto s = root["suites"]) c.suites = read_names(s, "suites", suite_names());
    if (const auto q = root["quadrature"]) {
        require_map(q, "quadrature");
        reject_unknown(q, "quadrature", {"time_nodes", "s_nodes"});
        read(q, "time_nodes", "quadrature", c.quadrature.time_nodes);
        read(q, "s_nodes", "quadrature", c.quadrature.s_nodes);
    }
    if (const auto v = root["volume_bounds"]) {
        require_map(v, "volume_bounds");
        reject_unknown(v, "volume_bounds", {"epsilon", "potentials", "amplitude"});
        read(v, "epsilon", "volume_bounds", c.volume_bounds.epsilon);
        read(v, "potentials", "volume_bounds", c.volume_bounds.potentials);
        read(v, "amplitude", "volume_bounds", c.volume_bounds.amplitude);
    }
    if (const auto e = root["err_survey"]) {
        require_map(e, "err_survey");
        reject_unknown(e, "err_survey", {"samples", "amplitude"});
        read(e, "samples", "err_survey", c.err_survey.samples);
        read(e, "amplitude", "err_survey", c.err_survey.amplitude);
    }
    if (const auto t = root["tolerances"]) {
        require_map(t, "tolerances");
        for (const auto& kv : t) {
            const auto key = kv.first.as<std::string>();
            double* slot = c.tolerances.find(key);
            if (!slot) throw ConfigError(where(kv.first, "tolerances." + key) + ": unknown key '" + key + "'");
            read(t, key.c_str(), "tolerances", *slot);
        }
    }
    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError(path + ": cannot read file");
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ": line " + std::to_string(e.mark.line + 1) + ", column " +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    try {
        return parse_config(root);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline json to_json(const ExperimentConfig& c)
{
    json tol = json::object();
    for (const auto& [k, v] : c.tolerances.values) tol[k] = v;
    return json{
        {"grid_n", c.grid_n},
        {"metric",
         {{"family", std::string(threefold::to_string(c.metric.family))},
          {"epsilon", c.metric.epsilon},
          {"seed", c.metric.seed},
          {"bandlimit", c.metric.bandlimit},
          {"conformal_amplitude", c.metric.conformal_amplitude}}},
        {"potentials",
         {{"count", c.potentials.count},
          {"amplitude", c.potentials.amplitude},
          {"seed", c.potentials.seed},
          {"normalized", c.potentials.normalized}}},
        {"paths", c.paths},
        {"suites", c.suites},
        {"quadrature", {{"time_nodes", c.quadrature.time_nodes}, {"s_nodes", c.quadrature.s_nodes}}},
        {"volume_bounds",
         {{"epsilon", c.volume_bounds.epsilon},
          {"potentials", c.volume_bounds.potentials},
          {"amplitude", c.volume_bounds.amplitude}}},
        {"err_survey", {{"samples", c.err_survey.samples}, {"amplitude", c.err_survey.amplitude}}},
        {"tolerances", tol}};
}

} // namespace verify
