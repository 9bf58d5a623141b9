#pragma once

// Statement tags printed by list-suites and attached to every residual row.

#include <string>
#include <utility>
#include <vector>

namespace verify {

inline const std::vector<std::pair<std::string, std::string>>& suite_statements()
{
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"path_independence", "Theorem 2.1 (Eq. 2.17)"},
        {"cocycle", "Corollary 2.4 (Eqs. 2.12–2.13)"},
        {"closed_form", "Corollary 2.2 (Eq. 2.11)"},
        {"identities", "Eqs. 3.3, 3.4, 3.8, 3.9, 3.11, 3.15, 3.19, 3.20, 3.23, 3.24"},
        {"inequalities", "Theorem 3.1 (Eqs. 3.39–3.40)"},
        {"constants", "Eqs. 3.25–3.36, Eqs. 3.21–3.22 vs 3.37–3.38"},
        {"gauduchon", "Theorem 1.6 (Gauduchon factor)"},
        {"volume_bounds", "Theorems 4.1–4.2"},
        {"err_survey", "Eqs. 1.13–1.17, Eq. 1.19 (exploratory)"}};
    return table;
}

inline std::string suite_statement(const std::string& suite)
{
    for (const auto& [name, tag] : suite_statements()) {
        if (name == suite) return tag;
    }
    return {};
}

/// Tag of one identity computed by functional_report.
inline std::string identity_tag(const std::string& name)
{
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"three_quarter_hessian", "Eq. 3.3"},    {"four_hessian", "Eq. 3.4"},
        {"three_quarter_via_A", "Eq. 3.8"},      {"three_quarter_via_B", "Eq. 3.9"},
        {"three_quarter_symmetric", "Eq. 3.11"}, {"four_via_A", "Eq. 3.15"},
        {"four_via_B", "Eq. 3.19"},              {"four_symmetric", "Eq. 3.20"},
        {"three_quarter_gradient", "Eq. 3.23"},  {"four_gradient", "Eq. 3.24"},
        {"A=A1+A2", "Eqs. 3.13–3.14"},           {"B=B1+B2", "Eqs. 3.17–3.18"},
        {"closed_form", "Eq. 2.11"},             {"constant_shift", "Eq. 2.12"},
        {"shift_composition", "Eq. 2.13"}};
    for (const auto& [n, tag] : table) {
        if (n == name) return tag;
    }
    return {};
}

} // namespace verify
