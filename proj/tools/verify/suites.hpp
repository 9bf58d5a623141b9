#pragma once

// Suite runners. Each suite reads the shared, immutable context and returns
// its residual rows plus the raw values behind them.

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "tags.hpp"

namespace verify {

struct Check {
    std::string name;
    std::string tag;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string name;
    std::vector<Check> checks;
    json values = json::object();
    double seconds = 0.0;

    bool passed() const
    {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

// Seed of each random potential, recorded in the report's seed trail.
inline std::uint64_t potential_seed(const ExperimentConfig& c, int i) { return c.potentials.seed + static_cast<std::uint64_t>(i); }
inline std::uint64_t volume_bound_seed(const ExperimentConfig& c, int i) { return c.potentials.seed + 100 + static_cast<std::uint64_t>(i); }
inline std::uint64_t err_survey_seed(const ExperimentConfig& c, int i) { return c.potentials.seed + 200 + static_cast<std::uint64_t>(i); }

struct Context {
    ExperimentConfig config;
    threefold::GridPtr grid;
    threefold::Metric metric;
    std::vector<threefold::ScalarField> potentials;

    explicit Context(ExperimentConfig c) : config(std::move(c))
    {
        grid = threefold::make_grid(config.grid_n);
        metric = threefold::make_metric(grid, config.metric);
        for (int i = 0; i < config.potentials.count; ++i) {
            potentials.push_back(threefold::random_potential(metric.structure, config.potentials.amplitude,
                                                             potential_seed(config, i), config.potentials.normalized,
                                                             config.metric.bandlimit));
        }
    }

    const threefold::HermitianStructure& h() const { return metric.structure; }
    const threefold::ScalarField& phi(int i) const
    {
        return potentials[static_cast<std::size_t>(i % static_cast<int>(potentials.size()))];
    }
    double tol(const std::string& name) const { return config.tolerances.get(name); }
    bool wants_path(const std::string& p) const
    {
        return std::find(config.paths.begin(), config.paths.end(), p) != config.paths.end();
    }
    threefold::MabuchiOptions mabuchi_options() const
    {
        threefold::MabuchiOptions o;
        o.time_nodes = config.quadrature.time_nodes;
        return o;
    }
};

namespace detail {

inline void add(SuiteResult& r, std::string name, std::string tag, double value, double tolerance)
{
    r.checks.push_back({std::move(name), std::move(tag), value, tolerance, value <= tolerance});
}

/// Amount by which x falls below -0, relative to scale.
inline double violation(double x, double scale) { return x >= 0.0 ? 0.0 : -x / scale; }

inline std::string label(const char* what, int i) { return std::string(what) + std::to_string(i); }

struct PathValue {
    double total = 0.0;
    double without_quartic = 0.0;
    double scale = 1.0;
};

inline PathValue path_value(const Context& ctx, const threefold::PotentialPath& path)
{
    const auto t = threefold::mabuchi_path_terms(ctx.h(), path, ctx.mabuchi_options());
    return {t.total(), t.total() - t.quartic_terms, t.scale};
}

inline PathValue sum(const PathValue& a, const PathValue& b)
{
    return {a.total + b.total, a.without_quartic + b.without_quartic, std::max(a.scale, b.scale)};
}

inline double relative(double a, double b, double scale) { return std::abs(a - b) / scale; }

} // namespace detail

inline void run_path_independence(const Context& ctx, SuiteResult& r)
{
    using threefold::PotentialPath;
    const std::string tag = "Thm 2.1 (Eq. 2.17)";
    const double tol = ctx.tol("path_independence");
    const int count = static_cast<int>(ctx.potentials.size());
    json pairs = json::array();
    double worst_without_quartic = 0.0;
    for (int i = 0; i < count; ++i) {
        const auto& a = ctx.phi(i);
        const auto& b = ctx.phi(i + 1);
        const auto& psi = ctx.phi(i + 2);
        const std::string pair = detail::label("pair", i);
        json entry = {{"from", i}, {"to", (i + 1) % count}, {"via", (i + 2) % count}};

        const auto linear = detail::path_value(ctx, PotentialPath::linear(a, b));
        entry["linear"] = linear.total;
        auto compare = [&](const std::string& shape, const detail::PathValue& v) {
            const double scale = std::max(linear.scale, v.scale);
            detail::add(r, pair + "/" + shape + "_vs_linear", tag, detail::relative(v.total, linear.total, scale), tol);
            const double control = detail::relative(v.without_quartic, linear.without_quartic, scale);
            worst_without_quartic = std::max(worst_without_quartic, control);
            entry[shape] = v.total;
            entry[shape + "_without_quartic_disagreement"] = control;
        };
        if (ctx.wants_path("quadratic")) {
            compare("quadratic", detail::path_value(ctx, PotentialPath::quadratic_through(a, b, psi)));
        }
        if (ctx.wants_path("two_segment")) {
            const auto m = threefold::convex_waypoint(a, b, psi);
            compare("two_segment", detail::sum(detail::path_value(ctx, PotentialPath::linear(a, m)),
                                               detail::path_value(ctx, PotentialPath::linear(m, b))));
        }
        if (ctx.wants_path("radial")) {
            const auto radial = detail::path_value(ctx, PotentialPath::radial(a));
            const auto quad = detail::path_value(ctx, PotentialPath::quadratic_radial(a));
            const double scale = std::max(radial.scale, quad.scale);
            detail::add(r, pair + "/quadratic_radial_vs_radial", tag, detail::relative(quad.total, radial.total, scale),
                        tol);
            entry["radial"] = radial.total;
            entry["quadratic_radial"] = quad.total;
        }
        pairs.push_back(entry);
    }
    r.values["pairs"] = pairs;
    // Negative control, reported only: dropping the quartic terms breaks path independence.
    r.values["without_quartic_max_disagreement"] = worst_without_quartic;
}

inline void run_cocycle(const Context& ctx, SuiteResult& r)
{
    const double tol = ctx.tol("cocycle");
    const int count = static_cast<int>(ctx.potentials.size());
    const auto opts = ctx.mabuchi_options();
    auto L = [&](const threefold::ScalarField& a, const threefold::ScalarField& b) {
        return detail::path_value(ctx, threefold::PotentialPath::linear(a, b));
    };
    std::vector<detail::PathValue> forward, backward, closing;
    for (int i = 0; i < count; ++i) {
        forward.push_back(L(ctx.phi(i), ctx.phi(i + 1)));
        backward.push_back(L(ctx.phi(i + 1), ctx.phi(i)));
        closing.push_back(L(ctx.phi(i + 2), ctx.phi(i)));
    }
    json rows = json::array();
    for (int i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const auto next = static_cast<std::size_t>((i + 1) % count);
        const double anti = std::abs(forward[u].total + backward[u].total) / std::max(forward[u].scale, backward[u].scale);
        detail::add(r, detail::label("pair", i) + "/antisymmetry", "Cor 2.4", anti, tol);
        const double tri_scale = std::max({forward[u].scale, forward[next].scale, closing[u].scale});
        const double tri = std::abs(forward[u].total + forward[next].total + closing[u].total) / tri_scale;
        detail::add(r, detail::label("triple", i) + "/triangle", "Cor 2.4", tri, tol);
        rows.push_back({{"index", i},
                        {"L_forward", forward[u].total},
                        {"L_backward", backward[u].total},
                        {"L_closing", closing[u].total}});
    }
    r.values["cocycle"] = rows;

    const auto& phi = ctx.phi(0);
    const double err = threefold::err(ctx.h(), phi);
    const double factor = 1.0 - err / ctx.h().volume;
    json shifts = json::array();
    for (double C : {-1.0, 0.5, 2.0}) {
        const double lhs = threefold::mabuchi_two_point(ctx.h(), phi, phi + C, opts);
        const auto res = threefold::make_residual("constant_shift", lhs, C * factor);
        std::string name = "shift_C=" + json(C).dump();
        detail::add(r, name, "Eq. 2.12", res.residual, tol);
        shifts.push_back({{"C", C}, {"lhs", lhs}, {"rhs", C * factor}});
    }
    r.values["err_phi0"] = err;
    r.values["shift"] = shifts;
}

inline void run_closed_form(const Context& ctx, SuiteResult& r)
{
    const double tol = ctx.tol("closed_form");
    json rows = json::array();
    for (int i = 0; i < static_cast<int>(ctx.potentials.size()); ++i) {
        const double closed = threefold::mabuchi_closed(ctx.h(), ctx.phi(i));
        const double path =
            threefold::mabuchi_path(ctx.h(), threefold::PotentialPath::radial(ctx.phi(i)), ctx.mabuchi_options());
        const auto res = threefold::make_residual("closed_form", path, closed);
        detail::add(r, detail::label("phi", i) + "/closed_vs_radial", "Cor 2.2 (Eq. 2.11)", res.residual, tol);
        rows.push_back({{"index", i}, {"closed", closed}, {"radial_path", path}});
    }
    r.values["potentials"] = rows;
}

inline json to_json(const threefold::FunctionalReport& f)
{
    json aux = json::object();
    for (const auto& [k, v] : f.aux.named()) aux[k] = v;
    json ids = json::array();
    for (const auto& id : f.identities) {
        ids.push_back({{"name", id.name}, {"lhs", id.lhs}, {"rhs", id.rhs}, {"residual", id.residual}});
    }
    json out = {{"L_M_closed", f.L_M_closed},
                {"I_AY", f.I_AY},
                {"J_AY", f.J_AY},
                {"I_bullet", f.I_bullet},
                {"J_bullet", f.J_bullet},
                {"aux", aux},
                {"gradient", f.gradient},
                {"err", f.err},
                {"imag_residual", f.imag_residual},
                {"identities", ids}};
    return out;
}

inline void run_identities(const Context& ctx, SuiteResult& r)
{
    const double tol = ctx.tol("identities");
    threefold::ReportOptions opts;
    opts.time_nodes = ctx.config.quadrature.time_nodes;
    opts.s_nodes = ctx.config.quadrature.s_nodes;
    // path-based identities belong to the closed_form and cocycle suites
    opts.include_path = false;
    json rows = json::array();
    for (int i = 0; i < static_cast<int>(ctx.potentials.size()); ++i) {
        const auto report = threefold::functional_report(ctx.h(), ctx.phi(i), opts);
        for (const auto& id : report.identities) {
            detail::add(r, detail::label("phi", i) + "/" + id.name, identity_tag(id.name), id.residual, tol);
        }
        rows.push_back(to_json(report));
    }
    r.values["functional_reports"] = rows;
}

inline void run_inequalities(const Context& ctx, SuiteResult& r)
{
    const double tol = ctx.tol("inequalities");
    json rows = json::array();
    for (int i = 0; i < static_cast<int>(ctx.potentials.size()); ++i) {
        const auto q = threefold::inequality_check(ctx.h(), ctx.phi(i), tol);
        const std::string p = detail::label("phi", i) + "/";
        detail::add(r, p + "three_quarter_I_minus_J", "Thm 3.1 (Eq. 3.39)",
                    detail::violation(q.three_quarter_I_minus_J, q.scale), tol);
        detail::add(r, p + "three_quarter_gradient_form", "Thm 3.1 (Eq. 3.39)",
                    detail::violation(q.three_quarter_gradient, q.scale), tol);
        detail::add(r, p + "four_J_minus_I", "Thm 3.1 (Eq. 3.40)", detail::violation(q.four_J_minus_I, q.scale), tol);
        detail::add(r, p + "four_gradient_form", "Thm 3.1 (Eq. 3.40)", detail::violation(q.four_gradient, q.scale), tol);
        detail::add(r, p + "three_quarter_routes_agree", "Eq. 3.23", q.agreement_three_quarter, tol);
        detail::add(r, p + "four_routes_agree", "Eq. 3.24", q.agreement_four, tol);
        rows.push_back({{"index", i},
                        {"I", q.I},
                        {"J", q.J},
                        {"three_quarter_I_minus_J", q.three_quarter_I_minus_J},
                        {"three_quarter_gradient", q.three_quarter_gradient},
                        {"four_J_minus_I", q.four_J_minus_I},
                        {"four_gradient", q.four_gradient},
                        {"scale", q.scale},
                        // reported, not asserted
                        {"chain_quarter_I_le_J_le_three_quarter_I", q.chain_quarter_holds}});
    }
    r.values["potentials"] = rows;
}

inline void run_constants(const Context& ctx, SuiteResult& r)
{
    const auto solved = threefold::solve_constants();
    const auto table = threefold::published_constants();
    json coeffs = json::object();
    for (const auto& [name, member] : threefold::CoefficientSet::fields) {
        const auto s = solved.*member;
        const auto t = table.*member;
        coeffs[name] = threefold::to_string(s);
        // exact comparison; the value column carries the rational difference as a double
        r.checks.push_back({std::string("coefficient/") + name, "Eqs. 3.33–3.36",
                            std::abs(threefold::to_double(s - t)), ctx.tol("constants"), s == t});
    }
    const auto residual = threefold::system_residual(solved);
    r.checks.push_back({"system_residual", "Eqs. 3.25–3.32", threefold::to_double(residual), ctx.tol("constants"),
                        residual == threefold::Rational(0)});
    r.values["coefficients"] = coeffs;

    const double tol = ctx.tol("assembly");
    json rows = json::array();
    for (int i = 0; i < static_cast<int>(ctx.potentials.size()); ++i) {
        const threefold::PotentialData pd(ctx.h(), ctx.phi(i));
        const auto [I, J] = threefold::assemble_I_J(ctx.h(), ctx.phi(i), solved, ctx.config.quadrature.s_nodes);
        const double Iay = threefold::aubin_I(ctx.h(), pd);
        const double Jay = threefold::aubin_J(ctx.h(), pd);
        const std::string p = detail::label("phi", i) + "/";
        detail::add(r, p + "assembled_I", "Eqs. 3.21 vs 3.37", threefold::make_residual("I", I, Iay).residual, tol);
        detail::add(r, p + "assembled_J", "Eqs. 3.22 vs 3.38", threefold::make_residual("J", J, Jay).residual, tol);
        rows.push_back({{"index", i}, {"assembled_I", I}, {"assembled_J", J}, {"I_AY", Iay}, {"J_AY", Jay}});
    }
    r.values["assembly"] = rows;
}

inline json gauduchon_json(const threefold::GauduchonResult& g)
{
    return {{"osc_u", g.osc_u},
            {"residual", g.residual},
            {"composed_residual", g.composed_residual},
            {"iterations", g.iterations},
            {"min_v", threefold::extrema(g.v).min}};
}

inline void run_gauduchon(const Context& ctx, SuiteResult& r)
{
    const std::string tag = "Theorem 1.6";
    const double tol = ctx.tol("gauduchon_residual");
    try {
        const auto g = threefold::gauduchon_solve(ctx.h(), tol);
        detail::add(r, "residual", tag, g.residual, tol);
        detail::add(r, "mean_v_minus_one", tag, std::abs(threefold::mean(g.v).real() - 1.0), tol);
        detail::add(r, "min_v_positive", tag, threefold::extrema(g.v).min > 0.0 ? 0.0 : 1.0, 0.0);
        r.values = gauduchon_json(g);
        if (ctx.metric.known_gauduchon_factor) {
            const double e = threefold::extrema(g.u - *ctx.metric.known_gauduchon_factor).oscillation();
            detail::add(r, "conformal_recovery_osc_error", tag, e, ctx.tol("gauduchon_recovery"));
            r.values["conformal_recovery_osc_error"] = e;
        }
    } catch (const threefold::SolverError& e) {
        detail::add(r, "residual", tag, e.residual(), tol);
        r.values["error"] = e.what();
    }
}

/// The configured metric when it satisfies ∂∂̄ω = 0, else a ∂∂̄-closed one.
inline threefold::Metric pluriclosed_metric(const Context& ctx, std::string& origin)
{
    using threefold::MetricFamily;
    const auto f = ctx.config.metric.family;
    if (f == MetricFamily::flat_kahler || f == MetricFamily::ddbar_closed) {
        origin = "configured";
        return ctx.metric;
    }
    origin = "ddbar_closed substitute";
    return threefold::ddbar_closed(ctx.grid, ctx.config.volume_bounds.epsilon, ctx.config.metric.seed,
                                   ctx.config.metric.bandlimit);
}

inline void run_volume_bounds(const Context& ctx, SuiteResult& r)
{
    const double tol = ctx.tol("volume_bounds");
    std::string origin;
    const auto metric = pluriclosed_metric(ctx, origin);
    const auto& h = metric.structure;
    const auto g = threefold::gauduchon_solve(h, ctx.tol("gauduchon_residual"));
    std::vector<threefold::ScalarField> phis;
    for (int i = 0; i < ctx.config.volume_bounds.potentials; ++i) {
        phis.push_back(threefold::random_potential(h, ctx.config.volume_bounds.amplitude, volume_bound_seed(ctx.config, i),
                                                   true, ctx.config.metric.bandlimit));
    }
    threefold::VolumeBoundOptions opts;
    opts.slack = 0.0;
    const auto report = threefold::volume_bounds(h, g.osc_u, phis, opts);
    json rows = json::array();
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        const std::string p = detail::label("phi", static_cast<int>(i)) + "/";
        detail::add(r, p + "upper", "Thm 4.1 (Eq. 1.20)", detail::violation(e.upper_slack, h.volume), tol);
        json row = {{"index", i}, {"volume_phi", e.volume_phi}, {"err", e.err}, {"upper_bound", e.upper_bound}};
        if (e.lower_bound) {
            detail::add(r, p + "lower", "Thm 4.2", detail::violation(*e.lower_slack, h.volume), tol);
            row["lower_bound"] = *e.lower_bound;
        }
        rows.push_back(row);
    }
    r.values = {{"metric", origin},
                {"family", std::string(threefold::to_string(origin == "configured" ? ctx.config.metric.family
                                                                                     : threefold::MetricFamily::ddbar_closed))},
                {"effective_epsilon", metric.effective_epsilon},
                {"volume", h.volume},
                {"ddbar_norm", report.ddbar_norm},
                {"gauduchon", gauduchon_json(g)},
                {"lower_bound_applicable", report.lower_applicable},
                {"potentials", rows}};
}

inline void run_err_survey(const Context& ctx, SuiteResult& r)
{
    using threefold::MetricFamily;
    const auto& h = ctx.h();
    const double V = h.volume;
    const double tol = ctx.tol("err_kahler");
    // the zero potential is always part of the sample
    std::vector<double> errs = {0.0};
    std::vector<double> vols = {V};
    for (int i = 1; i < ctx.config.err_survey.samples; ++i) {
        const auto phi = threefold::random_potential(h, ctx.config.err_survey.amplitude, err_survey_seed(ctx.config, i),
                                                     true, ctx.config.metric.bandlimit);
        const double e = threefold::err(h, phi);
        errs.push_back(e);
        vols.push_back(V - e);
    }
    const double inf_err = *std::min_element(errs.begin(), errs.end());
    const double sup_err = *std::max_element(errs.begin(), errs.end());
    const std::string tag = "Eq. 1.16";
    detail::add(r, "inf_err_nonpositive", tag, std::max(0.0, inf_err) / V, tol);
    detail::add(r, "sup_err_nonnegative", tag, detail::violation(sup_err, V), tol);
    detail::add(r, "sup_err_at_most_volume", tag, std::max(0.0, sup_err - V) / V, tol);
    r.values = {{"label", "EXPLORATORY: empirical sample, not the true sup/inf"},
                {"samples", errs.size()},
                {"volume", V},
                {"min_volume_phi", *std::min_element(vols.begin(), vols.end())},
                {"max_volume_phi", *std::max_element(vols.begin(), vols.end())},
                {"inf_err_estimate", inf_err},
                {"sup_err_estimate", sup_err}};

    const auto family = ctx.config.metric.family;
    if (family == MetricFamily::flat_kahler) {
        double worst = 0.0;
        for (double e : errs) worst = std::max(worst, std::abs(e));
        detail::add(r, "kahler_err_vanishes", "Remark 1.8", worst / V, tol);
    }
    if (family == MetricFamily::ddbar_closed) {
        const auto g = threefold::gauduchon_solve(h, ctx.tol("gauduchon_residual"));
        const double bound = 3.0 * (1.0 - std::exp(2.0 * g.osc_u)) * V;
        detail::add(r, "err_above_lower_bound", "Eq. 1.19", std::max(0.0, bound - inf_err) / V, ctx.tol("volume_bounds"));
        r.values["osc_u"] = g.osc_u;
        r.values["err_lower_bound"] = bound;
    }
}

inline SuiteResult run_suite(const Context& ctx, const std::string& name)
{
    static const std::vector<std::pair<std::string, std::function<void(const Context&, SuiteResult&)>>> runners = {
        {"path_independence", run_path_independence},
        {"cocycle", run_cocycle},
        {"closed_form", run_closed_form},
        {"identities", run_identities},
        {"inequalities", run_inequalities},
        {"constants", run_constants},
        {"gauduchon", run_gauduchon},
        {"volume_bounds", run_volume_bounds},
        {"err_survey", run_err_survey}};
    SuiteResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
        for (const auto& [n, fn] : runners) {
            if (n == name) fn(ctx, r);
        }
    } catch (const std::exception& e) {
        r.checks.push_back({"error", suite_statement(name), std::numeric_limits<double>::infinity(), 0.0, false});
        r.values["error"] = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace verify
