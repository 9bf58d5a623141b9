// verify: runs the configured verification suites and writes report.json and
// residuals.csv. Exit codes: 0 all checks pass, 1 a check failed, 2 usage,
// configuration or I/O error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "report.hpp"

#ifndef VERIFY_VERSION
#define VERIFY_VERSION "unknown"
#endif

namespace {

using namespace verify;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

unsigned thread_cap()
{
    if (const char* env = std::getenv("VERIFY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("VERIFY_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SuiteResult> run_suites(const Context& ctx, bool parallel)
{
    const auto& names = ctx.config.suites;
    std::vector<SuiteResult> results(names.size());
    const unsigned workers = parallel ? std::min<unsigned>(thread_cap(), static_cast<unsigned>(names.size())) : 1u;
    if (workers <= 1) {
        for (std::size_t i = 0; i < names.size(); ++i) results[i] = run_suite(ctx, names[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < names.size(); i = next++) results[i] = run_suite(ctx, names[i]);
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

void print_summary(const std::vector<SuiteResult>& results)
{
    for (const auto& r : results) {
        std::size_t failed = 0;
        for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
        std::cout << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.checks.size() << " checks, "
                  << failed << " failed, " << format_number(std::round(r.seconds * 10.0) / 10.0) << " s)\n";
        for (const auto& c : r.checks) {
            if (!c.pass) {
                std::cout << "  " << c.name << " [" << c.tag << "] value " << format_number(c.value) << " > tolerance "
                          << format_number(c.tolerance) << "\n";
            }
        }
    }
}

struct RunOptions {
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> suites;
    std::optional<std::uint64_t> seed;
    bool parallel = false;
};

int execute(const RunOptions& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = o.config_path ? load_config(*o.config_path) : ExperimentConfig{};
    if (o.suites) cfg.suites = parse_suite_list(*o.suites);
    if (o.seed) {
        cfg.metric.seed = *o.seed;
        cfg.potentials.seed = *o.seed;
    }
    validate(cfg);
    if (o.parallel) thread_cap();  // reject a bad VERIFY_THREADS before any work

    std::filesystem::path out;
    if (o.out_dir) {
        out = *o.out_dir;
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
    }

    const Context ctx(cfg);
    const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto results = run_suites(ctx, o.parallel);
    print_summary(results);

    std::size_t checks = 0, failed = 0;
    json suites = json::array();
    for (const auto& r : results) {
        checks += r.checks.size();
        for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
        suites.push_back(suite_json(r));
    }
    const auto& h = ctx.h();
    json report = {
        {"artifact", {{"name", "verify"}, {"library", "threefold"}, {"version", VERIFY_VERSION}}},
        {"command", o.command},
        {"config", to_json(cfg)},
        {"seed_trail", seed_trail(cfg)},
        {"metric",
         {{"family", std::string(threefold::to_string(cfg.metric.family))},
          {"effective_epsilon", ctx.metric.effective_epsilon},
          {"volume", h.volume},
          {"d_omega_norm", h.d_omega.max_abs()},
          {"ddbar_omega_norm", h.ddbar_omega.max_abs()}}},
        {"suites", suites},
        {"summary", {{"checks", checks}, {"failed", failed}, {"passed", failed == 0}}},
        {"timings",
         {{"setup_seconds", setup},
          {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
          {"parallel", o.parallel}}}};

    if (o.out_dir) {
        write_file(out / "report.json", report.dump(2) + "\n");
        write_file(out / "residuals.csv", residuals_csv(results));
        std::cout << "wrote " << (out / "report.json").string() << " and " << (out / "residuals.csv").string() << "\n";
    }
    if (o.command == "err-survey") {
        for (const auto& r : results) std::cout << r.values.dump(2) << "\n";
    }
    std::cout << (failed == 0 ? "all " + std::to_string(checks) + " checks passed"
                              : std::to_string(failed) + " of " + std::to_string(checks) + " checks failed")
              << "\n";
    return failed == 0 ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification of Mabuchi and Aubin-Yau identities on Hermitian three-folds"};
    app.set_version_flag("--version", VERIFY_VERSION);
    app.require_subcommand(1);

    RunOptions run_opts;
    run_opts.command = "run";
    std::string suites_arg;
    std::uint64_t seed_arg = 0;
    std::string config_arg, out_arg = ".";
    auto* run = app.add_subcommand("run", "Run the configured suites and write report.json and residuals.csv");
    run->add_option("--config", config_arg, "YAML experiment configuration (defaults when omitted)");
    run->add_option("--out", out_arg, "Output directory")->capture_default_str();
    run->add_option("--suites", suites_arg, "Comma separated suite list, overrides the configuration");
    run->add_option("--seed", seed_arg, "Base seed for the metric and the potentials");
    run->add_flag("--parallel", run_opts.parallel, "Run suites concurrently, capped by VERIFY_THREADS");

    auto* list = app.add_subcommand("list-suites", "Print every suite with the statements it checks");

    std::string survey_config, survey_out;
    auto* survey = app.add_subcommand("err-survey", "Exploratory sample of the volume defect Err");
    survey->add_option("--config", survey_config, "YAML experiment configuration")->required();
    survey->add_option("--out", survey_out, "Output directory for report.json and residuals.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (list->parsed()) {
            for (const auto& [name, tag] : suite_statements()) std::cout << name << " → " << tag << "\n";
            return kExitPass;
        }
        if (survey->parsed()) {
            RunOptions o;
            o.command = "err-survey";
            o.config_path = survey_config;
            o.suites = "err_survey";
            if (!survey_out.empty()) o.out_dir = survey_out;
            return execute(o);
        }
        if (!config_arg.empty()) run_opts.config_path = config_arg;
        run_opts.out_dir = out_arg;
        if (!suites_arg.empty()) run_opts.suites = suites_arg;
        if (run->count("--seed") > 0) run_opts.seed = seed_arg;
        return execute(run_opts);
    } catch (const ConfigError& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitUsage;
    } catch (const threefold::InvalidArgument& e) {
        std::cerr << "verify: invalid configuration: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "verify: error: " << e.what() << "\n";
        return kExitUsage;
    }
}
