// Command-line front end: run scenarios, list presets, dump configs and traces.

#include "depas/checks.hpp"
#include "depas/scenario.hpp"
#include "depas/simulation.hpp"
#include "depas/workload.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_run_failure = 1;
constexpr int exit_check_failure = 2;

// A preset name or a path to a JSON config file.
depas::ScenarioConfig load_target(const std::string& target)
{
    if (auto p = depas::preset(target)) {
        return *p;
    }
    if (std::filesystem::exists(target)) {
        return depas::parse_config_file(target);
    }
    throw std::invalid_argument("'" + target + "' is neither a preset nor a readable config file");
}

struct RunOptions
{
    std::string target;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<double> rate_scale;
    std::string out = "out";
    std::size_t threads = 1;
    bool check = false;
};

depas::ScenarioConfig apply_overrides(depas::ScenarioConfig c, const RunOptions& o)
{
    if (o.runs) {
        c.runs = *o.runs;
        c.seeds.clear();
    }
    if (o.seed) {
        c.seed = *o.seed;
        c.seeds.clear();
    }
    if (o.rate_scale) {
        c.workload.transform.rate_scale *= *o.rate_scale;
    }
    c.validate();
    return c;
}

void print_summary(const depas::RunAggregate& agg)
{
    const auto& s = agg.summary;
    std::printf("%s: %zu run(s), avg response %.3f s, rejected %.3f%%, lost %.3f%%, issued %.0f\n",
                agg.scenario.c_str(), agg.runs, s.avg_resp_time, s.rejected_pct, s.lost_pct, s.issued);
}

int run_command(const RunOptions& o)
{
    depas::ScenarioConfig config;
    try {
        config = apply_overrides(load_target(o.target), o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_run_failure;
    }

    std::vector<depas::RunResult> runs;
    depas::RunAggregate agg;
    try {
        agg = depas::run_scenario(config, o.threads, &runs);
        depas::emit_csv(agg, o.out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_run_failure;
    }
    print_summary(agg);
    std::printf("wrote %s/%s_frames.csv and %s/%s_summary.csv\n", o.out.c_str(), agg.scenario.c_str(),
                o.out.c_str(), agg.scenario.c_str());

    if (!o.check) {
        return exit_ok;
    }
    std::optional<depas::RunAggregate> reference;
    if (config.name == "extreme-unbalanced") {
        RunOptions ro = o;
        auto ref_config = apply_overrides(*depas::preset("reference"), ro);
        try {
            reference = depas::run_scenario(ref_config, o.threads);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return exit_run_failure;
        }
        print_summary(*reference);
    }
    const auto results = depas::checks_for(config, agg, runs, reference ? &*reference : nullptr);
    if (results.empty()) {
        std::printf("no acceptance checks apply to scenario '%s'\n", config.name.c_str());
        return exit_ok;
    }
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%s\n", depas::format_check(r).c_str());
        ok = ok && r.pass;
    }
    return ok ? exit_ok : exit_check_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"DEPAS decentralized auto-scaling simulator"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write CSV results");
    run_cmd->add_option("target", run.target, "Preset name or JSON config file")->required();
    run_cmd->add_option("--runs", run.runs, "Number of independent runs");
    run_cmd->add_option("--seed", run.seed, "Base seed; per-run seeds derive from it");
    run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--rate-scale", run.rate_scale, "Multiplier on the workload rate")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--threads", run.threads, "Runs executed concurrently")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    run_cmd->add_flag("--check", run.check, "Evaluate the acceptance criteria of the scenario");

    auto* presets_cmd = app.add_subcommand("presets", "List the packaged scenarios");

    std::string config_target;
    auto* config_cmd = app.add_subcommand("config", "Print the fully resolved config of a preset or file");
    config_cmd->add_option("target", config_target, "Preset name or JSON config file")->required();

    std::string trace_out;
    std::uint64_t trace_seed = 2008;
    auto* trace_cmd = app.add_subcommand("trace", "Write the built-in town-hall workload trace");
    trace_cmd->add_option("--out", trace_out, "Destination file (stdout when omitted)");
    trace_cmd->add_option("--seed", trace_seed, "Noise seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_run_failure;
    }

    if (*run_cmd) {
        return run_command(run);
    }
    if (*presets_cmd) {
        for (const auto& name : depas::preset_names()) {
            std::printf("%s\n", name.c_str());
        }
        return exit_ok;
    }
    if (*config_cmd) {
        try {
            std::printf("%s\n", depas::serialize_config(load_target(config_target)).c_str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return exit_run_failure;
        }
        return exit_ok;
    }
    if (*trace_cmd) {
        const auto trace = depas::synthetic_town_hall_trace(trace_seed);
        if (trace_out.empty()) {
            depas::write_trace(std::cout, trace);
            return exit_ok;
        }
        std::ofstream f(trace_out);
        depas::write_trace(f, trace);
        if (!f) {
            std::fprintf(stderr, "error: cannot write %s\n", trace_out.c_str());
            return exit_run_failure;
        }
        return exit_ok;
    }
    return exit_ok;
}
