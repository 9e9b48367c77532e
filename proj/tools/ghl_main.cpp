#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghl/commands.hpp"

namespace {

// Flags beat config values, config values beat defaults.
struct SharedOverrides {
    std::string config_path;
    double threshold = 0.0;
    CLI::Option* threshold_opt = nullptr;
    std::string rounding;
    CLI::Option* rounding_opt = nullptr;
    bool offline = false;
    std::int64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

void add_shared_options(CLI::App* cmd, SharedOverrides& s) {
    cmd->add_option("--config", s.config_path, "Run configuration JSON")
        ->check(CLI::ExistingFile);
    s.threshold_opt =
        cmd->add_option("--threshold", s.threshold, "Similarity threshold for a match");
    s.rounding_opt = cmd->add_option("--rounding", s.rounding, "Score rounding before the "
                                                               "threshold comparison")
                         ->check(CLI::IsMember({"one-decimal", "raw"}));
    cmd->add_flag("--offline", s.offline, "Answer from the cache only; never dial the provider");
    s.seed_opt = cmd->add_option("--seed", s.seed, "Completion request seed");
}

ghl::RunConfig build_config(const SharedOverrides& s) {
    ghl::RunConfig config =
        s.config_path.empty() ? ghl::RunConfig{} : ghl::load_run_config(s.config_path);
    if (s.threshold_opt && *s.threshold_opt) config.threshold = s.threshold;
    if (s.rounding_opt && *s.rounding_opt)
        config.rounding = ghl::rounding_mode_from_string(s.rounding);
    if (s.offline) config.mode = ghl::GatewayMode::replay_only;
    if (s.seed_opt && *s.seed_opt) config.seed = s.seed;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate high-level test cases from requirement documents and score them "
                 "against a truth set"};
    app.require_subcommand(1);

    SharedOverrides run_shared;
    std::string dataset;
    std::vector<std::string> functions;
    std::string strategy = "all";
    int repeats = 0;
    std::string out_dir;
    double bin_width = 0.0;

    CLI::App* run_cmd = app.add_subcommand("run", "Generate, evaluate and report for a dataset");
    add_shared_options(run_cmd, run_shared);
    run_cmd->add_option("--dataset", dataset, "Dataset name from the configured manifests");
    run_cmd->add_option("--function", functions, "Function key to run (repeatable)");
    run_cmd->add_option("--strategy", strategy, "Generation strategy")
        ->check(CLI::IsMember({"zero-shot", "ghl", "ghl-f", "all"}));
    CLI::Option* repeats_opt =
        run_cmd->add_option("--repeats", repeats, "Generation repeats per function and strategy");
    CLI::Option* out_opt = run_cmd->add_option("--out", out_dir, "Artifact output directory");
    CLI::Option* bin_opt =
        run_cmd->add_option("--bin-width", bin_width, "Histogram bin width for the report");

    SharedOverrides eval_shared;
    std::string generation_file;
    std::string eval_manifest;
    std::string eval_out;

    CLI::App* eval_cmd =
        app.add_subcommand("evaluate", "Score a stored generation artifact against its truth set");
    add_shared_options(eval_cmd, eval_shared);
    eval_cmd->add_option("--generation", generation_file, "generation.json artifact")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest holding the truth set")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", eval_out, "Where to write evaluation.json")->required();

    SharedOverrides cache_shared;
    std::string cache_action;
    CLI::App* cache_cmd = app.add_subcommand("cache", "Inspect the record/replay cache");
    add_shared_options(cache_cmd, cache_shared);
    cache_cmd->add_option("action", cache_action, "stats or verify")
        ->required()
        ->check(CLI::IsMember({"stats", "verify"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ghl::kExitConfigInvalid;
    }

    try {
        if (app.got_subcommand(run_cmd)) {
            ghl::RunRequest request;
            request.config = build_config(run_shared);
            if (*repeats_opt) request.config.repeats = repeats;
            if (*out_opt) request.config.output_dir = out_dir;
            if (*bin_opt) request.config.bin_width = bin_width;
            request.dataset = dataset;
            request.functions = functions;
            if (strategy != "all")
                request.strategies = {ghl::strategy_from_string(strategy)};
            return ghl::cmd_run(request, std::cout);
        }
        if (app.got_subcommand(eval_cmd)) {
            ghl::EvaluateRequest request;
            request.config = build_config(eval_shared);
            request.generation_file = generation_file;
            request.manifest = eval_manifest;
            request.output_file = eval_out;
            return ghl::cmd_evaluate(request, std::cout);
        }
        ghl::CacheRequest request;
        request.config = build_config(cache_shared);
        request.action = cache_action;
        return ghl::cmd_cache(request, std::cout);
    } catch (const ghl::ConfigError& e) {
        std::cout << "error: " << e.what() << '\n';
        return ghl::kExitConfigInvalid;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << '\n';
        return ghl::kExitFailure;
    }
}
