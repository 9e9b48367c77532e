#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghl/cache.hpp"
#include "ghl/commands.hpp"
#include "ghl/evaluator.hpp"
#include "ghl/reporter.hpp"
#include "ghl/run_artifacts.hpp"
#include "stub_provider.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path make_temp_dir() {
    auto dir = fs::temp_directory_path() /
               ("ghl_cmd_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << body;
}

struct EnvGuard {
    EnvGuard(const char* name_, const char* value) : name(name_) {
        ::setenv(name_, value, 1);
    }
    ~EnvGuard() { ::unsetenv(name); }
    const char* name;
};

fs::path fixture_manifest() {
    return fs::path(GHL_FIXTURE_DIR) / "minicorp" / "manifest.json";
}

ghl::RunConfig stub_run_config(const ghltest::StubProvider& stub, const fs::path& dir) {
    ghl::RunConfig cfg;
    cfg.endpoint = stub.endpoint();
    cfg.credential_env = "GHL_TEST_KEY";
    cfg.mode = ghl::GatewayMode::live_record;
    cfg.max_attempts = 2;
    cfg.backoff_initial_ms = 1;
    cfg.timeout_s = 5;
    cfg.repeats = 2;
    cfg.concurrency = 2;
    cfg.seed = 7;
    cfg.cache_file = dir / "cache.bin";
    cfg.output_dir = dir / "out";
    cfg.manifests = {fixture_manifest()};
    return cfg;
}

// The aggregate log line cmd_run prints for one function/strategy pair, built
// from the hand-derived match counts.
std::string expected_run_line(const ghltest::ExpectedCounts& e) {
    const ghl::MetricsSummary m = ghl::compute_metrics_from_counts(
        e.truth_total, e.generated_total, e.covered_truth, e.valid_generated, 0.0);
    return "[minicorp/" + std::string(e.function_key) + "/" + e.strategy +
           "] generated=" + ghl::format_count(m.generated_total) +
           " precision=" + ghl::format_ratio(m.precision) +
           " recall=" + ghl::format_ratio(m.recall) + " f1=" + ghl::format_ratio(m.f1);
}

}  // namespace

TEST_CASE("run config loads grouped json and resolves relative paths") {
    auto dir = make_temp_dir();
    write_text(dir / "tpl" / "placeholder.txt", "x");
    write_text(dir / "config.json", R"({
      "models": {"completion": "model-c", "embedding": "model-e"},
      "generation": {"temperature": 0.5, "seed": 11, "max_output_tokens": 512,
                     "chunk_max_words": 100, "chunk_overlap_words": 10,
                     "attach_strategy": false, "output_format": "one per line",
                     "template_dir": "tpl"},
      "evaluation": {"threshold": 0.8, "rounding": "raw", "bin_width": 0.1,
                     "identical_text_fast_path": false},
      "execution": {"repeats": 2, "concurrency": 3, "mode": "live_record",
                    "endpoint": "http://127.0.0.1:1/v1", "credential_env": "OTHER_KEY",
                    "max_attempts": 5, "backoff_initial_ms": 10, "timeout_s": 30},
      "paths": {"cache_file": "c.bin", "output_dir": "o", "manifests": ["m.json"]}
    })");

    const ghl::RunConfig c = ghl::load_run_config(dir / "config.json");
    CHECK(c.completion_model == "model-c");
    CHECK(c.embedding_model == "model-e");
    CHECK(c.temperature == 0.5);
    CHECK(c.seed == 11);
    CHECK(c.max_output_tokens == 512);
    CHECK(c.chunk_max_words == 100);
    CHECK(c.chunk_overlap_words == 10);
    CHECK_FALSE(c.attach_strategy);
    CHECK(c.output_format == "one per line");
    CHECK(c.template_dir == dir / "tpl");
    CHECK(c.threshold == 0.8);
    CHECK(c.rounding == ghl::RoundingMode::raw);
    CHECK(c.bin_width == 0.1);
    CHECK_FALSE(c.identical_text_fast_path);
    CHECK(c.repeats == 2);
    CHECK(c.concurrency == 3);
    CHECK(c.mode == ghl::GatewayMode::live_record);
    CHECK(c.endpoint == "http://127.0.0.1:1/v1");
    CHECK(c.credential_env == "OTHER_KEY");
    CHECK(c.max_attempts == 5);
    CHECK(c.backoff_initial_ms == 10);
    CHECK(c.timeout_s == 30);
    CHECK(c.cache_file == dir / "c.bin");
    CHECK(c.output_dir == dir / "o");
    REQUIRE(c.manifests.size() == 1);
    CHECK(c.manifests[0] == dir / "m.json");

    write_text(dir / "abs.json",
               std::string("{\"paths\": {\"cache_file\": \"") + (dir / "deep" / "c.bin").string() +
                   "\"}}");
    CHECK(ghl::load_run_config(dir / "abs.json").cache_file == dir / "deep" / "c.bin");

    write_text(dir / "sparse.json", "{}");
    const ghl::RunConfig d = ghl::load_run_config(dir / "sparse.json");
    CHECK(d.completion_model == "gpt-4o");
    CHECK(d.threshold == 0.7);
    CHECK(d.mode == ghl::GatewayMode::replay_only);
    CHECK(d.credential_env == "GHL_API_KEY");
    fs::remove_all(dir);
}

TEST_CASE("run config rejects malformed files and unknown keys") {
    auto dir = make_temp_dir();

    CHECK_THROWS_WITH(ghl::load_run_config(dir / "missing.json"),
                      ContainsSubstring("config file not readable"));

    write_text(dir / "bad.json", "{not json");
    CHECK_THROWS_WITH(ghl::load_run_config(dir / "bad.json"),
                      ContainsSubstring("not valid JSON"));

    write_text(dir / "array.json", "[1, 2]");
    CHECK_THROWS_WITH(ghl::load_run_config(dir / "array.json"),
                      ContainsSubstring("root must be an object"));

    write_text(dir / "rootkey.json", R"({"modles": {}})");
    CHECK_THROWS_WITH(ghl::load_run_config(dir / "rootkey.json"),
                      ContainsSubstring("unknown key 'modles' in config root"));

    write_text(dir / "groupkey.json", R"({"evaluation": {"treshold": 0.7}})");
    CHECK_THROWS_WITH(ghl::load_run_config(dir / "groupkey.json"),
                      ContainsSubstring("unknown key 'treshold' in evaluation"));

    write_text(dir / "mode.json", R"({"execution": {"mode": "offline"}})");
    CHECK_THROWS_WITH(ghl::load_run_config(dir / "mode.json"),
                      ContainsSubstring("unknown gateway mode"));
    fs::remove_all(dir);
}

TEST_CASE("run config validation rejects out-of-range settings") {
    auto dir = make_temp_dir();
    ghl::RunConfig base;
    base.mode = ghl::GatewayMode::live_record;
    base.cache_file = dir / "cache.bin";
    CHECK_NOTHROW(ghl::validate(base));

    auto expect = [&](void (*mutate)(ghl::RunConfig&), const std::string& needle) {
        ghl::RunConfig c = base;
        mutate(c);
        CHECK_THROWS_WITH(ghl::validate(c), ContainsSubstring(needle));
    };
    expect([](ghl::RunConfig& c) { c.completion_model.clear(); }, "completion model is empty");
    expect([](ghl::RunConfig& c) { c.embedding_model.clear(); }, "embedding model is empty");
    expect([](ghl::RunConfig& c) { c.repeats = 0; }, "repeats must be >= 1");
    expect([](ghl::RunConfig& c) { c.concurrency = 0; }, "concurrency must be >= 1");
    expect([](ghl::RunConfig& c) { c.max_attempts = 0; }, "max_attempts must be >= 1");
    expect([](ghl::RunConfig& c) { c.threshold = 1.5; }, "threshold must be within [0, 1]");
    expect([](ghl::RunConfig& c) { c.threshold = -0.1; }, "threshold must be within [0, 1]");
    expect([](ghl::RunConfig& c) { c.bin_width = 0.0; }, "bin_width must be positive");
    expect([](ghl::RunConfig& c) { c.chunk_max_words = 0; }, "chunk_max_words must be positive");
    expect([](ghl::RunConfig& c) { c.chunk_overlap_words = c.chunk_max_words; },
           "chunk_overlap_words must be smaller");
    expect([](ghl::RunConfig& c) { c.template_dir = "/nonexistent/tpl"; },
           "template_dir is not a directory");

    ghl::RunConfig replay = base;
    replay.mode = ghl::GatewayMode::replay_only;
    CHECK_THROWS_WITH(ghl::validate(replay),
                      ContainsSubstring("replay-only mode needs an existing cache file"));
    write_text(replay.cache_file, "");
    CHECK_NOTHROW(ghl::validate(replay));
    fs::remove_all(dir);
}

TEST_CASE("cmd_run records a full dataset run and replays it offline") {
    ghltest::StubProvider stub;
    stub.load_minicorp();
    EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
    auto dir = make_temp_dir();
    ghl::RunConfig cfg = stub_run_config(stub, dir);

    std::ostringstream log;
    REQUIRE(ghl::cmd_run({cfg, "", {}, {}}, log) == ghl::kExitOk);
    const std::string text = log.str();
    INFO(text);

    const fs::path out = cfg.output_dir;
    for (const char* fn : {"passwords", "remotecontrol"})
        for (const char* strategy : {"zero-shot", "ghl", "ghl-f"})
            for (const char* run : {"run-1", "run-2"}) {
                const fs::path run_dir = out / "minicorp" / fn / strategy / run;
                CHECK(fs::exists(run_dir / "generation.json"));
                CHECK(fs::exists(run_dir / "evaluation.json"));
            }
    for (const char* rel :
         {"summary.md", "per_function/passwords.md", "per_function/remotecontrol.md",
          "tables/zero-shot_metrics.csv", "tables/ghl_metrics.csv", "tables/ghl-f_metrics.csv",
          "histograms/zero-shot.csv", "histograms/ghl.csv", "histograms/ghl-f.csv"})
        CHECK(fs::exists(out / "report" / rel));

    for (const auto& e : ghltest::minicorp_expected_counts())
        CHECK_THAT(text, ContainsSubstring(expected_run_line(e)));
    CHECK_THAT(text, ContainsSubstring("report written to " + (out / "report").string()));
    CHECK_THAT(text, !ContainsSubstring("live provider calls: 0"));

    const auto art = ghl::evaluation_from_json(
        ghl::load_json_file(out / "minicorp/passwords/zero-shot/run-1/evaluation.json"));
    CHECK(art.function_key == "passwords");
    CHECK(art.run_index == 1);
    CHECK(art.metrics.truth_total == 4.0);
    CHECK(art.metrics.generated_total == 3.0);
    CHECK(art.metrics.covered_truth == 1.0);
    CHECK(art.metrics.valid_generated == 1.0);
    CHECK(art.truth_keys.size() == 4);
    CHECK(art.matrix.scores.size() == 12);

    const int live_completions = stub.completion_requests();
    const int live_embeddings = stub.embedding_requests();
    CHECK(live_completions > 0);

    ghl::RunConfig replay = cfg;
    replay.mode = ghl::GatewayMode::replay_only;
    replay.endpoint = "http://127.0.0.1:9/v1";
    replay.output_dir = dir / "out2";
    std::ostringstream replay_log;
    REQUIRE(ghl::cmd_run({replay, "", {}, {}}, replay_log) == ghl::kExitOk);
    CHECK_THAT(replay_log.str(), ContainsSubstring("live provider calls: 0"));
    CHECK(stub.completion_requests() == live_completions);
    CHECK(stub.embedding_requests() == live_embeddings);

    const auto first = ghl::generation_run_from_json(
        ghl::load_json_file(out / "minicorp/passwords/ghl/run-2/generation.json"));
    const auto second = ghl::generation_run_from_json(
        ghl::load_json_file(dir / "out2/minicorp/passwords/ghl/run-2/generation.json"));
    REQUIRE(first.cases.size() == second.cases.size());
    for (std::size_t i = 0; i < first.cases.size(); ++i)
        CHECK(first.cases[i].text == second.cases[i].text);
    for (const auto& t : second.transcripts) CHECK(t.from_cache);
    fs::remove_all(dir);
}

TEST_CASE("cmd_run narrows to the requested dataset, functions and strategies") {
    ghltest::StubProvider stub;
    stub.load_minicorp();
    EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
    auto dir = make_temp_dir();
    ghl::RunConfig cfg = stub_run_config(stub, dir);
    cfg.repeats = 1;

    std::ostringstream log;
    REQUIRE(ghl::cmd_run({cfg, "minicorp", {"passwords"}, {ghl::Strategy::zero_shot}}, log) ==
            ghl::kExitOk);
    CHECK(fs::exists(cfg.output_dir / "minicorp/passwords/zero-shot/run-1/generation.json"));
    CHECK_FALSE(fs::exists(cfg.output_dir / "minicorp/passwords/zero-shot/run-2"));
    CHECK_FALSE(fs::exists(cfg.output_dir / "minicorp/passwords/ghl"));
    CHECK_FALSE(fs::exists(cfg.output_dir / "minicorp/remotecontrol"));
    CHECK_THAT(log.str(), !ContainsSubstring("remotecontrol"));
    fs::remove_all(dir);
}

TEST_CASE("cmd_run maps each failure class to its exit code") {
    auto dir = make_temp_dir();

    SECTION("unknown dataset is a config error") {
        ghltest::StubProvider stub;
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "nope", {}, {}}, log) == ghl::kExitConfigInvalid);
        CHECK_THAT(log.str(), ContainsSubstring("error: dataset 'nope' not found"));
    }

    SECTION("unknown function is a config error") {
        ghltest::StubProvider stub;
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {"ghost"}, {}}, log) == ghl::kExitConfigInvalid);
        CHECK_THAT(log.str(),
                   ContainsSubstring("function 'ghost' is not part of dataset 'minicorp'"));
    }

    SECTION("no manifests configured is a config error") {
        ghltest::StubProvider stub;
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.manifests.clear();
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {}, {}}, log) == ghl::kExitConfigInvalid);
        CHECK_THAT(log.str(), ContainsSubstring("no dataset manifests"));
    }

    SECTION("replay without a cache file is a config error") {
        ghltest::StubProvider stub;
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.mode = ghl::GatewayMode::replay_only;
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {}, {}}, log) == ghl::kExitConfigInvalid);
        CHECK_THAT(log.str(), ContainsSubstring("replay-only mode needs an existing cache file"));
    }

    SECTION("replay against a cache missing the needed records") {
        ghltest::StubProvider stub;
        stub.load_minicorp();
        EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.repeats = 1;
        std::ostringstream warm_log;
        REQUIRE(ghl::cmd_run({cfg, "", {"passwords"}, {ghl::Strategy::zero_shot}}, warm_log) ==
                ghl::kExitOk);

        ghl::RunConfig replay = cfg;
        replay.mode = ghl::GatewayMode::replay_only;
        replay.output_dir = dir / "out_replay";
        std::ostringstream log;
        CHECK(ghl::cmd_run({replay, "", {"passwords"}, {ghl::Strategy::ghl}}, log) ==
              ghl::kExitCacheMiss);
        CHECK_THAT(log.str(), ContainsSubstring("error:"));
        CHECK_THAT(log.str(), ContainsSubstring("replay-only"));
    }

    SECTION("exhausted completion retries are absorbed as recorded failures") {
        ghltest::StubProvider stub;
        stub.load_minicorp();
        stub.force_status(500, 8, "boom");
        EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.repeats = 1;
        cfg.concurrency = 1;
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {"passwords"}, {ghl::Strategy::zero_shot}}, log) ==
              ghl::kExitOk);
        CHECK_THAT(log.str(), ContainsSubstring("failure zero_shot (chunk 0)"));
        CHECK_THAT(log.str(), ContainsSubstring("generated=0"));
    }

    SECTION("persistent embedding failure aborts the run") {
        ghltest::StubProvider stub;
        for (auto& s : ghltest::minicorp_completions()) stub.add_completion(s.needles, s.reply);
        EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.repeats = 1;
        cfg.concurrency = 1;
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {"passwords"}, {ghl::Strategy::zero_shot}}, log) ==
              ghl::kExitProviderFailure);
        CHECK_THAT(log.str(), ContainsSubstring("error:"));
    }

    SECTION("missing credential") {
        ghltest::StubProvider stub;
        stub.load_minicorp();
        ghl::RunConfig cfg = stub_run_config(stub, dir);
        cfg.credential_env = "GHL_UNSET_CMD_KEY";
        std::ostringstream log;
        CHECK(ghl::cmd_run({cfg, "", {"passwords"}, {ghl::Strategy::zero_shot}}, log) ==
              ghl::kExitProviderFailure);
        CHECK_THAT(log.str(), ContainsSubstring("GHL_UNSET_CMD_KEY"));
        CHECK(stub.completion_requests() == 0);
    }

    fs::remove_all(dir);
}

TEST_CASE("cmd_evaluate re-scores a stored generation artifact") {
    ghltest::StubProvider stub;
    stub.load_minicorp();
    EnvGuard key("GHL_TEST_KEY", "sk-cmd-test");
    auto dir = make_temp_dir();
    ghl::RunConfig cfg = stub_run_config(stub, dir);
    cfg.repeats = 1;
    std::ostringstream warm_log;
    REQUIRE(ghl::cmd_run({cfg, "", {"passwords"}, {ghl::Strategy::zero_shot}}, warm_log) ==
            ghl::kExitOk);
    const fs::path generation =
        cfg.output_dir / "minicorp/passwords/zero-shot/run-1/generation.json";

    ghl::RunConfig replay = cfg;
    replay.mode = ghl::GatewayMode::replay_only;
    replay.endpoint = "http://127.0.0.1:9/v1";

    ghl::EvaluateRequest request;
    request.config = replay;
    request.generation_file = generation;
    request.manifest = fixture_manifest();
    request.output_file = dir / "standalone_eval.json";
    std::ostringstream log;
    REQUIRE(ghl::cmd_evaluate(request, log) == ghl::kExitOk);
    CHECK_THAT(log.str(),
               ContainsSubstring("[passwords/zero-shot run 1] truth=4 generated=3 covered=1 "
                                 "valid=1 precision=0.33 recall=0.25 f1=0.29"));
    CHECK_THAT(log.str(),
               ContainsSubstring("evaluation written to " + request.output_file.string()));
    const auto art = ghl::evaluation_from_json(ghl::load_json_file(request.output_file));
    CHECK(art.metrics.covered_truth == 1.0);
    CHECK(art.metrics.valid_generated == 1.0);

    SECTION("generation artifact without cases") {
        ghl::GenerationRun empty;
        empty.function_key = "passwords";
        empty.strategy = ghl::Strategy::zero_shot;
        empty.run_index = 1;
        ghl::save_json_file(dir / "empty_gen.json", ghl::to_json(empty));
        request.generation_file = dir / "empty_gen.json";
        std::ostringstream err_log;
        CHECK(ghl::cmd_evaluate(request, err_log) == ghl::kExitFailure);
        CHECK_THAT(err_log.str(),
                   ContainsSubstring("generation artifact has no cases to evaluate"));
    }

    SECTION("artifact for a function the dataset does not know") {
        ghl::GenerationRun foreign;
        foreign.function_key = "ghost";
        foreign.strategy = ghl::Strategy::zero_shot;
        foreign.run_index = 1;
        foreign.cases.push_back({"Verify that something happens.", std::nullopt, {}});
        ghl::save_json_file(dir / "foreign_gen.json", ghl::to_json(foreign));
        request.generation_file = dir / "foreign_gen.json";
        std::ostringstream err_log;
        CHECK(ghl::cmd_evaluate(request, err_log) == ghl::kExitConfigInvalid);
        CHECK_THAT(err_log.str(),
                   ContainsSubstring("function 'ghost' is not part of dataset 'minicorp'"));
    }

    fs::remove_all(dir);
}

TEST_CASE("cmd_cache reports stats and verifies checksums") {
    auto dir = make_temp_dir();
    ghl::RunConfig cfg;
    cfg.cache_file = dir / "cache.bin";

    SECTION("missing file is not an error") {
        std::ostringstream log;
        CHECK(ghl::cmd_cache({cfg, "stats"}, log) == ghl::kExitOk);
        CHECK_THAT(log.str(), ContainsSubstring("cache file not found"));
    }

    SECTION("stats and verify on a populated store") {
        {
            ghl::CacheStore store(cfg.cache_file);
            store.put("c1", ghl::CacheKind::completion, {{"text", "a"}});
            store.put("e1", ghl::CacheKind::embedding, {{"vectors", nlohmann::json::array()}});
            store.put("e2", ghl::CacheKind::embedding, {{"vectors", nlohmann::json::array()}});
        }
        std::ostringstream stats_log;
        CHECK(ghl::cmd_cache({cfg, "stats"}, stats_log) == ghl::kExitOk);
        CHECK_THAT(stats_log.str(), ContainsSubstring("records: 3 (completions 1, embeddings 2)"));
        CHECK_THAT(stats_log.str(), ContainsSubstring(cfg.cache_file.string()));

        std::ostringstream verify_log;
        CHECK(ghl::cmd_cache({cfg, "verify"}, verify_log) == ghl::kExitOk);
        CHECK_THAT(verify_log.str(), ContainsSubstring("valid records: 3"));
        CHECK_THAT(verify_log.str(), ContainsSubstring("checksum failures: 0"));

        nlohmann::json forged{{"digest", "tampered"},
                              {"kind", "completion"},
                              {"payload", {{"text", "evil"}}},
                              {"created_at", "2026-01-01T00:00:00Z"},
                              {"checksum", "not-a-real-checksum"}};
        const std::string blob = forged.dump();
        const auto len = static_cast<std::uint32_t>(blob.size());
        std::ofstream out(cfg.cache_file, std::ios::binary | std::ios::app);
        out.write(reinterpret_cast<const char*>(&len), 4);
        out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        out.close();

        std::ostringstream bad_log;
        CHECK(ghl::cmd_cache({cfg, "verify"}, bad_log) == ghl::kExitFailure);
        CHECK_THAT(bad_log.str(), ContainsSubstring("checksum failures: 1"));
        CHECK_THAT(bad_log.str(), ContainsSubstring("warning:"));
    }

    SECTION("unknown action") {
        std::ostringstream log;
        CHECK(ghl::cmd_cache({cfg, "prune"}, log) == ghl::kExitConfigInvalid);
        CHECK_THAT(log.str(), ContainsSubstring("unknown cache action 'prune'"));
    }

    fs::remove_all(dir);
}
