#include "ghl/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ghl/cache.hpp"
#include "ghl/evaluator.hpp"
#include "ghl/http_gateway.hpp"
#include "ghl/reporter.hpp"
#include "ghl/run_artifacts.hpp"

namespace fs = std::filesystem;

namespace ghl {

namespace {

// Maps the in-flight exception to a process exit code. Call from a catch-all.
int handle_errors(std::ostream& log) {
    try {
        throw;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigInvalid;
    } catch (const CacheMissError& e) {
        log << "error: " << e.what() << '\n';
        return kExitCacheMiss;
    } catch (const AuthError& e) {
        log << "error: " << e.what() << '\n';
        return kExitProviderFailure;
    } catch (const ContextLengthError& e) {
        log << "error: " << e.what() << '\n';
        return kExitProviderFailure;
    } catch (const ProviderError& e) {
        log << "error: " << e.what() << '\n';
        return kExitProviderFailure;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

DatasetManifest select_manifest(const RunConfig& config, const std::string& dataset) {
    if (config.manifests.empty())
        throw ConfigError("config lists no dataset manifests under paths.manifests");
    std::vector<DatasetManifest> loaded;
    for (const auto& path : config.manifests) loaded.push_back(load_manifest(path));
    if (dataset.empty()) {
        if (loaded.size() == 1) return loaded.front();
        std::string names;
        for (const auto& m : loaded) names += (names.empty() ? "" : ", ") + m.dataset_name;
        throw ConfigError("several datasets are configured (" + names +
                          "); pick one with --dataset");
    }
    for (auto& m : loaded)
        if (m.dataset_name == dataset) return std::move(m);
    std::string names;
    for (const auto& m : loaded) names += (names.empty() ? "" : ", ") + m.dataset_name;
    throw ConfigError("dataset '" + dataset + "' not found; configured datasets: " + names);
}

std::vector<FunctionEntry> select_functions(const DatasetManifest& manifest,
                                            const std::vector<std::string>& requested) {
    if (requested.empty()) return manifest.functions;
    std::vector<FunctionEntry> out;
    for (const auto& key : requested) {
        auto it = std::find_if(manifest.functions.begin(), manifest.functions.end(),
                               [&](const FunctionEntry& f) { return f.function_key == key; });
        if (it == manifest.functions.end())
            throw ConfigError("function '" + key + "' is not part of dataset '" +
                              manifest.dataset_name + "'");
        out.push_back(*it);
    }
    return out;
}

std::vector<Strategy> select_strategies(const std::vector<Strategy>& requested) {
    std::vector<Strategy> all{Strategy::zero_shot, Strategy::ghl, Strategy::ghl_f};
    if (requested.empty()) return all;
    std::vector<Strategy> out;
    for (Strategy s : all)
        if (std::find(requested.begin(), requested.end(), s) != requested.end())
            out.push_back(s);
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct FunctionData {
    FunctionEntry entry;
    RequirementDocument doc;
    std::optional<TestStrategyDocument> strategy_doc;
    std::vector<TruthTestCase> truth;
};

FunctionData load_function(const FunctionEntry& entry) {
    FunctionData data;
    data.entry = entry;
    std::string body;
    for (const auto& path : entry.requirement_paths) {
        if (!body.empty()) body += "\n\n";
        body += read_file(path);
    }
    data.doc = ingest_requirement_text(std::move(body), entry.function_key);
    if (entry.strategy_path) data.strategy_doc = ingest_strategy(*entry.strategy_path);
    data.truth = ingest_truth_cases(entry.truth_path, entry.id_scheme, entry.function_key);
    if (data.truth.empty())
        throw CorpusError("truth file has no cases: " + entry.truth_path.string());
    return data;
}

// Runs fn(0..n-1) on up to `workers` threads; the first exception wins and is
// rethrown on the caller thread after all workers drain.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (thread_count == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct ItemResult {
    std::vector<GenerationRun> runs;
    std::vector<EvaluationArtifact> evaluations;
};

EvaluationArtifact evaluate_run(const GenerationRun& run, const std::vector<TruthTestCase>& truth,
                                Gateway& gateway, const EvaluatorOptions& options,
                                const MatchRule& rule, const std::string& embedding_model) {
    std::vector<std::string> truth_texts, generated_texts;
    truth_texts.reserve(truth.size());
    for (const auto& t : truth) truth_texts.push_back(t.description);
    generated_texts.reserve(run.cases.size());
    for (const auto& c : run.cases) generated_texts.push_back(c.text);

    EvaluationArtifact art;
    art.function_key = run.function_key;
    art.strategy = run.strategy;
    art.run_index = run.run_index;
    art.embedding_model = embedding_model;
    art.rule = rule;
    for (const auto& t : truth) art.truth_keys.push_back(t.case_key);
    art.generated_texts = generated_texts;
    art.matrix = build_similarity_matrix(truth_texts, generated_texts, gateway, options);
    art.matches = match_threshold(art.matrix, rule);
    art.metrics = compute_metrics_from_counts(
        static_cast<double>(art.matrix.truth_count), static_cast<double>(art.matrix.generated_count),
        static_cast<double>(art.matches.covered_truth),
        static_cast<double>(art.matches.valid_generated), run.duration_s);
    return art;
}

}  // namespace

int cmd_run(const RunRequest& request, std::ostream& log) {
    try {
        const RunConfig& config = request.config;
        validate(config);

        const DatasetManifest manifest = select_manifest(config, request.dataset);
        const std::vector<FunctionEntry> entries =
            select_functions(manifest, request.functions);
        const std::vector<Strategy> strategies = select_strategies(request.strategies);

        auto cache = std::make_shared<CacheStore>(config.cache_file);
        for (const auto& w : cache->warnings()) log << "warning: " << w << '\n';

        HttpGateway gateway(gateway_config(config), cache);
        const TemplateStore templates = config.template_dir.empty()
                                            ? TemplateStore()
                                            : TemplateStore::with_overrides(config.template_dir);
        const GenerationPipeline pipeline(gateway, templates, gen_options(config));
        const MatchRule rule = match_rule(config);
        const EvaluatorOptions eval_options = evaluator_options(config);

        std::vector<FunctionData> functions;
        functions.reserve(entries.size());
        for (const auto& entry : entries) functions.push_back(load_function(entry));

        struct Item {
            std::size_t function_index;
            Strategy strategy;
        };
        std::vector<Item> items;
        for (std::size_t f = 0; f < functions.size(); ++f)
            for (Strategy s : strategies) items.push_back({f, s});
        std::vector<ItemResult> results(items.size());

        const fs::path dataset_dir = config.output_dir / manifest.dataset_name;
        parallel_for(items.size(), config.concurrency, [&](std::size_t i) {
            const Item& item = items[i];
            const FunctionData& fn = functions[item.function_index];
            ItemResult& result = results[i];
            for (int r = 1; r <= config.repeats; ++r) {
                GenerationRun run = pipeline.run(item.strategy, fn.doc, fn.strategy_doc, r);
                const fs::path run_dir = dataset_dir / fn.entry.function_key /
                                         to_string(item.strategy) /
                                         ("run-" + std::to_string(r));
                save_json_file(run_dir / "generation.json", to_json(run));
                EvaluationArtifact art = evaluate_run(run, fn.truth, gateway, eval_options, rule,
                                                      config.embedding_model);
                save_json_file(run_dir / "evaluation.json", to_json(art));
                result.runs.push_back(std::move(run));
                result.evaluations.push_back(std::move(art));
            }
        });

        DatasetReport report;
        report.dataset_name = manifest.dataset_name;
        report.bin_width = config.bin_width;
        report.threshold_marker = config.threshold;
        for (Strategy strategy : strategies) {
            std::vector<StrategyFunctionReport> rows;
            for (std::size_t f = 0; f < functions.size(); ++f) {
                auto it = std::find_if(items.begin(), items.end(), [&](const Item& item) {
                    return item.function_index == f && item.strategy == strategy;
                });
                const ItemResult& result = results[static_cast<std::size_t>(it - items.begin())];

                StrategyFunctionReport row;
                row.function_key = functions[f].entry.function_key;
                std::vector<MetricsSummary> run_metrics;
                for (const auto& art : result.evaluations) run_metrics.push_back(art.metrics);
                row.runs = run_metrics;
                row.aggregate = aggregate_runs(run_metrics);
                for (const auto& run : result.runs) {
                    for (const auto& t : run.techniques_used) {
                        bool known = std::any_of(
                            row.techniques.begin(), row.techniques.end(),
                            [&](const TestDesignTechnique& k) { return k.name == t.name; });
                        if (!known) row.techniques.push_back(t);
                    }
                    row.failures.insert(row.failures.end(), run.failures.begin(),
                                        run.failures.end());
                }
                const EvaluationArtifact& last = result.evaluations.back();
                row.truth_keys = last.truth_keys;
                row.generated_texts = last.generated_texts;
                row.matrix = last.matrix;
                row.rule = last.rule;
                rows.push_back(std::move(row));
            }
            report.strategies.emplace_back(strategy, std::move(rows));
        }
        write_report(config.output_dir / "report", report);

        for (const auto& [strategy, rows] : report.strategies) {
            for (const auto& row : rows) {
                const auto& m = row.aggregate;
                log << "[" << manifest.dataset_name << "/" << row.function_key << "/"
                    << to_string(strategy) << "] generated=" << format_count(m.generated_total)
                    << " precision=" << format_ratio(m.precision)
                    << " recall=" << format_ratio(m.recall) << " f1=" << format_ratio(m.f1)
                    << '\n';
                for (const auto& f : row.failures)
                    log << "  failure " << f.stage << " (chunk " << f.chunk_index
                        << "): " << f.message << '\n';
            }
        }
        log << "report written to " << (config.output_dir / "report").string() << '\n';
        log << "live provider calls: " << gateway.live_call_count() << '\n';
        return kExitOk;
    } catch (...) {
        return handle_errors(log);
    }
}

int cmd_evaluate(const EvaluateRequest& request, std::ostream& log) {
    try {
        const RunConfig& config = request.config;
        validate(config);

        const GenerationRun run =
            generation_run_from_json(load_json_file(request.generation_file));
        if (run.cases.empty())
            throw EvalError("generation artifact has no cases to evaluate: " +
                            request.generation_file.string());

        const DatasetManifest manifest = load_manifest(request.manifest);
        auto it = std::find_if(
            manifest.functions.begin(), manifest.functions.end(),
            [&](const FunctionEntry& f) { return f.function_key == run.function_key; });
        if (it == manifest.functions.end())
            throw ConfigError("function '" + run.function_key + "' is not part of dataset '" +
                              manifest.dataset_name + "'");
        const std::vector<TruthTestCase> truth =
            ingest_truth_cases(it->truth_path, it->id_scheme, it->function_key);
        if (truth.empty())
            throw CorpusError("truth file has no cases: " + it->truth_path.string());

        auto cache = std::make_shared<CacheStore>(config.cache_file);
        for (const auto& w : cache->warnings()) log << "warning: " << w << '\n';
        HttpGateway gateway(gateway_config(config), cache);

        EvaluationArtifact art = evaluate_run(run, truth, gateway, evaluator_options(config),
                                              match_rule(config), config.embedding_model);
        save_json_file(request.output_file, to_json(art));

        const auto& m = art.metrics;
        log << "[" << run.function_key << "/" << to_string(run.strategy)
            << " run " << run.run_index << "] truth=" << format_count(m.truth_total)
            << " generated=" << format_count(m.generated_total)
            << " covered=" << format_count(m.covered_truth)
            << " valid=" << format_count(m.valid_generated)
            << " precision=" << format_ratio(m.precision) << " recall=" << format_ratio(m.recall)
            << " f1=" << format_ratio(m.f1) << '\n';
        log << "evaluation written to " << request.output_file.string() << '\n';
        return kExitOk;
    } catch (...) {
        return handle_errors(log);
    }
}

int cmd_cache(const CacheRequest& request, std::ostream& log) {
    try {
        if (request.action != "stats" && request.action != "verify")
            throw ConfigError("unknown cache action '" + request.action +
                              "' (expected stats or verify)");
        const fs::path& file = request.config.cache_file;
        if (!fs::exists(file)) {
            log << "cache file not found: " << file.string() << '\n';
            return kExitOk;
        }
        const CacheStore store(file);
        if (request.action == "stats") {
            log << "cache file: " << file.string() << '\n';
            log << "size: " << fs::file_size(file) << " bytes\n";
            log << "records: " << store.size() << " (completions "
                << store.count(CacheKind::completion) << ", embeddings "
                << store.count(CacheKind::embedding) << ")\n";
            for (const auto& w : store.warnings()) log << "warning: " << w << '\n';
            return kExitOk;
        }
        const CacheVerifyReport report = store.verify();
        log << "valid records: " << report.valid_records << '\n';
        log << "checksum failures: " << report.checksum_failures << '\n';
        for (const auto& w : report.warnings) log << "warning: " << w << '\n';
        return report.checksum_failures == 0 ? kExitOk : kExitFailure;
    } catch (...) {
        return handle_errors(log);
    }
}

}  // namespace ghl
