#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ghl/pipeline.hpp"
#include "ghl/run_config.hpp"

namespace ghl {

// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitCacheMiss = 3;
inline constexpr int kExitProviderFailure = 4;

struct RunRequest {
    RunConfig config;
    std::string dataset;                  // empty picks the sole configured manifest
    std::vector<std::string> functions;   // empty means every function
    std::vector<Strategy> strategies;     // empty means all three
};

// Generation + evaluation + report for one dataset. Artifacts land under
// <output_dir>/<dataset>/<function>/<strategy>/run-<n>/ and the report under
// <output_dir>/report/.
int cmd_run(const RunRequest& request, std::ostream& log);

struct EvaluateRequest {
    RunConfig config;
    std::filesystem::path generation_file;
    std::filesystem::path manifest;
    std::filesystem::path output_file;
};

// Standalone evaluation of a stored generation artifact.
int cmd_evaluate(const EvaluateRequest& request, std::ostream& log);

struct CacheRequest {
    RunConfig config;
    std::string action;  // "stats" or "verify"
};

int cmd_cache(const CacheRequest& request, std::ostream& log);

}  // namespace ghl
