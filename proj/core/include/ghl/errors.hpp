#pragma once

#include <stdexcept>
#include <string>

namespace ghl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ingestion and manifest problems (missing files, malformed records, bad IDs).
struct CorpusError : Error {
    using Error::Error;
};

/// Configuration file / option validation problems.
struct ConfigError : Error {
    using Error::Error;
};

/// Prompt template problems (unknown template, unbound placeholder).
struct TemplateError : Error {
    using Error::Error;
};

/// Generation pipeline problems not attributable to the provider.
struct PipelineError : Error {
    using Error::Error;
};

/// Evaluation problems (dimension mismatches, zero vectors, empty case sets).
struct EvalError : Error {
    using Error::Error;
};

/// Report rendering / emission problems.
struct ReportError : Error {
    using Error::Error;
};

}  // namespace ghl
