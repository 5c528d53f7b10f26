#pragma once

// Pipeline subcommands. Each returns a process exit code and writes its
// human-readable summary to `out`, diagnostics to `err`.

#include "whee/app/config.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace whee::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitIo = 3,
    kExitValidation = 4,
    kExitProvider = 5,
};

/// Bad or missing command-line input.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IngestOptions {
    std::string input;
    std::string source;  ///< ex | edr | generic
    std::string output;
    std::string rejects;  ///< defaults to <output>.rejects.jsonl
    corpus::IngestSchema schema;
};

struct SplitOptions {
    std::string corpus;
    std::string out_dir;
};

struct ClassifyOptions {
    std::string corpus;
    std::string output;
    bool speakers_only = false;
};

struct ExtractOptions {
    std::string corpus;
    std::string output;
};

struct EvaluateOptions {
    std::string gold;
    std::vector<std::string> predictions;
    std::vector<std::string> names;  ///< row names; default is the file stem
    std::vector<std::string> compare;  ///< exactly two cue-record files when set
    std::string compare_label;  ///< optional class filter for --compare
    std::string report;  ///< optional line-delimited JSON report
    bool strict = false;  ///< id mismatches become a validation failure
};

struct GateRunOptions {
    std::string corpus;
    std::string output;
    std::string response_cues_dir;  ///< classify generated replies and write cue records here
};

struct ServeOptions {
    std::optional<std::string> host;
    std::optional<int> port;
};

int cmd_ingest(const AppConfig& config, const IngestOptions& opt, std::ostream& out, std::ostream& err);
int cmd_split(const AppConfig& config, const SplitOptions& opt, std::ostream& out, std::ostream& err);
int cmd_classify(const AppConfig& config, const ClassifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_extract_cues(const AppConfig& config, const ExtractOptions& opt, std::ostream& out, std::ostream& err);
int cmd_evaluate(const AppConfig& config, const EvaluateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_gate_run(const AppConfig& config, const GateRunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_serve(const AppConfig& config, const ServeOptions& opt, std::ostream& out, std::ostream& err);

/// Maps an in-flight exception to an exit code and prints it to `err`.
int report_exception(std::ostream& err);

} // namespace whee::app
