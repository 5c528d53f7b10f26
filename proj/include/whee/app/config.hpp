#pragma once

// Operator configuration. Resolution order, highest first:
// command-line flag, WHEE_* environment variable, config file, default.

#include "whee/corpus.hpp"
#include "whee/cue_baseline.hpp"
#include "whee/llm_gateway.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace whee::app {

struct AppConfig {
    std::string provider = "mock";  ///< mock | http
    llm::ProviderConfig llm;
    std::string mock_script;
    std::string prompt_dir;
    std::string persona;  ///< empty keeps the builtin persona
    std::string few_shot_file;

    std::string lexicon;
    cues::Range lexicon_range{0.0, 1.0};
    double sentiment_threshold = cues::kDefaultSentimentThreshold;

    corpus::SplitSpec split;
    std::size_t concurrency = 4;
    double max_failure_rate = 0.05;

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
    std::string session_dir;  ///< empty keeps transcripts in memory only
    std::string static_dir;
    std::size_t max_text_chars = 2000;

    /// Throws ConfigError on out-of-range values or inconsistent settings.
    void validate() const;
};

/// Names accepted in config files; the matching environment variable is
/// WHEE_ plus the upper-cased name (e.g. base_url -> WHEE_BASE_URL).
const std::vector<std::string>& config_keys();

/// Applies one key. Throws llm::ConfigError for an unknown key or a bad value.
void apply_setting(AppConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment. Throws IoError or ConfigError
/// (with the line number).
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

AppConfig resolve_config(const std::optional<std::string>& config_path, const EnvLookup& env,
                         const std::map<std::string, std::string>& overrides);

/// Key/value dump for diagnostics. Never contains the credential itself.
std::string describe(const AppConfig& config);

/// Builds the provider named by the config. The http provider reads its
/// credential from the configured environment variable and throws ConfigError
/// when it is missing.
std::shared_ptr<llm::ChatProvider> make_provider(const AppConfig& config);
llm::PromptBuilder make_prompts(const AppConfig& config);
std::shared_ptr<llm::Gateway> make_gateway(const AppConfig& config);

} // namespace whee::app
