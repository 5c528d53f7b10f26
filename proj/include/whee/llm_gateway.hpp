#pragma once

// Prompt construction, chat-completion transport and structured-output
// parsing for empathy direction classification and response generation.

#include "whee/core_model.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whee::llm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProviderConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string model_name = "llama-3.3-70b-instruct";
    double temperature = 0.0;             ///< classification
    double generation_temperature = 0.7;  ///< empathetic and regular replies
    int max_retries = 3;                  ///< total provider calls allowed per classification
    std::chrono::milliseconds timeout{30000};
    std::string api_key_env = "WHEE_API_KEY";
    double requests_per_second = 0.0;  ///< 0 disables rate limiting

    /// Throws ConfigError on max_retries < 1, timeout <= 0 or negative temperatures.
    void validate() const;
};

enum class PromptPurpose { Classification, EmpatheticGeneration, RegularGeneration };

std::string_view to_string(PromptPurpose purpose) noexcept;

struct SchemaField {
    std::string name;
    std::string domain;

    friend bool operator==(const SchemaField&, const SchemaField&) = default;
};

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::vector<SchemaField> expected_schema;  ///< empty for generation bundles
    PromptPurpose purpose = PromptPurpose::Classification;
    std::string template_version;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// The eight fields of a classification record, in canonical order.
const std::vector<SchemaField>& classification_schema();

/// Template text with `{{name}}` placeholders. The builtin set is compiled in
/// from the prompt asset files.
struct PromptTemplates {
    std::string version;
    std::string classification_system;
    std::string classification_user;
    std::string empathetic_system;
    std::string empathetic_user;
    std::string regular_system;
    std::string regular_user;
    std::string format_correction;
    std::string persona;

    static const PromptTemplates& builtin();
    /// Reads `<name>.txt` files (and VERSION) from a directory; missing files
    /// fall back to the builtin text. Throws IoError on unreadable files.
    static PromptTemplates load_from_dir(const std::filesystem::path& dir);
};

/// Replaces every `{{name}}` in one pass. Throws std::invalid_argument for a
/// placeholder without a value.
std::string render_template(std::string_view tpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

/// Marker line preceding the JSON-encoded utterance in every prompt.
inline constexpr std::string_view kUtteranceMarker = "Utterance (JSON string literal):";

/// JSON string literal with backticks escaped so fenced blocks cannot be closed early.
std::string encode_utterance(std::string_view text);

/// Recovers the utterance embedded after kUtteranceMarker, if any.
std::optional<std::string> embedded_utterance(std::string_view prompt_text);

class PromptBuilder {
public:
    PromptBuilder();
    explicit PromptBuilder(PromptTemplates templates);

    PromptBuilder& with_persona(std::string persona);
    PromptBuilder& with_few_shot(std::string examples);

    PromptBundle classification(const Utterance& utterance) const;
    PromptBundle empathetic(const Utterance& utterance, const CueProfile& cues) const;
    PromptBundle regular(const Utterance& utterance) const;
    std::string format_correction(std::string_view error) const;

    const std::string& persona() const noexcept { return persona_; }
    const std::string& template_version() const noexcept { return templates_.version; }

private:
    PromptTemplates templates_;
    std::string persona_;
    std::string few_shot_;
};

PromptBundle build_classification_prompt(const Utterance& utterance);
PromptBundle build_empathetic_prompt(const Utterance& utterance, const CueProfile& cues);
PromptBundle build_regular_prompt(const Utterance& utterance);

// ---------------------------------------------------------------------------
// Structured records

class ParseError : public std::runtime_error {
public:
    enum class Kind { MissingField, OutOfDomain, Unparseable };

    ParseError(Kind kind, std::string field, std::string value);

    Kind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }
    const std::string& value() const noexcept { return value_; }

private:
    Kind kind_;
    std::string field_;
    std::string value_;
};

/// Canonical fenced record for a label and cue profile.
std::string render_record(EmpathyDirection label, const CueProfile& cues);

/// Extracts the first JSON object carrying a label from `raw` (surrounding prose
/// and code fences are tolerated) and validates every field.
/// The result keeps `raw` verbatim, has attempts = 1 and an empty provider tag.
Prediction parse_prediction(std::string_view raw, std::string utterance_id);

// ---------------------------------------------------------------------------
// Transport

enum class ChatRole { System, User, Assistant };

struct ChatMessage {
    ChatRole role = ChatRole::User;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    PromptPurpose purpose = PromptPurpose::Classification;  ///< not sent over the wire
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int total_tokens = 0;
};

struct ChatReply {
    std::string content;
    std::optional<TokenUsage> usage;
};

class ProviderUnreachable : public std::runtime_error {
public:
    enum class Cause { Connection, Timeout, HttpStatus, Protocol };

    ProviderUnreachable(Cause cause, const std::string& what, int status = 0)
        : std::runtime_error(what), cause_(cause), status_(status) {}

    Cause cause() const noexcept { return cause_; }
    int status() const noexcept { return status_; }

private:
    Cause cause_;
    int status_;
};

class EmptyResponse : public std::runtime_error {
public:
    EmptyResponse() : std::runtime_error("provider returned an empty response") {}
};

class RetriesExhausted : public std::runtime_error {
public:
    RetriesExhausted(ParseError last_error, std::string raw, int attempts);

    const ParseError& last_error() const noexcept { return last_error_; }
    const std::string& raw() const noexcept { return raw_; }
    int attempts() const noexcept { return attempts_; }

private:
    ParseError last_error_;
    std::string raw_;
    int attempts_;
};

/// A chat-completion endpoint. Implementations must be safe to call concurrently.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;

    /// Throws ProviderUnreachable on transport failure.
    virtual ChatReply complete(const ChatRequest& request) = 0;
    virtual std::string tag() const = 0;
};

struct Generation {
    std::string text;
    std::chrono::milliseconds latency{0};
    std::optional<TokenUsage> usage;
};

/// Classification and generation on top of a provider.
class Gateway {
public:
    Gateway(std::shared_ptr<ChatProvider> provider, ProviderConfig config,
            PromptBuilder prompts = PromptBuilder{});

    /// Sends the classification prompt; on a parse failure appends a format
    /// correction and retries, issuing at most config.max_retries calls.
    /// Throws ProviderUnreachable or RetriesExhausted.
    Prediction classify(const Utterance& utterance) const;

    /// Throws std::invalid_argument for classification bundles,
    /// ProviderUnreachable or EmptyResponse.
    Generation generate(const PromptBundle& bundle) const;

    const ProviderConfig& config() const noexcept { return config_; }
    const PromptBuilder& prompts() const noexcept { return prompts_; }
    ChatProvider& provider() const noexcept { return *provider_; }

private:
    std::shared_ptr<ChatProvider> provider_;
    ProviderConfig config_;
    PromptBuilder prompts_;
};

} // namespace whee::llm
