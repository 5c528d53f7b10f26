#include "whee/llm_gateway.hpp"

#include <stdexcept>

namespace whee::llm {

void ProviderConfig::validate() const {
    if (max_retries < 1) throw ConfigError("max_retries must be at least 1");
    if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
    if (temperature < 0.0 || generation_temperature < 0.0) {
        throw ConfigError("temperature must be non-negative");
    }
    if (requests_per_second < 0.0) throw ConfigError("requests_per_second must be non-negative");
}

RetriesExhausted::RetriesExhausted(ParseError last_error, std::string raw, int attempts)
    : std::runtime_error("classification output unusable after " + std::to_string(attempts) +
                         " attempts: " + last_error.what()),
      last_error_(std::move(last_error)),
      raw_(std::move(raw)),
      attempts_(attempts) {}

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, ProviderConfig config, PromptBuilder prompts)
    : provider_(std::move(provider)), config_(std::move(config)), prompts_(std::move(prompts)) {
    if (!provider_) throw ConfigError("gateway needs a provider");
    config_.validate();
}

Prediction Gateway::classify(const Utterance& utterance) const {
    const PromptBundle bundle = prompts_.classification(utterance);
    ChatRequest request;
    request.messages = {{ChatRole::System, bundle.system_text}, {ChatRole::User, bundle.user_text}};
    request.temperature = config_.temperature;
    request.purpose = PromptPurpose::Classification;

    std::optional<ParseError> last_error;
    std::string last_raw;
    for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
        ChatReply reply = provider_->complete(request);
        try {
            Prediction p = parse_prediction(reply.content, utterance.id);
            p.provider = provider_->tag();
            p.attempts = attempt;
            return p;
        } catch (const ParseError& e) {
            last_error = e;
            last_raw = reply.content;
            request.messages.push_back({ChatRole::Assistant, reply.content});
            request.messages.push_back({ChatRole::User, prompts_.format_correction(e.what())});
        }
    }
    throw RetriesExhausted(*last_error, std::move(last_raw), config_.max_retries);
}

Generation Gateway::generate(const PromptBundle& bundle) const {
    if (bundle.purpose == PromptPurpose::Classification) {
        throw std::invalid_argument("generate needs a generation prompt bundle");
    }
    ChatRequest request;
    request.messages = {{ChatRole::System, bundle.system_text}, {ChatRole::User, bundle.user_text}};
    request.temperature = config_.generation_temperature;
    request.purpose = bundle.purpose;

    const auto start = std::chrono::steady_clock::now();
    ChatReply reply = provider_->complete(request);
    Generation g;
    g.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    g.text = std::string(trim(reply.content));
    g.usage = reply.usage;
    if (g.text.empty()) throw EmptyResponse();
    return g;
}

} // namespace whee::llm
