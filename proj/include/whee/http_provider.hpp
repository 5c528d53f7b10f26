#pragma once

#include "whee/llm_gateway.hpp"

#include <chrono>
#include <mutex>
#include <string>

namespace whee::llm {

/// Chat-completions client speaking the common `messages` wire format:
/// POST {base_url}/chat/completions with model, messages and temperature.
class HttpChatProvider : public ChatProvider {
public:
    /// Reads the credential from config.api_key_env (skipped when that name is
    /// empty). Throws ConfigError when the variable is unset or the URL is invalid.
    explicit HttpChatProvider(ProviderConfig config);

    ChatReply complete(const ChatRequest& request) override;
    std::string tag() const override;

private:
    void wait_for_slot();

    ProviderConfig config_;
    std::string origin_;  ///< scheme://host[:port]
    std::string path_;    ///< path prefix plus /chat/completions
    std::string api_key_;
    std::mutex rate_mutex_;
    std::chrono::steady_clock::time_point next_slot_{};
};

} // namespace whee::llm
