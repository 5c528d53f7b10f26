#include "whee/http_provider.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <thread>

namespace whee::llm {

using json = nlohmann::json;

namespace {

std::string_view role_name(ChatRole role) {
    switch (role) {
    case ChatRole::System: return "system";
    case ChatRole::Assistant: return "assistant";
    case ChatRole::User: break;
    }
    return "user";
}

} // namespace

HttpChatProvider::HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto& url = config_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported scheme: " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/chat/completions";

    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key) {
            throw ConfigError("credential environment variable " + config_.api_key_env + " is not set");
        }
        api_key_ = key;
    }
}

std::string HttpChatProvider::tag() const { return "http:" + config_.model_name; }

void HttpChatProvider::wait_for_slot() {
    if (config_.requests_per_second <= 0.0) return;
    const auto spacing = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / config_.requests_per_second));
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(rate_mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_slot_);
        next_slot_ = slot + spacing;
    }
    std::this_thread::sleep_until(slot);
}

ChatReply HttpChatProvider::complete(const ChatRequest& request) {
    json body;
    body["model"] = config_.model_name;
    body["temperature"] = request.temperature;
    body["messages"] = json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }

    wait_for_slot();

    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path_, headers, body.dump(), "application/json");
    if (!result) {
        const auto err = result.error();
        // httplib reports a read timeout as a plain read error
        const bool slow = std::chrono::steady_clock::now() - started >= config_.timeout;
        if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && slow)) {
            throw ProviderUnreachable(ProviderUnreachable::Cause::Timeout,
                                      "provider timed out: " + httplib::to_string(err));
        }
        throw ProviderUnreachable(ProviderUnreachable::Cause::Connection,
                                  "provider unreachable: " + httplib::to_string(err));
    }
    if (result->status != 200) {
        throw ProviderUnreachable(ProviderUnreachable::Cause::HttpStatus,
                                  "provider returned HTTP " + std::to_string(result->status),
                                  result->status);
    }

    const json reply = json::parse(result->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty()) {
        throw ProviderUnreachable(ProviderUnreachable::Cause::Protocol, "malformed provider payload");
    }
    const auto& choice = reply["choices"][0];
    if (!choice.is_object() || !choice.contains("message")) {
        throw ProviderUnreachable(ProviderUnreachable::Cause::Protocol, "provider reply has no message");
    }
    const auto& message = choice["message"];
    ChatReply out;
    if (message.is_object() && message.contains("content") && message["content"].is_string()) {
        out.content = message["content"].get<std::string>();
    }
    if (reply.contains("usage") && reply["usage"].is_object()) {
        const auto& u = reply["usage"];
        TokenUsage usage;
        usage.prompt_tokens = u.value("prompt_tokens", 0);
        usage.completion_tokens = u.value("completion_tokens", 0);
        usage.total_tokens = u.value("total_tokens", usage.prompt_tokens + usage.completion_tokens);
        out.usage = usage;
    }
    return out;
}

} // namespace whee::llm
