#pragma once

// Deterministic in-process chat provider. Used by the whole test suite and by
// `--provider mock`, so nothing here touches the network.

#include "whee/llm_gateway.hpp"

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace whee::llm {

struct MockReply {
    std::string content;
    std::optional<ProviderUnreachable::Cause> failure;

    static MockReply text(std::string content) { return {std::move(content), std::nullopt}; }
    static MockReply fail(ProviderUnreachable::Cause cause) { return {"", cause}; }
};

/// Scripted behaviour for one utterance text.
struct MockScriptEntry {
    std::string text;
    EmpathyDirection label = EmpathyDirection::None;
    std::optional<CueProfile> cues;
    std::vector<std::string> raw;  ///< per-attempt classification replies; last one repeats
    std::optional<std::string> response;
    std::optional<ProviderUnreachable::Cause> classify_failure;
    std::optional<ProviderUnreachable::Cause> generate_failure;
};

/// Cue profile the mock reports when a script gives only a label.
CueProfile default_mock_cues(EmpathyDirection label);

/// Hash-derived classification record and templated replies.
MockReply default_mock_reply(const ChatRequest& request);

class MockProvider : public ChatProvider {
public:
    using Responder = std::function<MockReply(const ChatRequest&)>;

    MockProvider();
    explicit MockProvider(Responder responder);

    /// Queued replies are served first, in FIFO order.
    void enqueue(MockReply reply);
    /// Scripted utterances take precedence over the responder.
    void add_script(MockScriptEntry entry);
    /// Loads line-delimited script entries. Throws IoError or std::invalid_argument.
    void load_script(const std::filesystem::path& path);

    ChatReply complete(const ChatRequest& request) override;
    std::string tag() const override { return "mock"; }

    std::vector<ChatRequest> calls() const;
    std::size_t call_count() const;

private:
    std::optional<MockReply> scripted(const ChatRequest& request);

    Responder responder_;
    mutable std::mutex mutex_;
    std::deque<MockReply> queue_;
    std::map<std::string, MockScriptEntry> script_;
    std::map<std::string, std::size_t> classify_attempts_;
    std::vector<ChatRequest> calls_;
};

} // namespace whee::llm
