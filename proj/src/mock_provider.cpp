#include "whee/mock_provider.hpp"

#include "whee/util.hpp"

#include "json.hpp"

#include <stdexcept>

namespace whee::llm {

using json = nlohmann::json;

namespace {

std::string last_user_text(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == ChatRole::User && embedded_utterance(it->content)) return it->content;
    }
    return request.messages.empty() ? std::string{} : request.messages.back().content;
}

std::optional<ProviderUnreachable::Cause> parse_cause(const json& v) {
    if (!v.is_string()) return std::nullopt;
    const auto s = ascii_lower(v.get<std::string>());
    if (s == "timeout") return ProviderUnreachable::Cause::Timeout;
    if (s == "http") return ProviderUnreachable::Cause::HttpStatus;
    return ProviderUnreachable::Cause::Connection;
}

std::string default_reply_text(PromptPurpose purpose, const std::string& utterance) {
    if (purpose == PromptPurpose::EmpatheticGeneration) {
        return "I feel for you, that sounds like it meant a lot. It seems this really stayed with "
               "you. How are you feeling about it now?";
    }
    const auto pick = fnv1a64(utterance) % 3;
    static const char* const kRegular[] = {
        "Oh, that's interesting! Tell me more about it.",
        "Wow, I did not know that! What happened next?",
        "That sounds fun. What do you like most about it?",
    };
    return kRegular[pick];
}

[[noreturn]] void raise(ProviderUnreachable::Cause cause) {
    throw ProviderUnreachable(cause, cause == ProviderUnreachable::Cause::Timeout
                                         ? "mock provider timed out"
                                         : "mock provider unreachable");
}

} // namespace

CueProfile default_mock_cues(EmpathyDirection label) {
    switch (label) {
    case EmpathyDirection::Seeking:
        return CueProfile(Who::SelfFocus, Sentiment::Negative, -0.6, 0.7, MechanismLevel::Absent,
                          MechanismLevel::Strong, MechanismLevel::Absent);
    case EmpathyDirection::Providing:
        return CueProfile(Who::Partner, Sentiment::Positive, 0.5, 0.3, MechanismLevel::Weak,
                          MechanismLevel::Absent, MechanismLevel::Absent);
    case EmpathyDirection::None: break;
    }
    return CueProfile(Who::Other, Sentiment::Neutral, 0.0, 0.0, MechanismLevel::Absent,
                      MechanismLevel::Absent, MechanismLevel::Absent);
}

MockReply default_mock_reply(const ChatRequest& request) {
    const std::string utterance = embedded_utterance(last_user_text(request)).value_or("");
    if (request.purpose != PromptPurpose::Classification) {
        return MockReply::text(default_reply_text(request.purpose, utterance));
    }
    const std::uint64_t h = splitmix64(fnv1a64(utterance));
    auto field = [&](int shift, int modulo) { return static_cast<int>((h >> shift) % modulo); };
    const auto label = direction_from_code(field(0, 3));
    const double valence = (field(8, 201) - 100.0) / 100.0;
    const double arousal = (field(20, 201) - 100.0) / 100.0;
    const CueProfile cues(who_from_code(field(32, 3)), sentiment_from_code(field(36, 3)), valence,
                          arousal, level_from_code(field(40, 3)), level_from_code(field(44, 3)),
                          level_from_code(field(48, 3)));
    return MockReply::text(render_record(label, cues));
}

MockProvider::MockProvider() : MockProvider(default_mock_reply) {}

MockProvider::MockProvider(Responder responder) : responder_(std::move(responder)) {}

void MockProvider::enqueue(MockReply reply) {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(reply));
}

void MockProvider::add_script(MockScriptEntry entry) {
    std::lock_guard lock(mutex_);
    auto key = normalize_text(entry.text);
    script_.insert_or_assign(std::move(key), std::move(entry));
}

void MockProvider::load_script(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(i + 1) + ": ";
        const json j = json::parse(lines[i], nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
            throw std::invalid_argument(where + "script entries need a text field");
        }
        MockScriptEntry e;
        e.text = j["text"].get<std::string>();
        if (j.contains("label")) {
            const auto label = j["label"].is_string() ? parse_direction(j["label"].get<std::string>())
                                                      : std::nullopt;
            if (!label) throw std::invalid_argument(where + "unknown label");
            e.label = *label;
        }
        if (j.contains("cues")) {
            // Reuse the record parser so script cues obey the same domains.
            json record = j["cues"];
            record["label"] = to_string(e.label);
            try {
                e.cues = parse_prediction(record.dump(), "").cues;
            } catch (const std::exception& ex) {
                throw std::invalid_argument(where + ex.what());
            }
        }
        if (j.contains("raw")) {
            const auto& raw = j["raw"];
            if (raw.is_string()) {
                e.raw.push_back(raw.get<std::string>());
            } else if (raw.is_array()) {
                for (const auto& r : raw) e.raw.push_back(r.is_string() ? r.get<std::string>() : r.dump());
            }
        }
        if (j.contains("response") && j["response"].is_string()) e.response = j["response"].get<std::string>();
        if (j.contains("fail")) e.classify_failure = parse_cause(j["fail"]);
        if (j.contains("fail_generation")) e.generate_failure = parse_cause(j["fail_generation"]);
        add_script(std::move(e));
    }
}

std::optional<MockReply> MockProvider::scripted(const ChatRequest& request) {
    const auto utterance = embedded_utterance(last_user_text(request));
    if (!utterance) return std::nullopt;
    auto it = script_.find(normalize_text(*utterance));
    if (it == script_.end()) return std::nullopt;
    const auto& entry = it->second;

    if (request.purpose == PromptPurpose::Classification) {
        if (entry.classify_failure) return MockReply::fail(*entry.classify_failure);
        const std::size_t attempt = classify_attempts_[it->first]++;
        if (!entry.raw.empty()) return MockReply::text(entry.raw[std::min(attempt, entry.raw.size() - 1)]);
        return MockReply::text(render_record(entry.label, entry.cues.value_or(default_mock_cues(entry.label))));
    }
    if (entry.generate_failure) return MockReply::fail(*entry.generate_failure);
    if (entry.response) return MockReply::text(*entry.response);
    return std::nullopt;
}

ChatReply MockProvider::complete(const ChatRequest& request) {
    std::optional<MockReply> reply;
    {
        std::lock_guard lock(mutex_);
        calls_.push_back(request);
        if (!queue_.empty()) {
            reply = std::move(queue_.front());
            queue_.pop_front();
        } else {
            reply = scripted(request);
        }
    }
    if (!reply) reply = responder_(request);
    if (reply->failure) raise(*reply->failure);
    return ChatReply{reply->content, std::nullopt};
}

std::vector<ChatRequest> MockProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t MockProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

} // namespace whee::llm
