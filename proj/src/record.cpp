#include "whee/llm_gateway.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace whee::llm {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string describe(ParseError::Kind kind, const std::string& field, const std::string& value) {
    switch (kind) {
    case ParseError::Kind::MissingField: return "missing field '" + field + "'";
    case ParseError::Kind::OutOfDomain:
        return "field '" + field + "' has out-of-domain value " + value;
    case ParseError::Kind::Unparseable: break;
    }
    return "no structured record found" + (value.empty() ? std::string{} : ": " + value);
}

/// End index (inclusive) of the JSON object starting at `start`, honoring strings.
std::optional<std::size_t> matching_brace(std::string_view text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::nullopt;
}

const std::map<std::string, std::string, std::less<>>& key_aliases() {
    static const std::map<std::string, std::string, std::less<>> aliases{
        {"direction", "label"},
        {"empathy_direction", "label"},
        {"main_subject", "who"},
        {"emotional_reactions", "emotional_reaction"},
        {"interpretations", "interpretation"},
        {"explorations", "exploration"},
    };
    return aliases;
}

json normalize_keys(const json& obj) {
    json out = json::object();
    for (const auto& [key, value] : obj.items()) {
        auto k = ascii_lower(trim(key));
        if (auto it = key_aliases().find(k); it != key_aliases().end()) k = it->second;
        if (!out.contains(k)) out[k] = value;
    }
    return out;
}

/// First object with a label; otherwise the first object; otherwise nullopt.
std::optional<json> find_record(std::string_view raw) {
    std::optional<json> first_object;
    std::size_t pos = 0;
    while ((pos = raw.find('{', pos)) != std::string_view::npos) {
        const auto end = matching_brace(raw, pos);
        if (!end) {
            ++pos;
            continue;
        }
        json parsed = json::parse(raw.substr(pos, *end - pos + 1), nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            ++pos;
            continue;
        }
        json normalized = normalize_keys(parsed);
        if (normalized.contains("label")) return normalized;
        if (!first_object) first_object = std::move(normalized);
        ++pos;  // a wrapper object may hold the record
    }
    return first_object;
}

const json& require(const json& record, const std::string& field) {
    auto it = record.find(field);
    if (it == record.end() || it->is_null()) {
        throw ParseError(ParseError::Kind::MissingField, field, "");
    }
    return *it;
}

[[noreturn]] void out_of_domain(const std::string& field, const json& value) {
    throw ParseError(ParseError::Kind::OutOfDomain, field, value.dump());
}

std::optional<double> as_number(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = trim(v.get_ref<const std::string&>());
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec == std::errc{} && ptr == s.data() + s.size() && !s.empty()) return d;
    }
    return std::nullopt;
}

int small_code(const json& record, const std::string& field) {
    const json& v = require(record, field);
    const auto d = as_number(v);
    if (!d || !std::isfinite(*d) || std::floor(*d) != *d || *d < 0 || *d > 2) out_of_domain(field, v);
    return static_cast<int>(*d);
}

double unit_real(const json& record, const std::string& field) {
    const json& v = require(record, field);
    const auto d = as_number(v);
    if (!d || !std::isfinite(*d) || *d < -1.0 || *d > 1.0) out_of_domain(field, v);
    return *d;
}

} // namespace

ParseError::ParseError(Kind kind, std::string field, std::string value)
    : std::runtime_error(describe(kind, field, value)),
      kind_(kind),
      field_(std::move(field)),
      value_(std::move(value)) {}

std::string render_record(EmpathyDirection label, const CueProfile& cues) {
    ordered_json j;
    j["label"] = to_string(label);
    j["who"] = static_cast<int>(cues.who());
    j["sentiment"] = to_string(cues.sentiment());
    j["valence"] = cues.valence();
    j["arousal"] = cues.arousal();
    j["emotional_reaction"] = static_cast<int>(cues.emotional_reaction());
    j["interpretation"] = static_cast<int>(cues.interpretation());
    j["exploration"] = static_cast<int>(cues.exploration());
    return "```json\n" + j.dump() + "\n```";
}

Prediction parse_prediction(std::string_view raw, std::string utterance_id) {
    const auto record = find_record(raw);
    if (!record) throw ParseError(ParseError::Kind::Unparseable, "", "");

    const json& label_value = require(*record, "label");
    if (!label_value.is_string()) out_of_domain("label", label_value);
    const auto label = parse_direction(label_value.get<std::string>());
    if (!label) out_of_domain("label", label_value);

    const int who = small_code(*record, "who");

    const json& sentiment_value = require(*record, "sentiment");
    if (!sentiment_value.is_string()) out_of_domain("sentiment", sentiment_value);
    const auto sentiment = parse_sentiment(sentiment_value.get<std::string>());
    if (!sentiment) out_of_domain("sentiment", sentiment_value);

    const double valence = unit_real(*record, "valence");
    const double arousal = unit_real(*record, "arousal");
    const int reaction = small_code(*record, "emotional_reaction");
    const int interpretation = small_code(*record, "interpretation");
    const int exploration = small_code(*record, "exploration");

    return Prediction{std::move(utterance_id),
                      *label,
                      CueProfile(who_from_code(who), *sentiment, valence, arousal,
                                 level_from_code(reaction), level_from_code(interpretation),
                                 level_from_code(exploration)),
                      "",
                      std::string(raw),
                      1};
}

} // namespace whee::llm
