#include "whee/records.hpp"

#include "whee/util.hpp"

#include <cmath>

namespace whee::records {

using json = nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("record lacks '") + key + "'");
    return j.at(key);
}

std::string string_field(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string()) throw DomainError(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

int code_field(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_integer()) throw DomainError(std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

double real_field(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number()) throw DomainError(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < -1.0 || d > 1.0) {
        throw DomainError(std::string("'") + key + "' must lie in [-1, 1]");
    }
    return d;
}

EmpathyDirection label_field(const json& j) {
    const auto label = parse_direction(string_field(j, "label"));
    if (!label) throw DomainError("unknown label");
    return *label;
}

} // namespace

ordered_json cues_json(const CueProfile& cues) { return cues_json(PartialCueProfile::from(cues)); }

ordered_json cues_json(const PartialCueProfile& cues) {
    ordered_json j = ordered_json::object();
    if (cues.who) j["who"] = static_cast<int>(*cues.who);
    if (cues.sentiment) j["sentiment"] = to_string(*cues.sentiment);
    if (cues.valence) j["valence"] = *cues.valence;
    if (cues.arousal) j["arousal"] = *cues.arousal;
    if (cues.emotional_reaction) j["emotional_reaction"] = static_cast<int>(*cues.emotional_reaction);
    if (cues.interpretation) j["interpretation"] = static_cast<int>(*cues.interpretation);
    if (cues.exploration) j["exploration"] = static_cast<int>(*cues.exploration);
    return j;
}

PartialCueProfile partial_cues_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("cues must be an object");
    PartialCueProfile p;
    if (j.contains("who")) p.who = who_from_code(code_field(j, "who"));
    if (j.contains("sentiment")) {
        p.sentiment = parse_sentiment(string_field(j, "sentiment"));
        if (!p.sentiment) throw DomainError("unknown sentiment");
    }
    if (j.contains("valence")) p.valence = real_field(j, "valence");
    if (j.contains("arousal")) p.arousal = real_field(j, "arousal");
    if (j.contains("emotional_reaction")) {
        p.emotional_reaction = level_from_code(code_field(j, "emotional_reaction"));
    }
    if (j.contains("interpretation")) p.interpretation = level_from_code(code_field(j, "interpretation"));
    if (j.contains("exploration")) p.exploration = level_from_code(code_field(j, "exploration"));
    return p;
}

CueProfile cues_from_json(const json& j) {
    const auto p = partial_cues_from_json(j);
    if (!p.who || !p.sentiment || !p.valence || !p.arousal || !p.emotional_reaction ||
        !p.interpretation || !p.exploration) {
        throw DomainError("cue record is incomplete");
    }
    return CueProfile(*p.who, *p.sentiment, *p.valence, *p.arousal, *p.emotional_reaction,
                      *p.interpretation, *p.exploration);
}

ordered_json prediction_json(const Prediction& p) {
    ordered_json j;
    j["utterance_id"] = p.utterance_id;
    j["label"] = to_string(p.label);
    j["cues"] = cues_json(p.cues);
    j["provider"] = p.provider;
    j["attempts"] = p.attempts;
    j["raw_output"] = p.raw_output;
    return j;
}

Prediction prediction_from_json(const json& j) {
    Prediction p{string_field(j, "utterance_id"), label_field(j), cues_from_json(field(j, "cues")),
                 j.value("provider", std::string{}), j.value("raw_output", std::string{}),
                 j.value("attempts", 1)};
    if (p.attempts < 1) throw DomainError("attempts must be at least 1");
    return p;
}

ordered_json outcome_json(const GateOutcome& o) {
    ordered_json j;
    j["utterance_id"] = o.utterance_id;
    j["label"] = to_string(o.prediction.label);
    j["cues"] = cues_json(o.prediction.cues);
    j["route"] = to_string(o.route);
    j["response_text"] = o.response_text;
    j["attempts"] = o.prediction.attempts;
    j["provider"] = o.prediction.provider;
    j["raw_output"] = o.prediction.raw_output;
    return j;
}

GateOutcome outcome_from_json(const json& j) {
    const auto route = parse_route(string_field(j, "route"));
    if (!route) throw DomainError("unknown route");
    Prediction p = prediction_from_json(j);
    GateOutcome o{p.utterance_id, *route, std::move(p), string_field(j, "response_text")};
    if ((o.route == Route::Empathetic) != (o.prediction.label == EmpathyDirection::Seeking)) {
        throw DomainError("outcome route does not match its label");
    }
    return o;
}

ordered_json cue_record_json(const TaggedCues& t, std::string_view source) {
    ordered_json j;
    j["utterance_id"] = t.utterance_id;
    j["label"] = to_string(t.label);
    j["source"] = source;
    j["cues"] = cues_json(t.cues);
    return j;
}

std::vector<TaggedCues> read_tagged_cues(const std::filesystem::path& path) {
    std::vector<TaggedCues> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            const json j = json::parse(lines[i]);
            out.push_back({string_field(j, "utterance_id"), label_field(j),
                           partial_cues_from_json(field(j, "cues"))});
        } catch (const std::exception& e) {
            throw DomainError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    std::vector<Prediction> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            out.push_back(prediction_from_json(json::parse(lines[i])));
        } catch (const std::exception& e) {
            throw DomainError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

} // namespace whee::records
