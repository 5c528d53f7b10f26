#pragma once

// Line-delimited record formats for predictions, gate outcomes and cue tables.

#include "whee/core_model.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace whee::records {

using ordered_json = nlohmann::ordered_json;

/// A cue profile with the class label it was observed under.
struct TaggedCues {
    std::string utterance_id;
    EmpathyDirection label = EmpathyDirection::None;
    PartialCueProfile cues;
};

ordered_json cues_json(const CueProfile& cues);
/// Only present cues are written.
ordered_json cues_json(const PartialCueProfile& cues);
/// Missing keys become unavailable cues. Throws DomainError on invalid values.
PartialCueProfile partial_cues_from_json(const nlohmann::json& j);
/// Throws DomainError if any cue is missing or invalid.
CueProfile cues_from_json(const nlohmann::json& j);

/// {utterance_id, label, cues, provider, attempts, raw_output}
ordered_json prediction_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

/// {utterance_id, label, cues, route, response_text, attempts, provider, raw_output}
ordered_json outcome_json(const GateOutcome& o);
GateOutcome outcome_from_json(const nlohmann::json& j);

/// {utterance_id, label, source, cues}
ordered_json cue_record_json(const TaggedCues& t, std::string_view source);

/// Reads cue-bearing records (predictions, outcomes or baseline cue records)
/// from a line-delimited file. Throws IoError or DomainError with a line number.
std::vector<TaggedCues> read_tagged_cues(const std::filesystem::path& path);

std::vector<Prediction> read_predictions(const std::filesystem::path& path);

/// Serializes one JSON value per line.
template <typename Range, typename Fn>
std::string to_lines(const Range& items, Fn&& to_json) {
    std::string out;
    for (const auto& item : items) {
        out += to_json(item).dump();
        out += '\n';
    }
    return out;
}

} // namespace whee::records
