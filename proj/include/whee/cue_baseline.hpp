#pragma once

// Lexicon baseline for the affective cues: valence/arousal from a word-level
// affect lexicon and sentiment polarity from a valence dead-band.

#include "whee/core_model.hpp"
#include "whee/corpus.hpp"

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace whee::cues {

struct Range {
    double low = 0.0;
    double high = 1.0;
};

struct AffectScore {
    double valence = 0.0;
    double arousal = 0.0;

    friend bool operator==(const AffectScore&, const AffectScore&) = default;
};

/// Word-level affect lexicon. Entries are kept on [-1, 1]; the native range
/// is remembered for provenance.
class AffectLexicon {
public:
    AffectLexicon(std::string name, Range native_range);

    /// Adds an entry given in the native range, rescaling it to [-1, 1].
    /// Returns false if the token already exists. Throws DomainError when the
    /// token is empty or a value lies outside the native range.
    bool add(std::string_view token, double valence, double arousal);

    const AffectScore* find(std::string_view token) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::string& name() const noexcept { return name_; }
    Range native_range() const noexcept { return native_range_; }

private:
    std::string name_;
    Range native_range_;
    std::unordered_map<std::string, AffectScore> entries_;
};

struct LexiconLoad {
    AffectLexicon lexicon;
    std::vector<corpus::Reject> rejects;
};

/// Reads `token<TAB>valence<TAB>arousal` rows (commas accepted, extra columns
/// such as dominance ignored, optional header). Bad rows are rejected with
/// their line number. Throws IoError if the file cannot be read.
LexiconLoad load_lexicon(const std::filesystem::path& path, Range native_range);

/// Lowercases ASCII and splits on runs of non-alphanumeric bytes. Bytes above
/// 0x7F are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Mean valence/arousal over tokens found in the lexicon; (0, 0) when none match.
AffectScore score_vad(std::string_view text, const AffectLexicon& lexicon);

inline constexpr double kDefaultSentimentThreshold = 0.15;

/// Negative below -threshold, Positive above +threshold, Neutral otherwise.
Sentiment score_sentiment(double valence, double threshold = kDefaultSentimentThreshold);

/// Valence, arousal and sentiment; who and the mechanism levels stay unavailable.
PartialCueProfile baseline_profile(std::string_view text, const AffectLexicon& lexicon,
                                   double threshold = kDefaultSentimentThreshold);

} // namespace whee::cues
