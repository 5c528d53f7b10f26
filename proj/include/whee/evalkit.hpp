#pragma once

// Scoring and descriptive reports for empathy-direction predictions.

#include "whee/core_model.hpp"
#include "whee/records.hpp"

#include "json.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace whee::eval {

/// counts[gold][predicted], indexed by direction_code.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t at(EmpathyDirection gold, EmpathyDirection pred) const noexcept {
        return counts[direction_code(gold)][direction_code(pred)];
    }
    std::size_t total() const noexcept;
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws DomainError on empty input or mismatched lengths.
ConfusionMatrix confusion(const std::vector<EmpathyDirection>& gold,
                          const std::vector<EmpathyDirection>& pred);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  ///< gold count
    bool precision_undefined = false;  ///< 0/0, reported as 0
    bool recall_undefined = false;
};

struct MacroScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::array<ClassScores, 3> per_class{};  ///< by direction_code
};

/// Throws DomainError for an empty matrix.
MacroScores macro_scores(const ConfusionMatrix& cm);

struct ClassAccuracy {
    double value = 0.0;
    bool empty_row = false;
};

/// Per-class recall, under the name used in the discussion of per-label accuracy.
std::array<ClassAccuracy, 3> per_class_accuracy(const ConfusionMatrix& cm);

// ---- cue distributions ----

struct ValueCount {
    int code = 0;
    std::string display;
    std::size_t count = 0;
    double proportion = 0.0;
};

struct CategoricalSummary {
    std::string cue;  ///< row name, e.g. "Who"
    bool available = false;
    std::size_t observed = 0;
    std::vector<ValueCount> values;  ///< every value in the domain, code order
    std::size_t mode = 0;  ///< index into values; ties go to the lower code
};

struct ContinuousSummary {
    std::string cue;
    bool available = false;
    std::size_t observed = 0;
    double mean = 0.0;
    double stddev = 0.0;  ///< population
};

struct CueDistribution {
    EmpathyDirection label = EmpathyDirection::None;
    std::size_t count = 0;
    bool empty = true;
    std::array<CategoricalSummary, 5> categorical;  ///< who, sentiment, three mechanisms
    std::array<ContinuousSummary, 2> continuous;  ///< valence, arousal
};

/// Distribution of cues among records carrying `label`. A class with no
/// records yields a report with empty = true rather than an error.
CueDistribution cue_distribution(const std::vector<records::TaggedCues>& items, EmpathyDirection label);
CueDistribution cue_distribution(const std::vector<Prediction>& predictions, EmpathyDirection label);

/// Aligned text table, one row per cue: count (proportion) and modal value,
/// then mean ± std rows for valence and arousal.
std::string format_distribution(const CueDistribution& d, const std::string& title = "");

nlohmann::ordered_json distribution_json(const CueDistribution& d);

// ---- paired source comparison ----

struct ComparisonRow {
    std::string cue;
    std::string value;
    std::optional<std::size_t> a;  ///< nullopt when the cue is unavailable in source A
    std::optional<std::size_t> b;
};

struct SourceComparison {
    std::string name_a;
    std::string name_b;
    std::optional<EmpathyDirection> label;
    std::size_t count_a = 0;
    std::size_t count_b = 0;
    std::vector<ComparisonRow> rows;
};

/// Valence and arousal bin edges for comparisons: [-1,-0.75), ..., [0.75,1].
inline constexpr int kAffectBins = 8;
int affect_bin(double value) noexcept;
std::string affect_bin_name(int bin);

/// Per-value frequencies of both sources side by side. Throws DomainError if
/// either side is empty after filtering.
SourceComparison compare_sources(const std::vector<records::TaggedCues>& a,
                                 const std::vector<records::TaggedCues>& b,
                                 std::optional<EmpathyDirection> label = std::nullopt,
                                 std::string name_a = "A", std::string name_b = "B");

std::string format_comparison(const SourceComparison& c);
nlohmann::ordered_json comparison_json(const SourceComparison& c);

// ---- external predictions ----

/// A malformed row in a predictions file.
class PredictionFileError : public DomainError {
public:
    PredictionFileError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct LabeledId {
    std::string id;
    EmpathyDirection label = EmpathyDirection::None;
};

struct PredictionFile {
    std::vector<LabeledId> rows;  ///< file order
    std::vector<std::string> unresolved;  ///< ids absent from the gold set
};

/// Reads {utterance_id, label} rows from .csv, .tsv or line-delimited JSON.
/// Labels are trimmed and case-folded. Throws PredictionFileError on an
/// unknown label or a repeated id, IoError when unreadable.
PredictionFile ingest_predictions(const std::filesystem::path& path,
                                  const std::vector<std::string>& gold_ids);

struct Alignment {
    std::vector<EmpathyDirection> gold;
    std::vector<EmpathyDirection> pred;
    std::vector<std::string> missing;  ///< gold ids without a prediction
    std::vector<std::string> unresolved;
};

/// Pairs predictions with gold labels in gold order.
Alignment align(const std::vector<LabeledId>& gold, const PredictionFile& predictions);

// ---- presentation ----

struct ScoreRow {
    std::string name;
    MacroScores scores;
};

/// p / r / F1 columns at four decimals; the best value of each column carries a '*'.
std::string format_score_table(const std::vector<ScoreRow>& rows, const std::string& title = "");
std::string format_confusion(const ConfusionMatrix& cm);
std::string format_accuracy(const std::array<ClassAccuracy, 3>& acc);

nlohmann::ordered_json scores_json(const std::string& name, const MacroScores& s,
                                   const ConfusionMatrix& cm);

} // namespace whee::eval
