#pragma once

// Corpus ingestion, relabeling into the three empathy directions,
// deterministic conversation-atomic splits, and corpus statistics.

#include "whee/core_model.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace whee::corpus {

/// A schema names a field that is absent, or a record cannot be relabeled.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The corpus cannot support the requested operation (empty, too small, ...).
class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabeledUtterance {
    Utterance utterance;
    EmpathyDirection gold = EmpathyDirection::None;
    std::optional<EmpathyLevel> listener_level;  ///< only ever set on listener turns

    friend bool operator==(const LabeledUtterance&, const LabeledUtterance&) = default;
};

struct SplitSpec {
    double train_fraction = 0.8;
    double eval_fraction = 0.1;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
    /// Apply the split separately within each gold label of a conversation's first turn.
    bool stratify = false;

    /// Throws DomainError unless all fractions are positive and sum to 1 within 1e-9.
    void validate() const;
};

/// Which relabeling scheme turns raw rows into gold directions.
enum class SourceKind { Ex, Edr, Generic };

std::optional<SourceKind> parse_source_kind(std::string_view name);

/// Maps canonical roles to column names (tabular) or keys (line records).
/// Empty names are unmapped; `text`, `role` and `conversation` are required.
struct IngestSchema {
    std::string id;
    std::string conversation = "conversation_id";
    std::string turn = "turn_index";
    std::string role = "role";
    std::string text = "text";
    std::string label = "label";  ///< gold direction, used by Generic sources
    std::string level = "level";  ///< listener empathy level, used by Ex/Edr sources
    std::string source;           ///< per-row source tag, used by Generic sources
};

struct Reject {
    std::size_t line_number = 0;
    std::string reason;

    friend bool operator==(const Reject&, const Reject&) = default;
};

struct IngestResult {
    std::vector<LabeledUtterance> records;
    std::vector<Reject> rejects;
};

/// Reads a comma (.csv) or tab (.tsv) separated file with a header row, or a
/// line-delimited JSON file (.jsonl / .ndjson). Failing records land in rejects.
/// Throws IoError (unreadable), SchemaError (unknown field), CorpusError (no rows).
IngestResult ingest(const std::filesystem::path& path, const IngestSchema& schema, SourceKind kind);

/// Speaker opener -> Seeking; listener at level 2/3 -> Providing; else None.
EmpathyDirection relabel_ex(const LabeledUtterance& record, bool is_conversation_opener);

/// Speaker -> Seeking; listener level 1 -> None; listener level 2/3 -> Providing.
EmpathyDirection relabel_edr(const LabeledUtterance& record);

struct Split {
    std::vector<LabeledUtterance> train;
    std::vector<LabeledUtterance> eval;
    std::vector<LabeledUtterance> validation;
};

/// Largest-remainder allocation of `total` items over the three fractions.
std::array<std::size_t, 3> allocate_sizes(std::size_t total, const SplitSpec& spec);

/// Conversation-atomic deterministic split. Throws CorpusError below 3 conversations.
Split split(const std::vector<LabeledUtterance>& corpus, const SplitSpec& spec);

struct CorpusStats {
    std::size_t utterances = 0;
    std::size_t conversations = 0;
    std::size_t exchanges = 0;  ///< adjacent speaker -> listener turn pairs
    std::size_t max_words = 0;
    std::size_t over_word_advisory = 0;  ///< utterances longer than kWordAdvisory
    std::array<std::size_t, 3> per_label{};
    std::map<std::string, std::size_t> per_source;

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

inline constexpr std::size_t kWordAdvisory = 127;

CorpusStats corpus_stats(const std::vector<LabeledUtterance>& corpus);
std::string format_stats(const CorpusStats& stats);

// Canonical line-delimited record files.
std::string to_canonical_line(const LabeledUtterance& record);
LabeledUtterance from_canonical_line(std::string_view line);
void write_canonical(const std::filesystem::path& path, const std::vector<LabeledUtterance>& records);
std::vector<LabeledUtterance> read_canonical(const std::filesystem::path& path);
void write_rejects(const std::filesystem::path& path, const std::vector<Reject>& rejects);

} // namespace whee::corpus
