#pragma once

// Shared domain types for the empathy gating pipeline. No I/O lives here.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace whee {

/// Raised when a value falls outside its declared domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Role { Speaker, Listener };

enum class Source { EX, EDR, TalkingRoom, Synthetic, Live };

/// Three-label classification target. Integer codes are fixed for matrix indexing.
enum class EmpathyDirection : std::uint8_t { None = 0, Seeking = 1, Providing = 2 };

inline constexpr std::array<EmpathyDirection, 3> kAllDirections{
    EmpathyDirection::None, EmpathyDirection::Seeking, EmpathyDirection::Providing};

/// Main subject of an utterance.
enum class Who : std::uint8_t { SelfFocus = 0, Partner = 1, Other = 2 };

enum class Sentiment : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };

/// Strength of one of the three empathy communication mechanisms.
enum class MechanismLevel : std::uint8_t { Absent = 0, Weak = 1, Strong = 2 };

enum class Route { Empathetic, Regular };

/// Collapse of the three-level empathy scale.
enum class BinaryEmpathy { NonEmpathetic, Empathetic };

/// Listener empathy level on the three-level scale (1 little/none, 2 somewhat, 3 empathetic).
class EmpathyLevel {
public:
    explicit EmpathyLevel(int value);
    int value() const noexcept { return value_; }
    friend bool operator==(EmpathyLevel, EmpathyLevel) = default;

private:
    int value_;
};

struct Utterance {
    std::string id;
    std::string conversation_id;
    std::uint32_t turn_index = 0;
    Role role = Role::Speaker;
    std::string text;
    Source source = Source::Synthetic;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// Builds an utterance with normalized text. Throws DomainError on empty text.
Utterance make_utterance(std::string id, std::string conversation_id, std::uint32_t turn_index,
                         Role role, std::string_view text, Source source);

/// Trims, collapses internal whitespace runs to a single space, preserves case.
std::string normalize_text(std::string_view text);

/// Whitespace-delimited token count.
std::size_t word_count(std::string_view text);

/// The six empathy cues. Valence and arousal are stored on [-1, 1].
class CueProfile {
public:
    CueProfile(Who who, Sentiment sentiment, double valence, double arousal,
               MechanismLevel emotional_reaction, MechanismLevel interpretation,
               MechanismLevel exploration);

    Who who() const noexcept { return who_; }
    Sentiment sentiment() const noexcept { return sentiment_; }
    double valence() const noexcept { return valence_; }
    double arousal() const noexcept { return arousal_; }
    MechanismLevel emotional_reaction() const noexcept { return emotional_reaction_; }
    MechanismLevel interpretation() const noexcept { return interpretation_; }
    MechanismLevel exploration() const noexcept { return exploration_; }

    friend bool operator==(const CueProfile&, const CueProfile&) = default;

private:
    Who who_;
    Sentiment sentiment_;
    double valence_;
    double arousal_;
    MechanismLevel emotional_reaction_;
    MechanismLevel interpretation_;
    MechanismLevel exploration_;
};

/// Cue values where some cues may be unavailable (e.g. lexicon baseline has no
/// mechanism levels). Present values obey the same domains as CueProfile.
struct PartialCueProfile {
    std::optional<Who> who;
    std::optional<Sentiment> sentiment;
    std::optional<double> valence;
    std::optional<double> arousal;
    std::optional<MechanismLevel> emotional_reaction;
    std::optional<MechanismLevel> interpretation;
    std::optional<MechanismLevel> exploration;

    static PartialCueProfile from(const CueProfile& full);
    friend bool operator==(const PartialCueProfile&, const PartialCueProfile&) = default;
};

struct Prediction {
    std::string utterance_id;
    EmpathyDirection label = EmpathyDirection::None;
    CueProfile cues;
    std::string provider;
    std::string raw_output;
    int attempts = 1;
};

struct GateOutcome {
    std::string utterance_id;
    Route route = Route::Regular;
    Prediction prediction;
    std::string response_text;
};

int direction_code(EmpathyDirection label) noexcept;
EmpathyDirection direction_from_code(int code);

BinaryEmpathy collapse_level(EmpathyLevel level) noexcept;

// Canonical lowercase names used in files and wire formats.
std::string_view to_string(EmpathyDirection label) noexcept;
std::string_view to_string(Role role) noexcept;
std::string_view to_string(Source source) noexcept;
std::string_view to_string(Sentiment sentiment) noexcept;
std::string_view to_string(Route route) noexcept;
std::string_view to_string(MechanismLevel level) noexcept;

/// Case-insensitive, whitespace-tolerant parsing. Return nullopt on unknown names.
std::optional<EmpathyDirection> parse_direction(std::string_view name);
std::optional<Role> parse_role(std::string_view name);
std::optional<Source> parse_source(std::string_view name);
std::optional<Sentiment> parse_sentiment(std::string_view name);
std::optional<Route> parse_route(std::string_view name);

Who who_from_code(int code);
MechanismLevel level_from_code(int code);
Sentiment sentiment_from_code(int code);

// Report display strings (table row labels).
std::string_view display_name(Who who) noexcept;
std::string_view display_name(Sentiment sentiment) noexcept;
std::string_view display_name(MechanismLevel level) noexcept;
std::string_view display_name(EmpathyDirection label) noexcept;

std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s) noexcept;

} // namespace whee
