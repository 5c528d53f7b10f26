#include "whee/core_model.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace whee {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

void check_unit_interval(const char* name, double value) {
    if (!std::isfinite(value) || value < -1.0 || value > 1.0) {
        std::ostringstream os;
        os << name << " must lie in [-1, 1], got " << value;
        throw DomainError(os.str());
    }
}

template <typename Enum>
void check_enum(const char* name, Enum value, int max_code) {
    const int code = static_cast<int>(value);
    if (code < 0 || code > max_code) {
        throw DomainError(std::string(name) + " has invalid code " + std::to_string(code));
    }
}

} // namespace

EmpathyLevel::EmpathyLevel(int value) : value_(value) {
    if (value < 1 || value > 3) {
        throw DomainError("empathy level must be 1, 2 or 3, got " + std::to_string(value));
    }
}

std::string_view trim(std::string_view s) noexcept {
    std::size_t begin = 0;
    while (begin < s.size() && is_space(s[begin])) ++begin;
    std::size_t end = s.size();
    while (end > begin && is_space(s[end - 1])) --end;
    return s.substr(begin, end - begin);
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : trim(text)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

Utterance make_utterance(std::string id, std::string conversation_id, std::uint32_t turn_index,
                         Role role, std::string_view text, Source source) {
    Utterance u;
    u.text = normalize_text(text);
    if (u.text.empty()) throw DomainError("empty text");
    u.id = std::move(id);
    u.conversation_id = std::move(conversation_id);
    u.turn_index = turn_index;
    u.role = role;
    u.source = source;
    return u;
}

CueProfile::CueProfile(Who who, Sentiment sentiment, double valence, double arousal,
                       MechanismLevel emotional_reaction, MechanismLevel interpretation,
                       MechanismLevel exploration)
    : who_(who),
      sentiment_(sentiment),
      valence_(valence),
      arousal_(arousal),
      emotional_reaction_(emotional_reaction),
      interpretation_(interpretation),
      exploration_(exploration) {
    check_enum("who", who, 2);
    check_enum("sentiment", sentiment, 2);
    check_unit_interval("valence", valence);
    check_unit_interval("arousal", arousal);
    check_enum("emotional_reaction", emotional_reaction, 2);
    check_enum("interpretation", interpretation, 2);
    check_enum("exploration", exploration, 2);
}

PartialCueProfile PartialCueProfile::from(const CueProfile& full) {
    return PartialCueProfile{full.who(),         full.sentiment(),          full.valence(),
                             full.arousal(),     full.emotional_reaction(), full.interpretation(),
                             full.exploration()};
}

int direction_code(EmpathyDirection label) noexcept { return static_cast<int>(label); }

EmpathyDirection direction_from_code(int code) {
    if (code < 0 || code > 2) throw DomainError("direction code must be 0, 1 or 2");
    return static_cast<EmpathyDirection>(code);
}

BinaryEmpathy collapse_level(EmpathyLevel level) noexcept {
    return level.value() == 1 ? BinaryEmpathy::NonEmpathetic : BinaryEmpathy::Empathetic;
}

std::string_view to_string(EmpathyDirection label) noexcept {
    switch (label) {
    case EmpathyDirection::Seeking: return "seeking";
    case EmpathyDirection::Providing: return "providing";
    case EmpathyDirection::None: break;
    }
    return "none";
}

std::string_view to_string(Role role) noexcept {
    return role == Role::Speaker ? "speaker" : "listener";
}

std::string_view to_string(Source source) noexcept {
    switch (source) {
    case Source::EX: return "ex";
    case Source::EDR: return "edr";
    case Source::TalkingRoom: return "talking_room";
    case Source::Live: return "live";
    case Source::Synthetic: break;
    }
    return "synthetic";
}

std::string_view to_string(Sentiment sentiment) noexcept {
    switch (sentiment) {
    case Sentiment::Negative: return "negative";
    case Sentiment::Positive: return "positive";
    case Sentiment::Neutral: break;
    }
    return "neutral";
}

std::string_view to_string(Route route) noexcept {
    return route == Route::Empathetic ? "empathetic" : "regular";
}

std::string_view to_string(MechanismLevel level) noexcept {
    switch (level) {
    case MechanismLevel::Weak: return "weak";
    case MechanismLevel::Strong: return "strong";
    case MechanismLevel::Absent: break;
    }
    return "absent";
}

std::optional<EmpathyDirection> parse_direction(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "none") return EmpathyDirection::None;
    if (key == "seeking") return EmpathyDirection::Seeking;
    if (key == "providing") return EmpathyDirection::Providing;
    return std::nullopt;
}

std::optional<Role> parse_role(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "s" || key == "speaker") return Role::Speaker;
    if (key == "l" || key == "listener") return Role::Listener;
    return std::nullopt;
}

std::optional<Source> parse_source(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "ex") return Source::EX;
    if (key == "edr") return Source::EDR;
    if (key == "talking_room" || key == "talkingroom") return Source::TalkingRoom;
    if (key == "synthetic") return Source::Synthetic;
    if (key == "live") return Source::Live;
    return std::nullopt;
}

std::optional<Sentiment> parse_sentiment(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "negative") return Sentiment::Negative;
    if (key == "neutral") return Sentiment::Neutral;
    if (key == "positive") return Sentiment::Positive;
    return std::nullopt;
}

std::optional<Route> parse_route(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "empathetic") return Route::Empathetic;
    if (key == "regular") return Route::Regular;
    return std::nullopt;
}

Who who_from_code(int code) {
    if (code < 0 || code > 2) throw DomainError("who code must be 0, 1 or 2");
    return static_cast<Who>(code);
}

MechanismLevel level_from_code(int code) {
    if (code < 0 || code > 2) throw DomainError("mechanism level must be 0, 1 or 2");
    return static_cast<MechanismLevel>(code);
}

Sentiment sentiment_from_code(int code) {
    if (code < 0 || code > 2) throw DomainError("sentiment code must be 0, 1 or 2");
    return static_cast<Sentiment>(code);
}

std::string_view display_name(Who who) noexcept {
    switch (who) {
    case Who::Partner: return "You";
    case Who::Other: return "Another";
    case Who::SelfFocus: break;
    }
    return "I or We";
}

std::string_view display_name(Sentiment sentiment) noexcept {
    switch (sentiment) {
    case Sentiment::Negative: return "Negative";
    case Sentiment::Positive: return "Positive";
    case Sentiment::Neutral: break;
    }
    return "Neutral";
}

std::string_view display_name(MechanismLevel level) noexcept {
    switch (level) {
    case MechanismLevel::Weak: return "Weak";
    case MechanismLevel::Strong: return "Strong";
    case MechanismLevel::Absent: break;
    }
    return "0";
}

std::string_view display_name(EmpathyDirection label) noexcept {
    switch (label) {
    case EmpathyDirection::Seeking: return "Seeking";
    case EmpathyDirection::Providing: return "Providing";
    case EmpathyDirection::None: break;
    }
    return "None";
}

} // namespace whee
