#include "whee/cue_baseline.hpp"

#include "whee/delimited.hpp"
#include "whee/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace whee::cues {

namespace {

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

} // namespace

AffectLexicon::AffectLexicon(std::string name, Range native_range)
    : name_(std::move(name)), native_range_(native_range) {
    if (!(native_range.high > native_range.low)) {
        throw DomainError("lexicon native range must have high > low");
    }
}

bool AffectLexicon::add(std::string_view token, double valence, double arousal) {
    const auto key = ascii_lower(trim(token));
    if (key.empty()) throw DomainError("empty lexicon token");
    auto in_range = [&](double v) {
        return std::isfinite(v) && v >= native_range_.low && v <= native_range_.high;
    };
    if (!in_range(valence) || !in_range(arousal)) {
        std::ostringstream os;
        os << "value outside native range [" << native_range_.low << ", " << native_range_.high << "]";
        throw DomainError(os.str());
    }
    const double span = native_range_.high - native_range_.low;
    auto rescale = [&](double v) {
        const double r = 2.0 * (v - native_range_.low) / span - 1.0;
        return std::clamp(r, -1.0, 1.0);
    };
    return entries_.emplace(key, AffectScore{rescale(valence), rescale(arousal)}).second;
}

const AffectScore* AffectLexicon::find(std::string_view token) const {
    auto it = entries_.find(std::string(token));
    return it == entries_.end() ? nullptr : &it->second;
}

LexiconLoad load_lexicon(const std::filesystem::path& path, Range native_range) {
    const std::string content = read_file(path);
    const char delimiter = content.find('\t') != std::string::npos ? '\t' : ',';
    LexiconLoad out{AffectLexicon(path.stem().string(), native_range), {}};

    const auto rows = parse_delimited(content, delimiter);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() < 3) {
            out.rejects.push_back({row.line_number, "expected token, valence, arousal"});
            continue;
        }
        const auto valence = parse_double(row.fields[1]);
        const auto arousal = parse_double(row.fields[2]);
        if (!valence || !arousal) {
            if (r == 0) continue;  // header
            out.rejects.push_back({row.line_number, "non-numeric valence or arousal"});
            continue;
        }
        try {
            if (!out.lexicon.add(row.fields[0], *valence, *arousal)) {
                out.rejects.push_back({row.line_number, "duplicate token '" +
                                                            ascii_lower(trim(row.fields[0])) + "'"});
            }
        } catch (const DomainError& e) {
            out.rejects.push_back({row.line_number, e.what()});
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_byte(c)) {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

AffectScore score_vad(std::string_view text, const AffectLexicon& lexicon) {
    double valence = 0.0;
    double arousal = 0.0;
    std::size_t matched = 0;
    for (const auto& token : tokenize(text)) {
        if (const auto* entry = lexicon.find(token)) {
            valence += entry->valence;
            arousal += entry->arousal;
            ++matched;
        }
    }
    if (matched == 0) return {};
    const auto n = static_cast<double>(matched);
    return {std::clamp(valence / n, -1.0, 1.0), std::clamp(arousal / n, -1.0, 1.0)};
}

Sentiment score_sentiment(double valence, double threshold) {
    if (valence < -threshold) return Sentiment::Negative;
    if (valence > threshold) return Sentiment::Positive;
    return Sentiment::Neutral;
}

PartialCueProfile baseline_profile(std::string_view text, const AffectLexicon& lexicon,
                                   double threshold) {
    const auto score = score_vad(text, lexicon);
    PartialCueProfile p;
    p.valence = score.valence;
    p.arousal = score.arousal;
    p.sentiment = score_sentiment(score.valence, threshold);
    return p;
}

} // namespace whee::cues
