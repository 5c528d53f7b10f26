#include "whee/evalkit.hpp"

#include "whee/delimited.hpp"
#include "whee/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace whee::eval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (auto c : row) n += c;
    return n;
}

ConfusionMatrix confusion(const std::vector<EmpathyDirection>& gold,
                          const std::vector<EmpathyDirection>& pred) {
    if (gold.size() != pred.size()) {
        throw DomainError("gold and predicted lists differ in length (" + std::to_string(gold.size()) +
                          " vs " + std::to_string(pred.size()) + ")");
    }
    if (gold.empty()) throw DomainError("nothing to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        cm.counts[direction_code(gold[i])][direction_code(pred[i])]++;
    }
    return cm;
}

MacroScores macro_scores(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DomainError("empty confusion matrix");
    MacroScores out;
    for (int k = 0; k < 3; ++k) {
        std::size_t row = 0, col = 0;
        for (int j = 0; j < 3; ++j) {
            row += cm.counts[k][j];
            col += cm.counts[j][k];
        }
        const double tp = static_cast<double>(cm.counts[k][k]);
        auto& c = out.per_class[k];
        c.support = row;
        c.precision_undefined = col == 0;
        c.recall_undefined = row == 0;
        c.precision = col ? tp / static_cast<double>(col) : 0.0;
        c.recall = row ? tp / static_cast<double>(row) : 0.0;
        const double denom = c.precision + c.recall;
        c.f1 = denom > 0.0 ? 2.0 * c.precision * c.recall / denom : 0.0;
    }
    for (const auto& c : out.per_class) {
        out.precision += c.precision;
        out.recall += c.recall;
        out.f1 += c.f1;
    }
    out.precision /= 3.0;
    out.recall /= 3.0;
    out.f1 /= 3.0;
    return out;
}

std::array<ClassAccuracy, 3> per_class_accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DomainError("empty confusion matrix");
    std::array<ClassAccuracy, 3> out{};
    for (int k = 0; k < 3; ++k) {
        std::size_t row = 0;
        for (auto c : cm.counts[k]) row += c;
        out[k].empty_row = row == 0;
        out[k].value = row ? static_cast<double>(cm.counts[k][k]) / static_cast<double>(row) : 0.0;
    }
    return out;
}

namespace {

constexpr std::array<const char*, 5> kCategoricalNames{"Who", "Sentiment", "Emotional reaction",
                                                       "Interpretations", "Exploration"};
constexpr std::array<const char*, 5> kCategoricalKeys{"who", "sentiment", "emotional_reaction",
                                                      "interpretation", "exploration"};
constexpr std::array<const char*, 2> kContinuousNames{"Valence", "Arousal"};
constexpr std::array<const char*, 2> kContinuousKeys{"valence", "arousal"};

std::string value_display(std::size_t cue, int code) {
    switch (cue) {
    case 0: return std::string(display_name(who_from_code(code)));
    case 1: return std::string(display_name(sentiment_from_code(code)));
    default: return std::string(display_name(level_from_code(code)));
    }
}

std::optional<int> categorical_code(const PartialCueProfile& p, std::size_t cue) {
    switch (cue) {
    case 0: if (p.who) return static_cast<int>(*p.who); break;
    case 1: if (p.sentiment) return static_cast<int>(*p.sentiment); break;
    case 2: if (p.emotional_reaction) return static_cast<int>(*p.emotional_reaction); break;
    case 3: if (p.interpretation) return static_cast<int>(*p.interpretation); break;
    case 4: if (p.exploration) return static_cast<int>(*p.exploration); break;
    default: break;
    }
    return std::nullopt;
}

std::optional<double> continuous_value(const PartialCueProfile& p, std::size_t cue) {
    return cue == 0 ? p.valence : p.arousal;
}

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

} // namespace

CueDistribution cue_distribution(const std::vector<records::TaggedCues>& items, EmpathyDirection label) {
    CueDistribution d;
    d.label = label;
    std::vector<const PartialCueProfile*> members;
    for (const auto& t : items) {
        if (t.label == label) members.push_back(&t.cues);
    }
    d.count = members.size();
    d.empty = members.empty();

    for (std::size_t c = 0; c < d.categorical.size(); ++c) {
        auto& s = d.categorical[c];
        s.cue = kCategoricalNames[c];
        for (int code = 0; code < 3; ++code) s.values.push_back({code, value_display(c, code), 0, 0.0});
        for (const auto* p : members) {
            if (auto code = categorical_code(*p, c)) {
                s.values[static_cast<std::size_t>(*code)].count++;
                s.observed++;
            }
        }
        s.available = s.observed > 0;
        if (!s.available) continue;
        for (auto& v : s.values) {
            v.proportion = static_cast<double>(v.count) / static_cast<double>(s.observed);
        }
        for (std::size_t i = 1; i < s.values.size(); ++i) {
            if (s.values[i].count > s.values[s.mode].count) s.mode = i;
        }
    }

    for (std::size_t c = 0; c < d.continuous.size(); ++c) {
        auto& s = d.continuous[c];
        s.cue = kContinuousNames[c];
        std::vector<double> xs;
        for (const auto* p : members) {
            if (auto v = continuous_value(*p, c)) xs.push_back(*v);
        }
        s.observed = xs.size();
        s.available = !xs.empty();
        if (!s.available) continue;
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean = sum / static_cast<double>(xs.size());
        double sq = 0.0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
    }
    return d;
}

CueDistribution cue_distribution(const std::vector<Prediction>& predictions, EmpathyDirection label) {
    std::vector<records::TaggedCues> tagged;
    tagged.reserve(predictions.size());
    for (const auto& p : predictions) {
        tagged.push_back({p.utterance_id, p.label, PartialCueProfile::from(p.cues)});
    }
    return cue_distribution(tagged, label);
}

std::string format_distribution(const CueDistribution& d, const std::string& title) {
    std::ostringstream os;
    os << (title.empty() ? std::string(display_name(d.label)) : title) << " (n=" << d.count << ")\n";
    if (d.empty) {
        os << "  no records with label " << to_string(d.label) << '\n';
        return os.str();
    }
    constexpr std::size_t kName = 22, kCount = 16;
    os << pad("Empathy cue", kName) << pad("Count", kCount) << "Label\n";
    for (const auto& s : d.categorical) {
        if (!s.available) {
            os << pad(s.cue, kName) << pad("n/a", kCount) << '\n';
            continue;
        }
        const auto& m = s.values[s.mode];
        os << pad(s.cue, kName) << pad(std::to_string(m.count) + " (" + fixed(m.proportion, 2) + ")", kCount)
           << m.display << '\n';
    }
    for (const auto& s : d.continuous) {
        const std::string name = s.cue + " (mean ± std)";
        // the ± sign is two bytes in UTF-8 but one column wide
        os << pad(name, kName + 1);
        if (s.available) {
            os << fixed(s.mean, 2) << " ± " << fixed(s.stddev, 2) << '\n';
        } else {
            os << "n/a\n";
        }
    }
    return os.str();
}

ordered_json distribution_json(const CueDistribution& d) {
    ordered_json j;
    j["label"] = to_string(d.label);
    j["count"] = d.count;
    j["empty"] = d.empty;
    for (std::size_t c = 0; c < d.categorical.size(); ++c) {
        const auto& s = d.categorical[c];
        ordered_json cue;
        cue["available"] = s.available;
        if (s.available) {
            ordered_json values = ordered_json::array();
            for (const auto& v : s.values) {
                values.push_back({{"code", v.code}, {"display", v.display}, {"count", v.count},
                                  {"proportion", v.proportion}});
            }
            cue["values"] = std::move(values);
            cue["mode"] = s.values[s.mode].display;
        }
        j[kCategoricalKeys[c]] = std::move(cue);
    }
    for (std::size_t c = 0; c < d.continuous.size(); ++c) {
        const auto& s = d.continuous[c];
        ordered_json cue;
        cue["available"] = s.available;
        if (s.available) {
            cue["mean"] = s.mean;
            cue["std"] = s.stddev;
        }
        j[kContinuousKeys[c]] = std::move(cue);
    }
    return j;
}

int affect_bin(double value) noexcept {
    const int bin = static_cast<int>(std::floor((value + 1.0) / 2.0 * kAffectBins));
    return std::clamp(bin, 0, kAffectBins - 1);
}

std::string affect_bin_name(int bin) {
    const double lo = -1.0 + 2.0 * bin / kAffectBins;
    const double hi = lo + 2.0 / kAffectBins;
    return "[" + fixed(lo, 2) + "," + fixed(hi, 2) + (bin == kAffectBins - 1 ? "]" : ")");
}

SourceComparison compare_sources(const std::vector<records::TaggedCues>& a,
                                 const std::vector<records::TaggedCues>& b,
                                 std::optional<EmpathyDirection> label, std::string name_a,
                                 std::string name_b) {
    auto keep = [&](const std::vector<records::TaggedCues>& side) {
        std::vector<const PartialCueProfile*> out;
        for (const auto& t : side) {
            if (!label || t.label == *label) out.push_back(&t.cues);
        }
        return out;
    };
    const auto pa = keep(a);
    const auto pb = keep(b);
    if (pa.empty() || pb.empty()) throw DomainError("both sources need at least one record to compare");

    SourceComparison out;
    out.name_a = std::move(name_a);
    out.name_b = std::move(name_b);
    out.label = label;
    out.count_a = pa.size();
    out.count_b = pb.size();

    auto tally = [](const std::vector<const PartialCueProfile*>& side, auto&& key, std::size_t bins) {
        std::optional<std::vector<std::size_t>> counts;
        for (const auto* p : side) {
            if (auto k = key(*p)) {
                if (!counts) counts.emplace(bins, 0);
                (*counts)[static_cast<std::size_t>(*k)]++;
            }
        }
        return counts;
    };
    auto emit = [&](const std::string& cue, std::size_t bins, auto&& key, auto&& name) {
        const auto ca = tally(pa, key, bins);
        const auto cb = tally(pb, key, bins);
        for (std::size_t v = 0; v < bins; ++v) {
            ComparisonRow row{cue, name(static_cast<int>(v)), std::nullopt, std::nullopt};
            if (ca) row.a = (*ca)[v];
            if (cb) row.b = (*cb)[v];
            out.rows.push_back(std::move(row));
        }
    };

    for (std::size_t c = 0; c < kCategoricalNames.size(); ++c) {
        emit(kCategoricalNames[c], 3, [c](const PartialCueProfile& p) { return categorical_code(p, c); },
             [c](int code) { return value_display(c, code); });
    }
    for (std::size_t c = 0; c < kContinuousNames.size(); ++c) {
        emit(kContinuousNames[c], kAffectBins,
             [c](const PartialCueProfile& p) -> std::optional<int> {
                 if (auto v = continuous_value(p, c)) return affect_bin(*v);
                 return std::nullopt;
             },
             [](int bin) { return affect_bin_name(bin); });
    }
    return out;
}

std::string format_comparison(const SourceComparison& c) {
    std::ostringstream os;
    os << "Cue comparison";
    if (c.label) os << " for label " << to_string(*c.label);
    os << ": " << c.name_a << " (n=" << c.count_a << ") vs " << c.name_b << " (n=" << c.count_b << ")\n";
    std::size_t wa = std::max<std::size_t>(c.name_a.size(), 5) + 2;
    std::size_t wb = std::max<std::size_t>(c.name_b.size(), 5) + 2;
    os << pad("Cue", 20) << pad("Value", 14) << pad_left(c.name_a, wa) << pad_left(c.name_b, wb) << '\n';
    auto cell = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("n/a"); };
    for (const auto& r : c.rows) {
        os << pad(r.cue, 20) << pad(r.value, 14) << pad_left(cell(r.a), wa) << pad_left(cell(r.b), wb) << '\n';
    }
    return os.str();
}

ordered_json comparison_json(const SourceComparison& c) {
    ordered_json j;
    j["source_a"] = c.name_a;
    j["source_b"] = c.name_b;
    j["label"] = c.label ? ordered_json(to_string(*c.label)) : ordered_json(nullptr);
    j["count_a"] = c.count_a;
    j["count_b"] = c.count_b;
    j["rows"] = ordered_json::array();
    for (const auto& r : c.rows) {
        j["rows"].push_back({{"cue", r.cue},
                             {"value", r.value},
                             {"a", r.a ? ordered_json(*r.a) : ordered_json(nullptr)},
                             {"b", r.b ? ordered_json(*r.b) : ordered_json(nullptr)}});
    }
    return j;
}

PredictionFileError::PredictionFileError(std::size_t line, const std::string& what)
    : DomainError("predictions line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct RawRow {
    std::size_t line;
    std::string id;
    std::string label;
};

std::vector<RawRow> raw_rows(const std::filesystem::path& path) {
    const auto ext = ascii_lower(path.extension().string());
    const std::string content = read_file(path);
    std::vector<RawRow> rows;
    if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") {
        std::size_t line = 0;
        std::istringstream in(content);
        std::string text;
        while (std::getline(in, text)) {
            ++line;
            if (trim(text).empty()) continue;
            const json j = json::parse(text, nullptr, false);
            if (j.is_discarded() || !j.is_object()) throw PredictionFileError(line, "not a JSON object");
            if (!j.contains("utterance_id") || !j["utterance_id"].is_string()) {
                throw PredictionFileError(line, "missing utterance_id");
            }
            if (!j.contains("label") || !j["label"].is_string()) throw PredictionFileError(line, "missing label");
            rows.push_back({line, j["utterance_id"].get<std::string>(), j["label"].get<std::string>()});
        }
        return rows;
    }
    const char delim = ext == ".tsv" ? '\t' : ',';
    std::vector<DelimitedRow> parsed;
    try {
        parsed = parse_delimited(content, delim);
    } catch (const FormatError& e) {
        throw PredictionFileError(e.line_number(), e.what());
    }
    std::size_t id_col = 0, label_col = 1;
    std::size_t first = 0;
    if (!parsed.empty()) {
        const auto& head = parsed.front().fields;
        auto find = [&](std::string_view name) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < head.size(); ++i) {
                if (ascii_lower(trim(head[i])) == name) return i;
            }
            return std::nullopt;
        };
        const auto id = find("utterance_id");
        const auto label = find("label");
        if (id && label) {
            id_col = *id;
            label_col = *label;
            first = 1;
        }
    }
    for (std::size_t r = first; r < parsed.size(); ++r) {
        const auto& row = parsed[r];
        if (row.fields.size() <= std::max(id_col, label_col)) {
            throw PredictionFileError(row.line_number, "expected utterance_id and label columns");
        }
        rows.push_back({row.line_number, std::string(trim(row.fields[id_col])), row.fields[label_col]});
    }
    return rows;
}

} // namespace

PredictionFile ingest_predictions(const std::filesystem::path& path, const std::vector<std::string>& gold_ids) {
    const std::unordered_set<std::string> gold(gold_ids.begin(), gold_ids.end());
    std::unordered_map<std::string, std::size_t> seen;
    PredictionFile out;
    for (auto& raw : raw_rows(path)) {
        const auto label = parse_direction(raw.label);
        if (!label) {
            throw PredictionFileError(raw.line, "unknown label '" + raw.label + "' for id " + raw.id);
        }
        if (raw.id.empty()) throw PredictionFileError(raw.line, "empty utterance_id");
        if (auto [it, fresh] = seen.emplace(raw.id, raw.line); !fresh) {
            throw PredictionFileError(raw.line, "duplicate id " + raw.id + " (first on line " +
                                                    std::to_string(it->second) + ")");
        }
        if (!gold.count(raw.id)) out.unresolved.push_back(raw.id);
        out.rows.push_back({std::move(raw.id), *label});
    }
    return out;
}

Alignment align(const std::vector<LabeledId>& gold, const PredictionFile& predictions) {
    std::unordered_map<std::string, EmpathyDirection> by_id;
    for (const auto& r : predictions.rows) by_id.emplace(r.id, r.label);
    Alignment out;
    out.unresolved = predictions.unresolved;
    for (const auto& g : gold) {
        auto it = by_id.find(g.id);
        if (it == by_id.end()) {
            out.missing.push_back(g.id);
            continue;
        }
        out.gold.push_back(g.label);
        out.pred.push_back(it->second);
    }
    return out;
}

std::string format_score_table(const std::vector<ScoreRow>& rows, const std::string& title) {
    std::ostringstream os;
    if (!title.empty()) os << title << '\n';
    std::size_t name_width = 5;
    for (const auto& r : rows) name_width = std::max(name_width, r.name.size());
    name_width += 2;

    std::array<double, 3> best{-1.0, -1.0, -1.0};
    for (const auto& r : rows) {
        best[0] = std::max(best[0], r.scores.precision);
        best[1] = std::max(best[1], r.scores.recall);
        best[2] = std::max(best[2], r.scores.f1);
    }
    os << pad("Model", name_width) << pad("p", 10) << pad("r", 10) << "F1\n";
    for (const auto& r : rows) {
        os << pad(r.name, name_width);
        const std::array<double, 3> v{r.scores.precision, r.scores.recall, r.scores.f1};
        for (std::size_t k = 0; k < 3; ++k) {
            // ties at four decimals are both marked
            std::string cell = fixed(v[k], 4);
            if (rows.size() > 1 && cell == fixed(best[k], 4)) cell += '*';
            os << (k < 2 ? pad(cell, 10) : cell);
        }
        os << '\n';
    }
    if (rows.size() > 1) os << "* best in column\n";
    return os.str();
}

std::string format_confusion(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << pad("gold \\ pred", 14);
    for (auto d : kAllDirections) os << pad_left(std::string(to_string(d)), 11);
    os << '\n';
    for (auto g : kAllDirections) {
        os << pad(std::string(to_string(g)), 14);
        for (auto p : kAllDirections) os << pad_left(std::to_string(cm.at(g, p)), 11);
        os << '\n';
    }
    return os.str();
}

std::string format_accuracy(const std::array<ClassAccuracy, 3>& acc) {
    std::ostringstream os;
    os << "Accuracy per label:";
    for (auto d : kAllDirections) {
        const auto& a = acc[direction_code(d)];
        os << "  " << to_string(d) << ' ' << fixed(a.value, 2);
        if (a.empty_row) os << " (no gold items)";
    }
    os << '\n';
    return os.str();
}

ordered_json scores_json(const std::string& name, const MacroScores& s, const ConfusionMatrix& cm) {
    ordered_json j;
    j["name"] = name;
    j["precision"] = s.precision;
    j["recall"] = s.recall;
    j["f1"] = s.f1;
    ordered_json per = ordered_json::object();
    for (auto d : kAllDirections) {
        const auto& c = s.per_class[direction_code(d)];
        per[std::string(to_string(d))] = {{"precision", c.precision},
                                          {"recall", c.recall},
                                          {"f1", c.f1},
                                          {"support", c.support},
                                          {"precision_undefined", c.precision_undefined},
                                          {"recall_undefined", c.recall_undefined}};
    }
    j["per_class"] = std::move(per);
    ordered_json rows = ordered_json::array();
    for (const auto& row : cm.counts) rows.push_back(row);
    j["confusion"] = std::move(rows);
    return j;
}

} // namespace whee::eval
