#include "whee/corpus.hpp"

#include "whee/delimited.hpp"
#include "whee/util.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace whee::corpus {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void SplitSpec::validate() const {
    const std::array<double, 3> fractions{train_fraction, eval_fraction, validation_fraction};
    for (double f : fractions) {
        if (!(f > 0.0)) throw DomainError("split fractions must be positive");
    }
    const double sum = train_fraction + eval_fraction + validation_fraction;
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "split fractions must sum to 1, got " << sum;
        throw DomainError(os.str());
    }
}

std::optional<SourceKind> parse_source_kind(std::string_view name) {
    const auto key = ascii_lower(trim(name));
    if (key == "ex") return SourceKind::Ex;
    if (key == "edr") return SourceKind::Edr;
    if (key == "generic") return SourceKind::Generic;
    return std::nullopt;
}

EmpathyDirection relabel_ex(const LabeledUtterance& record, bool is_conversation_opener) {
    if (record.utterance.role == Role::Speaker) {
        return is_conversation_opener ? EmpathyDirection::Seeking : EmpathyDirection::None;
    }
    if (!record.listener_level) throw SchemaError("listener without empathy level");
    return collapse_level(*record.listener_level) == BinaryEmpathy::Empathetic
               ? EmpathyDirection::Providing
               : EmpathyDirection::None;
}

EmpathyDirection relabel_edr(const LabeledUtterance& record) {
    if (record.utterance.role == Role::Speaker) return EmpathyDirection::Seeking;
    if (!record.listener_level) throw SchemaError("listener without empathy level");
    return collapse_level(*record.listener_level) == BinaryEmpathy::Empathetic
               ? EmpathyDirection::Providing
               : EmpathyDirection::None;
}

namespace {

/// One raw record: mapped field name -> value (absent when the record lacks it).
struct RawRecord {
    std::size_t line_number = 0;
    std::unordered_map<std::string, std::string> values;
};

enum class FileFormat { Comma, Tab, JsonLines };

FileFormat detect_format(const std::filesystem::path& path) {
    const auto ext = ascii_lower(path.extension().string());
    if (ext == ".jsonl" || ext == ".ndjson") return FileFormat::JsonLines;
    if (ext == ".tsv" || ext == ".tab") return FileFormat::Tab;
    return FileFormat::Comma;
}

/// Fields the ingestion for `kind` actually reads.
std::vector<std::string> required_columns(const IngestSchema& schema, SourceKind kind) {
    if (schema.text.empty() || schema.role.empty() || schema.conversation.empty()) {
        throw SchemaError("schema must map text, role and conversation fields");
    }
    std::vector<std::string> out{schema.conversation, schema.role, schema.text};
    for (const auto* f : {&schema.id, &schema.turn, &schema.source}) {
        if (!f->empty()) out.push_back(*f);
    }
    if (kind == SourceKind::Generic) {
        if (schema.label.empty()) throw SchemaError("generic sources need a label field");
        out.push_back(schema.label);
    } else {
        if (schema.level.empty()) throw SchemaError("ex/edr sources need a level field");
        out.push_back(schema.level);
    }
    return out;
}

std::vector<RawRecord> read_tabular(const std::string& content, char delimiter,
                                    const std::vector<std::string>& columns) {
    auto rows = parse_delimited(content, delimiter);
    if (rows.empty()) return {};
    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < rows.front().fields.size(); ++i) {
        header.emplace(std::string(trim(rows.front().fields[i])), i);
    }
    for (const auto& c : columns) {
        if (!header.count(c)) throw SchemaError("unknown schema field '" + c + "'");
    }
    std::vector<RawRecord> out;
    out.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        RawRecord rec;
        rec.line_number = rows[r].line_number;
        for (const auto& c : columns) {
            const std::size_t idx = header.at(c);
            if (idx < rows[r].fields.size()) rec.values.emplace(c, rows[r].fields[idx]);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::string json_scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

std::vector<RawRecord> read_json_lines(const std::string& content,
                                       const std::vector<std::string>& columns,
                                       std::vector<Reject>& rejects) {
    std::vector<RawRecord> out;
    std::set<std::string> seen_keys;
    std::istringstream in(content);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            rejects.push_back({line_number, "malformed record"});
            continue;
        }
        RawRecord rec;
        rec.line_number = line_number;
        for (const auto& c : columns) {
            auto it = obj.find(c);
            if (it == obj.end()) continue;
            seen_keys.insert(c);
            rec.values.emplace(c, json_scalar_to_string(*it));
        }
        out.push_back(std::move(rec));
    }
    if (!out.empty()) {
        for (const auto& c : columns) {
            if (!seen_keys.count(c)) throw SchemaError("unknown schema field '" + c + "'");
        }
    }
    return out;
}

std::optional<std::uint32_t> parse_uint(std::string_view s) {
    s = trim(s);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<EmpathyLevel> parse_level(std::string_view s) {
    s = trim(s);
    // tolerate "2.0" style numeric exports
    if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.remove_suffix(2);
    auto v = parse_uint(s);
    if (!v || *v < 1 || *v > 3) return std::nullopt;
    return EmpathyLevel(static_cast<int>(*v));
}

Source default_source(SourceKind kind) {
    switch (kind) {
    case SourceKind::Ex: return Source::EX;
    case SourceKind::Edr: return Source::EDR;
    case SourceKind::Generic: break;
    }
    return Source::Synthetic;
}

} // namespace

IngestResult ingest(const std::filesystem::path& path, const IngestSchema& schema, SourceKind kind) {
    const auto columns = required_columns(schema, kind);
    const std::string content = read_file(path);

    IngestResult result;
    std::vector<RawRecord> raw;
    switch (detect_format(path)) {
    case FileFormat::JsonLines: raw = read_json_lines(content, columns, result.rejects); break;
    case FileFormat::Tab: raw = read_tabular(content, '\t', columns); break;
    case FileFormat::Comma: raw = read_tabular(content, ',', columns); break;
    }
    if (raw.empty() && result.rejects.empty()) {
        throw CorpusError("empty corpus: " + path.string());
    }

    std::unordered_map<std::string, std::uint32_t> auto_turn;
    std::set<std::pair<std::string, std::uint32_t>> seen_turns;
    std::set<std::string> seen_ids;

    auto get = [](const RawRecord& r, const std::string& key) -> std::optional<std::string> {
        if (key.empty()) return std::nullopt;
        auto it = r.values.find(key);
        if (it == r.values.end()) return std::nullopt;
        return it->second;
    };

    for (const auto& rec : raw) {
        auto reject = [&](std::string reason) {
            result.rejects.push_back({rec.line_number, std::move(reason)});
        };

        const auto conversation = std::string(trim(get(rec, schema.conversation).value_or("")));
        if (conversation.empty()) {
            reject("missing conversation id");
            continue;
        }
        const auto role_text = get(rec, schema.role).value_or("");
        const auto role = parse_role(role_text);
        if (!role) {
            reject("unknown role '" + role_text + "'");
            continue;
        }
        const std::uint32_t next_auto = auto_turn[conversation]++;
        std::uint32_t turn = next_auto;
        if (!schema.turn.empty()) {
            const auto parsed = parse_uint(get(rec, schema.turn).value_or(""));
            if (!parsed) {
                reject("invalid turn index");
                continue;
            }
            turn = *parsed;
        }
        const auto text = normalize_text(get(rec, schema.text).value_or(""));
        if (text.empty()) {
            reject("empty text");
            continue;
        }

        Source source = default_source(kind);
        if (kind == SourceKind::Generic && !schema.source.empty()) {
            const auto tag = get(rec, schema.source).value_or("");
            if (!trim(tag).empty()) {
                auto parsed = parse_source(tag);
                if (!parsed) {
                    reject("unknown source '" + tag + "'");
                    continue;
                }
                source = *parsed;
            }
        }

        std::string id = std::string(trim(get(rec, schema.id).value_or("")));
        if (id.empty()) id = conversation + ":" + std::to_string(turn);

        LabeledUtterance lu{make_utterance(id, conversation, turn, *role, text, source),
                            EmpathyDirection::None, std::nullopt};

        if (kind == SourceKind::Generic) {
            const auto label_text = get(rec, schema.label).value_or("");
            const auto label = parse_direction(label_text);
            if (!label) {
                reject("unknown label '" + label_text + "'");
                continue;
            }
            lu.gold = *label;
            if (*role == Role::Listener && !schema.level.empty()) {
                const auto level_text = get(rec, schema.level).value_or("");
                if (!trim(level_text).empty()) {
                    lu.listener_level = parse_level(level_text);
                    if (!lu.listener_level) {
                        reject("invalid empathy level '" + level_text + "'");
                        continue;
                    }
                }
            }
        } else {
            if (*role == Role::Listener) {
                const auto level_text = get(rec, schema.level).value_or("");
                if (trim(level_text).empty()) {
                    reject("listener without empathy level");
                    continue;
                }
                lu.listener_level = parse_level(level_text);
                if (!lu.listener_level) {
                    reject("invalid empathy level '" + level_text + "'");
                    continue;
                }
            }
            lu.gold = kind == SourceKind::Ex
                          ? relabel_ex(lu, *role == Role::Speaker && turn == 0)
                          : relabel_edr(lu);
        }

        if (!seen_turns.emplace(conversation, turn).second) {
            reject("duplicate turn index " + std::to_string(turn) + " in conversation " + conversation);
            continue;
        }
        if (!seen_ids.insert(id).second) {
            reject("duplicate id '" + id + "'");
            continue;
        }
        result.records.push_back(std::move(lu));
    }
    return result;
}

std::array<std::size_t, 3> allocate_sizes(std::size_t total, const SplitSpec& spec) {
    spec.validate();
    const std::array<double, 3> fractions{spec.train_fraction, spec.eval_fraction,
                                          spec.validation_fraction};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = static_cast<double>(total) * fractions[i];
        sizes[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
        remainders[i] = quota - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b] + 1e-12; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) sizes[order[k % 3]] += 1;
    return sizes;
}

Split split(const std::vector<LabeledUtterance>& corpus, const SplitSpec& spec) {
    spec.validate();

    struct Conversation {
        std::string id;
        std::uint64_t key = 0;
        std::vector<std::size_t> members;  // indices into corpus
        EmpathyDirection first_label = EmpathyDirection::None;
        std::uint32_t first_turn = 0;
    };
    std::unordered_map<std::string, std::size_t> index;
    std::vector<Conversation> conversations;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& u = corpus[i].utterance;
        auto [it, inserted] = index.emplace(u.conversation_id, conversations.size());
        if (inserted) {
            conversations.push_back({u.conversation_id, seeded_key(spec.seed, u.conversation_id), {},
                                     corpus[i].gold, u.turn_index});
        }
        auto& conv = conversations[it->second];
        conv.members.push_back(i);
        if (u.turn_index < conv.first_turn) {
            conv.first_turn = u.turn_index;
            conv.first_label = corpus[i].gold;
        }
    }
    if (conversations.size() < 3) {
        throw CorpusError("split needs at least 3 conversations, corpus has " +
                          std::to_string(conversations.size()));
    }

    auto by_key = [](const Conversation* a, const Conversation* b) {
        return a->key != b->key ? a->key < b->key : a->id < b->id;
    };

    std::map<int, std::vector<const Conversation*>> strata;
    for (const auto& c : conversations) {
        strata[spec.stratify ? direction_code(c.first_label) : 0].push_back(&c);
    }

    std::vector<std::pair<const Conversation*, int>> assignment;  // partition 0/1/2
    for (auto& [stratum, members] : strata) {
        std::sort(members.begin(), members.end(), by_key);
        std::size_t total = 0;
        for (const auto* c : members) total += c->members.size();
        const auto sizes = allocate_sizes(total, spec);
        std::size_t start = 0;
        for (const auto* c : members) {
            int part = 2;
            if (start < sizes[0]) {
                part = 0;
            } else if (start < sizes[0] + sizes[1]) {
                part = 1;
            }
            assignment.emplace_back(c, part);
            start += c->members.size();
        }
    }
    std::sort(assignment.begin(), assignment.end(),
              [&](const auto& a, const auto& b) { return by_key(a.first, b.first); });

    Split out;
    std::array<std::vector<LabeledUtterance>*, 3> parts{&out.train, &out.eval, &out.validation};
    for (const auto& [conv, part] : assignment) {
        std::vector<std::size_t> members = conv->members;
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return corpus[a].utterance.turn_index < corpus[b].utterance.turn_index;
        });
        for (std::size_t i : members) parts[static_cast<std::size_t>(part)]->push_back(corpus[i]);
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<LabeledUtterance>& corpus) {
    CorpusStats stats;
    stats.utterances = corpus.size();
    std::map<std::string, std::vector<const Utterance*>> by_conversation;
    for (const auto& r : corpus) {
        const auto& u = r.utterance;
        stats.per_label[static_cast<std::size_t>(direction_code(r.gold))]++;
        stats.per_source[std::string(to_string(u.source))]++;
        const std::size_t words = word_count(u.text);
        stats.max_words = std::max(stats.max_words, words);
        if (words > kWordAdvisory) stats.over_word_advisory++;
        by_conversation[u.conversation_id].push_back(&u);
    }
    stats.conversations = by_conversation.size();
    for (auto& [id, turns] : by_conversation) {
        std::sort(turns.begin(), turns.end(),
                  [](const Utterance* a, const Utterance* b) { return a->turn_index < b->turn_index; });
        for (std::size_t i = 0; i + 1 < turns.size(); ++i) {
            if (turns[i]->role == Role::Speaker && turns[i + 1]->role == Role::Listener) {
                stats.exchanges++;
            }
        }
    }
    return stats;
}

std::string format_stats(const CorpusStats& stats) {
    std::ostringstream os;
    os << "utterances     " << stats.utterances << '\n'
       << "conversations  " << stats.conversations << '\n'
       << "exchanges      " << stats.exchanges << '\n'
       << "max words      " << stats.max_words << '\n'
       << "over " << kWordAdvisory << " words " << stats.over_word_advisory << '\n';
    for (auto d : kAllDirections) {
        os << "label " << to_string(d) << std::string(10 - to_string(d).size(), ' ')
           << stats.per_label[static_cast<std::size_t>(direction_code(d))] << '\n';
    }
    for (const auto& [source, count] : stats.per_source) {
        os << "source " << source << ' ' << count << '\n';
    }
    return os.str();
}

std::string to_canonical_line(const LabeledUtterance& record) {
    const auto& u = record.utterance;
    ordered_json j;
    j["id"] = u.id;
    j["conversation_id"] = u.conversation_id;
    j["turn_index"] = u.turn_index;
    j["role"] = to_string(u.role);
    j["source"] = to_string(u.source);
    j["text"] = u.text;
    j["gold"] = to_string(record.gold);
    if (record.listener_level) j["listener_level"] = record.listener_level->value();
    return j.dump();
}

LabeledUtterance from_canonical_line(std::string_view line) {
    const json j = json::parse(line);
    auto str = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw SchemaError(std::string("canonical record lacks string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    const auto role = parse_role(str("role"));
    const auto source = parse_source(str("source"));
    const auto gold = parse_direction(str("gold"));
    if (!role || !source || !gold) throw SchemaError("canonical record has an unknown enum value");
    if (!j.contains("turn_index") || !j["turn_index"].is_number_unsigned()) {
        throw SchemaError("canonical record lacks turn_index");
    }
    LabeledUtterance lu{make_utterance(str("id"), str("conversation_id"),
                                       j["turn_index"].get<std::uint32_t>(), *role, str("text"),
                                       *source),
                        *gold, std::nullopt};
    if (j.contains("listener_level")) {
        if (*role != Role::Listener) throw SchemaError("listener_level on a speaker record");
        lu.listener_level = EmpathyLevel(j["listener_level"].get<int>());
    }
    return lu;
}

void write_canonical(const std::filesystem::path& path, const std::vector<LabeledUtterance>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_canonical_line(r);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<LabeledUtterance> read_canonical(const std::filesystem::path& path) {
    std::vector<LabeledUtterance> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            out.push_back(from_canonical_line(lines[i]));
        } catch (const std::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

void write_rejects(const std::filesystem::path& path, const std::vector<Reject>& rejects) {
    std::string out;
    for (const auto& r : rejects) {
        ordered_json j;
        j["line_number"] = r.line_number;
        j["reason"] = r.reason;
        out += j.dump();
        out += '\n';
    }
    write_file(path, out);
}

} // namespace whee::corpus
