#include "whee/llm_gateway.hpp"

#include "whee/util.hpp"
#include "whee_prompt_assets.hpp"

#include "json.hpp"

#include <algorithm>
#include <stdexcept>

namespace whee::llm {

namespace {

std::string asset(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

std::string format_number(double v) { return nlohmann::json(v).dump(); }

} // namespace

std::string_view to_string(PromptPurpose purpose) noexcept {
    switch (purpose) {
    case PromptPurpose::EmpatheticGeneration: return "empathetic_generation";
    case PromptPurpose::RegularGeneration: return "regular_generation";
    case PromptPurpose::Classification: break;
    }
    return "classification";
}

const std::vector<SchemaField>& classification_schema() {
    static const std::vector<SchemaField> schema{
        {"label", "one of seeking, providing, none"},
        {"who", "integer 0 (self), 1 (partner), 2 (other)"},
        {"sentiment", "one of negative, neutral, positive"},
        {"valence", "real in [-1, 1]"},
        {"arousal", "real in [-1, 1]"},
        {"emotional_reaction", "integer 0 (absent), 1 (weak), 2 (strong)"},
        {"interpretation", "integer 0 (absent), 1 (weak), 2 (strong)"},
        {"exploration", "integer 0 (absent), 1 (weak), 2 (strong)"},
    };
    return schema;
}

const PromptTemplates& PromptTemplates::builtin() {
    static const PromptTemplates templates{
        std::string(assets::kPromptVersion),  asset(assets::classification_system),
        asset(assets::classification_user),   asset(assets::empathetic_system),
        asset(assets::empathetic_user),       asset(assets::regular_system),
        asset(assets::regular_user),          asset(assets::format_correction),
        asset(assets::persona),
    };
    return templates;
}

PromptTemplates PromptTemplates::load_from_dir(const std::filesystem::path& dir) {
    PromptTemplates t = builtin();
    auto load = [&](const char* name, std::string& slot) {
        const auto path = dir / (std::string(name) + ".txt");
        if (std::filesystem::exists(path)) slot = asset(read_file(path));
    };
    load("classification_system", t.classification_system);
    load("classification_user", t.classification_user);
    load("empathetic_system", t.empathetic_system);
    load("empathetic_user", t.empathetic_user);
    load("regular_system", t.regular_system);
    load("regular_user", t.regular_user);
    load("format_correction", t.format_correction);
    load("persona", t.persona);
    if (std::filesystem::exists(dir / "VERSION")) {
        t.version = std::string(trim(read_file(dir / "VERSION")));
    } else {
        t.version = "custom";
    }
    return t;
}

std::string render_template(std::string_view tpl,
                            const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out;
    out.reserve(tpl.size() + 256);
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const auto open = tpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        const auto close = tpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        out.append(tpl.substr(pos, open - pos));
        const auto name = tpl.substr(open + 2, close - open - 2);
        const auto it = std::find_if(values.begin(), values.end(),
                                     [&](const auto& kv) { return kv.first == name; });
        if (it == values.end()) {
            throw std::invalid_argument("no value for template placeholder '" + std::string(name) + "'");
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

std::string encode_utterance(std::string_view text) {
    const std::string dumped = nlohmann::json(std::string(text)).dump();
    std::string out;
    out.reserve(dumped.size());
    for (char c : dumped) {
        if (c == '`') {
            out += "\\u0060";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::optional<std::string> embedded_utterance(std::string_view prompt_text) {
    const auto marker = prompt_text.find(kUtteranceMarker);
    if (marker == std::string_view::npos) return std::nullopt;
    auto rest = prompt_text.substr(marker + kUtteranceMarker.size());
    const auto start = rest.find('"');
    if (start == std::string_view::npos) return std::nullopt;
    rest = rest.substr(start);
    const auto eol = rest.find('\n');
    const auto literal = rest.substr(0, eol);
    auto parsed = nlohmann::json::parse(literal, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_string()) return std::nullopt;
    return parsed.get<std::string>();
}

PromptBuilder::PromptBuilder() : PromptBuilder(PromptTemplates::builtin()) {}

PromptBuilder::PromptBuilder(PromptTemplates templates)
    : templates_(std::move(templates)), persona_(templates_.persona) {}

PromptBuilder& PromptBuilder::with_persona(std::string persona) {
    persona_ = std::move(persona);
    return *this;
}

PromptBuilder& PromptBuilder::with_few_shot(std::string examples) {
    few_shot_ = std::move(examples);
    return *this;
}

PromptBundle PromptBuilder::classification(const Utterance& utterance) const {
    const std::string few_shot = few_shot_.empty() ? "" : "\nExamples:\n" + few_shot_ + "\n";
    PromptBundle b;
    b.system_text = templates_.classification_system;
    b.user_text = render_template(templates_.classification_user,
                                  {{"few_shot", few_shot},
                                   {"utterance_json", encode_utterance(utterance.text)}});
    b.expected_schema = classification_schema();
    b.purpose = PromptPurpose::Classification;
    b.template_version = templates_.version;
    return b;
}

PromptBundle PromptBuilder::empathetic(const Utterance& utterance, const CueProfile& cues) const {
    PromptBundle b;
    b.system_text = render_template(templates_.empathetic_system, {{"persona", persona_}});
    b.user_text = render_template(
        templates_.empathetic_user,
        {{"who", std::to_string(static_cast<int>(cues.who())) + " (" +
                     std::string(display_name(cues.who())) + ")"},
         {"sentiment", std::string(to_string(cues.sentiment()))},
         {"valence", format_number(cues.valence())},
         {"arousal", format_number(cues.arousal())},
         {"emotional_reaction", std::string(to_string(cues.emotional_reaction()))},
         {"interpretation", std::string(to_string(cues.interpretation()))},
         {"exploration", std::string(to_string(cues.exploration()))},
         {"utterance_json", encode_utterance(utterance.text)}});
    b.purpose = PromptPurpose::EmpatheticGeneration;
    b.template_version = templates_.version;
    return b;
}

PromptBundle PromptBuilder::regular(const Utterance& utterance) const {
    PromptBundle b;
    b.system_text = render_template(templates_.regular_system, {{"persona", persona_}});
    b.user_text = render_template(templates_.regular_user,
                                  {{"utterance_json", encode_utterance(utterance.text)}});
    b.purpose = PromptPurpose::RegularGeneration;
    b.template_version = templates_.version;
    return b;
}

std::string PromptBuilder::format_correction(std::string_view error) const {
    return render_template(templates_.format_correction, {{"error", std::string(error)}});
}

PromptBundle build_classification_prompt(const Utterance& utterance) {
    return PromptBuilder{}.classification(utterance);
}

PromptBundle build_empathetic_prompt(const Utterance& utterance, const CueProfile& cues) {
    return PromptBuilder{}.empathetic(utterance, cues);
}

PromptBundle build_regular_prompt(const Utterance& utterance) {
    return PromptBuilder{}.regular(utterance);
}

} // namespace whee::llm
