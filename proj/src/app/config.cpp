#include "whee/app/config.hpp"

#include "whee/http_provider.hpp"
#include "whee/mock_provider.hpp"
#include "whee/util.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

namespace whee::app {

using llm::ConfigError;

namespace {

double to_double(const std::string& key, const std::string& value) {
    const auto s = trim(value);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return v;
}

long long to_int(const std::string& key, const std::string& value) {
    const auto s = trim(value);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return v;
}

std::size_t to_count(const std::string& key, const std::string& value) {
    const auto v = to_int(key, value);
    if (v < 0) throw ConfigError(key + " must not be negative");
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
    const auto v = ascii_lower(trim(value));
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

using Setter = void (*)(AppConfig&, const std::string&, const std::string&);

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table{
        {"provider", [](AppConfig& c, const std::string&, const std::string& v) {
             c.provider = ascii_lower(trim(v));
         }},
        {"base_url", [](AppConfig& c, const std::string&, const std::string& v) { c.llm.base_url = trim(v); }},
        {"model", [](AppConfig& c, const std::string&, const std::string& v) { c.llm.model_name = trim(v); }},
        {"temperature", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.llm.temperature = to_double(k, v);
         }},
        {"generation_temperature", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.llm.generation_temperature = to_double(k, v);
         }},
        {"max_retries", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.llm.max_retries = static_cast<int>(to_int(k, v));
         }},
        {"timeout_ms", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.llm.timeout = std::chrono::milliseconds(to_int(k, v));
         }},
        {"api_key_env", [](AppConfig& c, const std::string&, const std::string& v) {
             c.llm.api_key_env = trim(v);
         }},
        {"requests_per_second", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.llm.requests_per_second = to_double(k, v);
         }},
        {"mock_script", [](AppConfig& c, const std::string&, const std::string& v) { c.mock_script = trim(v); }},
        {"prompt_dir", [](AppConfig& c, const std::string&, const std::string& v) { c.prompt_dir = trim(v); }},
        {"persona", [](AppConfig& c, const std::string&, const std::string& v) { c.persona = trim(v); }},
        {"few_shot_file", [](AppConfig& c, const std::string&, const std::string& v) {
             c.few_shot_file = trim(v);
         }},
        {"lexicon", [](AppConfig& c, const std::string&, const std::string& v) { c.lexicon = trim(v); }},
        {"lexicon_low", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.lexicon_range.low = to_double(k, v);
         }},
        {"lexicon_high", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.lexicon_range.high = to_double(k, v);
         }},
        {"sentiment_threshold", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.sentiment_threshold = to_double(k, v);
         }},
        {"train_fraction", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.split.train_fraction = to_double(k, v);
         }},
        {"eval_fraction", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.split.eval_fraction = to_double(k, v);
         }},
        {"validation_fraction", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.split.validation_fraction = to_double(k, v);
         }},
        {"seed", [](AppConfig& c, const std::string& k, const std::string& v) {
             const auto s = trim(v);
             std::uint64_t seed = 0;
             auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
             if (ec != std::errc{} || ptr != s.data() + s.size()) {
                 throw ConfigError(k + ": expected a non-negative integer, got '" + v + "'");
             }
             c.split.seed = seed;
         }},
        {"stratify", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.split.stratify = to_bool(k, v);
         }},
        {"concurrency", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.concurrency = to_count(k, v);
         }},
        {"max_failure_rate", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.max_failure_rate = to_double(k, v);
         }},
        {"host", [](AppConfig& c, const std::string&, const std::string& v) { c.host = trim(v); }},
        {"port", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.port = static_cast<int>(to_int(k, v));
         }},
        {"cors_origin", [](AppConfig& c, const std::string&, const std::string& v) { c.cors_origin = trim(v); }},
        {"session_dir", [](AppConfig& c, const std::string&, const std::string& v) { c.session_dir = trim(v); }},
        {"static_dir", [](AppConfig& c, const std::string&, const std::string& v) { c.static_dir = trim(v); }},
        {"max_text_chars", [](AppConfig& c, const std::string& k, const std::string& v) {
             c.max_text_chars = to_count(k, v);
         }},
    };
    return table;
}

} // namespace

void AppConfig::validate() const {
    if (provider != "mock" && provider != "http") {
        throw ConfigError("provider must be 'mock' or 'http', got '" + provider + "'");
    }
    llm.validate();
    if (!(lexicon_range.high > lexicon_range.low)) throw ConfigError("lexicon_high must exceed lexicon_low");
    if (!(sentiment_threshold >= 0.0 && sentiment_threshold < 1.0)) {
        throw ConfigError("sentiment_threshold must lie in [0, 1)");
    }
    try {
        split.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (concurrency < 1) throw ConfigError("concurrency must be at least 1");
    if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0)) {
        throw ConfigError("max_failure_rate must lie in [0, 1]");
    }
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    if (max_text_chars < 1) throw ConfigError("max_text_chars must be at least 1");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : setters()) out.push_back(k);
        return out;
    }();
    return keys;
}

void apply_setting(AppConfig& config, const std::string& key, const std::string& value) {
    for (const auto& [k, set] : setters()) {
        if (k == key) {
            set(config, key, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
        }
        const auto key = std::string(trim(body.substr(0, eq)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(n) + ": empty key");
        out.emplace_back(key, std::string(trim(body.substr(eq + 1))));
    }
    return out;
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v) return std::nullopt;
        return std::string(v);
    };
}

AppConfig resolve_config(const std::optional<std::string>& config_path, const EnvLookup& env,
                         const std::map<std::string, std::string>& overrides) {
    AppConfig config;
    if (config_path) {
        for (const auto& [k, v] : parse_config_text(read_file(*config_path))) {
            try {
                apply_setting(config, k, v);
            } catch (const ConfigError& e) {
                throw ConfigError(*config_path + ": " + e.what());
            }
        }
    }
    for (const auto& key : config_keys()) {
        std::string name = "WHEE_";
        for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (auto v = env(name)) {
            try {
                apply_setting(config, key, *v);
            } catch (const ConfigError& e) {
                throw ConfigError(name + ": " + e.what());
            }
        }
    }
    for (const auto& [k, v] : overrides) apply_setting(config, k, v);
    config.validate();
    return config;
}

std::string describe(const AppConfig& c) {
    std::ostringstream os;
    os << "provider = " << c.provider << '\n'
       << "base_url = " << c.llm.base_url << '\n'
       << "model = " << c.llm.model_name << '\n'
       << "temperature = " << c.llm.temperature << '\n'
       << "generation_temperature = " << c.llm.generation_temperature << '\n'
       << "max_retries = " << c.llm.max_retries << '\n'
       << "timeout_ms = " << c.llm.timeout.count() << '\n'
       << "api_key_env = " << c.llm.api_key_env << '\n'
       << "requests_per_second = " << c.llm.requests_per_second << '\n'
       << "mock_script = " << c.mock_script << '\n'
       << "prompt_dir = " << c.prompt_dir << '\n'
       << "persona = " << c.persona << '\n'
       << "few_shot_file = " << c.few_shot_file << '\n'
       << "lexicon = " << c.lexicon << '\n'
       << "lexicon_low = " << c.lexicon_range.low << '\n'
       << "lexicon_high = " << c.lexicon_range.high << '\n'
       << "sentiment_threshold = " << c.sentiment_threshold << '\n'
       << "train_fraction = " << c.split.train_fraction << '\n'
       << "eval_fraction = " << c.split.eval_fraction << '\n'
       << "validation_fraction = " << c.split.validation_fraction << '\n'
       << "seed = " << c.split.seed << '\n'
       << "stratify = " << (c.split.stratify ? "true" : "false") << '\n'
       << "concurrency = " << c.concurrency << '\n'
       << "max_failure_rate = " << c.max_failure_rate << '\n'
       << "host = " << c.host << '\n'
       << "port = " << c.port << '\n'
       << "cors_origin = " << c.cors_origin << '\n'
       << "session_dir = " << c.session_dir << '\n'
       << "static_dir = " << c.static_dir << '\n'
       << "max_text_chars = " << c.max_text_chars << '\n';
    return os.str();
}

std::shared_ptr<llm::ChatProvider> make_provider(const AppConfig& config) {
    if (config.provider == "http") return std::make_shared<llm::HttpChatProvider>(config.llm);
    auto mock = std::make_shared<llm::MockProvider>();
    if (!config.mock_script.empty()) mock->load_script(config.mock_script);
    return mock;
}

llm::PromptBuilder make_prompts(const AppConfig& config) {
    llm::PromptBuilder builder(config.prompt_dir.empty() ? llm::PromptTemplates::builtin()
                                                         : llm::PromptTemplates::load_from_dir(config.prompt_dir));
    if (!config.persona.empty()) builder.with_persona(config.persona);
    if (!config.few_shot_file.empty()) builder.with_few_shot(read_file(config.few_shot_file));
    return builder;
}

std::shared_ptr<llm::Gateway> make_gateway(const AppConfig& config) {
    return std::make_shared<llm::Gateway>(make_provider(config), config.llm, make_prompts(config));
}

} // namespace whee::app
