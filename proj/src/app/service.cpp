#include "whee/app/service.hpp"

#include "whee/records.hpp"
#include "whee/util.hpp"
#include "whee/whee_gate.hpp"

#include "httplib.h"
#include "json.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace whee::app {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct HttpError {
    int status;
    std::string code;
    std::string message;
};

struct Session {
    std::mutex mutex;
    std::vector<GateOutcome> turns;
};

bool valid_session_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_' || c == '.';
        if (!ok) return false;
    }
    return id != "." && id != "..";
}

std::size_t code_points(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

void send(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
    ordered_json body;
    body["error"] = {{"status", e.status}, {"code", e.code}, {"message", e.message}};
    send(res, e.status, body);
}

HttpError provider_error(const llm::ProviderUnreachable& e) {
    if (e.cause() == llm::ProviderUnreachable::Cause::Timeout) return {504, "provider_timeout", e.what()};
    return {502, "provider_unavailable", e.what()};
}

} // namespace

struct Service::Impl {
    AppConfig config;
    std::shared_ptr<llm::Gateway> gateway;
    std::ostream* log = nullptr;
    std::mutex log_mutex;

    httplib::Server server;
    std::thread thread;

    mutable std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::atomic<std::uint64_t> counter{0};

    void write_log(const std::string& line) {
        if (!log) return;
        std::lock_guard lock(log_mutex);
        *log << line << '\n';
        log->flush();
    }

    fs::path session_file(const std::string& id) const { return fs::path(config.session_dir) / (id + ".jsonl"); }

    /// Returns the session, loading a persisted transcript on first use.
    /// With create = false an unknown session yields nullptr.
    std::shared_ptr<Session> session(const std::string& id, bool create) {
        std::lock_guard lock(sessions_mutex);
        if (auto it = sessions.find(id); it != sessions.end()) return it->second;
        const bool on_disk = !config.session_dir.empty() && fs::exists(session_file(id));
        if (!create && !on_disk) return nullptr;
        auto s = std::make_shared<Session>();
        if (on_disk) {
            for (const auto& line : read_lines(session_file(id))) {
                if (trim(line).empty()) continue;
                s->turns.push_back(records::outcome_from_json(json::parse(line)));
            }
        }
        sessions.emplace(id, s);
        return s;
    }

    std::string fresh_session_id() {
        const auto now = std::chrono::system_clock::now().time_since_epoch().count();
        const auto n = counter.fetch_add(1);
        char buf[32];
        std::snprintf(buf, sizeof buf, "s-%016llx",
                      static_cast<unsigned long long>(splitmix64(static_cast<std::uint64_t>(now) ^ (n << 32) ^ n)));
        return buf;
    }

    std::string read_text(const json& body) const {
        if (!body.contains("text")) throw HttpError{400, "missing_text", "body needs a 'text' field"};
        if (!body["text"].is_string()) throw HttpError{400, "invalid_text", "'text' must be a string"};
        const std::string text = normalize_text(body["text"].get<std::string>());
        if (text.empty()) throw HttpError{400, "empty_text", "'text' is empty"};
        if (code_points(text) > config.max_text_chars) {
            throw HttpError{422, "text_too_long",
                            "'text' exceeds " + std::to_string(config.max_text_chars) + " characters"};
        }
        return text;
    }

    static json parse_body(const httplib::Request& req) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            throw HttpError{400, "malformed_body", "request body must be a JSON object"};
        }
        return body;
    }

    void handle_health(httplib::Response& res) {
        ordered_json body;
        body["status"] = "ok";
        body["provider"] = gateway->provider().tag();
        body["prompt_version"] = gateway->prompts().template_version();
        send(res, 200, body);
    }

    void handle_classify(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const std::string text = read_text(body);
        const auto n = counter.fetch_add(1);
        const auto u = make_utterance("live-" + std::to_string(n), "live", 0, Role::Speaker, text, Source::Live);
        try {
            const auto p = gateway->classify(u);
            ordered_json out;
            out["label"] = to_string(p.label);
            out["cues"] = records::cues_json(p.cues);
            out["attempts"] = p.attempts;
            out["provider"] = p.provider;
            send(res, 200, out);
        } catch (const llm::ProviderUnreachable& e) {
            throw provider_error(e);
        } catch (const llm::RetriesExhausted& e) {
            throw HttpError{502, "unparseable_output", e.what()};
        }
    }

    void handle_respond(const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        std::string id;
        if (body.contains("session_id") && !body["session_id"].is_null()) {
            if (!body["session_id"].is_string() || !valid_session_id(body["session_id"].get<std::string>())) {
                throw HttpError{422, "invalid_session_id",
                                "session_id must be 1-64 characters of letters, digits, '-', '_' or '.'"};
            }
            id = body["session_id"].get<std::string>();
        } else {
            id = fresh_session_id();
        }
        const std::string text = read_text(body);
        auto s = session(id, true);

        std::lock_guard lock(s->mutex);
        const auto turn = static_cast<std::uint32_t>(s->turns.size());
        const auto u = make_utterance(id + ":" + std::to_string(turn), id, turn, Role::Speaker, text, Source::Live);
        const auto started = std::chrono::steady_clock::now();
        GateOutcome outcome = [&] {
            try {
                return gate::respond(u, *gateway);
            } catch (const gate::GateError& e) {
                if (e.cause() == gate::GateError::Cause::Timeout) throw HttpError{504, "provider_timeout", e.what()};
                throw HttpError{502, std::string(gate::to_string(e.cause())), e.what()};
            }
        }();
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);

        const auto record = records::outcome_json(outcome);
        if (!config.session_dir.empty()) {
            fs::create_directories(config.session_dir);
            std::ofstream f(session_file(id), std::ios::binary | std::ios::app);
            f << record.dump() << '\n';
            if (!f) write_log("warning: could not persist session " + id);
        }
        s->turns.push_back(outcome);

        ordered_json out;
        out["session_id"] = id;
        out["turn"] = turn;
        out["utterance_id"] = outcome.utterance_id;
        out["label"] = to_string(outcome.prediction.label);
        out["cues"] = records::cues_json(outcome.prediction.cues);
        out["route"] = to_string(outcome.route);
        out["response"] = outcome.response_text;
        out["attempts"] = outcome.prediction.attempts;
        out["latency_ms"] = elapsed.count();
        send(res, 200, out);
    }

    void handle_session(const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        if (!valid_session_id(id)) throw HttpError{422, "invalid_session_id", "malformed session id"};
        auto s = session(id, false);
        if (!s) throw HttpError{404, "unknown_session", "no session " + id};
        ordered_json out;
        out["session_id"] = id;
        out["turns"] = ordered_json::array();
        std::lock_guard lock(s->mutex);
        for (const auto& t : s->turns) out["turns"].push_back(records::outcome_json(t));
        send(res, 200, out);
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const HttpError& e) {
                send_error(res, e);
            } catch (const DomainError& e) {
                send_error(res, {422, "invalid_input", e.what()});
            } catch (const std::exception& e) {
                write_log(std::string("internal error: ") + e.what());
                send_error(res, {500, "internal", "internal error"});
            }
        };
    }

    void install() {
        server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) { handle_health(res); }));
        server.Post("/classify", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        handle_classify(req, res);
                    }));
        server.Post("/respond", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        handle_respond(req, res);
                    }));
        server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       handle_session(req, res);
                   }));
        if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir);
        // method, path and status only
        server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
            write_log(req.method + " " + req.path + " " + std::to_string(res.status));
        });
    }
};

Service::Service(AppConfig config, std::shared_ptr<llm::Gateway> gateway, std::ostream* log)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->gateway = std::move(gateway);
    impl_->log = log;
    impl_->install();
}

Service::~Service() {
    stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("cannot bind " + host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::stop() { impl_->server.stop(); }

std::size_t Service::session_count() const {
    std::lock_guard lock(impl_->sessions_mutex);
    return impl_->sessions.size();
}

} // namespace whee::app
