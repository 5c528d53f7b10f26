#pragma once

// HTTP front end for live classification and gated replies.
//
//   GET  /health          -> {status, provider, prompt_version}
//   POST /classify {text} -> {label, cues, attempts}
//   POST /respond  {text, session_id?} -> {session_id, turn, utterance_id, label, cues, route, response, attempts}
//   GET  /sessions/{id}   -> {session_id, turns: [outcome records]}
//
// Errors are {"error": {"status", "code", "message"}} with 400 for malformed
// bodies, 404 for unknown sessions, 422 for domain-invalid input, 502 for
// provider failures and 504 for provider timeouts.

#include "whee/app/config.hpp"
#include "whee/llm_gateway.hpp"

#include <iosfwd>
#include <memory>
#include <string>

namespace whee::app {

class Service {
public:
    /// `log` receives one line per request; it may be null.
    Service(AppConfig config, std::shared_ptr<llm::Gateway> gateway, std::ostream* log = nullptr);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    /// Returns the bound port. Throws std::runtime_error if binding fails.
    int start(const std::string& host, int port);
    /// Blocks until the server stops.
    void wait();
    void stop();

    /// Number of sessions currently held in memory.
    std::size_t session_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace whee::app
