#pragma once

// The gate: classify a speaker utterance, then answer with the empathetic
// prompt only when the speaker is seeking empathy.

#include "whee/core_model.hpp"
#include "whee/llm_gateway.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace whee::gate {

/// Seeking -> Empathetic; anything else -> Regular.
Route decide(const Prediction& prediction) noexcept;

/// A classify or generate failure for one utterance.
class GateError : public std::runtime_error {
public:
    enum class Stage { Classify, Generate };
    enum class Cause { ProviderUnreachable, Timeout, RetriesExhausted, EmptyResponse };

    GateError(std::string utterance_id, Stage stage, Cause cause, const std::string& detail);

    const std::string& utterance_id() const noexcept { return utterance_id_; }
    Stage stage() const noexcept { return stage_; }
    Cause cause() const noexcept { return cause_; }

private:
    std::string utterance_id_;
    Stage stage_;
    Cause cause_;
};

std::string_view to_string(GateError::Cause cause) noexcept;

/// classify -> decide -> matching prompt -> generate. Throws GateError;
/// a failed classification never reaches generation.
GateOutcome respond(const Utterance& utterance, const llm::Gateway& gateway);

struct ReplayFailure {
    std::string utterance_id;
    std::string stage;
    std::string cause;
    std::string message;
};

struct ReplayReport {
    std::size_t total = 0;  ///< routed utterances (outcomes)
    std::size_t empathetic_count = 0;
    double empathetic_share = 0.0;
    std::vector<GateOutcome> outcomes;  ///< input order
    std::vector<ReplayFailure> failures;
    std::array<std::size_t, 3> label_histogram{};
};

/// Thrown when every utterance in a replay batch fails.
class BatchFailed : public std::runtime_error {
public:
    BatchFailed(std::vector<ReplayFailure> failures);
    const std::vector<ReplayFailure>& failures() const noexcept { return failures_; }

private:
    std::vector<ReplayFailure> failures_;
};

/// Runs respond over speaker utterances with at most `concurrency` calls in
/// flight. Per-utterance failures are recorded, not fatal. Throws DomainError
/// for listener input or an empty batch, BatchFailed when nothing succeeds.
ReplayReport replay(const std::vector<Utterance>& speakers, const llm::Gateway& gateway,
                    std::size_t concurrency = 1);

/// "Empathetic responses: 166 / 308 (53.9%)" plus the label histogram.
std::string format_report(const ReplayReport& report);

} // namespace whee::gate
