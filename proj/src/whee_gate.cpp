#include "whee/whee_gate.hpp"

#include "whee/util.hpp"

#include <cstdio>
#include <optional>
#include <sstream>
#include <variant>

namespace whee::gate {

using llm::EmptyResponse;
using llm::ProviderUnreachable;
using llm::RetriesExhausted;

Route decide(const Prediction& prediction) noexcept {
    return prediction.label == EmpathyDirection::Seeking ? Route::Empathetic : Route::Regular;
}

GateError::GateError(std::string utterance_id, Stage stage, Cause cause, const std::string& detail)
    : std::runtime_error("utterance " + utterance_id + ": " +
                         (stage == Stage::Classify ? "classify" : "generate") + " failed: " + detail),
      utterance_id_(std::move(utterance_id)),
      stage_(stage),
      cause_(cause) {}

std::string_view to_string(GateError::Cause cause) noexcept {
    switch (cause) {
    case GateError::Cause::Timeout: return "timeout";
    case GateError::Cause::RetriesExhausted: return "retries_exhausted";
    case GateError::Cause::EmptyResponse: return "empty_response";
    case GateError::Cause::ProviderUnreachable: break;
    }
    return "provider_unreachable";
}

namespace {

GateError::Cause transport_cause(const ProviderUnreachable& e) {
    return e.cause() == ProviderUnreachable::Cause::Timeout ? GateError::Cause::Timeout
                                                            : GateError::Cause::ProviderUnreachable;
}

} // namespace

GateOutcome respond(const Utterance& utterance, const llm::Gateway& gateway) {
    std::optional<Prediction> prediction;
    try {
        prediction = gateway.classify(utterance);
    } catch (const RetriesExhausted& e) {
        throw GateError(utterance.id, GateError::Stage::Classify, GateError::Cause::RetriesExhausted,
                        e.what());
    } catch (const ProviderUnreachable& e) {
        throw GateError(utterance.id, GateError::Stage::Classify, transport_cause(e), e.what());
    }

    const Route route = decide(*prediction);
    const llm::PromptBundle bundle = route == Route::Empathetic
                                         ? gateway.prompts().empathetic(utterance, prediction->cues)
                                         : gateway.prompts().regular(utterance);
    try {
        auto generation = gateway.generate(bundle);
        return GateOutcome{utterance.id, route, std::move(*prediction), std::move(generation.text)};
    } catch (const EmptyResponse& e) {
        throw GateError(utterance.id, GateError::Stage::Generate, GateError::Cause::EmptyResponse,
                        e.what());
    } catch (const ProviderUnreachable& e) {
        throw GateError(utterance.id, GateError::Stage::Generate, transport_cause(e), e.what());
    }
}

BatchFailed::BatchFailed(std::vector<ReplayFailure> failures)
    : std::runtime_error("every utterance in the batch failed (" + std::to_string(failures.size()) + ")"),
      failures_(std::move(failures)) {}

ReplayReport replay(const std::vector<Utterance>& speakers, const llm::Gateway& gateway,
                    std::size_t concurrency) {
    if (speakers.empty()) throw DomainError("replay needs at least one utterance");
    for (const auto& u : speakers) {
        if (u.role != Role::Speaker) throw DomainError("replay input " + u.id + " is not a speaker turn");
    }

    std::vector<std::variant<std::monostate, GateOutcome, ReplayFailure>> slots(speakers.size());
    parallel_for(speakers.size(), concurrency, [&](std::size_t i) {
        try {
            slots[i] = respond(speakers[i], gateway);
        } catch (const GateError& e) {
            slots[i] = ReplayFailure{e.utterance_id(),
                                     e.stage() == GateError::Stage::Classify ? "classify" : "generate",
                                     std::string(to_string(e.cause())), e.what()};
        }
    });

    ReplayReport report;
    for (auto& slot : slots) {
        if (auto* o = std::get_if<GateOutcome>(&slot)) {
            report.label_histogram[static_cast<std::size_t>(direction_code(o->prediction.label))]++;
            if (o->route == Route::Empathetic) report.empathetic_count++;
            report.outcomes.push_back(std::move(*o));
        } else if (auto* f = std::get_if<ReplayFailure>(&slot)) {
            report.failures.push_back(std::move(*f));
        }
    }
    if (report.outcomes.empty()) throw BatchFailed(std::move(report.failures));
    report.total = report.outcomes.size();
    report.empathetic_share =
        static_cast<double>(report.empathetic_count) / static_cast<double>(report.total);
    return report;
}

std::string format_report(const ReplayReport& report) {
    std::ostringstream os;
    char share[32];
    std::snprintf(share, sizeof share, "%.1f%%", report.empathetic_share * 100.0);
    os << "Empathetic responses: " << report.empathetic_count << " / " << report.total << " ("
       << share << ")\n";
    os << "Regular responses:    " << report.total - report.empathetic_count << '\n';
    for (auto d : kAllDirections) {
        os << "  label " << to_string(d) << ": "
           << report.label_histogram[static_cast<std::size_t>(direction_code(d))] << '\n';
    }
    os << "Failures: " << report.failures.size() << '\n';
    for (const auto& f : report.failures) {
        os << "  " << f.utterance_id << " [" << f.stage << ", " << f.cause << "] " << f.message << '\n';
    }
    return os.str();
}

} // namespace whee::gate
