#include "whee/app/commands.hpp"

#include "whee/app/service.hpp"
#include "whee/delimited.hpp"
#include "whee/evalkit.hpp"
#include "whee/records.hpp"
#include "whee/util.hpp"
#include "whee/whee_gate.hpp"

#include "json.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <unordered_set>

namespace whee::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void require(const std::string& value, const char* what) {
    if (value.empty()) throw UsageError(std::string(what) + " is required");
}

void require_file(const std::string& path, const char* what) {
    require(path, what);
    if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

/// Ids already committed to a prediction file. A torn final line from an
/// interrupted run is cut off so appending can resume cleanly.
std::set<std::string> committed_ids(const std::string& path, std::ostream& err) {
    std::set<std::string> ids;
    if (!fs::exists(path)) return ids;
    const std::string content = read_file(path);
    std::size_t pos = 0, line = 0;
    while (pos < content.size()) {
        ++line;
        const auto nl = content.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::string text = content.substr(pos, terminated ? nl - pos : std::string::npos);
        if (!terminated) {
            err << "discarding incomplete record on line " << line << " of " << path << '\n';
            fs::resize_file(path, pos);
            break;
        }
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("utterance_id") || !j["utterance_id"].is_string()) {
            throw DomainError(path + ":" + std::to_string(line) + ": not a prediction record");
        }
        ids.insert(j["utterance_id"].get<std::string>());
        pos = nl + 1;
    }
    return ids;
}

std::vector<eval::LabeledId> gold_labels(const std::vector<corpus::LabeledUtterance>& corpus) {
    std::vector<eval::LabeledId> out;
    out.reserve(corpus.size());
    for (const auto& r : corpus) out.push_back({r.utterance.id, r.gold});
    return out;
}

bool has_cue_records(const std::string& path) {
    const auto ext = ascii_lower(fs::path(path).extension().string());
    if (ext != ".jsonl" && ext != ".ndjson") return false;
    for (const auto& line : read_lines(path)) {
        if (trim(line).empty()) continue;
        const json j = json::parse(line, nullptr, false);
        return j.is_object() && j.contains("cues");
    }
    return false;
}

void list_ids(std::ostream& os, const char* what, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    os << "  " << ids.size() << ' ' << what << ':';
    for (std::size_t i = 0; i < ids.size() && i < 5; ++i) os << ' ' << ids[i];
    if (ids.size() > 5) os << " ...";
    os << '\n';
}

} // namespace

int cmd_ingest(const AppConfig&, const IngestOptions& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.input, "input file");
    require(opt.output, "--out");
    const auto kind = corpus::parse_source_kind(opt.source);
    if (!kind) throw UsageError("unknown source type '" + opt.source + "' (expected ex, edr or generic)");

    const auto result = corpus::ingest(opt.input, opt.schema, *kind);
    const std::string rejects = opt.rejects.empty() ? opt.output + ".rejects.jsonl" : opt.rejects;
    corpus::write_canonical(opt.output, result.records);
    corpus::write_rejects(rejects, result.rejects);

    out << corpus::format_stats(corpus::corpus_stats(result.records));
    out << "rejected rows: " << result.rejects.size() << '\n';
    for (std::size_t i = 0; i < result.rejects.size() && i < 10; ++i) {
        err << opt.input << ":" << result.rejects[i].line_number << ": " << result.rejects[i].reason << '\n';
    }
    out << "wrote " << opt.output << '\n';
    return kExitOk;
}

int cmd_split(const AppConfig& config, const SplitOptions& opt, std::ostream& out, std::ostream&) {
    require_file(opt.corpus, "corpus file");
    require(opt.out_dir, "--out-dir");
    const auto records = corpus::read_canonical(opt.corpus);
    const auto parts = corpus::split(records, config.split);

    const std::pair<const char*, const std::vector<corpus::LabeledUtterance>*> files[] = {
        {"train", &parts.train}, {"eval", &parts.eval}, {"validation", &parts.validation}};
    for (const auto& [name, rows] : files) {
        const auto path = fs::path(opt.out_dir) / (std::string(name) + ".jsonl");
        corpus::write_canonical(path, *rows);
        std::set<std::string> conversations;
        for (const auto& r : *rows) conversations.insert(r.utterance.conversation_id);
        out << name << ": " << rows->size() << " utterances, " << conversations.size() << " conversations -> "
            << path.string() << '\n';
    }
    return kExitOk;
}

int cmd_classify(const AppConfig& config, const ClassifyOptions& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.corpus, "corpus file");
    require(opt.output, "--out");
    const auto records = corpus::read_canonical(opt.corpus);
    const auto done = committed_ids(opt.output, err);

    std::vector<Utterance> pending;
    std::size_t skipped = 0;
    for (const auto& r : records) {
        if (opt.speakers_only && r.utterance.role != Role::Speaker) continue;
        if (done.count(r.utterance.id)) {
            ++skipped;
            continue;
        }
        pending.push_back(r.utterance);
    }

    const auto gateway = make_gateway(config);
    if (!fs::path(opt.output).parent_path().empty()) fs::create_directories(fs::path(opt.output).parent_path());
    std::ofstream file(opt.output, std::ios::binary | std::ios::app);
    if (!file) throw IoError("cannot open " + opt.output);

    std::size_t written = 0, failed = 0;
    const std::size_t chunk = std::max<std::size_t>(config.concurrency * 8, 1);
    for (std::size_t start = 0; start < pending.size(); start += chunk) {
        const std::size_t n = std::min(chunk, pending.size() - start);
        std::vector<std::optional<Prediction>> results(n);
        std::vector<std::string> errors(n);
        parallel_for(n, config.concurrency, [&](std::size_t i) {
            try {
                results[i] = gateway->classify(pending[start + i]);
            } catch (const llm::RetriesExhausted& e) {
                errors[i] = std::string("retries exhausted after ") + std::to_string(e.attempts()) +
                            " attempts: " + e.last_error().what();
            } catch (const llm::ProviderUnreachable& e) {
                errors[i] = e.what();
            }
        });
        // commit in corpus order
        for (std::size_t i = 0; i < n; ++i) {
            if (results[i]) {
                file << records::prediction_json(*results[i]).dump() << '\n';
                ++written;
            } else {
                ++failed;
                err << "classify " << pending[start + i].id << ": " << errors[i] << '\n';
            }
        }
        file.flush();
        if (!file) throw IoError("write failed: " + opt.output);
    }

    out << "classified " << written << " utterances (" << skipped << " already present, " << failed
        << " failed) -> " << opt.output << '\n';
    if (!pending.empty()) {
        const double rate = static_cast<double>(failed) / static_cast<double>(pending.size());
        if (rate > config.max_failure_rate) {
            err << "failure rate " << rate << " exceeds max_failure_rate " << config.max_failure_rate << '\n';
            return kExitProvider;
        }
    }
    return kExitOk;
}

int cmd_extract_cues(const AppConfig& config, const ExtractOptions& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.corpus, "corpus file");
    require(opt.output, "--out");
    if (config.lexicon.empty()) throw UsageError("a lexicon is required (--lexicon or lexicon = ... in config)");
    require_file(config.lexicon, "lexicon");

    const auto load = cues::load_lexicon(config.lexicon, config.lexicon_range);
    for (const auto& r : load.rejects) err << config.lexicon << ":" << r.line_number << ": " << r.reason << '\n';
    if (load.lexicon.size() == 0) throw DomainError("lexicon has no usable entries: " + config.lexicon);

    const auto corpus = corpus::read_canonical(opt.corpus);
    std::string body;
    std::size_t matched = 0;
    for (const auto& r : corpus) {
        records::TaggedCues t{r.utterance.id, r.gold,
                              cues::baseline_profile(r.utterance.text, load.lexicon, config.sentiment_threshold)};
        for (const auto& tok : cues::tokenize(r.utterance.text)) {
            if (load.lexicon.find(tok)) {
                ++matched;
                break;
            }
        }
        body += records::cue_record_json(t, "baseline").dump();
        body += '\n';
    }
    write_file(opt.output, body);
    out << "lexicon " << load.lexicon.name() << ": " << load.lexicon.size() << " entries, " << load.rejects.size()
        << " rejected rows\n";
    out << "scored " << corpus.size() << " utterances, " << matched << " with at least one lexicon match -> "
        << opt.output << '\n';
    return kExitOk;
}

int cmd_evaluate(const AppConfig&, const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.predictions.empty() && opt.compare.empty()) {
        throw UsageError("nothing to evaluate: give predictions files and/or --compare A B");
    }
    if (!opt.compare.empty() && opt.compare.size() != 2) throw UsageError("--compare takes exactly two files");
    if (!opt.names.empty() && opt.names.size() != opt.predictions.size()) {
        throw UsageError("--name must be given once per predictions file");
    }

    std::string report;
    int status = kExitOk;

    if (!opt.predictions.empty()) {
        require_file(opt.gold, "--gold corpus");
        const auto gold = gold_labels(corpus::read_canonical(opt.gold));
        std::vector<std::string> ids;
        for (const auto& g : gold) ids.push_back(g.id);

        std::vector<eval::ScoreRow> rows;
        std::vector<eval::ConfusionMatrix> matrices;
        for (std::size_t f = 0; f < opt.predictions.size(); ++f) {
            const auto& path = opt.predictions[f];
            require_file(path, "predictions file");
            const std::string name = opt.names.empty() ? stem_of(path) : opt.names[f];
            const auto file = eval::ingest_predictions(path, ids);
            const auto aligned = eval::align(gold, file);
            if (!aligned.missing.empty() || !aligned.unresolved.empty()) {
                err << name << ": id mismatch against " << opt.gold << '\n';
                list_ids(err, "gold ids without a prediction", aligned.missing);
                list_ids(err, "predicted ids not in the gold corpus", aligned.unresolved);
                if (opt.strict) status = kExitValidation;
            }
            if (aligned.gold.empty()) throw DomainError(name + ": no predictions match the gold corpus");
            const auto cm = eval::confusion(aligned.gold, aligned.pred);
            const auto scores = eval::macro_scores(cm);
            rows.push_back({name, scores});
            matrices.push_back(cm);
            json line = eval::scores_json(name, scores, cm);
            line["type"] = "scores";
            line["scored"] = aligned.gold.size();
            line["missing"] = aligned.missing.size();
            line["unresolved"] = aligned.unresolved.size();
            report += line.dump() + '\n';
        }

        out << eval::format_score_table(rows, "Classification on " + stem_of(opt.gold) + " (macro average)") << '\n';
        for (std::size_t f = 0; f < rows.size(); ++f) {
            out << rows[f].name << " confusion matrix\n" << eval::format_confusion(matrices[f]);
            out << eval::format_accuracy(eval::per_class_accuracy(matrices[f])) << '\n';
        }

        for (std::size_t f = 0; f < opt.predictions.size(); ++f) {
            if (!has_cue_records(opt.predictions[f])) continue;
            const auto tagged = records::read_tagged_cues(opt.predictions[f]);
            for (auto label : {EmpathyDirection::Seeking, EmpathyDirection::Providing, EmpathyDirection::None}) {
                const auto d = eval::cue_distribution(tagged, label);
                out << eval::format_distribution(d, rows[f].name + " cues, predicted " +
                                                        std::string(to_string(label)))
                    << '\n';
                json line = eval::distribution_json(d);
                line["type"] = "distribution";
                line["name"] = rows[f].name;
                report += line.dump() + '\n';
            }
        }
    }

    if (opt.compare.size() == 2) {
        std::optional<EmpathyDirection> label;
        if (!opt.compare_label.empty()) {
            label = parse_direction(opt.compare_label);
            if (!label) throw UsageError("unknown label '" + opt.compare_label + "'");
        }
        require_file(opt.compare[0], "comparison file");
        require_file(opt.compare[1], "comparison file");
        const auto c = eval::compare_sources(records::read_tagged_cues(opt.compare[0]),
                                             records::read_tagged_cues(opt.compare[1]), label,
                                             stem_of(opt.compare[0]), stem_of(opt.compare[1]));
        out << eval::format_comparison(c);
        json line = eval::comparison_json(c);
        line["type"] = "comparison";
        report += line.dump() + '\n';
    }

    if (!opt.report.empty()) {
        write_file(opt.report, report);
        out << "report -> " << opt.report << '\n';
    }
    return status;
}

int cmd_gate_run(const AppConfig& config, const GateRunOptions& opt, std::ostream& out, std::ostream& err) {
    require_file(opt.corpus, "corpus file");
    require(opt.output, "--out");
    const auto corpus = corpus::read_canonical(opt.corpus);
    std::vector<Utterance> speakers;
    for (const auto& r : corpus) {
        if (r.utterance.role == Role::Speaker) speakers.push_back(r.utterance);
    }
    if (speakers.empty()) throw UsageError("no speaker utterances in " + opt.corpus);
    if (speakers.size() != corpus.size()) {
        out << "using " << speakers.size() << " speaker utterances (" << corpus.size() - speakers.size()
            << " listener turns ignored)\n";
    }

    const auto gateway = make_gateway(config);
    const auto report = gate::replay(speakers, *gateway, config.concurrency);
    write_file(opt.output, records::to_lines(report.outcomes, records::outcome_json));
    for (const auto& f : report.failures) err << "gate " << f.utterance_id << ": " << f.message << '\n';
    out << gate::format_report(report);
    out << "outcomes -> " << opt.output << '\n';

    if (!opt.response_cues_dir.empty()) {
        std::vector<Utterance> replies;
        for (const auto& o : report.outcomes) {
            const auto& src = *std::find_if(speakers.begin(), speakers.end(),
                                            [&](const Utterance& u) { return u.id == o.utterance_id; });
            replies.push_back(make_utterance(o.utterance_id + "/reply", src.conversation_id, src.turn_index + 1,
                                             Role::Listener, o.response_text, Source::Live));
        }
        std::vector<std::optional<Prediction>> cues(replies.size());
        parallel_for(replies.size(), config.concurrency, [&](std::size_t i) {
            try {
                cues[i] = gateway->classify(replies[i]);
            } catch (const std::exception&) {
                // reported below as a missing row
            }
        });
        std::string empathetic, regular;
        std::size_t missing = 0;
        for (std::size_t i = 0; i < replies.size(); ++i) {
            if (!cues[i]) {
                ++missing;
                err << "reply cues " << replies[i].id << ": classification failed\n";
                continue;
            }
            const bool emp = report.outcomes[i].route == Route::Empathetic;
            records::TaggedCues t{replies[i].id, cues[i]->label, PartialCueProfile::from(cues[i]->cues)};
            (emp ? empathetic : regular) += records::cue_record_json(t, emp ? "empathetic" : "regular").dump() + '\n';
        }
        const auto dir = fs::path(opt.response_cues_dir);
        write_file(dir / "empathetic.jsonl", empathetic);
        write_file(dir / "regular.jsonl", regular);
        out << "reply cues -> " << (dir / "empathetic.jsonl").string() << ", " << (dir / "regular.jsonl").string();
        if (missing) out << " (" << missing << " replies could not be classified)";
        out << '\n';
    }
    return kExitOk;
}

namespace {
Service* g_running = nullptr;
extern "C" void on_signal(int) {
    if (g_running) g_running->stop();
}
} // namespace

int cmd_serve(const AppConfig& config, const ServeOptions& opt, std::ostream& out, std::ostream& err) {
    if (!config.static_dir.empty() && !fs::is_directory(config.static_dir)) {
        throw IoError("static_dir not found: " + config.static_dir);
    }
    Service service(config, make_gateway(config), &err);
    const int port = service.start(opt.host.value_or(config.host), opt.port.value_or(config.port));
    out << "listening on http://" << opt.host.value_or(config.host) << ':' << port << " (provider "
        << (config.provider == "http" ? "http:" + config.llm.model_name : std::string("mock")) << ")\n";
    out.flush();
    g_running = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.wait();
    g_running = nullptr;
    return kExitOk;
}

int report_exception(std::ostream& err) {
    try {
        throw;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const llm::ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const gate::BatchFailed& e) {
        err << "provider error: " << e.what() << '\n';
        for (const auto& f : e.failures()) err << "  " << f.utterance_id << ": " << f.message << '\n';
        return kExitProvider;
    } catch (const llm::ProviderUnreachable& e) {
        err << "provider error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const llm::RetriesExhausted& e) {
        err << "provider error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const llm::EmptyResponse& e) {
        err << "provider error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const corpus::SchemaError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const corpus::CorpusError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const FormatError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace whee::app
