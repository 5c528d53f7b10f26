// Acceptance run: one PASS/FAIL line per primary criterion.

#include "whee/app/config.hpp"
#include "whee/app/service.hpp"
#include "whee/corpus.hpp"
#include "whee/cue_baseline.hpp"
#include "whee/evalkit.hpp"
#include "whee/llm_gateway.hpp"
#include "whee/mock_provider.hpp"
#include "whee/util.hpp"
#include "whee/whee_gate.hpp"

#include "httplib.h"
#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace whee;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr auto S = EmpathyDirection::Seeking;
constexpr auto P = EmpathyDirection::Providing;
constexpr auto N = EmpathyDirection::None;

/// Collects the reasons a criterion failed; empty means it held.
struct Problems {
    std::vector<std::string> items;
    void expect(bool ok, const std::string& what) {
        if (!ok) items.push_back(what);
    }
};

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("whee_accept_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<corpus::LabeledUtterance> flat_corpus(std::size_t n) {
    std::vector<corpus::LabeledUtterance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = "u" + std::to_string(i);
        out.push_back({make_utterance(id, "c" + std::to_string(i / 3), static_cast<std::uint32_t>(i % 3),
                                      Role::Speaker, "text " + id, Source::Synthetic),
                       S, std::nullopt});
    }
    return out;
}

std::vector<EmpathyDirection> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::vector<EmpathyDirection> out(n);
    for (auto& l : out) l = direction_from_code(static_cast<int>(rng() % 3));
    return out;
}

CueProfile random_cues(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    return CueProfile(who_from_code(static_cast<int>(rng() % 3)), sentiment_from_code(static_cast<int>(rng() % 3)),
                      unit(rng), unit(rng), level_from_code(static_cast<int>(rng() % 3)),
                      level_from_code(static_cast<int>(rng() % 3)), level_from_code(static_cast<int>(rng() % 3)));
}

// ---------------------------------------------------------------------------

Problems metric_oracle() {
    Problems pr;
    std::mt19937_64 rng(1);
    const auto started = std::chrono::steady_clock::now();
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng() % 50;
        const auto gold = random_labels(rng, n);
        auto pred = random_labels(rng, n);
        for (std::size_t k = 0; k < n; ++k) {
            if (rng() % 2) pred[k] = gold[k];
        }
        double p = 0, r = 0, f = 0;
        for (auto k : {N, S, P}) {
            int tp = 0, fp = 0, fn = 0;
            for (std::size_t j = 0; j < n; ++j) {
                tp += pred[j] == k && gold[j] == k;
                fp += pred[j] == k && gold[j] != k;
                fn += pred[j] != k && gold[j] == k;
            }
            const double pk = tp + fp ? double(tp) / (tp + fp) : 0.0;
            const double rk = tp + fn ? double(tp) / (tp + fn) : 0.0;
            p += pk / 3;
            r += rk / 3;
            f += (pk + rk > 0 ? 2 * pk * rk / (pk + rk) : 0.0) / 3;
        }
        const auto s = eval::macro_scores(eval::confusion(gold, pred));
        if (std::abs(s.precision - p) > 1e-9 || std::abs(s.recall - r) > 1e-9 || std::abs(s.f1 - f) > 1e-9) {
            pr.expect(false, "case " + std::to_string(i) + " disagrees with the brute-force counter");
            break;
        }
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    pr.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
    return pr;
}

Problems hand_checked_macro() {
    Problems pr;
    const auto s = eval::macro_scores(eval::confusion({S, S, N, P}, {S, N, N, P}));
    pr.expect(fmt4(s.precision) == "0.8333", "precision " + fmt4(s.precision));
    pr.expect(fmt4(s.recall) == "0.8333", "recall " + fmt4(s.recall));
    pr.expect(fmt4(s.f1) == "0.7778", "f1 " + fmt4(s.f1));
    return pr;
}

Problems perfect_identity() {
    Problems pr;
    std::mt19937_64 rng(2);
    int off = 0, off_with_all_classes = 0;
    double worst = 1.0;
    for (int i = 0; i < 1000; ++i) {
        const auto labels = random_labels(rng, 1 + rng() % 50);
        const auto s = eval::macro_scores(eval::confusion(labels, labels));
        if (s.precision != 1.0 || s.recall != 1.0 || s.f1 != 1.0) {
            ++off;
            worst = std::min(worst, s.f1);
            const std::set<EmpathyDirection> present(labels.begin(), labels.end());
            off_with_all_classes += present.size() == 3;
        }
    }
    pr.expect(off == 0, std::to_string(off) + " of 1000 self-scored sequences are below 1.0 (lowest f1 " + fmt4(worst) +
                            "); " + std::to_string(off - off_with_all_classes) +
                            " of them lack a class, which scores 0 and still counts in the three-class mean");
    return pr;
}

Problems relabel_fidelity() {
    Problems pr;
    const auto dir = scratch("relabel");
    write_file(dir / "ex.csv",
               "conversation_id,turn_index,role,text,level\n"
               "a,0,speaker,My cat is sick,\n"
               "a,1,listener,Oh no,1\n"
               "a,2,speaker,The vet is closed,\n"
               "a,3,listener,That sounds scary,2\n"
               "a,4,listener,I am so sorry you are going through this,3\n");
    const auto ex = corpus::ingest(dir / "ex.csv", {}, corpus::SourceKind::Ex).records;
    std::map<std::string, EmpathyDirection> got;
    for (const auto& r : ex) got[r.utterance.text] = r.gold;
    pr.expect(ex.size() == 5, "ex fixture kept " + std::to_string(ex.size()) + " rows");
    pr.expect(got["My cat is sick"] == S, "ex opener is not seeking");
    pr.expect(got["The vet is closed"] == N, "ex non-opener speaker is not none");
    pr.expect(got["Oh no"] == N, "ex level 1 is not none");
    pr.expect(got["That sounds scary"] == P, "ex level 2 is not providing");
    pr.expect(got["I am so sorry you are going through this"] == P, "ex level 3 is not providing");

    write_file(dir / "edr.csv",
               "conversation_id,turn_index,role,text,level\n"
               "b,0,speaker,I lost my keys,\n"
               "b,1,listener,Happens,1\n"
               "b,2,speaker,And my wallet,\n"
               "b,3,listener,What a day,2\n"
               "b,4,listener,That must feel awful,3\n");
    got.clear();
    for (const auto& r : corpus::ingest(dir / "edr.csv", {}, corpus::SourceKind::Edr).records) got[r.utterance.text] = r.gold;
    pr.expect(got["I lost my keys"] == S && got["And my wallet"] == S, "edr speakers are not all seeking");
    pr.expect(got["Happens"] == N, "edr level 1 is not none");
    pr.expect(got["What a day"] == P && got["That must feel awful"] == P, "edr levels 2 and 3 are not providing");
    fs::remove_all(dir);
    return pr;
}

Problems split_arithmetic() {
    Problems pr;
    std::vector<corpus::LabeledUtterance> items;
    items.reserve(54249);
    for (std::size_t i = 0; i < 54249; ++i) {
        const auto id = "u" + std::to_string(i);
        items.push_back({make_utterance(id, "c" + id, 0, Role::Speaker, "t", Source::Synthetic), S, std::nullopt});
    }
    const corpus::SplitSpec spec{0.8, 0.1, 0.1, 7, false};
    const auto s = corpus::split(items, spec);
    auto near = [](std::size_t got, std::size_t want) { return (got > want ? got - want : want - got) <= 1; };
    pr.expect(near(s.train.size(), 43399) && near(s.eval.size(), 5425) && near(s.validation.size(), 5425),
              "sizes " + std::to_string(s.train.size()) + "/" + std::to_string(s.eval.size()) + "/" +
                  std::to_string(s.validation.size()));

    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto* part : {&s.train, &s.eval, &s.validation}) {
        for (const auto& r : *part) seen.insert(r.utterance.id);
        total += part->size();
    }
    pr.expect(total == items.size() && seen.size() == items.size(), "partitions are not disjoint and covering");

    // conversation atomicity on multi-turn conversations
    const auto grouped = flat_corpus(3000);
    const auto g = corpus::split(grouped, spec);
    std::map<std::string, std::set<int>> where;
    int part_no = 0;
    for (const auto* part : {&g.train, &g.eval, &g.validation}) {
        for (const auto& r : *part) where[r.utterance.conversation_id].insert(part_no);
        ++part_no;
    }
    for (const auto& [conv, parts] : where) {
        if (parts.size() != 1) {
            pr.expect(false, "conversation " + conv + " is split across partitions");
            break;
        }
    }

    const auto dir = scratch("split");
    for (const char* run : {"a", "b"}) {
        const auto again = corpus::split(items, spec);
        corpus::write_canonical(dir / run / "train.jsonl", again.train);
        corpus::write_canonical(dir / run / "eval.jsonl", again.eval);
        corpus::write_canonical(dir / run / "validation.jsonl", again.validation);
    }
    for (const char* name : {"train.jsonl", "eval.jsonl", "validation.jsonl"}) {
        pr.expect(read_file(dir / "a" / name) == read_file(dir / "b" / name), std::string(name) + " differs across runs");
    }
    fs::remove_all(dir);
    return pr;
}

std::string utterance_of(const llm::ChatRequest& r) {
    for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it) {
        if (auto u = llm::embedded_utterance(it->content)) return *u;
    }
    return {};
}

Problems gate_invariant() {
    Problems pr;
    auto mock = std::make_shared<llm::MockProvider>();
    std::vector<Utterance> speakers;
    for (int i = 0; i < 308; ++i) {
        const auto id = "g" + std::to_string(i);
        const auto text = "utterance number " + std::to_string(i);
        llm::MockScriptEntry e;
        e.text = text;
        e.label = i < 166 ? S : (i % 2 ? P : N);
        e.response = "reply " + std::to_string(i);
        mock->add_script(e);
        speakers.push_back(make_utterance(id, "conv" + id, 0, Role::Speaker, text, Source::Synthetic));
    }
    std::shuffle(speakers.begin(), speakers.end(), std::mt19937_64(3));
    const llm::Gateway gateway(mock, llm::ProviderConfig{});
    const auto report = gate::replay(speakers, gateway, 4);
    const auto text = gate::format_report(report);
    pr.expect(text.find("53.9%") != std::string::npos, "report does not print 53.9%");
    pr.expect(report.total == 308 && report.empathetic_count == 166, "counts " + std::to_string(report.empathetic_count) +
                                                                          " / " + std::to_string(report.total));
    for (const auto& o : report.outcomes) {
        if ((o.route == Route::Empathetic) != (o.prediction.label == S)) {
            pr.expect(false, "route and label disagree for " + o.utterance_id);
            break;
        }
    }
    return pr;
}

Problems parser_robustness() {
    Problems pr;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 1000; ++i) {
        const auto cues = random_cues(rng);
        const auto label = direction_from_code(static_cast<int>(rng() % 3));
        const auto p = llm::parse_prediction(llm::render_record(label, cues), "r");
        if (p.label != label || !(p.cues == cues)) {
            pr.expect(false, "rendered record " + std::to_string(i) + " did not round-trip");
            break;
        }
    }

    const std::vector<std::string> prose{"Sure, here is the analysis.", "Label follows:", "", "Hope this helps!",
                                         "The speaker seems upset; see the record below.", "Result:\n"};
    const std::vector<std::string> junk{"{\"label\": \"seeking\"",  "```json\n{\"who\": 0}\n```",
                                        "label: seeking, who: 0",   "{}",
                                        "[1, 2, 3]",                "I cannot classify this.",
                                        "{\"label\": \"maybe\"}",   "```\nnothing\n```"};
    int parsed = 0, typed = 0;
    for (int i = 0; i < 200; ++i) {
        const bool has_record = i % 2 == 0;
        const auto label = direction_from_code(static_cast<int>(rng() % 3));
        const auto cues = random_cues(rng);
        std::string body = has_record ? llm::render_record(label, cues) : junk[rng() % junk.size()];
        switch (rng() % 3) {
        case 0:
            body = "```json\n" + body + "\n```";
            break;
        case 1:
            body = "```\n" + body + "\n```";
            break;
        default:
            break;
        }
        const auto raw = prose[rng() % prose.size()] + "\n" + body + "\n" + prose[rng() % prose.size()];
        try {
            const auto p = llm::parse_prediction(raw, "f");
            if (has_record && p.label == label && p.cues == cues) {
                ++parsed;
            } else {
                pr.expect(false, "case " + std::to_string(i) + " parsed to the wrong record");
            }
        } catch (const llm::ParseError&) {
            if (has_record) pr.expect(false, "case " + std::to_string(i) + " rejected a valid record");
            else ++typed;
        } catch (const std::exception& e) {
            pr.expect(false, "case " + std::to_string(i) + " threw an untyped error: " + e.what());
        }
    }
    pr.expect(parsed == 100 && typed == 100,
              "parsed " + std::to_string(parsed) + "/100, typed errors " + std::to_string(typed) + "/100");

    for (int max_retries : {1, 2, 3, 5}) {
        auto mock = std::make_shared<llm::MockProvider>(
            [](const llm::ChatRequest&) { return llm::MockReply::text("not a record"); });
        llm::ProviderConfig cfg;
        cfg.max_retries = max_retries;
        try {
            llm::Gateway(mock, cfg).classify(make_utterance("x", "c", 0, Role::Speaker, "hi", Source::Synthetic));
        } catch (const llm::RetriesExhausted&) {
        }
        pr.expect(mock->call_count() == static_cast<std::size_t>(max_retries),
                  "max_retries " + std::to_string(max_retries) + " made " + std::to_string(mock->call_count()) +
                      " calls");
    }
    return pr;
}

Problems vad_scorer() {
    Problems pr;
    cues::AffectLexicon lex("accept", cues::Range{-1.0, 1.0});
    lex.add("happy", 0.9, 0.6);
    lex.add("sad", -0.8, 0.3);
    const auto two = cues::score_vad("happy sad", lex);
    pr.expect(std::abs(two.valence - 0.05) < 1e-12 && std::abs(two.arousal - 0.45) < 1e-12,
              "two-token mean is (" + std::to_string(two.valence) + ", " + std::to_string(two.arousal) + ")");
    const auto none = cues::score_vad("zzz qqq", lex);
    pr.expect(none.valence == 0.0 && none.arousal == 0.0, "zero-match text is not neutral");

    cues::AffectLexicon wide("wide", cues::Range{1.0, 9.0});
    const std::vector<std::string> words{"joy", "grief", "rage", "calm", "dull", "awe"};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> native(1.0, 9.0);
    for (const auto& w : words) wide.add(w, native(rng), native(rng));
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        for (int k = 0, n = static_cast<int>(rng() % 15); k < n; ++k) {
            text += (rng() % 3 ? words[rng() % words.size()] : "filler") + std::string(rng() % 2 ? " " : "! ");
        }
        const auto s = cues::score_vad(text, wide);
        if (s.valence < -1.0 || s.valence > 1.0 || s.arousal < -1.0 || s.arousal > 1.0) {
            pr.expect(false, "out of range for \"" + text + "\"");
            break;
        }
    }
    return pr;
}

std::string line_starting(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(prefix, 0) == 0) return line;
    }
    return {};
}

Problems cue_distribution_report() {
    Problems pr;
    std::mt19937_64 rng0(7);
    std::vector<Prediction> preds;
    for (int i = 0; i < 100; ++i) {
        const auto who = i < 92 ? Who::SelfFocus : (i % 2 ? Who::Partner : Who::Other);
        preds.push_back({"p" + std::to_string(i), S,
                         CueProfile(who, Sentiment::Negative, -0.5, 0.4, MechanismLevel::Absent, MechanismLevel::Strong,
                                    MechanismLevel::Absent),
                         "mock", "", 1});
    }
    preds.push_back({"q", P, random_cues(rng0), "mock", "", 1});
    const auto d = eval::cue_distribution(preds, S);
    const auto text = eval::format_distribution(d, "Seeking");
    const auto who = line_starting(text, "Who");
    pr.expect(who == "Who                   92 (0.92)       I or We", "Who line is \"" + who + "\"");
    pr.expect(line_starting(text, "Empathy cue") == "Empathy cue           Count           Label", "header differs");

    std::mt19937_64 rng(6);
    std::vector<Prediction> mixed;
    for (int i = 0; i < 500; ++i) {
        mixed.push_back({"m" + std::to_string(i), direction_from_code(static_cast<int>(rng() % 3)), random_cues(rng),
                         "mock", "", 1});
    }
    for (auto label : kAllDirections) {
        for (const auto& cue : eval::cue_distribution(mixed, label).categorical) {
            double sum = 0;
            for (const auto& v : cue.values) sum += v.proportion;
            if (std::abs(sum - 1.0) > 1e-9) pr.expect(false, cue.cue + " proportions sum to " + std::to_string(sum));
        }
    }
    return pr;
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string without(std::string text, const std::string& needle) {
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos)) text.erase(pos, needle.size());
    return text;
}

Problems end_to_end() {
    Problems pr;
    const std::string cli = WHEE_CLI_PATH;
    const std::string fixture = std::string(WHEE_FIXTURE_DIR) + "/edr.csv";
    const std::vector<std::string> outputs{"corpus.jsonl",  "split/train.jsonl",
                                           "split/eval.jsonl", "split/validation.jsonl", "predictions.jsonl",
                                           "report.jsonl",  "outcomes.jsonl", "stdout.txt"};
    const auto started = std::chrono::steady_clock::now();
    std::vector<fs::path> runs;
    for (const char* name : {"run1", "run2"}) {
        const auto dir = scratch(std::string("e2e_") + name);
        runs.push_back(dir);
        const std::string d = dir.string();
        const std::string prefix = "env -u WHEE_PROVIDER -u WHEE_BASE_URL " + cli + " --provider mock --seed 11 ";
        const std::string log = " >>" + d + "/stdout.txt 2>>" + d + "/stderr.txt";
        const std::vector<std::string> steps{
            "ingest " + fixture + " --source edr --out " + d + "/corpus.jsonl",
            "split " + d + "/corpus.jsonl --out-dir " + d + "/split",
            "classify " + d + "/split/eval.jsonl --out " + d + "/predictions.jsonl",
            "evaluate " + d + "/predictions.jsonl --gold " + d + "/split/eval.jsonl --report " + d + "/report.jsonl",
            "gate-run " + d + "/split/eval.jsonl --out " + d + "/outcomes.jsonl"};
        for (const auto& step : steps) {
            const int code = shell(prefix + step + log);
            if (code != 0) {
                pr.expect(false, std::string(name) + ": `" + step.substr(0, step.find(' ')) + "` exited " +
                                     std::to_string(code) + ": " + read_file(dir / "stderr.txt"));
                return pr;
            }
        }
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    for (const auto& out : outputs) {
        std::string a = read_file(runs[0] / out), b = read_file(runs[1] / out);
        if (out == "stdout.txt") {
            a = without(a, runs[0].string());
            b = without(b, runs[1].string());
        }
        pr.expect(!a.empty(), out + " is empty");
        pr.expect(a == b, out + " differs between runs");
    }
    pr.expect(elapsed < 60.0, "two runs took " + std::to_string(elapsed) + " s");
    for (const auto& r : runs) fs::remove_all(r);
    return pr;
}

Problems service_contract() {
    Problems pr;
    const auto dir = scratch("service");
    write_file(dir / "script.jsonl",
               "{\"text\": \"I failed my exam\", \"label\": \"seeking\", \"response\": \"That is hard.\"}\n"
               "{\"text\": \"You will be fine\", \"label\": \"providing\"}\n"
               "{\"text\": \"Trains are neat\", \"label\": \"none\"}\n"
               "{\"text\": \"down\", \"fail\": \"connection\"}\n"
               "{\"text\": \"slow\", \"fail\": \"timeout\"}\n");
    const auto config = app::resolve_config(
        std::nullopt, [](const std::string&) { return std::optional<std::string>(); },
        {{"mock_script", (dir / "script.jsonl").string()}, {"max_text_chars", "200"}});
    app::Service service(config, app::make_gateway(config));
    const int port = service.start("127.0.0.1", 0);
    httplib::Client c("127.0.0.1", port);
    auto status_of = [&](const std::string& path, const std::string& body) {
        auto r = c.Post(path, body, "application/json");
        return r ? r->status : -1;
    };

    auto health = c.Get("/health");
    pr.expect(health && health->status == 200 && json::parse(health->body)["status"] == "ok", "/health is not 200 ok");
    auto classify = c.Post("/classify", R"({"text": "I failed my exam"})", "application/json");
    pr.expect(classify && classify->status == 200 && json::parse(classify->body)["label"] == "seeking",
              "/classify did not label the scripted utterance");

    const std::vector<std::pair<std::string, int>> cases{
        {R"({"text": "x")", 400},   {R"({"nope": 1})", 400}, {R"({"text": ""})", 400},
        {json{{"text", std::string(201, 'a')}}.dump(), 422}, {R"({"text": "down"})", 502},
        {R"({"text": "slow"})", 504}};
    for (const auto& [body, want] : cases) {
        for (const char* path : {"/classify", "/respond"}) {
            const int got = status_of(path, body);
            pr.expect(got == want, std::string(path) + " " + body.substr(0, 30) + " gave " + std::to_string(got) +
                                       ", want " + std::to_string(want));
        }
    }
    pr.expect(status_of("/respond", R"({"text": "hi", "session_id": "bad id!"})") == 422, "bad session id is not 422");
    auto missing = c.Get("/sessions/never-made");
    pr.expect(missing && missing->status == 404, "unknown session is not 404");

    std::string session;
    for (const char* text : {"I failed my exam", "You will be fine", "Trains are neat"}) {
        json body{{"text", text}};
        if (!session.empty()) body["session_id"] = session;
        auto r = c.Post("/respond", body.dump(), "application/json");
        if (!r || r->status != 200) {
            pr.expect(false, std::string("/respond failed for ") + text);
            continue;
        }
        const auto j = json::parse(r->body);
        session = j["session_id"];
        pr.expect((j["route"] == "empathetic") == (j["label"] == "seeking"),
                  std::string("route and label disagree for ") + text);
    }
    auto transcript = c.Get("/sessions/" + session);
    pr.expect(transcript && transcript->status == 200 && json::parse(transcript->body)["turns"].size() == 3,
              "transcript does not hold three turns");
    service.stop();
    fs::remove_all(dir);
    return pr;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Problems()>>> criteria{
        {"metric oracle equivalence", metric_oracle},
        {"hand-checked macro example", hand_checked_macro},
        {"perfect-prediction identity", perfect_identity},
        {"relabel fidelity", relabel_fidelity},
        {"split arithmetic", split_arithmetic},
        {"gate invariant", gate_invariant},
        {"parser robustness", parser_robustness},
        {"VAD scorer", vad_scorer},
        {"cue-distribution report", cue_distribution_report},
        {"end-to-end mock pipeline", end_to_end},
        {"service contract", service_contract},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Problems pr;
        try {
            pr = run();
        } catch (const std::exception& e) {
            pr.items.push_back(std::string("threw: ") + e.what());
        }
        if (pr.items.empty()) {
            std::cout << "PASS  " << name << '\n';
        } else {
            ++failed;
            std::cout << "FAIL  " << name << '\n';
            for (const auto& item : pr.items) std::cout << "      " << item << '\n';
        }
        std::cout.flush();
    }
    std::cout << (criteria.size() - failed) << " / " << criteria.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
