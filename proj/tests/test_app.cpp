#include "support.hpp"

#include "whee/app/commands.hpp"
#include "whee/app/config.hpp"
#include "whee/records.hpp"
#include "whee/util.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <sstream>

using namespace whee;
using namespace whee::app;
using whee::testing::TempDir;
using whee::testing::fixture;
using json = nlohmann::json;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars](const std::string& name) -> std::optional<std::string> {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

AppConfig config_with(std::map<std::string, std::string> overrides) {
    return resolve_config(std::nullopt, env_of({}), overrides);
}

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

template <typename Fn>
Run run(Fn&& fn) {
    std::ostringstream out, err;
    Run r;
    try {
        r.code = fn(out, err);
    } catch (...) {
        r.code = report_exception(err);
    }
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// Runs the built CLI and returns its exit status.
int cli(const std::string& args, const TempDir& dir) {
    const std::string cmd = std::string(WHEE_CLI_PATH) + " " + args + " >" + (dir / "cli.out").string() + " 2>" +
                            (dir / "cli.err").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Canonical corpus of `n` speaker openers, each its own conversation.
std::string speaker_corpus(const TempDir& dir, std::size_t n) {
    corpus::write_canonical(dir / "corpus.jsonl", whee::testing::flat_corpus(n));
    return (dir / "corpus.jsonl").string();
}

std::size_t line_count(const std::string& path) {
    std::size_t n = 0;
    for (const auto& l : read_lines(path)) n += l.find_first_not_of(" \t\r") != std::string::npos;
    return n;
}

} // namespace

TEST(Config, PrecedenceIsFlagThenEnvThenFileThenDefault) {
    TempDir dir;
    write_file(dir / "whee.conf", "# comment\nseed = 1\nconcurrency = 2\nmodel = from-file\n");
    const std::string path = (dir / "whee.conf").string();

    EXPECT_EQ(config_with({}).split.seed, 0u);
    EXPECT_EQ(resolve_config(path, env_of({}), {}).split.seed, 1u);
    EXPECT_EQ(resolve_config(path, env_of({{"WHEE_SEED", "2"}}), {}).split.seed, 2u);
    const auto all = resolve_config(path, env_of({{"WHEE_SEED", "2"}}), {{"seed", "3"}});
    EXPECT_EQ(all.split.seed, 3u);
    EXPECT_EQ(all.concurrency, 2u);
    EXPECT_EQ(all.llm.model_name, "from-file");
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
    TempDir dir;
    write_file(dir / "bad.conf", "seeed = 1\n");
    EXPECT_THROW(resolve_config((dir / "bad.conf").string(), env_of({}), {}), llm::ConfigError);
    write_file(dir / "noeq.conf", "seed 1\n");
    EXPECT_THROW(resolve_config((dir / "noeq.conf").string(), env_of({}), {}), llm::ConfigError);
    EXPECT_THROW(config_with({{"concurrency", "many"}}), llm::ConfigError);
    EXPECT_THROW(config_with({{"provider", "carrier-pigeon"}}), llm::ConfigError);
    EXPECT_THROW(resolve_config(std::nullopt, env_of({{"WHEE_PORT", "70000"}}), {}), llm::ConfigError);
}

TEST(Config, SplitFractionsMustSumToOne) {
    EXPECT_THROW(config_with({{"train_fraction", "0.7"}}), llm::ConfigError);
    EXPECT_NO_THROW(config_with({{"train_fraction", "0.7"}, {"eval_fraction", "0.2"}}));
}

TEST(Config, EveryKeyHasAnEnvironmentSpelling) {
    for (const auto& key : config_keys()) {
        EXPECT_EQ(key.find_first_not_of("abcdefghijklmnopqrstuvwxyz_"), std::string::npos) << key;
    }
    const auto c = resolve_config(std::nullopt, env_of({{"WHEE_BASE_URL", "http://example.test/v1"}}), {});
    EXPECT_EQ(c.llm.base_url, "http://example.test/v1");
}

TEST(Config, DescribeNeverPrintsTheCredential) {
    ::setenv("WHEE_APP_TEST_KEY", "sk-live-very-secret", 1);
    const auto c = config_with({{"api_key_env", "WHEE_APP_TEST_KEY"}, {"provider", "http"}});
    const auto text = describe(c);
    EXPECT_NE(text.find("WHEE_APP_TEST_KEY"), std::string::npos);
    EXPECT_EQ(text.find("sk-live-very-secret"), std::string::npos);
}

TEST(Config, HttpProviderNeedsItsCredential) {
    ::unsetenv("WHEE_APP_ABSENT_KEY");
    const auto c = config_with({{"api_key_env", "WHEE_APP_ABSENT_KEY"}, {"provider", "http"}});
    EXPECT_THROW(make_provider(c), llm::ConfigError);
    EXPECT_EQ(make_provider(config_with({}))->tag(), "mock");
}

TEST(Cli, UsageErrorsExitTwo) {
    TempDir dir;
    EXPECT_EQ(cli("", dir), 2);
    EXPECT_EQ(cli("frobnicate", dir), 2);
    EXPECT_EQ(cli("ingest " + fixture("edr.csv").string() + " --source bogus --out " + (dir / "o.jsonl").string(), dir),
              2);
    EXPECT_EQ(cli("split", dir), 2);
}

TEST(Cli, MissingInputExitsThreeAndBadCorpusFour) {
    TempDir dir;
    EXPECT_EQ(cli("ingest /nonexistent.csv --source edr --out " + (dir / "o.jsonl").string(), dir), 3);
    write_file(dir / "empty.csv", "conversation_id,turn_index,role,text,level\n");
    EXPECT_EQ(cli("ingest " + (dir / "empty.csv").string() + " --source edr --out " + (dir / "o.jsonl").string(), dir),
              4);
    corpus::write_canonical(dir / "c.jsonl", whee::testing::flat_corpus(2));
    ::unsetenv("WHEE_API_KEY");
    EXPECT_EQ(cli("--provider http classify " + (dir / "c.jsonl").string() + " --out " + (dir / "p.jsonl").string(), dir),
              4);
}

TEST(Ingest, WritesCanonicalAndRejects) {
    TempDir dir;
    write_file(dir / "in.csv",
               "conversation_id,turn_index,role,text,level\n"
               "c,0,speaker,I miss my dog,\n"
               "c,1,listener,,2\n"
               "c,2,listener,That must be hard,3\n");
    IngestOptions opt;
    opt.input = (dir / "in.csv").string();
    opt.source = "edr";
    opt.output = (dir / "out.jsonl").string();
    const auto r = run([&](auto& o, auto& e) { return cmd_ingest(config_with({}), opt, o, e); });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(corpus::read_canonical(opt.output).size(), 2u);
    EXPECT_EQ(read_file(opt.output + ".rejects.jsonl"), "{\"line_number\":3,\"reason\":\"empty text\"}\n");
}

TEST(Split, SameSeedGivesByteIdenticalFiles) {
    TempDir dir;
    IngestOptions ing;
    ing.input = fixture("edr.csv").string();
    ing.source = "edr";
    ing.output = (dir / "edr.jsonl").string();
    ASSERT_EQ(run([&](auto& o, auto& e) { return cmd_ingest(config_with({}), ing, o, e); }).code, 0);

    const auto cfg = config_with({{"seed", "17"}});
    for (const char* out : {"a", "b"}) {
        SplitOptions s{ing.output, (dir / out).string()};
        ASSERT_EQ(run([&](auto& o, auto& e) { return cmd_split(cfg, s, o, e); }).code, 0);
    }
    std::size_t total = 0;
    for (const char* part : {"train.jsonl", "eval.jsonl", "validation.jsonl"}) {
        EXPECT_EQ(read_file(dir.path() / "a" / part), read_file(dir.path() / "b" / part)) << part;
        total += line_count((dir.path() / "a" / part).string());
    }
    EXPECT_EQ(total, 428u);

    SplitOptions other{ing.output, (dir / "c").string()};
    run([&](auto& o, auto& e) { return cmd_split(config_with({{"seed", "18"}}), other, o, e); });
    EXPECT_NE(read_file(dir.path() / "a" / "eval.jsonl"), read_file(dir.path() / "c" / "eval.jsonl"));
}

TEST(Classify, ResumesWithoutRedoingCommittedRecords) {
    TempDir dir;
    const auto full = speaker_corpus(dir, 10);
    const auto cfg = config_with({{"concurrency", "3"}});

    ClassifyOptions clean{full, (dir / "clean.jsonl").string(), false};
    ASSERT_EQ(run([&](auto& o, auto& e) { return cmd_classify(cfg, clean, o, e); }).code, 0);
    const auto reference = read_file(clean.output);
    ASSERT_EQ(line_count(clean.output), 10u);

    // an interrupted run: six committed lines and a torn seventh
    const auto lines = read_lines(clean.output);
    std::string partial;
    for (int i = 0; i < 6; ++i) partial += lines[i] + "\n";
    partial += lines[6].substr(0, lines[6].size() / 2);
    ClassifyOptions resumed{full, (dir / "resumed.jsonl").string(), false};
    write_file(resumed.output, partial);

    const auto r = run([&](auto& o, auto& e) { return cmd_classify(cfg, resumed, o, e); });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("classified 4 utterances (6 already present, 0 failed)"), std::string::npos) << r.out;
    EXPECT_NE(r.err.find("discarding incomplete record on line 7"), std::string::npos);
    EXPECT_EQ(read_file(resumed.output), reference);

    const auto again = run([&](auto& o, auto& e) { return cmd_classify(cfg, resumed, o, e); });
    EXPECT_NE(again.out.find("classified 0 utterances (10 already present"), std::string::npos);
}

TEST(Classify, CorruptCommittedLineIsAValidationError) {
    TempDir dir;
    ClassifyOptions opt{speaker_corpus(dir, 3), (dir / "p.jsonl").string(), false};
    write_file(opt.output, "not json\n");
    EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_classify(config_with({}), opt, o, e); }).code, kExitValidation);
}

TEST(Classify, FailureRateAboveThresholdExitsFive) {
    TempDir dir;
    const auto corpus = speaker_corpus(dir, 10);
    write_file(dir / "script.jsonl", "{\"text\": \"text u3\", \"fail\": \"connection\"}\n");
    ClassifyOptions opt{corpus, (dir / "p.jsonl").string(), false};
    const auto strict = config_with({{"mock_script", (dir / "script.jsonl").string()}});
    const auto r = run([&](auto& o, auto& e) { return cmd_classify(strict, opt, o, e); });
    EXPECT_EQ(r.code, kExitProvider);
    EXPECT_NE(r.err.find("classify u3"), std::string::npos);
    EXPECT_EQ(line_count(opt.output), 9u);

    ClassifyOptions lenient_opt{corpus, (dir / "q.jsonl").string(), false};
    const auto lenient = config_with({{"mock_script", (dir / "script.jsonl").string()}, {"max_failure_rate", "0.2"}});
    EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_classify(lenient, lenient_opt, o, e); }).code, kExitOk);
}

TEST(Evaluate, PerfectPredictionsAndTwoFileTable) {
    TempDir dir;
    const auto gold = corpus::ingest(fixture("edr.csv"), {}, corpus::SourceKind::Edr).records;
    corpus::write_canonical(dir / "gold.jsonl", gold);
    std::string perfect = "utterance_id,label\n", none = "utterance_id,label\n";
    for (const auto& r : gold) {
        perfect += r.utterance.id + "," + std::string(to_string(r.gold)) + "\n";
        none += r.utterance.id + ",none\n";
    }
    write_file(dir / "perfect.csv", perfect);
    write_file(dir / "none.csv", none);

    EvaluateOptions opt;
    opt.gold = (dir / "gold.jsonl").string();
    opt.predictions = {(dir / "perfect.csv").string(), (dir / "none.csv").string()};
    opt.report = (dir / "report.jsonl").string();
    const auto r = run([&](auto& o, auto& e) { return cmd_evaluate(config_with({}), opt, o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("perfect  1.0000*   1.0000*   1.0000*"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("* best in column"), std::string::npos);

    const auto report = read_lines(opt.report);
    ASSERT_EQ(report.size(), 2u);
    const auto first = json::parse(report[0]);
    EXPECT_EQ(first["type"], "scores");
    EXPECT_EQ(first["f1"], 1.0);
    EXPECT_EQ(first["scored"], 428);
}

TEST(Evaluate, IdMismatchIsReportedAndStrictFails) {
    TempDir dir;
    const auto corpus = speaker_corpus(dir, 3);
    write_file(dir / "p.csv", "utterance_id,label\nu0,seeking\nu1,seeking\nghost,none\n");
    EvaluateOptions opt;
    opt.gold = corpus;
    opt.predictions = {(dir / "p.csv").string()};
    auto r = run([&](auto& o, auto& e) { return cmd_evaluate(config_with({}), opt, o, e); });
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("u2"), std::string::npos);
    EXPECT_NE(r.err.find("ghost"), std::string::npos);
    opt.strict = true;
    r = run([&](auto& o, auto& e) { return cmd_evaluate(config_with({}), opt, o, e); });
    EXPECT_EQ(r.code, kExitValidation);

    write_file(dir / "bad.csv", "utterance_id,label\nu0,perhaps\n");
    opt.predictions = {(dir / "bad.csv").string()};
    r = run([&](auto& o, auto& e) { return cmd_evaluate(config_with({}), opt, o, e); });
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST(GateRun, AllNoneScriptGivesZeroShare) {
    TempDir dir;
    const auto corpus = speaker_corpus(dir, 5);
    std::string script;
    for (int i = 0; i < 5; ++i) script += "{\"text\": \"text u" + std::to_string(i) + "\", \"label\": \"none\"}\n";
    write_file(dir / "script.jsonl", script);
    GateRunOptions opt{corpus, (dir / "outcomes.jsonl").string(), ""};
    const auto r = run([&](auto& o, auto& e) {
        return cmd_gate_run(config_with({{"mock_script", (dir / "script.jsonl").string()}}), opt, o, e);
    });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("Empathetic responses: 0 / 5 (0.0%)"), std::string::npos) << r.out;
    for (const auto& line : read_lines(opt.output)) EXPECT_EQ(json::parse(line)["route"], "regular");
}

TEST(GateRun, ListenerOnlyCorpusIsAUsageError) {
    TempDir dir;
    std::vector<corpus::LabeledUtterance> rows{
        {make_utterance("l0", "c", 1, Role::Listener, "ok", Source::EX), EmpathyDirection::None, EmpathyLevel(1)}};
    corpus::write_canonical(dir / "l.jsonl", rows);
    GateRunOptions opt{(dir / "l.jsonl").string(), (dir / "o.jsonl").string(), ""};
    EXPECT_EQ(run([&](auto& o, auto& e) { return cmd_gate_run(config_with({}), opt, o, e); }).code, kExitUsage);
}

TEST(GateRun, ResponseCuesAreWrittenPerRoute) {
    TempDir dir;
    const auto corpus = speaker_corpus(dir, 6);
    GateRunOptions opt{corpus, (dir / "outcomes.jsonl").string(), (dir / "cues").string()};
    const auto r = run([&](auto& o, auto& e) { return cmd_gate_run(config_with({}), opt, o, e); });
    ASSERT_EQ(r.code, 0) << r.err;
    const auto a = records::read_tagged_cues((dir.path() / "cues" / "empathetic.jsonl"));
    const auto b = records::read_tagged_cues((dir.path() / "cues" / "regular.jsonl"));
    EXPECT_EQ(a.size() + b.size(), 6u);
}
