// whee: corpus preparation, classification, evaluation and the gated reply loop.

#include "whee/app/commands.hpp"
#include "whee/app/config.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <string>

using namespace whee::app;

int main(int argc, char** argv) {
    CLI::App cli{"Empathy-gated dialogue pipeline"};
    cli.require_subcommand(1);
    cli.fallthrough();
    cli.set_version_flag("--version", "whee 0.1.0");

    std::optional<std::string> config_path;
    std::optional<std::string> provider, mock_script, lexicon, prompt_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> concurrency;
    bool show_config = false;
    cli.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    cli.add_option("--provider", provider, "mock or http");
    cli.add_option("--seed", seed, "split seed");
    cli.add_option("--concurrency", concurrency, "provider calls in flight")->check(CLI::PositiveNumber);
    cli.add_option("--mock-script", mock_script, "line-delimited mock script")->check(CLI::ExistingFile);
    cli.add_option("--lexicon", lexicon, "affect lexicon for extract-cues")->check(CLI::ExistingFile);
    cli.add_option("--prompt-dir", prompt_dir, "directory overriding the builtin prompt templates")
        ->check(CLI::ExistingDirectory);
    cli.add_flag("--show-config", show_config, "print the resolved configuration to stderr");

    IngestOptions ingest;
    auto* c_ingest = cli.add_subcommand("ingest", "read a raw corpus and write canonical labeled records");
    c_ingest->add_option("input", ingest.input, "csv, tsv or jsonl file")->required();
    c_ingest->add_option("--source", ingest.source, "ex, edr or generic")->required();
    c_ingest->add_option("--out", ingest.output, "canonical output file")->required();
    c_ingest->add_option("--rejects", ingest.rejects, "rejected rows (default <out>.rejects.jsonl)");
    c_ingest->add_option("--id-field", ingest.schema.id, "utterance id column");
    c_ingest->add_option("--conversation-field", ingest.schema.conversation, "conversation id column")
        ->capture_default_str();
    c_ingest->add_option("--turn-field", ingest.schema.turn, "turn index column (empty: file order)")
        ->capture_default_str();
    c_ingest->add_option("--role-field", ingest.schema.role, "role column")->capture_default_str();
    c_ingest->add_option("--text-field", ingest.schema.text, "text column")->capture_default_str();
    c_ingest->add_option("--label-field", ingest.schema.label, "gold label column (generic)")
        ->capture_default_str();
    c_ingest->add_option("--level-field", ingest.schema.level, "listener empathy level column")
        ->capture_default_str();
    c_ingest->add_option("--source-field", ingest.schema.source, "per-row source column (generic)");

    SplitOptions split;
    auto* c_split = cli.add_subcommand("split", "deterministic conversation-level train/eval/validation split");
    c_split->add_option("corpus", split.corpus, "canonical corpus")->required();
    c_split->add_option("--out-dir", split.out_dir, "directory for train/eval/validation files")->required();

    ClassifyOptions classify;
    auto* c_classify = cli.add_subcommand("classify", "label every utterance with the language model (resumable)");
    c_classify->add_option("corpus", classify.corpus, "canonical corpus")->required();
    c_classify->add_option("--out", classify.output, "prediction records")->required();
    c_classify->add_flag("--speakers-only", classify.speakers_only, "skip listener turns");

    ExtractOptions extract;
    auto* c_extract = cli.add_subcommand("extract-cues", "lexicon baseline cues for every utterance");
    c_extract->add_option("corpus", extract.corpus, "canonical corpus")->required();
    c_extract->add_option("--out", extract.output, "cue records")->required();

    EvaluateOptions evaluate;
    auto* c_eval = cli.add_subcommand("evaluate", "score predictions and report cue distributions");
    c_eval->add_option("predictions", evaluate.predictions, "prediction files (csv, tsv or jsonl)");
    c_eval->add_option("--gold", evaluate.gold, "canonical gold corpus");
    c_eval->add_option("--name", evaluate.names, "row name per predictions file");
    c_eval->add_option("--compare", evaluate.compare, "two cue-record files to compare side by side")
        ->expected(2);
    c_eval->add_option("--label", evaluate.compare_label, "class filter for --compare");
    c_eval->add_option("--report", evaluate.report, "line-delimited JSON report");
    c_eval->add_flag("--strict", evaluate.strict, "fail when prediction ids and gold ids differ");

    GateRunOptions gate;
    auto* c_gate = cli.add_subcommand("gate-run", "replay speaker utterances through the gated responder");
    c_gate->add_option("corpus", gate.corpus, "canonical corpus (listener turns are ignored)")->required();
    c_gate->add_option("--out", gate.output, "outcome records")->required();
    c_gate->add_option("--response-cues", gate.response_cues_dir,
                       "classify the generated replies and write empathetic/regular cue records here");

    ServeOptions serve;
    auto* c_serve = cli.add_subcommand("serve", "HTTP service for live classification and replies");
    c_serve->add_option("--host", serve.host, "bind address");
    c_serve->add_option("--port", serve.port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        std::map<std::string, std::string> overrides;
        if (provider) overrides["provider"] = *provider;
        if (seed) overrides["seed"] = std::to_string(*seed);
        if (concurrency) overrides["concurrency"] = std::to_string(*concurrency);
        if (mock_script) overrides["mock_script"] = *mock_script;
        if (lexicon) overrides["lexicon"] = *lexicon;
        if (prompt_dir) overrides["prompt_dir"] = *prompt_dir;
        const AppConfig config = resolve_config(config_path, process_env(), overrides);
        if (show_config) std::cerr << describe(config);

        if (c_ingest->parsed()) return cmd_ingest(config, ingest, std::cout, std::cerr);
        if (c_split->parsed()) return cmd_split(config, split, std::cout, std::cerr);
        if (c_classify->parsed()) return cmd_classify(config, classify, std::cout, std::cerr);
        if (c_extract->parsed()) return cmd_extract_cues(config, extract, std::cout, std::cerr);
        if (c_eval->parsed()) return cmd_evaluate(config, evaluate, std::cout, std::cerr);
        if (c_gate->parsed()) return cmd_gate_run(config, gate, std::cout, std::cerr);
        if (c_serve->parsed()) return cmd_serve(config, serve, std::cout, std::cerr);
    } catch (...) {
        return report_exception(std::cerr);
    }
    return kExitUsage;
}
