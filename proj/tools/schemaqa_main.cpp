// Command-line front end: wires ingest / ground / extract / expand / train /
// eval / score / selftest into reproducible, file-based batch runs.
//
// Exit codes: 0 success, 1 usage error, 2 data or I/O error.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "schemaqa/cli/run_config.hpp"
#include "schemaqa/cli/stages.hpp"
#include "schemaqa/model/train.hpp"
#include "schemaqa/util/log.hpp"

namespace {

using schemaqa::Error;
using schemaqa::cli::RunConfig;

struct Cmd {
    CLI::App* app = nullptr;

    std::string config_file;
    std::string kg;
    std::string dataset;
    std::string train_file;
    std::string dev_file;
    std::string grounded;
    std::string graphs;
    std::string train_graphs;
    std::string dev_graphs;
    std::string checkpoint;
    std::string out;
    std::string embeddings;
    std::string encoder;
    std::string optimizer;
    std::string sge;
    std::string language = "en";
    std::string allow_relations;
    double min_weight = 0.0;
    double lr = 0.0;
    std::size_t k = 0;
    std::size_t k_hop = 0;
    std::size_t batch_size = 0;
    std::size_t max_epochs = 0;
    std::size_t patience = 0;
    std::size_t threads = 0;
    std::size_t max_ngram = 0;
    std::size_t statement_dim = 0;
    std::size_t concept_dim = 0;
    std::size_t path_dim = 0;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Cmd& c) {
    c.app = app;
    app->add_option("--config", c.config_file, "JSON run config; flags override it");
    app->add_option("--seed", c.seed, "RNG seed controlling all randomness");
    app->add_option("--threads", c.threads, "worker threads (deterministic merge)");
}

// Resolve the run config: file first (when given), then explicit flags.
RunConfig resolve(const Cmd& c) {
    RunConfig rc;
    if (!c.config_file.empty()) rc = RunConfig::from_file(c.config_file);
    // Not every subcommand registers every flag; missing ones count as unset.
    auto set = [&](const char* flag) {
        const CLI::Option* opt = c.app->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };

    if (set("--kg")) rc.kg_path = c.kg;
    if (set("--dataset")) rc.dataset_path = c.dataset;
    if (set("--train")) rc.train_path = c.train_file;
    if (set("--dev")) rc.dev_path = c.dev_file;
    if (set("--grounded")) rc.grounded_path = c.grounded;
    if (set("--graphs")) rc.graphs_path = c.graphs;
    if (set("--train-graphs")) rc.train_graphs_path = c.train_graphs;
    if (set("--dev-graphs")) rc.dev_graphs_path = c.dev_graphs;
    if (set("--out")) rc.out_path = c.out;
    if (set("--threads")) rc.threads = c.threads;

    auto& t = rc.train;
    if (set("--encoder")) {
        auto kind = schemaqa::model::encoder_kind_from_name(c.encoder);
        if (!kind) throw Error("unknown encoder '" + c.encoder + "'");
        t.encoder_kind = *kind;
    }
    if (set("--optimizer")) {
        if (c.optimizer == "adam") {
            t.optimizer = schemaqa::numerics::OptimizerKind::adam;
        } else if (c.optimizer == "radam") {
            t.optimizer = schemaqa::numerics::OptimizerKind::radam;
        } else {
            throw Error("unknown optimizer '" + c.optimizer + "'");
        }
    }
    if (set("--sge")) t.sge_enabled = c.sge == "on";
    if (set("--embeddings")) {
        t.text_encoder = schemaqa::model::TextEncoderKind::file;
        t.embedding_file = c.embeddings;
    }
    if (set("--k")) t.k = c.k;
    if (set("--k-hop")) t.k_hop = c.k_hop;
    if (set("--lr")) t.learning_rate = c.lr;
    if (set("--batch-size")) t.batch_size = c.batch_size;
    if (set("--max-epochs")) t.max_epochs = c.max_epochs;
    if (set("--patience")) t.patience = c.patience;
    if (set("--max-ngram")) t.max_ngram = c.max_ngram;
    if (set("--statement-dim")) t.statement_dim = c.statement_dim;
    if (set("--concept-dim")) t.concept_dim = c.concept_dim;
    if (set("--path-dim")) t.path_dim = c.path_dim;
    if (c.seed.has_value()) t.rng_seed = *c.seed;
    t.validate();
    return rc;
}

std::string require(const std::string& value, const char* what) {
    if (value.empty()) throw Error(std::string("missing required path: ") + what);
    return value;
}

// Input files are checked up front so a bad path fails before any work runs.
std::string require_input(const std::string& value, const char* what) {
    require(value, what);
    if (!std::filesystem::exists(value)) {
        throw Error(std::string(what) + ": no such file: " + value);
    }
    return value;
}

void check_optional_input(const std::string& value, const char* what) {
    if (!value.empty() && !std::filesystem::exists(value)) {
        throw Error(std::string(what) + ": no such file: " + value);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schema-graph grounded commonsense QA pipeline"};
    app.require_subcommand(1);

    Cmd ingest;
    {
        auto* sub = app.add_subcommand("ingest", "load a TSV triple file, write a binary snapshot");
        sub->add_option("--kg", ingest.kg, "TSV triple file (relation\\thead\\ttail\\tweight)");
        sub->add_option("--out", ingest.out, "snapshot output path");
        sub->add_option("--language", ingest.language, "language prefix filter for URI concepts");
        sub->add_option("--min-weight", ingest.min_weight, "drop triples below this weight");
        sub->add_option("--allow-relations", ingest.allow_relations,
                        "comma-separated relation allowlist");
        add_common(sub, ingest);
    }
    Cmd ground;
    {
        auto* sub = app.add_subcommand("ground", "ground question/choice text to KG concepts");
        sub->add_option("--kg", ground.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--dataset", ground.dataset, "questions, line-delimited JSON");
        sub->add_option("--out", ground.out, "grounded statements output (JSONL)");
        sub->add_option("--max-ngram", ground.max_ngram, "longest concept n-gram to match");
        add_common(sub, ground);
    }
    Cmd extract;
    {
        auto* sub = app.add_subcommand("extract", "enumerate paths and build schema graphs");
        sub->add_option("--kg", extract.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--grounded", extract.grounded, "grounded statements (JSONL)");
        sub->add_option("--k", extract.k, "maximum path length in edges");
        sub->add_option("--out", extract.out, "schema graph output (JSONL)");
        add_common(sub, extract);
    }
    Cmd expand;
    {
        auto* sub = app.add_subcommand("expand", "apply IsA schema graph expansion");
        sub->add_option("--kg", expand.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--graphs", expand.graphs, "schema graphs (JSONL)");
        sub->add_option("--out", expand.out, "expanded schema graph output (JSONL)");
        add_common(sub, expand);
    }
    Cmd train;
    {
        auto* sub = app.add_subcommand("train", "train a scorer and keep the best-dev checkpoint");
        sub->add_option("--kg", train.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--train", train.train_file, "training questions (JSONL)");
        sub->add_option("--dev", train.dev_file, "dev questions (JSONL)");
        sub->add_option("--train-graphs", train.train_graphs,
                        "precomputed schema graphs for the train split");
        sub->add_option("--dev-graphs", train.dev_graphs,
                        "precomputed schema graphs for the dev split");
        sub->add_option("--out", train.out, "output directory");
        sub->add_option("--encoder", train.encoder, "graph encoder: kagnet | mhgrn | none");
        sub->add_option("--optimizer", train.optimizer, "adam | radam");
        sub->add_option("--sge", train.sge, "schema graph expansion: on | off")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--embeddings", train.embeddings, "word-embedding file text encoder");
        sub->add_option("--k", train.k, "path extraction bound");
        sub->add_option("--k-hop", train.k_hop, "message passing hops");
        sub->add_option("--lr", train.lr, "learning rate");
        sub->add_option("--batch-size", train.batch_size, "minibatch size");
        sub->add_option("--max-epochs", train.max_epochs, "epoch limit");
        sub->add_option("--patience", train.patience, "early stopping patience");
        sub->add_option("--max-ngram", train.max_ngram, "grounding n-gram bound");
        sub->add_option("--statement-dim", train.statement_dim, "statement vector dimension");
        sub->add_option("--concept-dim", train.concept_dim, "concept embedding dimension");
        sub->add_option("--path-dim", train.path_dim, "path embedding dimension");
        add_common(sub, train);
    }
    Cmd eval;
    {
        auto* sub = app.add_subcommand("eval", "evaluate a checkpoint, write predictions");
        sub->add_option("--kg", eval.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--checkpoint", eval.checkpoint, "trained checkpoint");
        sub->add_option("--dataset", eval.dataset, "labeled questions (JSONL)");
        sub->add_option("--graphs", eval.graphs, "precomputed schema graphs (JSONL)");
        sub->add_option("--out", eval.out, "output directory");
        add_common(sub, eval);
    }
    Cmd score;
    {
        auto* sub = app.add_subcommand("score", "score every question-choice pair");
        sub->add_option("--kg", score.kg, "knowledge graph (TSV or snapshot)");
        sub->add_option("--checkpoint", score.checkpoint, "trained checkpoint");
        sub->add_option("--dataset", score.dataset, "questions (JSONL)");
        sub->add_option("--graphs", score.graphs, "precomputed schema graphs (JSONL)");
        sub->add_option("--out", score.out, "scores output (JSONL)");
        add_common(sub, score);
    }
    Cmd selftest;
    {
        auto* sub = app.add_subcommand("selftest", "run the built-in oracle and gradient checks");
        add_common(sub, selftest);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("ingest")) {
            RunConfig rc = resolve(ingest);
            schemaqa::kg::LoadOptions opts;
            opts.language_prefix = ingest.language;
            if (ingest.app->count("--min-weight") > 0) opts.min_weight = ingest.min_weight;
            if (!ingest.allow_relations.empty()) {
                std::vector<std::string> allow;
                std::string cur;
                for (char ch : ingest.allow_relations + ",") {
                    if (ch == ',') {
                        if (!cur.empty()) allow.push_back(cur);
                        cur.clear();
                    } else {
                        cur.push_back(ch);
                    }
                }
                opts.relation_allowlist = std::move(allow);
            }
            schemaqa::cli::stage_ingest(require_input(rc.kg_path, "--kg"),
                                        require(rc.out_path, "--out"), opts);
        } else if (app.got_subcommand("ground")) {
            RunConfig rc = resolve(ground);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::stage_ground(graph, rc.kg_path, require_input(rc.dataset_path, "--dataset"),
                                        require(rc.out_path, "--out"), rc.train, rc.threads);
        } else if (app.got_subcommand("extract")) {
            RunConfig rc = resolve(extract);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::stage_extract(graph, rc.kg_path,
                                         require_input(rc.grounded_path, "--grounded"),
                                         require(rc.out_path, "--out"), rc.train, rc.threads);
        } else if (app.got_subcommand("expand")) {
            RunConfig rc = resolve(expand);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::stage_expand(graph, rc.kg_path, require_input(rc.graphs_path, "--graphs"),
                                        require(rc.out_path, "--out"), rc.train, rc.threads);
        } else if (app.got_subcommand("train")) {
            RunConfig rc = resolve(train);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::TrainPaths paths;
            paths.kg_path = rc.kg_path;
            paths.train_path = require_input(rc.train_path, "--train");
            paths.dev_path = require_input(rc.dev_path, "--dev");
            check_optional_input(rc.train_graphs_path, "--train-graphs");
            check_optional_input(rc.dev_graphs_path, "--dev-graphs");
            paths.train_graphs_path = rc.train_graphs_path;
            paths.dev_graphs_path = rc.dev_graphs_path;
            paths.out_dir = require(rc.out_path, "--out");
            schemaqa::cli::stage_train(graph, paths, rc.train);
        } else if (app.got_subcommand("eval")) {
            RunConfig rc = resolve(eval);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::stage_eval(graph, rc.kg_path, require_input(eval.checkpoint, "--checkpoint"),
                                      require_input(rc.dataset_path, "--dataset"), rc.graphs_path,
                                      require(rc.out_path, "--out"));
        } else if (app.got_subcommand("score")) {
            RunConfig rc = resolve(score);
            auto graph = schemaqa::kg::load_kg_any(require_input(rc.kg_path, "--kg"));
            schemaqa::cli::stage_score(graph, rc.kg_path, require_input(score.checkpoint, "--checkpoint"),
                                       require_input(rc.dataset_path, "--dataset"), rc.graphs_path,
                                       require(rc.out_path, "--out"), rc.threads);
        } else if (app.got_subcommand("selftest")) {
            std::uint64_t seed = selftest.seed.value_or(42);
            return schemaqa::cli::run_selftest(seed) == 0 ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
