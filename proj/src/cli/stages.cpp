#include "schemaqa/cli/stages.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "schemaqa/grounding/grounding.hpp"
#include "schemaqa/model/checkpoint.hpp"
#include "schemaqa/numerics/grad_check.hpp"
#include "schemaqa/numerics/optim.hpp"
#include "schemaqa/testing/oracles.hpp"
#include "schemaqa/util/hash.hpp"

namespace schemaqa::cli {

namespace {

// Order-preserving parallel map: worker i writes slot i, output is merged in
// input order so threaded runs stay byte-identical to sequential ones.
template <typename Fn>
std::vector<std::string> parallel_lines(std::size_t count, std::size_t threads, Fn&& fn) {
    std::vector<std::string> out(count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out.push_back('\n');
    }
    return out;
}

struct GroundedRecord {
    std::string id;
    std::string choice_label;
    grounding::GroundedStatement grounded;
};

GroundedRecord grounded_from_json(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("grounded record: invalid JSON: ") + e.what());
    }
    try {
        GroundedRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.choice_label = j.at("choice_label").get<std::string>();
        for (const auto& c : j.at("question_concepts")) {
            rec.grounded.question_concepts.push_back(c.get<std::string>());
        }
        for (const auto& c : j.at("answer_concepts")) {
            rec.grounded.answer_concepts.push_back(c.get<std::string>());
        }
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("grounded record: missing field: ") + e.what());
    }
}

std::unordered_map<std::string, sgraph::SchemaGraph> load_graphs_file(const std::string& path) {
    std::unordered_map<std::string, sgraph::SchemaGraph> graphs;
    for (const auto& line : read_lines(path)) {
        auto rec = sgraph::schema_graph_from_json(line);
        graphs.emplace(rec.graph.statement_ref, std::move(rec.graph));
    }
    return graphs;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory: " + dir);
}

}  // namespace

std::vector<std::vector<model::PreparedStatement>> prepare_questions(
    const kg::KnowledgeGraph& kg, const model::DatasetSplit& split,
    const model::TrainConfig& config, const std::string& graphs_path, std::size_t threads) {
    std::vector<std::vector<model::PreparedStatement>> out(split.size());
    if (graphs_path.empty()) {
        model::Preprocessor prep(kg, config);
        parallel_lines(split.size(), threads, [&](std::size_t i) {
            out[i] = prep.prepare_question(split.questions[i]);
            return std::string();
        });
        return out;
    }
    auto graphs = load_graphs_file(graphs_path);
    auto encoder = model::make_text_encoder(config);
    for (std::size_t i = 0; i < split.size(); ++i) {
        for (const auto& stmt : model::question_to_pairs(split.questions[i])) {
            auto it = graphs.find(stmt.ref());
            if (it == graphs.end()) {
                throw Error("no schema graph for statement " + stmt.ref() + " in " + graphs_path);
            }
            model::PreparedStatement p;
            p.statement = stmt;
            p.graph = it->second;
            p.statement_vector = encoder->encode(stmt.declarative_text);
            out[i].push_back(std::move(p));
        }
    }
    return out;
}

void stage_ingest(const std::string& kg_path, const std::string& out_path,
                  const kg::LoadOptions& options) {
    kg::KnowledgeGraph graph = kg::load_kg_text(kg_path, options);
    graph.save_snapshot(out_path);
    const auto& r = graph.report();
    std::printf("ingested %zu triples (%zu concepts, %zu relations); duplicates %zu, "
                "nonpositive weights %zu\n",
                graph.num_triples(), graph.num_concepts(), graph.num_relations(), r.duplicates,
                r.nonpositive_weight);
    model::TrainConfig cfg;
    write_manifest(out_path + ".manifest.json", "ingest", cfg,
                   {{kg_path, file_checksum(kg_path)}}, {out_path});
}

void stage_ground(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& dataset_path, const std::string& out_path,
                  const model::TrainConfig& config, std::size_t threads) {
    model::DatasetSplit split = model::load_dataset(dataset_path);
    std::vector<text::Statement> statements;
    for (const auto& q : split.questions) {
        for (auto& s : model::question_to_pairs(q)) statements.push_back(std::move(s));
    }
    auto lines = parallel_lines(statements.size(), threads, [&](std::size_t i) {
        const auto& stmt = statements[i];
        auto grounded = grounding::ground_statement(kg, stmt.question_text, stmt.choice_text,
                                                    config.max_ngram);
        nlohmann::json j;
        j["id"] = stmt.question_id;
        j["choice_label"] = stmt.choice_label;
        j["question_concepts"] = grounded.question_concepts;
        j["answer_concepts"] = grounded.answer_concepts;
        return j.dump();
    });
    write_file(out_path, join_lines(lines));
    write_manifest(out_path + ".manifest.json", "ground", config,
                   {{kg_path, file_checksum(kg_path)},
                    {dataset_path, file_checksum(dataset_path)}},
                   {out_path});
}

void stage_extract(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                   const std::string& grounded_path, const std::string& out_path,
                   const model::TrainConfig& config, std::size_t threads) {
    std::vector<GroundedRecord> records;
    for (const auto& line : read_lines(grounded_path)) {
        records.push_back(grounded_from_json(line));
    }
    sgraph::EnumerateOptions opts;
    opts.max_length = config.k;
    opts.per_pair_cap = config.path_cap;
    auto lines = parallel_lines(records.size(), threads, [&](std::size_t i) {
        const auto& rec = records[i];
        auto sg = sgraph::extract_schema_graph(kg, rec.grounded.question_concepts,
                                               rec.grounded.answer_concepts,
                                               rec.id + "#" + rec.choice_label, opts);
        return sgraph::schema_graph_to_json(sg, rec.id, rec.choice_label);
    });
    write_file(out_path, join_lines(lines));
    write_manifest(out_path + ".manifest.json", "extract", config,
                   {{kg_path, file_checksum(kg_path)},
                    {grounded_path, file_checksum(grounded_path)}},
                   {out_path});
}

void stage_expand(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& graphs_path, const std::string& out_path,
                  const model::TrainConfig& config, std::size_t threads) {
    std::vector<sgraph::SchemaGraphRecord> records;
    for (const auto& line : read_lines(graphs_path)) {
        records.push_back(sgraph::schema_graph_from_json(line));
    }
    auto lines = parallel_lines(records.size(), threads, [&](std::size_t i) {
        auto expanded = sgraph::expand_schema_graph(kg, records[i].graph, config.rng_seed);
        return sgraph::schema_graph_to_json(expanded, records[i].id, records[i].choice_label);
    });
    write_file(out_path, join_lines(lines));
    write_manifest(out_path + ".manifest.json", "expand", config,
                   {{kg_path, file_checksum(kg_path)},
                    {graphs_path, file_checksum(graphs_path)}},
                   {out_path});
}

double stage_train(const kg::KnowledgeGraph& kg, const TrainPaths& paths,
                   const model::TrainConfig& config) {
    model::DatasetSplit train_split = model::load_dataset(paths.train_path);
    model::DatasetSplit dev_split = model::load_dataset(paths.dev_path);
    auto train_questions = prepare_questions(kg, train_split, config, paths.train_graphs_path);
    auto dev_questions = prepare_questions(kg, dev_split, config, paths.dev_graphs_path);
    std::vector<const model::QuestionRecord*> dev_records;
    for (const auto& q : dev_split.questions) dev_records.push_back(&q);

    encoders::Vocab concept_vocab;
    encoders::Vocab relation_vocab;
    model::collect_vocabs(train_questions, concept_vocab, relation_vocab);
    auto result = model::train_prepared(train_questions, dev_questions, dev_records, config,
                                        std::move(concept_vocab), std::move(relation_vocab));

    ensure_dir(paths.out_dir);
    std::string checkpoint_path = paths.out_dir + "/checkpoint.bin";
    model::save_checkpoint(checkpoint_path, result.params);
    write_file(paths.out_dir + "/training_log.jsonl", model::training_log_to_jsonl(result.log));
    std::map<std::string, std::string> inputs = {
        {paths.kg_path, file_checksum(paths.kg_path)},
        {paths.train_path, file_checksum(paths.train_path)},
        {paths.dev_path, file_checksum(paths.dev_path)},
    };
    if (!paths.train_graphs_path.empty()) {
        inputs.emplace(paths.train_graphs_path, file_checksum(paths.train_graphs_path));
    }
    if (!paths.dev_graphs_path.empty()) {
        inputs.emplace(paths.dev_graphs_path, file_checksum(paths.dev_graphs_path));
    }
    write_manifest(paths.out_dir + "/manifest.json", "train", config, inputs,
                   {checkpoint_path, paths.out_dir + "/training_log.jsonl"});
    double best = result.log.empty() ? 0.0 : result.log[result.best_epoch - 1].dev_accuracy;
    std::printf("training finished: best dev accuracy %.4f at epoch %zu (%zu epochs run)\n", best,
                result.best_epoch, result.log.size());
    return best;
}

double stage_eval(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& checkpoint_path, const std::string& dataset_path,
                  const std::string& graphs_path, const std::string& out_dir) {
    model::ModelParams params = model::load_checkpoint(checkpoint_path);
    model::DatasetSplit split = model::load_dataset(dataset_path);
    auto questions = prepare_questions(kg, split, params.config, graphs_path);
    std::vector<const model::QuestionRecord*> records;
    for (const auto& q : split.questions) records.push_back(&q);
    auto result = model::evaluate_prepared(params, questions, records);

    ensure_dir(out_dir);
    write_file(out_dir + "/predictions.csv", model::predictions_to_csv(result));
    std::map<std::string, std::string> inputs = {
        {kg_path, file_checksum(kg_path)},
        {checkpoint_path, file_checksum(checkpoint_path)},
        {dataset_path, file_checksum(dataset_path)},
    };
    if (!graphs_path.empty()) inputs.emplace(graphs_path, file_checksum(graphs_path));
    write_manifest(out_dir + "/manifest.json", "eval", params.config, inputs,
                   {out_dir + "/predictions.csv"});
    std::printf("accuracy: %.4f over %zu questions\n", result.accuracy, split.size());
    return result.accuracy;
}

void stage_score(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                 const std::string& checkpoint_path, const std::string& dataset_path,
                 const std::string& graphs_path, const std::string& out_path,
                 std::size_t threads) {
    model::ModelParams params = model::load_checkpoint(checkpoint_path);
    model::DatasetSplit split = model::load_dataset(dataset_path);
    auto questions = prepare_questions(kg, split, params.config, graphs_path);
    std::vector<const model::PreparedStatement*> statements;
    for (const auto& q : questions) {
        for (const auto& p : q) statements.push_back(&p);
    }
    auto lines = parallel_lines(statements.size(), threads, [&](std::size_t i) {
        nlohmann::json j;
        j["id"] = statements[i]->statement.question_id;
        j["choice_label"] = statements[i]->statement.choice_label;
        j["score"] = model::score_statement(params, *statements[i]);
        return j.dump();
    });
    write_file(out_path, join_lines(lines));
    std::map<std::string, std::string> inputs = {
        {kg_path, file_checksum(kg_path)},
        {checkpoint_path, file_checksum(checkpoint_path)},
        {dataset_path, file_checksum(dataset_path)},
    };
    if (!graphs_path.empty()) inputs.emplace(graphs_path, file_checksum(graphs_path));
    write_manifest(out_path + ".manifest.json", "score", params.config, inputs, {out_path});
}

namespace {

int check(bool ok, const char* what, int& failures) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what);
    if (!ok) ++failures;
    return failures;
}

}  // namespace

int run_selftest(std::uint64_t seed) {
    using numerics::Tensor;
    int failures = 0;

    check(std::fabs(numerics::sigmoid(0.0) - 0.5) < 1e-15, "sigmoid(0) == 0.5", failures);
    {
        Tensor sm = numerics::softmax(Tensor::vector({1000.0, 1000.0}));
        check(std::fabs(sm[0] - 0.5) < 1e-12 && std::fabs(sm[1] - 0.5) < 1e-12,
              "softmax is shift-stable", failures);
    }
    {
        Tensor theta = Tensor::scalar(1.0);
        numerics::OptimizerHyper hyper;
        hyper.learning_rate = 0.1;
        hyper.epsilon = 0.0;
        auto state = numerics::OptimizerState::make(numerics::OptimizerKind::adam, {1}, hyper);
        numerics::adam_step(theta, Tensor::scalar(1.0), state);
        check(std::fabs(theta[0] - 0.9) < 1e-12, "first Adam step is lr * sign(g)", failures);
    }
    {
        Tensor theta = Tensor::scalar(3.0);
        auto loss = [&]() { return theta[0] * theta[0]; };
        double err = numerics::grad_check(loss, {&theta}, {Tensor::scalar(6.0)});
        check(err < 1e-6, "grad_check accepts the true gradient", failures);
        double bad = numerics::grad_check(loss, {&theta}, {Tensor::scalar(12.0)});
        check(bad > 0.4, "grad_check flags a doubled gradient", failures);
    }
    {
        Rng rng(seed);
        bool all_match = true;
        for (int round = 0; round < 25 && all_match; ++round) {
            auto kg = testing::random_kg(rng, 8, 16, 2);
            std::vector<kg::ConceptId> srcs = {static_cast<kg::ConceptId>(rng.below(8))};
            std::vector<kg::ConceptId> tgts = {static_cast<kg::ConceptId>(rng.below(8))};
            sgraph::EnumerateOptions opts;
            opts.max_length = 3;
            opts.per_pair_cap = 1u << 20;
            auto got = sgraph::enumerate_paths(kg, srcs, tgts, opts).paths;
            auto want = testing::brute_force_paths(kg, srcs, tgts, 3);
            all_match = got == want;
        }
        check(all_match, "path enumeration matches brute force", failures);
    }
    {
        Rng rng(seed + 1);
        auto kg = testing::random_kg(rng, 6, 10, 2);
        sgraph::EnumerateOptions opts;
        std::vector<std::string> cq = {kg.concept_name(0)};
        std::vector<std::string> ca = {kg.concept_name(1)};
        auto sg = sgraph::extract_schema_graph(kg, cq, ca, "selftest#A", opts);

        model::TrainConfig cfg;
        cfg.statement_dim = 5;
        cfg.concept_dim = 4;
        cfg.path_dim = 6;
        encoders::Vocab cv;
        encoders::Vocab rv;
        for (const auto& n : sg.nodes) cv.add(n.term);
        for (const auto& e : sg.edges) rv.add(e.relation);

        Tensor stmt = Tensor::zeros({5});
        for (auto& v : stmt.data) v = rng.uniform(-1.0, 1.0);
        Tensor upstream = Tensor::zeros({6});
        for (auto& v : upstream.data) v = rng.uniform(-1.0, 1.0);

        kagnet::KagnetConfig kc{4, 6, 2, 5};
        Rng init_rng(seed + 2);
        auto kp = kagnet::KagnetParams::init(kc, cv.size(), rv.size(), init_rng);
        auto grads = kagnet::kagnet_backward(sg, stmt, kp, cv, rv, upstream);
        auto loss = [&]() {
            Tensor g = kagnet::encode_graph_kagnet(sg, stmt, kp, cv, rv);
            return numerics::dot(g, upstream);
        };
        double err = numerics::grad_check(loss, {&kp.lstm.w, &kp.attention_w},
                                          {grads.lstm_w, grads.attention_w});
        check(err <= 1e-4, "kagnet gradients pass finite differences", failures);

        mhgrn::MhgrnConfig mc{4, 2, 5};
        auto mp = mhgrn::MhgrnParams::init(mc, cv.size(), rv.size(), init_rng);
        Tensor upstream_m = Tensor::zeros({4});
        for (auto& v : upstream_m.data) v = rng.uniform(-1.0, 1.0);
        auto mgrads = mhgrn::mhgrn_backward(sg, stmt, mp, cv, rv, upstream_m);
        auto loss_m = [&]() {
            Tensor g = mhgrn::encode_graph_mhgrn(sg, stmt, mp, cv, rv);
            return numerics::dot(g, upstream_m);
        };
        double err_m = numerics::grad_check(loss_m, {&mp.input_proj_w, &mp.node_att_w},
                                            {mgrads.input_proj_w, mgrads.node_att_w});
        check(err_m <= 1e-4, "mhgrn gradients pass finite differences", failures);
    }
    {
        auto kg = kg::build_kg({{"IsA", "dog", "animal"},
                                {"IsA", "dog", "pet"},
                                {"AtLocation", "dog", "house"}});
        sgraph::SchemaGraph sg;
        sg.statement_ref = "selftest#B";
        sg.nodes.push_back({"dog", sgraph::NodeOrigin::question});
        bool ok = true;
        auto first = sgraph::expand_schema_graph(kg, sg, seed);
        ok = ok && first.nodes.size() == 2 && first.nodes[1].origin == sgraph::NodeOrigin::extra;
        auto again = sgraph::expand_schema_graph(kg, sg, seed);
        ok = ok && again.nodes.size() == first.nodes.size() &&
             again.nodes[1].term == first.nodes[1].term;
        check(ok, "schema graph expansion adds one IsA neighbor, deterministically", failures);
    }
    std::printf("selftest: %d failure(s)\n", failures);
    return failures;
}

}  // namespace schemaqa::cli
