#include "schemaqa/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "schemaqa/grounding/grounding.hpp"
#include "schemaqa/numerics/nn.hpp"

namespace schemaqa::model {

const char* encoder_kind_name(EncoderKind k) {
    switch (k) {
        case EncoderKind::kagnet: return "kagnet";
        case EncoderKind::mhgrn: return "mhgrn";
        case EncoderKind::none: return "none";
    }
    return "none";
}

std::optional<EncoderKind> encoder_kind_from_name(const std::string& name) {
    if (name == "kagnet") return EncoderKind::kagnet;
    if (name == "mhgrn") return EncoderKind::mhgrn;
    if (name == "none") return EncoderKind::none;
    return std::nullopt;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw Error("config: learning_rate must be positive");
    if (batch_size == 0) throw Error("config: batch_size must be positive");
    if (max_epochs == 0) throw Error("config: max_epochs must be positive");
    if (patience == 0) throw Error("config: patience must be >= 1");
    if (k == 0) throw Error("config: k must be >= 1");
    if (max_ngram == 0) throw Error("config: max_ngram must be >= 1");
    if (statement_dim == 0 || concept_dim == 0 || path_dim == 0) {
        throw Error("config: dimensions must be positive");
    }
    if (text_encoder == TextEncoderKind::file && embedding_file.empty()) {
        throw Error("config: text_encoder 'file' requires embedding_file");
    }
}

std::string TrainConfig::to_json() const {
    nlohmann::json j;
    j["encoder"] = encoder_kind_name(encoder_kind);
    j["optimizer"] = optimizer == numerics::OptimizerKind::adam ? "adam" : "radam";
    j["text_encoder"] = text_encoder == TextEncoderKind::hashed ? "hashed" : "file";
    j["embedding_file"] = embedding_file;
    j["learning_rate"] = learning_rate;
    j["batch_size"] = batch_size;
    j["max_epochs"] = max_epochs;
    j["patience"] = patience;
    j["k"] = k;
    j["k_hop"] = k_hop;
    j["path_cap"] = path_cap;
    j["max_ngram"] = max_ngram;
    j["sge"] = sge_enabled;
    j["seed"] = rng_seed;
    j["statement_dim"] = statement_dim;
    j["concept_dim"] = concept_dim;
    j["path_dim"] = path_dim;
    j["gcn_layers"] = gcn_layers;
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    TrainConfig c;
    try {
        if (j.contains("encoder")) {
            auto kind = encoder_kind_from_name(j.at("encoder").get<std::string>());
            if (!kind) throw Error("config: unknown encoder '" +
                                   j.at("encoder").get<std::string>() + "'");
            c.encoder_kind = *kind;
        }
        if (j.contains("optimizer")) {
            std::string opt = j.at("optimizer").get<std::string>();
            if (opt == "adam") {
                c.optimizer = numerics::OptimizerKind::adam;
            } else if (opt == "radam") {
                c.optimizer = numerics::OptimizerKind::radam;
            } else {
                throw Error("config: unknown optimizer '" + opt + "'");
            }
        }
        if (j.contains("text_encoder")) {
            std::string te = j.at("text_encoder").get<std::string>();
            if (te == "hashed") {
                c.text_encoder = TextEncoderKind::hashed;
            } else if (te == "file") {
                c.text_encoder = TextEncoderKind::file;
            } else {
                throw Error("config: unknown text_encoder '" + te + "'");
            }
        }
        if (j.contains("embedding_file")) c.embedding_file = j.at("embedding_file");
        if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate");
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size");
        if (j.contains("max_epochs")) c.max_epochs = j.at("max_epochs");
        if (j.contains("patience")) c.patience = j.at("patience");
        if (j.contains("k")) c.k = j.at("k");
        if (j.contains("k_hop")) c.k_hop = j.at("k_hop");
        if (j.contains("path_cap")) c.path_cap = j.at("path_cap");
        if (j.contains("max_ngram")) c.max_ngram = j.at("max_ngram");
        if (j.contains("sge")) c.sge_enabled = j.at("sge");
        if (j.contains("seed")) c.rng_seed = j.at("seed");
        if (j.contains("statement_dim")) c.statement_dim = j.at("statement_dim");
        if (j.contains("concept_dim")) c.concept_dim = j.at("concept_dim");
        if (j.contains("path_dim")) c.path_dim = j.at("path_dim");
        if (j.contains("gcn_layers")) c.gcn_layers = j.at("gcn_layers");
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: mistyped field: ") + e.what());
    }
    c.validate();
    return c;
}

double score_pair(const Tensor& statement_vec, const Tensor& graph_vec,
                  const ClassifierParams& params) {
    std::size_t want = statement_vec.size() + graph_vec.size();
    if (params.weight.size() != want) {
        throw Error("score_pair: classifier weight has dimension " +
                    std::to_string(params.weight.size()) + ", inputs have " +
                    std::to_string(want));
    }
    double z = params.bias[0];
    for (std::size_t i = 0; i < statement_vec.size(); ++i) {
        z += params.weight[i] * statement_vec[i];
    }
    for (std::size_t i = 0; i < graph_vec.size(); ++i) {
        z += params.weight[statement_vec.size() + i] * graph_vec[i];
    }
    return numerics::sigmoid(z);
}

double bce_loss(double p, int y) {
    if (y != 0 && y != 1) throw Error("bce_loss: label must be 0 or 1");
    double clamped = std::min(1.0 - 1e-12, std::max(1e-12, p));
    return -(y * std::log(clamped) + (1 - y) * std::log(1.0 - clamped));
}

ModelParams ModelParams::init(const TrainConfig& config, encoders::Vocab concept_vocab,
                              encoders::Vocab relation_vocab) {
    config.validate();
    ModelParams p;
    p.config = config;
    p.concept_vocab = std::move(concept_vocab);
    p.relation_vocab = std::move(relation_vocab);
    Rng rng(config.rng_seed);
    if (config.encoder_kind == EncoderKind::kagnet) {
        kagnet::KagnetConfig kc;
        kc.concept_dim = config.concept_dim;
        kc.path_dim = config.path_dim;
        kc.gcn_layers = config.gcn_layers;
        kc.statement_dim = config.statement_dim;
        p.kagnet_params = kagnet::KagnetParams::init(kc, p.concept_vocab.size(),
                                                     p.relation_vocab.size(), rng);
    } else if (config.encoder_kind == EncoderKind::mhgrn) {
        mhgrn::MhgrnConfig mc;
        mc.concept_dim = config.concept_dim;
        mc.hops = config.k_hop;
        mc.statement_dim = config.statement_dim;
        p.mhgrn_params = mhgrn::MhgrnParams::init(mc, p.concept_vocab.size(),
                                                  p.relation_vocab.size(), rng);
    }
    std::size_t dim = config.statement_dim + p.graph_dim();
    p.classifier.weight = Tensor::zeros({dim});
    for (auto& v : p.classifier.weight.data) v = rng.uniform(-0.05, 0.05);
    p.classifier.bias = Tensor::zeros({1});
    return p;
}

std::size_t ModelParams::graph_dim() const {
    switch (config.encoder_kind) {
        case EncoderKind::kagnet: return config.path_dim;
        case EncoderKind::mhgrn: return config.concept_dim;
        case EncoderKind::none: return 0;
    }
    return 0;
}

void ModelParams::visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn) {
    if (kagnet_params.has_value()) kagnet_params->visit_tensors(fn);
    if (mhgrn_params.has_value()) mhgrn_params->visit_tensors(fn);
    fn("classifier.w", classifier.weight);
    fn("classifier.b", classifier.bias);
}

std::unique_ptr<text::TextEncoder> make_text_encoder(const TrainConfig& config) {
    if (config.text_encoder == TextEncoderKind::file) {
        auto enc = text::make_file_encoder(config.embedding_file);
        if (enc->dimension() != config.statement_dim) {
            throw Error("embedding file dimension " + std::to_string(enc->dimension()) +
                        " does not match statement_dim " + std::to_string(config.statement_dim));
        }
        return enc;
    }
    return text::make_hashed_encoder(config.statement_dim);
}

Preprocessor::Preprocessor(const kg::KnowledgeGraph& kg, const TrainConfig& config)
    : kg_(kg), config_(config), encoder_(make_text_encoder(config)) {}

PreparedStatement Preprocessor::prepare(const text::Statement& stmt) const {
    PreparedStatement out;
    out.statement = stmt;
    auto grounded =
        grounding::ground_statement(kg_, stmt.question_text, stmt.choice_text, config_.max_ngram);
    sgraph::EnumerateOptions opts;
    opts.max_length = config_.k;
    opts.per_pair_cap = config_.path_cap;
    out.graph = sgraph::extract_schema_graph(kg_, grounded.question_concepts,
                                             grounded.answer_concepts, stmt.ref(), opts);
    if (config_.sge_enabled) {
        out.graph = sgraph::expand_schema_graph(kg_, out.graph, config_.rng_seed);
    }
    out.statement_vector = encoder_->encode(stmt.declarative_text);
    return out;
}

std::vector<PreparedStatement> Preprocessor::prepare_question(const QuestionRecord& record) const {
    std::vector<PreparedStatement> out;
    for (const auto& stmt : question_to_pairs(record)) out.push_back(prepare(stmt));
    return out;
}

std::vector<PreparedStatement> Preprocessor::prepare_split(const DatasetSplit& split) const {
    std::vector<PreparedStatement> out;
    for (const auto& q : split.questions) {
        for (auto& p : prepare_question(q)) out.push_back(std::move(p));
    }
    return out;
}

double score_statement(const ModelParams& params, const PreparedStatement& prepared) {
    Tensor g;
    switch (params.config.encoder_kind) {
        case EncoderKind::kagnet:
            g = kagnet::encode_graph_kagnet(prepared.graph, prepared.statement_vector,
                                            *params.kagnet_params, params.concept_vocab,
                                            params.relation_vocab);
            break;
        case EncoderKind::mhgrn:
            g = mhgrn::encode_graph_mhgrn(prepared.graph, prepared.statement_vector,
                                          *params.mhgrn_params, params.concept_vocab,
                                          params.relation_vocab);
            break;
        case EncoderKind::none:
            g = Tensor::zeros({0});
            break;
    }
    return score_pair(prepared.statement_vector, g, params.classifier);
}

EvalResult evaluate_prepared(const ModelParams& params,
                             const std::vector<std::vector<PreparedStatement>>& questions,
                             const std::vector<const QuestionRecord*>& records) {
    if (questions.size() != records.size()) {
        throw Error("evaluate: prepared statements do not match records");
    }
    EvalResult result;
    std::size_t correct = 0;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
        const QuestionRecord& rec = *records[qi];
        if (!rec.answer_key.has_value()) {
            throw Error("evaluate: record '" + rec.id + "' has no answerKey");
        }
        std::string best_label;
        double best_score = 0.0;
        for (const auto& prep : questions[qi]) {
            double score = score_statement(params, prep);
            if (best_label.empty() || score > best_score ||
                (score == best_score && prep.statement.choice_label < best_label)) {
                best_score = score;
                best_label = prep.statement.choice_label;
            }
        }
        bool ok = best_label == *rec.answer_key;
        if (ok) ++correct;
        result.predictions.push_back({rec.id, best_label, ok});
    }
    result.accuracy = questions.empty()
                          ? 0.0
                          : static_cast<double>(correct) / static_cast<double>(questions.size());
    return result;
}

EvalResult evaluate(const ModelParams& params, const DatasetSplit& split,
                    const kg::KnowledgeGraph& kg, const TrainConfig& config) {
    Preprocessor prep(kg, config);
    std::vector<std::vector<PreparedStatement>> questions;
    std::vector<const QuestionRecord*> records;
    for (const auto& q : split.questions) {
        questions.push_back(prep.prepare_question(q));
        records.push_back(&q);
    }
    return evaluate_prepared(params, questions, records);
}

std::string predictions_to_csv(const EvalResult& result) {
    std::ostringstream os;
    os << "question_id,predicted_label,correct\n";
    for (const auto& p : result.predictions) {
        os << p.question_id << "," << p.predicted_label << "," << (p.correct ? 1 : 0) << "\n";
    }
    return os.str();
}

}  // namespace schemaqa::model
