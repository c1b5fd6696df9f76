#include "schemaqa/model/train.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "schemaqa/numerics/autodiff.hpp"
#include "schemaqa/util/hash.hpp"
#include "schemaqa/util/log.hpp"

namespace schemaqa::model {

using numerics::Tape;

EarlyStopper::EarlyStopper(std::size_t patience) : patience_(patience) {
    if (patience == 0) throw Error("EarlyStopper: patience must be >= 1");
}

EarlyStopper::Decision EarlyStopper::observe(double dev_accuracy) {
    Decision d;
    if (!seen_any_ || dev_accuracy > best_) {
        best_ = dev_accuracy;
        seen_any_ = true;
        stale_ = 0;
        d.new_best = true;
    } else {
        stale_ += 1;
        d.stop = stale_ >= patience_;
    }
    return d;
}

namespace {

struct ParamSlot {
    std::string name;
    numerics::Tensor* param;
    numerics::Tensor grad;
    numerics::OptimizerState opt;
};

std::vector<ParamSlot> build_registry(ModelParams& params) {
    numerics::OptimizerHyper hyper;
    hyper.learning_rate = params.config.learning_rate;
    std::vector<ParamSlot> registry;
    params.visit_tensors([&](const std::string& name, numerics::Tensor& t) {
        ParamSlot slot;
        slot.name = name;
        slot.param = &t;
        slot.grad = numerics::Tensor::zeros(t.shape);
        slot.opt = numerics::OptimizerState::make(params.config.optimizer, t.shape, hyper);
        registry.push_back(std::move(slot));
    });
    return registry;
}

std::vector<Tape::Var> kagnet_var_list(const kagnet::KagnetVars& v) {
    std::vector<Tape::Var> out = {v.concept_embeddings, v.relation_embeddings};
    out.insert(out.end(), v.gcn_weights.begin(), v.gcn_weights.end());
    out.push_back(v.lstm_w);
    out.push_back(v.lstm_b);
    out.push_back(v.attention_w);
    out.push_back(v.attention_b);
    return out;
}

std::vector<Tape::Var> mhgrn_var_list(const mhgrn::MhgrnVars& v) {
    std::vector<Tape::Var> out = {v.concept_embeddings, v.type_embeddings,
                                  v.relation_embeddings};
    out.insert(out.end(), v.relation_transforms.begin(), v.relation_transforms.end());
    out.push_back(v.input_proj_w);
    out.push_back(v.input_proj_b);
    out.push_back(v.rel_att_w);
    out.push_back(v.rel_att_b);
    out.push_back(v.hop_att_w);
    out.push_back(v.hop_att_b);
    out.push_back(v.node_att_w);
    out.push_back(v.node_att_b);
    return out;
}

// Forward + backward for one statement on a fresh tape; accumulates leaf
// gradients (scaled by upstream) into the registry and returns the raw loss.
double statement_pass(ModelParams& params, std::vector<ParamSlot>& registry,
                      const PreparedStatement& prep, int label, double upstream) {
    Tape tape;
    std::vector<Tape::Var> leaves;
    Tape::Var g = -1;
    Tape::Var s = tape.constant(prep.statement_vector);
    if (params.config.encoder_kind == EncoderKind::kagnet) {
        kagnet::KagnetVars vars = kagnet::kagnet_leaves(tape, *params.kagnet_params);
        leaves = kagnet_var_list(vars);
        g = kagnet::kagnet_graph_vector(tape, prep.graph, s, vars, *params.kagnet_params,
                                        params.concept_vocab, params.relation_vocab);
    } else if (params.config.encoder_kind == EncoderKind::mhgrn) {
        mhgrn::MhgrnVars vars = mhgrn::mhgrn_leaves(tape, *params.mhgrn_params);
        leaves = mhgrn_var_list(vars);
        g = mhgrn::mhgrn_graph_vector(tape, prep.graph, s, vars, *params.mhgrn_params,
                                      params.concept_vocab, params.relation_vocab);
    } else {
        g = tape.constant(numerics::Tensor::zeros({0}));
    }
    Tape::Var cls_w = tape.input(params.classifier.weight);
    Tape::Var cls_b = tape.input(params.classifier.bias);
    leaves.push_back(cls_w);
    leaves.push_back(cls_b);
    if (leaves.size() != registry.size()) {
        throw Error("train: tape leaves out of sync with parameter registry");
    }

    Tape::Var z = tape.add(tape.dot(tape.concat(s, g), cls_w), cls_b);
    Tape::Var p = tape.sigmoid_fn(z);
    Tape::Var loss = tape.bce(p, static_cast<double>(label));
    double loss_value = tape.value(loss)[0];
    tape.backward(loss, numerics::Tensor::scalar(upstream));
    for (std::size_t i = 0; i < registry.size(); ++i) {
        numerics::add_inplace(registry[i].grad, tape.grad(leaves[i]));
    }
    return loss_value;
}

}  // namespace

void collect_vocabs(const std::vector<std::vector<PreparedStatement>>& questions,
                    encoders::Vocab& concept_vocab, encoders::Vocab& relation_vocab) {
    for (const auto& q : questions) {
        for (const auto& prep : q) {
            for (const auto& node : prep.graph.nodes) concept_vocab.add(node.term);
            for (const auto& edge : prep.graph.edges) relation_vocab.add(edge.relation);
        }
    }
}

TrainResult train_prepared(const std::vector<std::vector<PreparedStatement>>& train_questions,
                           const std::vector<std::vector<PreparedStatement>>& dev_questions,
                           const std::vector<const QuestionRecord*>& dev_records,
                           const TrainConfig& config, encoders::Vocab concept_vocab,
                           encoders::Vocab relation_vocab) {
    config.validate();
    std::vector<const PreparedStatement*> train_statements;
    std::vector<int> labels;
    for (const auto& q : train_questions) {
        for (const auto& prep : q) {
            if (!prep.statement.is_answer.has_value()) {
                throw Error("train: statement " + prep.statement.ref() + " has no label");
            }
            train_statements.push_back(&prep);
            labels.push_back(*prep.statement.is_answer ? 1 : 0);
        }
    }
    if (train_statements.empty()) throw Error("train: empty training split");

    ModelParams params =
        ModelParams::init(config, std::move(concept_vocab), std::move(relation_vocab));
    std::vector<ParamSlot> registry = build_registry(params);

    TrainResult result{params, {}, 0};
    EarlyStopper stopper(config.patience);
    Rng shuffle_rng(hash_combine(config.rng_seed, fnv1a64("shuffle")));
    std::vector<std::size_t> order(train_statements.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            std::size_t end = std::min(order.size(), begin + config.batch_size);
            double upstream = 1.0 / static_cast<double>(end - begin);
            for (auto& slot : registry) slot.grad.fill(0.0);
            for (std::size_t i = begin; i < end; ++i) {
                double loss = statement_pass(params, registry, *train_statements[order[i]],
                                             labels[order[i]], upstream);
                if (!std::isfinite(loss)) {
                    throw Error("train: non-finite loss in epoch " + std::to_string(epoch) +
                                ", batch " + std::to_string(batch_index) + ", statement " +
                                train_statements[order[i]]->statement.ref());
                }
                loss_sum += loss;
            }
            for (auto& slot : registry) {
                numerics::optimizer_step(*slot.param, slot.grad, slot.opt);
            }
            ++batch_index;
        }

        EvalResult dev = evaluate_prepared(params, dev_questions, dev_records);
        auto decision = stopper.observe(dev.accuracy);
        if (decision.new_best) {
            result.params = params;
            result.best_epoch = epoch;
        }
        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = loss_sum / static_cast<double>(train_statements.size());
        entry.dev_accuracy = dev.accuracy;
        entry.best_so_far = stopper.best();
        entry.stopped = decision.stop || epoch == config.max_epochs;
        result.log.push_back(entry);
        log::info("epoch " + std::to_string(epoch) + ": loss " +
                  std::to_string(entry.train_loss) + ", dev accuracy " +
                  std::to_string(dev.accuracy));
        if (decision.stop) break;
    }
    return result;
}

TrainResult train(const DatasetSplit& train_split, const DatasetSplit& dev_split,
                  const kg::KnowledgeGraph& kg, const TrainConfig& config) {
    Preprocessor prep(kg, config);
    std::vector<std::vector<PreparedStatement>> train_questions;
    for (const auto& q : train_split.questions) {
        train_questions.push_back(prep.prepare_question(q));
    }
    std::vector<std::vector<PreparedStatement>> dev_questions;
    std::vector<const QuestionRecord*> dev_records;
    for (const auto& q : dev_split.questions) {
        dev_questions.push_back(prep.prepare_question(q));
        dev_records.push_back(&q);
    }
    encoders::Vocab concept_vocab;
    encoders::Vocab relation_vocab;
    collect_vocabs(train_questions, concept_vocab, relation_vocab);
    return train_prepared(train_questions, dev_questions, dev_records, config,
                          std::move(concept_vocab), std::move(relation_vocab));
}

std::string training_log_to_jsonl(const std::vector<EpochLog>& log) {
    std::ostringstream os;
    for (const auto& e : log) {
        nlohmann::json j;
        j["epoch"] = e.epoch;
        j["train_loss"] = e.train_loss;
        j["dev_accuracy"] = e.dev_accuracy;
        j["best_so_far"] = e.best_so_far;
        j["stopped"] = e.stopped;
        os << j.dump() << "\n";
    }
    return os.str();
}

}  // namespace schemaqa::model
