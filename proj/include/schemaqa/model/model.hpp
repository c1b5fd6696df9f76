#pragma once
// Classifier, training configuration, preprocessing pipeline and evaluation:
// the glue that scores question-choice pairs from statement and graph
// vectors.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schemaqa/encoders/kagnet.hpp"
#include "schemaqa/encoders/mhgrn.hpp"
#include "schemaqa/encoders/vocab.hpp"
#include "schemaqa/graph/schema_graph.hpp"
#include "schemaqa/kg/knowledge_graph.hpp"
#include "schemaqa/model/dataset.hpp"
#include "schemaqa/numerics/optim.hpp"
#include "schemaqa/text/encoders.hpp"

namespace schemaqa::model {

using numerics::Tensor;

enum class EncoderKind { kagnet, mhgrn, none };
enum class TextEncoderKind { hashed, file };

const char* encoder_kind_name(EncoderKind k);
std::optional<EncoderKind> encoder_kind_from_name(const std::string& name);

struct TrainConfig {
    EncoderKind encoder_kind = EncoderKind::mhgrn;
    numerics::OptimizerKind optimizer = numerics::OptimizerKind::adam;
    TextEncoderKind text_encoder = TextEncoderKind::hashed;
    std::string embedding_file;  // used when text_encoder == file

    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 50;
    std::size_t patience = 3;

    std::size_t k = 2;        // path extraction bound, in edges
    std::size_t k_hop = 2;    // message passing range
    std::size_t path_cap = 100;
    std::size_t max_ngram = 4;
    bool sge_enabled = false;

    std::uint64_t rng_seed = 42;

    std::size_t statement_dim = 32;  // d_s
    std::size_t concept_dim = 32;    // d_c
    std::size_t path_dim = 64;       // d_p
    std::size_t gcn_layers = 2;

    void validate() const;
    std::string to_json() const;
    static TrainConfig from_json(const std::string& json_text);
};

struct ClassifierParams {
    Tensor weight;  // [d_s + d_g]
    Tensor bias;    // [1]
};

// probability = sigmoid(weight . [s; g] + bias), strictly inside (0,1).
double score_pair(const Tensor& statement_vec, const Tensor& graph_vec,
                  const ClassifierParams& params);

// Binary cross entropy with the probability clamped to [1e-12, 1 - 1e-12].
double bce_loss(double p, int y);

struct ModelParams {
    TrainConfig config;
    encoders::Vocab concept_vocab;
    encoders::Vocab relation_vocab;
    std::optional<kagnet::KagnetParams> kagnet_params;
    std::optional<mhgrn::MhgrnParams> mhgrn_params;
    ClassifierParams classifier;

    static ModelParams init(const TrainConfig& config, encoders::Vocab concept_vocab,
                            encoders::Vocab relation_vocab);
    std::size_t graph_dim() const;
    // Every trainable tensor, encoder first then classifier; order is stable
    // and shared by the optimizer registry and checkpoints.
    void visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn);
};

// Statement after the full preprocessing pipeline of one question-choice
// pair: grounding, path extraction, optional expansion, text encoding.
struct PreparedStatement {
    text::Statement statement;
    sgraph::SchemaGraph graph;
    Tensor statement_vector;
};

std::unique_ptr<text::TextEncoder> make_text_encoder(const TrainConfig& config);

class Preprocessor {
public:
    Preprocessor(const kg::KnowledgeGraph& kg, const TrainConfig& config);

    PreparedStatement prepare(const text::Statement& stmt) const;
    std::vector<PreparedStatement> prepare_question(const QuestionRecord& record) const;
    std::vector<PreparedStatement> prepare_split(const DatasetSplit& split) const;

    const text::TextEncoder& text_encoder() const { return *encoder_; }

private:
    const kg::KnowledgeGraph& kg_;
    TrainConfig config_;
    std::unique_ptr<text::TextEncoder> encoder_;
};

// Graph vector for a prepared statement under the configured encoder
// (zero vector for EncoderKind::none) followed by the classifier.
double score_statement(const ModelParams& params, const PreparedStatement& prepared);

struct Prediction {
    std::string question_id;
    std::string predicted_label;
    bool correct = false;
};

struct EvalResult {
    double accuracy = 0.0;
    std::vector<Prediction> predictions;
};

// Argmax over the five pair scores; ties break toward the lowest label.
EvalResult evaluate_prepared(const ModelParams& params,
                             const std::vector<std::vector<PreparedStatement>>& questions,
                             const std::vector<const QuestionRecord*>& records);
EvalResult evaluate(const ModelParams& params, const DatasetSplit& split,
                    const kg::KnowledgeGraph& kg, const TrainConfig& config);

std::string predictions_to_csv(const EvalResult& result);

}  // namespace schemaqa::model
