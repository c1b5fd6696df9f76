#pragma once
// KagNet-style schema graph encoder: GCN node updates over direction-agnostic
// adjacency, an LSTM over each relational path (node and relation embeddings
// interleaved), and statement-conditioned attention pooling over the path
// embeddings.

#include <functional>
#include <vector>

#include "schemaqa/encoders/vocab.hpp"
#include "schemaqa/graph/schema_graph.hpp"
#include "schemaqa/numerics/autodiff.hpp"
#include "schemaqa/numerics/nn.hpp"
#include "schemaqa/numerics/tensor.hpp"
#include "schemaqa/util/rng.hpp"

namespace schemaqa::kagnet {

using numerics::Tape;
using numerics::Tensor;

struct KagnetConfig {
    std::size_t concept_dim = 32;    // d_c
    std::size_t path_dim = 64;       // d_p (LSTM hidden / graph vector)
    std::size_t gcn_layers = 2;
    std::size_t statement_dim = 32;  // d_s
};

struct KagnetParams {
    KagnetConfig config;
    Tensor concept_embeddings;        // [|concepts|, d_c], row 0 = UNK
    Tensor relation_embeddings;       // [|relations|*2, d_c], direction-distinguished
    std::vector<Tensor> gcn_weights;  // layers x [d_c, d_c]
    numerics::LstmParams lstm;        // input d_c, hidden d_p
    Tensor attention_w;               // [d_s + d_p]
    Tensor attention_b;               // [1]

    static KagnetParams init(const KagnetConfig& config, std::size_t num_concepts,
                             std::size_t num_relations, Rng& rng);
    void visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn);
    std::size_t graph_dim() const { return config.path_dim; }
};

struct KagnetGrads {
    Tensor concept_embeddings;
    Tensor relation_embeddings;
    std::vector<Tensor> gcn_weights;
    Tensor lstm_w;
    Tensor lstm_b;
    Tensor attention_w;
    Tensor attention_b;
    Tensor statement;
};

// Tape handles for one forward pass; also exposed so the training loop can
// compose the encoder with the classifier loss on a single tape.
struct KagnetVars {
    Tape::Var concept_embeddings;
    Tape::Var relation_embeddings;
    std::vector<Tape::Var> gcn_weights;
    Tape::Var lstm_w;
    Tape::Var lstm_b;
    Tape::Var attention_w;
    Tape::Var attention_b;
};

KagnetVars kagnet_leaves(Tape& tape, const KagnetParams& params);

// Attention values observed during a forward pass, for inspection and tests.
struct KagnetAttention {
    Tensor path_weights;  // one weight per path; empty when the graph has none
};

// Builds the graph vector on the tape. Zero paths yield a constant zero
// vector of dimension d_p.
Tape::Var kagnet_graph_vector(Tape& tape, const sgraph::SchemaGraph& sg, Tape::Var statement,
                              const KagnetVars& vars, const KagnetParams& params,
                              const encoders::Vocab& concept_vocab,
                              const encoders::Vocab& relation_vocab,
                              KagnetAttention* attention = nullptr);

Tensor encode_graph_kagnet(const sgraph::SchemaGraph& sg, const Tensor& statement,
                           const KagnetParams& params, const encoders::Vocab& concept_vocab,
                           const encoders::Vocab& relation_vocab);

KagnetGrads kagnet_backward(const sgraph::SchemaGraph& sg, const Tensor& statement,
                            const KagnetParams& params, const encoders::Vocab& concept_vocab,
                            const encoders::Vocab& relation_vocab, const Tensor& upstream_grad);

}  // namespace schemaqa::kagnet
