#pragma once
// MHGRN-style encoder: relation-typed multi-hop message passing over the
// schema graph's full edge set, with statement-conditioned attention over
// relation types, hop depths and nodes.

#include <functional>
#include <vector>

#include "schemaqa/encoders/vocab.hpp"
#include "schemaqa/graph/schema_graph.hpp"
#include "schemaqa/numerics/autodiff.hpp"
#include "schemaqa/numerics/tensor.hpp"
#include "schemaqa/util/rng.hpp"

namespace schemaqa::mhgrn {

using numerics::Tape;
using numerics::Tensor;

constexpr std::size_t kNodeTypes = 5;  // question, answer, both, intermediate, extra

struct MhgrnConfig {
    std::size_t concept_dim = 32;    // d_c (also the graph vector dimension)
    std::size_t hops = 2;            // K_hop
    std::size_t statement_dim = 32;  // d_s
};

struct MhgrnParams {
    MhgrnConfig config;
    Tensor concept_embeddings;                // [|concepts|, d_c], row 0 = UNK
    Tensor type_embeddings;                   // [5, d_c] indexed by NodeOrigin
    Tensor relation_embeddings;               // [|relations|*2, d_c]
    std::vector<Tensor> relation_transforms;  // [|relations|*2 * hops] x [d_c, d_c]
    Tensor input_proj_w;                      // [d_c, d_c]
    Tensor input_proj_b;                      // [d_c]
    Tensor rel_att_w;                         // [d_c + d_s]
    Tensor rel_att_b;                         // [1]
    Tensor hop_att_w;                         // [(hops+1) + d_s]
    Tensor hop_att_b;                         // [1]
    Tensor node_att_w;                        // [d_s + d_c]
    Tensor node_att_b;                        // [1]

    static MhgrnParams init(const MhgrnConfig& config, std::size_t num_concepts,
                            std::size_t num_relations, Rng& rng);
    void visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn);
    std::size_t graph_dim() const { return config.concept_dim; }
    std::size_t num_relation_slots() const {
        return config.hops == 0 ? 0 : relation_transforms.size() / config.hops;
    }
    // Transform for (direction-distinguished relation row, hop k in 1..hops).
    const Tensor& transform(std::size_t rel_row, std::size_t k) const;
};

struct MhgrnGrads {
    Tensor concept_embeddings;
    Tensor type_embeddings;
    Tensor relation_embeddings;
    std::vector<Tensor> relation_transforms;
    Tensor input_proj_w;
    Tensor input_proj_b;
    Tensor rel_att_w;
    Tensor rel_att_b;
    Tensor hop_att_w;
    Tensor hop_att_b;
    Tensor node_att_w;
    Tensor node_att_b;
    Tensor statement;
};

struct MhgrnVars {
    Tape::Var concept_embeddings;
    Tape::Var type_embeddings;
    Tape::Var relation_embeddings;
    std::vector<Tape::Var> relation_transforms;
    Tape::Var input_proj_w;
    Tape::Var input_proj_b;
    Tape::Var rel_att_w;
    Tape::Var rel_att_b;
    Tape::Var hop_att_w;
    Tape::Var hop_att_b;
    Tape::Var node_att_w;
    Tape::Var node_att_b;
};

MhgrnVars mhgrn_leaves(Tape& tape, const MhgrnParams& params);

// Attention values observed during a forward pass, for inspection and tests.
struct MhgrnAttention {
    std::vector<Tensor> relation_weights;  // one distribution per node with in-edges
    Tensor hop_weights;                    // over hops 0..K_hop
    Tensor node_weights;                   // over nodes
};

// Builds the graph vector on the tape. An empty graph yields a constant zero
// vector of dimension d_c.
Tape::Var mhgrn_graph_vector(Tape& tape, const sgraph::SchemaGraph& sg, Tape::Var statement,
                             const MhgrnVars& vars, const MhgrnParams& params,
                             const encoders::Vocab& concept_vocab,
                             const encoders::Vocab& relation_vocab,
                             MhgrnAttention* attention = nullptr);

Tensor encode_graph_mhgrn(const sgraph::SchemaGraph& sg, const Tensor& statement,
                          const MhgrnParams& params, const encoders::Vocab& concept_vocab,
                          const encoders::Vocab& relation_vocab);

MhgrnGrads mhgrn_backward(const sgraph::SchemaGraph& sg, const Tensor& statement,
                          const MhgrnParams& params, const encoders::Vocab& concept_vocab,
                          const encoders::Vocab& relation_vocab, const Tensor& upstream_grad);

}  // namespace schemaqa::mhgrn
