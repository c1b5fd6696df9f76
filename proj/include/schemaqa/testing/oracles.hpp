#pragma once
// Independent brute-force oracles for the verification harness. Everything
// here recomputes results by the most literal method available and must stay
// independent of the implementation paths it checks.

#include <vector>

#include "schemaqa/graph/schema_graph.hpp"
#include "schemaqa/kg/knowledge_graph.hpp"
#include "schemaqa/numerics/nn.hpp"
#include "schemaqa/util/rng.hpp"

namespace schemaqa::testing {

// Every simple path of edge-length 1..k from sources to targets, found by
// extending node sequences one hop at a time and expanding every parallel
// (relation, direction) connection. Sorted like enumerate_paths output.
std::vector<sgraph::Path> brute_force_paths(const kg::KnowledgeGraph& kg,
                                            const std::vector<kg::ConceptId>& sources,
                                            const std::vector<kg::ConceptId>& targets,
                                            std::size_t k);

// Random multigraph over `nodes` concepts ("n0".."n<i>"), `relations` relation
// names, with `edges` attempted triples (duplicates collapse).
kg::KnowledgeGraph random_kg(Rng& rng, std::size_t nodes, std::size_t edges,
                             std::size_t relations);

// Dense-matrix GCN reference: ReLU(D^-1 (A + I) H W) with A from the
// neighbor lists (self-loops implied by the +I term).
numerics::Tensor dense_gcn_oracle(const numerics::Tensor& h,
                                  const std::vector<std::vector<std::size_t>>& neighbors,
                                  const numerics::Tensor& w);

// Scalar-loop LSTM cell reference.
numerics::LstmState scalar_lstm_oracle(const numerics::Tensor& x, const numerics::Tensor& h,
                                       const numerics::Tensor& c,
                                       const numerics::LstmParams& params);

// Rebuilds a schema graph under a node/edge/path permutation drawn from rng;
// semantically identical, index layout shuffled.
sgraph::SchemaGraph shuffle_schema_graph(const sgraph::SchemaGraph& sg, Rng& rng);

}  // namespace schemaqa::testing
