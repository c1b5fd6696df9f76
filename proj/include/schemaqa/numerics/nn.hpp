#pragma once
// Forward-only neural primitives. The autodiff tape reuses the same formulas;
// these plain versions exist so every composite can be cross-checked against
// an independent path.

#include <utility>
#include <vector>

#include "schemaqa/numerics/tensor.hpp"

namespace schemaqa::numerics {

double sigmoid(double x);

// Stable softmax (max-subtraction). Throws on an empty input.
Tensor softmax(const Tensor& v);

Tensor relu(const Tensor& t);

// One mean-aggregation GCN layer: out_v = ReLU(mean_{u in adjacency[v]} h_u * w).
// adjacency[v] must contain v (self-loop) and only valid, distinct node ids.
Tensor gcn_layer(const Tensor& h, const std::vector<std::vector<std::size_t>>& adjacency,
                 const Tensor& w);

// Packed LSTM cell parameters. w is [(x_dim + h_dim), 4*h_dim] in row-vector
// convention (z = [x; h] * w + b), gate column order i | f | g | o.
struct LstmParams {
    Tensor w;
    Tensor b;

    static LstmParams zeros(std::size_t x_dim, std::size_t h_dim);
    std::size_t hidden_dim() const { return b.size() / 4; }
    std::size_t input_dim() const { return w.rows() - hidden_dim(); }
};

struct LstmState {
    Tensor h;
    Tensor c;
};

LstmState lstm_step(const Tensor& x, const Tensor& h, const Tensor& c, const LstmParams& params);

}  // namespace schemaqa::numerics
