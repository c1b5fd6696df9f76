#include "schemaqa/numerics/nn.hpp"

#include <algorithm>
#include <cmath>

namespace schemaqa::numerics {

double sigmoid(double x) {
    // Evaluate through exp of a non-positive argument so neither branch overflows.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

Tensor softmax(const Tensor& v) {
    if (v.rank() != 1) throw Error("softmax: expects a vector");
    if (v.size() == 0) throw Error("empty attention domain");
    double m = *std::max_element(v.data.begin(), v.data.end());
    Tensor out = v;
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        total += out[i];
    }
    for (auto& x : out.data) x /= total;
    return out;
}

Tensor relu(const Tensor& t) {
    Tensor out = t;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor gcn_layer(const Tensor& h, const std::vector<std::vector<std::size_t>>& adjacency,
                 const Tensor& w) {
    if (h.rank() != 2) throw Error("gcn_layer: node embeddings must be a matrix");
    std::size_t n = h.rows();
    std::size_t d = h.cols();
    if (adjacency.size() != n) {
        throw Error("gcn_layer: adjacency covers " + std::to_string(adjacency.size()) +
                    " nodes, embeddings cover " + std::to_string(n));
    }
    if (w.rank() != 2 || w.rows() != d) {
        throw Error("gcn_layer: weight shape " + shape_str(w.shape) +
                    " incompatible with embedding dim " + std::to_string(d));
    }
    Tensor out = Tensor::zeros({n, w.cols()});
    Tensor agg = Tensor::zeros({d});
    for (std::size_t v = 0; v < n; ++v) {
        const auto& nb = adjacency[v];
        bool has_self = false;
        agg.fill(0.0);
        for (std::size_t u : nb) {
            if (u >= n) throw Error("gcn_layer: neighbor id out of range");
            if (u == v) has_self = true;
            for (std::size_t j = 0; j < d; ++j) agg[j] += h.at(u, j);
        }
        if (!has_self) throw Error("gcn_layer: adjacency list missing self-loop");
        double inv_deg = 1.0 / static_cast<double>(nb.size());
        for (auto& x : agg.data) x *= inv_deg;
        Tensor row = vecmat(agg, w);
        for (std::size_t j = 0; j < row.size(); ++j) out.at(v, j) = row[j] > 0.0 ? row[j] : 0.0;
    }
    return out;
}

LstmParams LstmParams::zeros(std::size_t x_dim, std::size_t h_dim) {
    return LstmParams{Tensor::zeros({x_dim + h_dim, 4 * h_dim}), Tensor::zeros({4 * h_dim})};
}

LstmState lstm_step(const Tensor& x, const Tensor& h, const Tensor& c, const LstmParams& params) {
    std::size_t hd = params.hidden_dim();
    if (h.size() != hd || c.size() != hd || x.size() != params.input_dim() ||
        params.w.cols() != 4 * hd) {
        throw Error("lstm_step: dimension mismatch");
    }
    Tensor z = add(vecmat(concat(x, h), params.w), params.b);
    LstmState out{Tensor::zeros({hd}), Tensor::zeros({hd})};
    for (std::size_t j = 0; j < hd; ++j) {
        double i_g = sigmoid(z[j]);
        double f_g = sigmoid(z[hd + j]);
        double g_g = std::tanh(z[2 * hd + j]);
        double o_g = sigmoid(z[3 * hd + j]);
        out.c[j] = f_g * c[j] + i_g * g_g;
        out.h[j] = o_g * std::tanh(out.c[j]);
    }
    return out;
}

}  // namespace schemaqa::numerics
