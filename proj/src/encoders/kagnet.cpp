#include "schemaqa/encoders/kagnet.hpp"

#include <algorithm>
#include <set>

namespace schemaqa::kagnet {

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, Rng& rng, double radius = 0.05) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-radius, radius);
    return t;
}

}  // namespace

KagnetParams KagnetParams::init(const KagnetConfig& config, std::size_t num_concepts,
                                std::size_t num_relations, Rng& rng) {
    KagnetParams p;
    p.config = config;
    p.concept_embeddings = uniform_tensor({num_concepts, config.concept_dim}, rng);
    p.relation_embeddings = uniform_tensor({num_relations * 2, config.concept_dim}, rng);
    for (std::size_t l = 0; l < config.gcn_layers; ++l) {
        p.gcn_weights.push_back(uniform_tensor({config.concept_dim, config.concept_dim}, rng));
    }
    p.lstm.w = uniform_tensor({config.concept_dim + config.path_dim, 4 * config.path_dim}, rng);
    p.lstm.b = Tensor::zeros({4 * config.path_dim});
    p.attention_w = uniform_tensor({config.statement_dim + config.path_dim}, rng);
    p.attention_b = Tensor::zeros({1});
    return p;
}

void KagnetParams::visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("kagnet.concepts", concept_embeddings);
    fn("kagnet.relations", relation_embeddings);
    for (std::size_t l = 0; l < gcn_weights.size(); ++l) {
        fn("kagnet.gcn." + std::to_string(l), gcn_weights[l]);
    }
    fn("kagnet.lstm.w", lstm.w);
    fn("kagnet.lstm.b", lstm.b);
    fn("kagnet.att.w", attention_w);
    fn("kagnet.att.b", attention_b);
}

KagnetVars kagnet_leaves(Tape& tape, const KagnetParams& params) {
    KagnetVars v;
    v.concept_embeddings = tape.input(params.concept_embeddings);
    v.relation_embeddings = tape.input(params.relation_embeddings);
    for (const auto& w : params.gcn_weights) v.gcn_weights.push_back(tape.input(w));
    v.lstm_w = tape.input(params.lstm.w);
    v.lstm_b = tape.input(params.lstm.b);
    v.attention_w = tape.input(params.attention_w);
    v.attention_b = tape.input(params.attention_b);
    return v;
}

namespace {

// One LSTM cell step on the tape; gate layout matches numerics::lstm_step.
struct TapeLstmState {
    Tape::Var h;
    Tape::Var c;
};

TapeLstmState tape_lstm_step(Tape& t, Tape::Var x, TapeLstmState state, Tape::Var w, Tape::Var b,
                             std::size_t hidden) {
    Tape::Var z = t.add(t.vecmat(t.concat(x, state.h), w), b);
    Tape::Var i_g = t.sigmoid_fn(t.slice(z, 0, hidden));
    Tape::Var f_g = t.sigmoid_fn(t.slice(z, hidden, hidden));
    Tape::Var g_g = t.tanh_fn(t.slice(z, 2 * hidden, hidden));
    Tape::Var o_g = t.sigmoid_fn(t.slice(z, 3 * hidden, hidden));
    Tape::Var c_new = t.add(t.mul(f_g, state.c), t.mul(i_g, g_g));
    Tape::Var h_new = t.mul(o_g, t.tanh_fn(c_new));
    return {h_new, c_new};
}

}  // namespace

Tape::Var kagnet_graph_vector(Tape& t, const sgraph::SchemaGraph& sg, Tape::Var statement,
                              const KagnetVars& vars, const KagnetParams& params,
                              const encoders::Vocab& concept_vocab,
                              const encoders::Vocab& relation_vocab,
                              KagnetAttention* attention) {
    const auto& cfg = params.config;
    if (t.value(statement).size() != cfg.statement_dim) {
        throw Error("kagnet: statement vector dimension mismatch");
    }
    if (sg.paths.empty()) {
        if (attention != nullptr) attention->path_weights = Tensor::zeros({0});
        return t.constant(Tensor::zeros({cfg.path_dim}));
    }

    // GCN over direction-agnostic adjacency with self-loops.
    std::size_t n = sg.nodes.size();
    std::vector<std::set<std::uint32_t>> adj(n);
    for (std::uint32_t v = 0; v < n; ++v) adj[v].insert(v);
    for (const auto& e : sg.edges) {
        adj[e.head].insert(e.tail);
        adj[e.tail].insert(e.head);
    }
    std::vector<Tape::Var> h(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        h[v] = t.row(vars.concept_embeddings, concept_vocab.index_of(sg.nodes[v].term));
    }
    for (std::size_t layer = 0; layer < cfg.gcn_layers; ++layer) {
        std::vector<Tape::Var> next(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            std::vector<Tape::Var> neigh;
            neigh.reserve(adj[v].size());
            for (std::uint32_t u : adj[v]) neigh.push_back(h[u]);
            next[v] = t.relu(t.vecmat(t.mean_of(neigh), vars.gcn_weights[layer]));
        }
        h = std::move(next);
    }

    // LSTM over each path: node and relation embeddings interleaved.
    std::vector<Tape::Var> path_embeddings;
    path_embeddings.reserve(sg.paths.size());
    Tape::Var zero_state = t.constant(Tensor::zeros({cfg.path_dim}));
    for (const auto& path : sg.paths) {
        TapeLstmState state{zero_state, zero_state};
        for (std::size_t i = 0; i < path.nodes.size(); ++i) {
            state = tape_lstm_step(t, h[path.nodes[i]], state, vars.lstm_w, vars.lstm_b,
                                   cfg.path_dim);
            if (i < path.edges.size()) {
                const auto& edge = sg.edges[path.edges[i]];
                std::size_t rel_row = relation_vocab.index_of(edge.relation) * 2 +
                                      (edge.dir == sgraph::EdgeDir::reverse ? 1 : 0);
                Tape::Var rel = t.row(vars.relation_embeddings, rel_row);
                state = tape_lstm_step(t, rel, state, vars.lstm_w, vars.lstm_b, cfg.path_dim);
            }
        }
        path_embeddings.push_back(state.h);
    }

    // Statement-conditioned attention over path embeddings.
    std::vector<Tape::Var> scores;
    scores.reserve(path_embeddings.size());
    for (Tape::Var p : path_embeddings) {
        scores.push_back(t.add(t.dot(t.concat(statement, p), vars.attention_w), vars.attention_b));
    }
    Tape::Var alpha = t.softmax_fn(t.stack(scores));
    if (attention != nullptr) attention->path_weights = t.value(alpha);
    std::vector<Tape::Var> weighted;
    weighted.reserve(path_embeddings.size());
    for (std::size_t i = 0; i < path_embeddings.size(); ++i) {
        weighted.push_back(t.scale_by(path_embeddings[i], t.pick(alpha, i)));
    }
    return t.sum_of(weighted);
}

Tensor encode_graph_kagnet(const sgraph::SchemaGraph& sg, const Tensor& statement,
                           const KagnetParams& params, const encoders::Vocab& concept_vocab,
                           const encoders::Vocab& relation_vocab) {
    Tape t;
    KagnetVars vars = kagnet_leaves(t, params);
    Tape::Var s = t.constant(statement);
    Tape::Var g = kagnet_graph_vector(t, sg, s, vars, params, concept_vocab, relation_vocab);
    numerics::require_finite(t.value(g), "kagnet graph vector");
    return t.value(g);
}

KagnetGrads kagnet_backward(const sgraph::SchemaGraph& sg, const Tensor& statement,
                            const KagnetParams& params, const encoders::Vocab& concept_vocab,
                            const encoders::Vocab& relation_vocab, const Tensor& upstream_grad) {
    Tape t;
    KagnetVars vars = kagnet_leaves(t, params);
    Tape::Var s = t.input(statement);
    Tape::Var g = kagnet_graph_vector(t, sg, s, vars, params, concept_vocab, relation_vocab);
    t.backward(g, upstream_grad);
    KagnetGrads grads;
    grads.concept_embeddings = t.grad(vars.concept_embeddings);
    grads.relation_embeddings = t.grad(vars.relation_embeddings);
    for (Tape::Var w : vars.gcn_weights) grads.gcn_weights.push_back(t.grad(w));
    grads.lstm_w = t.grad(vars.lstm_w);
    grads.lstm_b = t.grad(vars.lstm_b);
    grads.attention_w = t.grad(vars.attention_w);
    grads.attention_b = t.grad(vars.attention_b);
    grads.statement = t.grad(s);
    return grads;
}

}  // namespace schemaqa::kagnet
