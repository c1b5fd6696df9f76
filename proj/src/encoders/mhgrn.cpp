#include "schemaqa/encoders/mhgrn.hpp"

#include <algorithm>
#include <map>

namespace schemaqa::mhgrn {

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, Rng& rng, double radius = 0.05) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-radius, radius);
    return t;
}

}  // namespace

MhgrnParams MhgrnParams::init(const MhgrnConfig& config, std::size_t num_concepts,
                              std::size_t num_relations, Rng& rng) {
    MhgrnParams p;
    p.config = config;
    std::size_t d = config.concept_dim;
    p.concept_embeddings = uniform_tensor({num_concepts, d}, rng);
    p.type_embeddings = uniform_tensor({kNodeTypes, d}, rng);
    p.relation_embeddings = uniform_tensor({num_relations * 2, d}, rng);
    for (std::size_t slot = 0; slot < num_relations * 2 * config.hops; ++slot) {
        p.relation_transforms.push_back(uniform_tensor({d, d}, rng));
    }
    p.input_proj_w = uniform_tensor({d, d}, rng);
    p.input_proj_b = Tensor::zeros({d});
    p.rel_att_w = uniform_tensor({d + config.statement_dim}, rng);
    p.rel_att_b = Tensor::zeros({1});
    p.hop_att_w = uniform_tensor({config.hops + 1 + config.statement_dim}, rng);
    p.hop_att_b = Tensor::zeros({1});
    p.node_att_w = uniform_tensor({config.statement_dim + d}, rng);
    p.node_att_b = Tensor::zeros({1});
    return p;
}

const Tensor& MhgrnParams::transform(std::size_t rel_row, std::size_t k) const {
    if (k < 1 || k > config.hops) throw Error("mhgrn: hop index out of range");
    return relation_transforms.at(rel_row * config.hops + (k - 1));
}

void MhgrnParams::visit_tensors(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("mhgrn.concepts", concept_embeddings);
    fn("mhgrn.types", type_embeddings);
    fn("mhgrn.relations", relation_embeddings);
    for (std::size_t i = 0; i < relation_transforms.size(); ++i) {
        fn("mhgrn.rel_w." + std::to_string(i), relation_transforms[i]);
    }
    fn("mhgrn.proj.w", input_proj_w);
    fn("mhgrn.proj.b", input_proj_b);
    fn("mhgrn.att.rel.w", rel_att_w);
    fn("mhgrn.att.rel.b", rel_att_b);
    fn("mhgrn.att.hop.w", hop_att_w);
    fn("mhgrn.att.hop.b", hop_att_b);
    fn("mhgrn.att.node.w", node_att_w);
    fn("mhgrn.att.node.b", node_att_b);
}

MhgrnVars mhgrn_leaves(Tape& tape, const MhgrnParams& params) {
    MhgrnVars v;
    v.concept_embeddings = tape.input(params.concept_embeddings);
    v.type_embeddings = tape.input(params.type_embeddings);
    v.relation_embeddings = tape.input(params.relation_embeddings);
    for (const auto& w : params.relation_transforms) {
        v.relation_transforms.push_back(tape.input(w));
    }
    v.input_proj_w = tape.input(params.input_proj_w);
    v.input_proj_b = tape.input(params.input_proj_b);
    v.rel_att_w = tape.input(params.rel_att_w);
    v.rel_att_b = tape.input(params.rel_att_b);
    v.hop_att_w = tape.input(params.hop_att_w);
    v.hop_att_b = tape.input(params.hop_att_b);
    v.node_att_w = tape.input(params.node_att_w);
    v.node_att_b = tape.input(params.node_att_b);
    return v;
}

Tape::Var mhgrn_graph_vector(Tape& t, const sgraph::SchemaGraph& sg, Tape::Var statement,
                             const MhgrnVars& vars, const MhgrnParams& params,
                             const encoders::Vocab& concept_vocab,
                             const encoders::Vocab& relation_vocab,
                             MhgrnAttention* attention) {
    const auto& cfg = params.config;
    std::size_t d = cfg.concept_dim;
    if (t.value(statement).size() != cfg.statement_dim) {
        throw Error("mhgrn: statement vector dimension mismatch");
    }
    std::size_t n = sg.nodes.size();
    if (n == 0) return t.constant(Tensor::zeros({d}));

    // h^(0): projected concept + node-type embedding.
    std::vector<Tape::Var> h_prev(n);
    for (std::size_t v = 0; v < n; ++v) {
        Tape::Var e = t.row(vars.concept_embeddings, concept_vocab.index_of(sg.nodes[v].term));
        Tape::Var ty = t.row(vars.type_embeddings, static_cast<std::size_t>(sg.nodes[v].origin));
        h_prev[v] = t.add(t.vecmat(t.add(e, ty), vars.input_proj_w), vars.input_proj_b);
    }
    std::vector<std::vector<Tape::Var>> per_hop;
    per_hop.push_back(h_prev);

    // Incoming edges per node, in traversal orientation (messages flow
    // head -> tail).
    std::vector<std::vector<std::uint32_t>> in_edges(n);
    for (std::uint32_t e = 0; e < sg.edges.size(); ++e) in_edges[sg.edges[e].tail].push_back(e);

    auto rel_row_of = [&](const sgraph::SchemaEdge& e) {
        return relation_vocab.index_of(e.relation) * 2 +
               (e.dir == sgraph::EdgeDir::reverse ? 1 : 0);
    };

    // Relation-attention scores depend only on (relation row, statement);
    // cache them and softmax per node over the types present there.
    std::map<std::size_t, Tape::Var> rel_scores;
    auto rel_score = [&](std::size_t rel_row) {
        auto it = rel_scores.find(rel_row);
        if (it != rel_scores.end()) return it->second;
        Tape::Var score =
            t.add(t.dot(t.concat(t.row(vars.relation_embeddings, rel_row), statement),
                        vars.rel_att_w),
                  vars.rel_att_b);
        rel_scores.emplace(rel_row, score);
        return score;
    };

    for (std::size_t k = 1; k <= cfg.hops; ++k) {
        std::vector<Tape::Var> h_next(n);
        for (std::size_t v = 0; v < n; ++v) {
            if (in_edges[v].empty()) {
                h_next[v] = h_prev[v];
                continue;
            }
            // Softmax over the distinct relation types present at v.
            std::vector<std::size_t> types;
            for (std::uint32_t e : in_edges[v]) types.push_back(rel_row_of(sg.edges[e]));
            std::sort(types.begin(), types.end());
            types.erase(std::unique(types.begin(), types.end()), types.end());
            std::vector<Tape::Var> scores;
            scores.reserve(types.size());
            for (std::size_t rel_row : types) scores.push_back(rel_score(rel_row));
            Tape::Var beta = t.softmax_fn(t.stack(scores));
            if (attention != nullptr) attention->relation_weights.push_back(t.value(beta));

            std::vector<Tape::Var> messages;
            messages.reserve(in_edges[v].size());
            for (std::uint32_t e : in_edges[v]) {
                const auto& edge = sg.edges[e];
                std::size_t rel_row = rel_row_of(edge);
                std::size_t type_pos = static_cast<std::size_t>(
                    std::lower_bound(types.begin(), types.end(), rel_row) - types.begin());
                Tape::Var w = vars.relation_transforms.at(rel_row * cfg.hops + (k - 1));
                messages.push_back(
                    t.scale_by(t.vecmat(h_prev[edge.head], w), t.pick(beta, type_pos)));
            }
            h_next[v] = t.scale(t.sum_of(messages),
                                1.0 / static_cast<double>(in_edges[v].size()));
        }
        per_hop.push_back(h_next);
        h_prev = std::move(h_next);
    }

    // Hop attention (shared across nodes): softmax over one-hot hop indexes.
    std::vector<Tape::Var> hop_scores;
    for (std::size_t k = 0; k <= cfg.hops; ++k) {
        Tensor onehot = Tensor::zeros({cfg.hops + 1});
        onehot[k] = 1.0;
        hop_scores.push_back(
            t.add(t.dot(t.concat(t.constant(onehot), statement), vars.hop_att_w),
                  vars.hop_att_b));
    }
    Tape::Var gamma = t.softmax_fn(t.stack(hop_scores));
    if (attention != nullptr) attention->hop_weights = t.value(gamma);

    std::vector<Tape::Var> z(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<Tape::Var> terms;
        terms.reserve(cfg.hops + 1);
        for (std::size_t k = 0; k <= cfg.hops; ++k) {
            terms.push_back(t.scale_by(per_hop[k][v], t.pick(gamma, k)));
        }
        z[v] = t.sum_of(terms);
    }

    // Node attention pooling.
    std::vector<Tape::Var> node_scores;
    node_scores.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        node_scores.push_back(
            t.add(t.dot(t.concat(statement, z[v]), vars.node_att_w), vars.node_att_b));
    }
    Tape::Var delta = t.softmax_fn(t.stack(node_scores));
    if (attention != nullptr) attention->node_weights = t.value(delta);
    std::vector<Tape::Var> weighted;
    weighted.reserve(n);
    for (std::size_t v = 0; v < n; ++v) weighted.push_back(t.scale_by(z[v], t.pick(delta, v)));
    return t.sum_of(weighted);
}

Tensor encode_graph_mhgrn(const sgraph::SchemaGraph& sg, const Tensor& statement,
                          const MhgrnParams& params, const encoders::Vocab& concept_vocab,
                          const encoders::Vocab& relation_vocab) {
    Tape t;
    MhgrnVars vars = mhgrn_leaves(t, params);
    Tape::Var s = t.constant(statement);
    Tape::Var g = mhgrn_graph_vector(t, sg, s, vars, params, concept_vocab, relation_vocab);
    numerics::require_finite(t.value(g), "mhgrn graph vector");
    return t.value(g);
}

MhgrnGrads mhgrn_backward(const sgraph::SchemaGraph& sg, const Tensor& statement,
                          const MhgrnParams& params, const encoders::Vocab& concept_vocab,
                          const encoders::Vocab& relation_vocab, const Tensor& upstream_grad) {
    Tape t;
    MhgrnVars vars = mhgrn_leaves(t, params);
    Tape::Var s = t.input(statement);
    Tape::Var g = mhgrn_graph_vector(t, sg, s, vars, params, concept_vocab, relation_vocab);
    t.backward(g, upstream_grad);
    MhgrnGrads grads;
    grads.concept_embeddings = t.grad(vars.concept_embeddings);
    grads.type_embeddings = t.grad(vars.type_embeddings);
    grads.relation_embeddings = t.grad(vars.relation_embeddings);
    for (Tape::Var w : vars.relation_transforms) grads.relation_transforms.push_back(t.grad(w));
    grads.input_proj_w = t.grad(vars.input_proj_w);
    grads.input_proj_b = t.grad(vars.input_proj_b);
    grads.rel_att_w = t.grad(vars.rel_att_w);
    grads.rel_att_b = t.grad(vars.rel_att_b);
    grads.hop_att_w = t.grad(vars.hop_att_w);
    grads.hop_att_b = t.grad(vars.hop_att_b);
    grads.node_att_w = t.grad(vars.node_att_w);
    grads.node_att_b = t.grad(vars.node_att_b);
    grads.statement = t.grad(s);
    return grads;
}

}  // namespace schemaqa::mhgrn
