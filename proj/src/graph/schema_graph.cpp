#include "schemaqa/graph/schema_graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "schemaqa/util/hash.hpp"
#include "schemaqa/util/log.hpp"
#include "schemaqa/util/rng.hpp"

namespace schemaqa::sgraph {

namespace {

struct Step {
    kg::ConceptId other;
    kg::RelationId relation;
    EdgeDir dir;
};

// Walks the steps leaving u in both directions without materializing the
// merged list; order is (other, relation, dir) with forward before reverse.
// Both adjacency lists are already sorted, so this is a two-pointer merge.
template <typename Fn>
void for_each_step(const kg::KnowledgeGraph& kg, kg::ConceptId u, Fn&& fn) {
    const auto& out = kg.out_edges(u);
    const auto& in = kg.in_edges(u);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < out.size() || j < in.size()) {
        bool take_out;
        if (i == out.size()) {
            take_out = false;
        } else if (j == in.size()) {
            take_out = true;
        } else {
            take_out = out[i].other < in[j].other ||
                       (out[i].other == in[j].other && out[i].relation <= in[j].relation);
        }
        if (take_out) {
            fn(Step{out[i].other, out[i].relation, EdgeDir::forward});
            ++i;
        } else {
            fn(Step{in[j].other, in[j].relation, EdgeDir::reverse});
            ++j;
        }
    }
}

class PathEnumerator {
public:
    PathEnumerator(const kg::KnowledgeGraph& kg, const std::vector<kg::ConceptId>& targets,
                   const EnumerateOptions& options)
        : kg_(kg), options_(options), visited_(kg.num_concepts(), 0),
          is_target_(kg.num_concepts(), 0) {
        for (kg::ConceptId t : targets) is_target_[t] = 1;
    }

    // Iterative deepening keeps per-pair buckets shortest-first without
    // holding more than the capped path set in memory.
    void run(kg::ConceptId source) {
        source_ = source;
        for (std::size_t depth = 1; depth <= options_.max_length; ++depth) {
            node_stack_.assign(1, source);
            step_stack_.clear();
            visited_[source] = 1;
            dfs(source, depth);
            visited_[source] = 0;
        }
    }

    PathSet take() {
        PathSet out;
        out.truncated = truncated_;
        for (auto& [pair, bucket] : buckets_) {
            for (auto& p : bucket) out.paths.push_back(std::move(p));
        }
        std::sort(out.paths.begin(), out.paths.end());
        return out;
    }

private:
    void dfs(kg::ConceptId u, std::size_t depth_left) {
        for_each_step(kg_, u, [&](const Step& s) {
            if (visited_[s.other]) return;
            node_stack_.push_back(s.other);
            step_stack_.push_back({s.relation, s.dir});
            if (depth_left == 1) {
                if (is_target_[s.other]) record();
            } else {
                visited_[s.other] = 1;
                dfs(s.other, depth_left - 1);
                visited_[s.other] = 0;
            }
            node_stack_.pop_back();
            step_stack_.pop_back();
        });
    }

    void record() {
        std::uint64_t key =
            (static_cast<std::uint64_t>(source_) << 32) | node_stack_.back();
        auto& bucket = buckets_[key];
        if (bucket.size() >= options_.per_pair_cap) {
            truncated_ = true;
            return;
        }
        bucket.push_back(Path{node_stack_, step_stack_});
    }

    const kg::KnowledgeGraph& kg_;
    EnumerateOptions options_;
    kg::ConceptId source_ = 0;
    std::vector<char> visited_;
    std::vector<char> is_target_;
    std::vector<kg::ConceptId> node_stack_;
    std::vector<PathStep> step_stack_;
    std::map<std::uint64_t, std::vector<Path>> buckets_;
    bool truncated_ = false;
};

}  // namespace

PathSet enumerate_paths(const kg::KnowledgeGraph& kg, const std::vector<kg::ConceptId>& sources,
                        const std::vector<kg::ConceptId>& targets,
                        const EnumerateOptions& options) {
    if (options.max_length < 1) throw Error("enumerate_paths: max length must be >= 1");
    if (sources.empty() || targets.empty()) return {};
    for (kg::ConceptId c : sources) {
        if (c >= kg.num_concepts()) throw Error("enumerate_paths: unknown source concept");
    }
    for (kg::ConceptId c : targets) {
        if (c >= kg.num_concepts()) throw Error("enumerate_paths: unknown target concept");
    }
    std::vector<kg::ConceptId> srcs = sources;
    std::sort(srcs.begin(), srcs.end());
    srcs.erase(std::unique(srcs.begin(), srcs.end()), srcs.end());

    PathEnumerator enumerator(kg, targets, options);
    for (kg::ConceptId s : srcs) enumerator.run(s);
    return enumerator.take();
}

const char* origin_name(NodeOrigin o) {
    switch (o) {
        case NodeOrigin::question: return "question";
        case NodeOrigin::answer: return "answer";
        case NodeOrigin::both: return "both";
        case NodeOrigin::intermediate: return "intermediate";
        case NodeOrigin::extra: return "extra";
    }
    return "intermediate";
}

std::optional<NodeOrigin> origin_from_name(const std::string& name) {
    if (name == "question") return NodeOrigin::question;
    if (name == "answer") return NodeOrigin::answer;
    if (name == "both") return NodeOrigin::both;
    if (name == "intermediate") return NodeOrigin::intermediate;
    if (name == "extra") return NodeOrigin::extra;
    return std::nullopt;
}

std::optional<std::uint32_t> SchemaGraph::find_node(const std::string& term) const {
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].term == term) return i;
    }
    return std::nullopt;
}

std::uint32_t SchemaGraph::intern_edge(std::uint32_t head, const std::string& relation,
                                       std::uint32_t tail, EdgeDir dir) {
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.head == head && e.tail == tail && e.dir == dir && e.relation == relation) return i;
    }
    edges.push_back({head, relation, tail, dir});
    return static_cast<std::uint32_t>(edges.size() - 1);
}

SchemaGraph build_schema_graph(const kg::KnowledgeGraph& kg, const PathSet& paths,
                               const std::vector<std::string>& question_concepts,
                               const std::vector<std::string>& answer_concepts,
                               const std::string& statement_ref) {
    std::set<std::string> q_set(question_concepts.begin(), question_concepts.end());
    std::set<std::string> a_set(answer_concepts.begin(), answer_concepts.end());

    std::set<std::string> all_names;
    all_names.insert(q_set.begin(), q_set.end());
    all_names.insert(a_set.begin(), a_set.end());
    for (const auto& p : paths.paths) {
        for (kg::ConceptId c : p.nodes) all_names.insert(kg.concept_name(c));
    }

    SchemaGraph sg;
    sg.statement_ref = statement_ref;
    sg.truncated = paths.truncated;
    std::unordered_map<std::string, std::uint32_t> index;
    for (const auto& name : all_names) {
        NodeOrigin origin = NodeOrigin::intermediate;
        bool in_q = q_set.count(name) > 0;
        bool in_a = a_set.count(name) > 0;
        if (in_q && in_a) {
            origin = NodeOrigin::both;
        } else if (in_q) {
            origin = NodeOrigin::question;
        } else if (in_a) {
            origin = NodeOrigin::answer;
        }
        index.emplace(name, static_cast<std::uint32_t>(sg.nodes.size()));
        sg.nodes.push_back({name, origin});
    }

    std::map<std::tuple<std::uint32_t, std::string, std::uint32_t, std::uint8_t>, std::uint32_t>
        edge_index;
    for (const auto& p : paths.paths) {
        LocalPath lp;
        lp.nodes.push_back(index.at(kg.concept_name(p.nodes[0])));
        for (std::size_t i = 0; i < p.edges.size(); ++i) {
            std::uint32_t head = lp.nodes.back();
            std::uint32_t tail = index.at(kg.concept_name(p.nodes[i + 1]));
            const std::string& rel = kg.relation_name(p.edges[i].relation);
            auto key = std::make_tuple(head, rel, tail,
                                       static_cast<std::uint8_t>(p.edges[i].dir));
            auto [it, inserted] =
                edge_index.emplace(key, static_cast<std::uint32_t>(sg.edges.size()));
            if (inserted) sg.edges.push_back({head, rel, tail, p.edges[i].dir});
            lp.edges.push_back(it->second);
            lp.nodes.push_back(tail);
        }
        sg.paths.push_back(std::move(lp));
    }
    return sg;
}

SchemaGraph extract_schema_graph(const kg::KnowledgeGraph& kg,
                                 const std::vector<std::string>& question_concepts,
                                 const std::vector<std::string>& answer_concepts,
                                 const std::string& statement_ref,
                                 const EnumerateOptions& options) {
    std::vector<kg::ConceptId> sources;
    std::vector<kg::ConceptId> targets;
    for (const auto& name : question_concepts) {
        if (auto id = kg.find_concept(name)) sources.push_back(*id);
    }
    for (const auto& name : answer_concepts) {
        if (auto id = kg.find_concept(name)) targets.push_back(*id);
    }
    PathSet paths;
    if (!sources.empty() && !targets.empty()) {
        paths = enumerate_paths(kg, sources, targets, options);
    }
    return build_schema_graph(kg, paths, question_concepts, answer_concepts, statement_ref);
}

SchemaGraph expand_schema_graph(const kg::KnowledgeGraph& kg, const SchemaGraph& sg,
                                std::uint64_t seed) {
    SchemaGraph out = sg;
    auto isa = kg.isa_relation();
    if (!isa.has_value()) {
        log::warn("expand_schema_graph: no IsA relation in the knowledge graph; skipping");
        return out;
    }
    std::set<std::string> original_names;
    for (const auto& n : sg.nodes) original_names.insert(n.term);
    const std::string isa_name = kg.relation_name(*isa);

    std::size_t n_original = sg.nodes.size();
    for (std::size_t idx = 0; idx < n_original; ++idx) {
        const auto& node = sg.nodes[idx];
        if (node.origin != NodeOrigin::question && node.origin != NodeOrigin::answer &&
            node.origin != NodeOrigin::both) {
            continue;
        }
        auto concept_id = kg.find_concept(node.term);
        if (!concept_id.has_value()) continue;  // synthetic unmatched marker

        // Candidate IsA neighbors in either direction, outside the original
        // graph; forward orientation preferred when a pair exists both ways.
        std::map<std::string, EdgeDir> candidates;
        for (const auto& e : kg.out_edges(*concept_id)) {
            if (e.relation != *isa) continue;
            const std::string& name = kg.concept_name(e.other);
            if (!original_names.count(name)) candidates.emplace(name, EdgeDir::forward);
        }
        for (const auto& e : kg.in_edges(*concept_id)) {
            if (e.relation != *isa) continue;
            const std::string& name = kg.concept_name(e.other);
            if (!original_names.count(name)) candidates.emplace(name, EdgeDir::reverse);
        }
        if (candidates.empty()) continue;

        std::uint64_t node_seed = hash_combine(hash_combine(seed, fnv1a64(sg.statement_ref)),
                                               fnv1a64(node.term));
        Rng rng(node_seed);
        std::size_t pick = static_cast<std::size_t>(rng.below(candidates.size()));
        auto it = candidates.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(pick));

        std::uint32_t chosen_idx;
        if (auto existing = out.find_node(it->first)) {
            chosen_idx = *existing;  // another entity already attached this concept
        } else {
            chosen_idx = static_cast<std::uint32_t>(out.nodes.size());
            out.nodes.push_back({it->first, NodeOrigin::extra});
        }
        out.intern_edge(static_cast<std::uint32_t>(idx), isa_name, chosen_idx, it->second);
    }
    return out;
}

std::string schema_graph_to_json(const SchemaGraph& sg, const std::string& id,
                                 const std::string& choice_label) {
    nlohmann::json j;
    j["id"] = id;
    j["choice_label"] = choice_label;
    auto nodes = nlohmann::json::array();
    for (const auto& n : sg.nodes) {
        nodes.push_back({{"concept", n.term}, {"origin", origin_name(n.origin)}});
    }
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::json::array();
    for (const auto& e : sg.edges) {
        edges.push_back({e.head, e.relation, e.tail, static_cast<int>(e.dir)});
    }
    j["edges"] = std::move(edges);
    auto paths = nlohmann::json::array();
    for (const auto& p : sg.paths) {
        auto seq = nlohmann::json::array();
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            seq.push_back(p.nodes[i]);
            if (i < p.edges.size()) seq.push_back(p.edges[i]);
        }
        paths.push_back(std::move(seq));
    }
    j["paths"] = std::move(paths);
    j["truncated"] = sg.truncated;
    return j.dump();
}

SchemaGraphRecord schema_graph_from_json(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("schema graph record: invalid JSON: ") + e.what());
    }
    try {
        SchemaGraphRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.choice_label = j.at("choice_label").get<std::string>();
        rec.graph.statement_ref = rec.id + "#" + rec.choice_label;
        rec.graph.truncated = j.at("truncated").get<bool>();
        for (const auto& n : j.at("nodes")) {
            auto origin = origin_from_name(n.at("origin").get<std::string>());
            if (!origin.has_value()) throw Error("schema graph record: unknown node origin");
            rec.graph.nodes.push_back({n.at("concept").get<std::string>(), *origin});
        }
        for (const auto& e : j.at("edges")) {
            SchemaEdge edge;
            edge.head = e.at(0).get<std::uint32_t>();
            edge.relation = e.at(1).get<std::string>();
            edge.tail = e.at(2).get<std::uint32_t>();
            edge.dir = e.at(3).get<int>() == 0 ? EdgeDir::forward : EdgeDir::reverse;
            if (edge.head >= rec.graph.nodes.size() || edge.tail >= rec.graph.nodes.size()) {
                throw Error("schema graph record: edge endpoint out of range");
            }
            rec.graph.edges.push_back(std::move(edge));
        }
        for (const auto& p : j.at("paths")) {
            LocalPath lp;
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::uint32_t v = p.at(i).get<std::uint32_t>();
                if (i % 2 == 0) {
                    if (v >= rec.graph.nodes.size()) {
                        throw Error("schema graph record: path node out of range");
                    }
                    lp.nodes.push_back(v);
                } else {
                    if (v >= rec.graph.edges.size()) {
                        throw Error("schema graph record: path edge out of range");
                    }
                    lp.edges.push_back(v);
                }
            }
            if (lp.nodes.size() != lp.edges.size() + 1) {
                throw Error("schema graph record: malformed path alternation");
            }
            rec.graph.paths.push_back(std::move(lp));
        }
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("schema graph record: missing or mistyped field: ") + e.what());
    }
}

}  // namespace schemaqa::sgraph
