#pragma once
// Schema graph extraction: bounded simple-path enumeration between grounded
// question and answer concepts, graph assembly, and IsA expansion (SGE).
//
// Edges are stored in traversal orientation: (head, relation, tail, dir)
// means "step from head to tail"; dir records whether that step follows the
// underlying KG triple (forward) or runs against it (reverse).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schemaqa/kg/knowledge_graph.hpp"

namespace schemaqa::sgraph {

using kg::EdgeDir;

struct PathStep {
    kg::RelationId relation = 0;
    EdgeDir dir = EdgeDir::forward;
    auto operator<=>(const PathStep&) const = default;
};

struct Path {
    std::vector<kg::ConceptId> nodes;  // length n+1
    std::vector<PathStep> edges;       // length n

    std::size_t length() const { return edges.size(); }
    auto operator<=>(const Path&) const = default;
};

struct PathSet {
    std::vector<Path> paths;
    bool truncated = false;
};

struct EnumerateOptions {
    std::size_t max_length = 2;          // K, counted in edges
    std::size_t per_pair_cap = 100;      // shortest-first per (source, target) pair
};

// All simple paths of edge-length 1..K from any concept in sources to any
// concept in targets, traversing triples in either direction. Deterministic:
// the result is sorted lexicographically by node-id sequence, then edges.
PathSet enumerate_paths(const kg::KnowledgeGraph& kg, const std::vector<kg::ConceptId>& sources,
                        const std::vector<kg::ConceptId>& targets, const EnumerateOptions& options);

enum class NodeOrigin : std::uint8_t { question, answer, both, intermediate, extra };

const char* origin_name(NodeOrigin o);
std::optional<NodeOrigin> origin_from_name(const std::string& name);

struct SchemaNode {
    std::string term;
    NodeOrigin origin = NodeOrigin::intermediate;
};

struct SchemaEdge {
    std::uint32_t head = 0;  // index into nodes
    std::string relation;
    std::uint32_t tail = 0;
    EdgeDir dir = EdgeDir::forward;
};

struct LocalPath {
    std::vector<std::uint32_t> nodes;  // indexes into SchemaGraph::nodes
    std::vector<std::uint32_t> edges;  // indexes into SchemaGraph::edges
};

struct SchemaGraph {
    std::string statement_ref;  // "<question_id>#<choice_label>"
    std::vector<SchemaNode> nodes;
    std::vector<SchemaEdge> edges;
    std::vector<LocalPath> paths;
    bool truncated = false;

    std::optional<std::uint32_t> find_node(const std::string& term) const;
    // Returns the edge index, inserting if absent.
    std::uint32_t intern_edge(std::uint32_t head, const std::string& relation, std::uint32_t tail,
                              EdgeDir dir);
};

// Assembles the schema graph: node set is the union of path nodes and the
// grounded concept strings (grounded concepts appear even when pathless, so
// unmatched markers survive). Node order: sorted by concept string.
SchemaGraph build_schema_graph(const kg::KnowledgeGraph& kg, const PathSet& paths,
                               const std::vector<std::string>& question_concepts,
                               const std::vector<std::string>& answer_concepts,
                               const std::string& statement_ref);

// Grounded strings -> KG ids (unknown strings dropped), enumerate, assemble.
SchemaGraph extract_schema_graph(const kg::KnowledgeGraph& kg,
                                 const std::vector<std::string>& question_concepts,
                                 const std::vector<std::string>& answer_concepts,
                                 const std::string& statement_ref,
                                 const EnumerateOptions& options);

// Schema graph expansion: for every question/answer/both node, attach exactly
// one uniformly chosen IsA neighbor (either direction) not already present in
// the input graph, with origin `extra`. The draw is seeded from
// (seed, statement_ref, node concept) so expansion is per-node deterministic.
// Without an IsA relation in the KG this returns the graph unchanged.
SchemaGraph expand_schema_graph(const kg::KnowledgeGraph& kg, const SchemaGraph& sg,
                                std::uint64_t seed);

// JSON record (one line of the extract/expand output):
// {"id", "choice_label", "nodes":[{"concept","origin"}], "edges":[[h,rel,t,dir]],
//  "paths":[[n0,e0,n1,...]], "truncated"}
std::string schema_graph_to_json(const SchemaGraph& sg, const std::string& id,
                                 const std::string& choice_label);
struct SchemaGraphRecord {
    std::string id;
    std::string choice_label;
    SchemaGraph graph;
};
SchemaGraphRecord schema_graph_from_json(const std::string& line);

}  // namespace schemaqa::sgraph
