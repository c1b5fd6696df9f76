#include <algorithm>
#include <map>
#include <set>

#include <doctest.h>

#include "schemaqa/graph/schema_graph.hpp"
#include "schemaqa/testing/oracles.hpp"
#include "schemaqa/util/rng.hpp"

using namespace schemaqa;
using sgraph::EnumerateOptions;
using sgraph::NodeOrigin;

namespace {

kg::ConceptId id_of(const kg::KnowledgeGraph& kg, const std::string& name) {
    auto id = kg.find_concept(name);
    REQUIRE(id.has_value());
    return *id;
}

EnumerateOptions uncapped(std::size_t k) {
    EnumerateOptions o;
    o.max_length = k;
    o.per_pair_cap = 1u << 20;
    return o;
}

}  // namespace

TEST_CASE("enumerate_paths on the triangle example") {
    auto kg = kg::build_kg({{"r1", "a", "b"}, {"r2", "b", "c"}, {"r3", "a", "c"}});
    auto got = sgraph::enumerate_paths(kg, {id_of(kg, "a")}, {id_of(kg, "c")}, uncapped(2));
    REQUIRE(got.paths.size() == 2);
    CHECK_FALSE(got.truncated);

    std::set<std::vector<kg::ConceptId>> node_seqs;
    for (const auto& p : got.paths) node_seqs.insert(p.nodes);
    CHECK(node_seqs.count({id_of(kg, "a"), id_of(kg, "c")}) == 1);
    CHECK(node_seqs.count({id_of(kg, "a"), id_of(kg, "b"), id_of(kg, "c")}) == 1);

    for (const auto& p : got.paths) {
        CHECK(p.nodes.size() == p.edges.size() + 1);
        CHECK(p.edges.size() <= 2);
    }
}

TEST_CASE("enumerate_paths excludes trivial and cyclic paths") {
    auto kg = kg::build_kg({{"pad", "a", "a"}});
    auto got = sgraph::enumerate_paths(kg, {id_of(kg, "a")}, {id_of(kg, "a")}, uncapped(3));
    CHECK(got.paths.empty());

    auto kg2 = kg::build_kg({{"r", "a", "b"}, {"r", "b", "a"}});
    auto got2 = sgraph::enumerate_paths(kg2, {id_of(kg2, "a")}, {id_of(kg2, "a")}, uncapped(3));
    CHECK(got2.paths.empty());  // a -> b -> a repeats the start node
}

TEST_CASE("enumerate_paths traverses edges in both directions") {
    auto kg = kg::build_kg({{"r", "b", "a"}, {"r", "b", "c"}});
    auto got = sgraph::enumerate_paths(kg, {id_of(kg, "a")}, {id_of(kg, "c")}, uncapped(2));
    REQUIRE(got.paths.size() == 1);
    CHECK(got.paths[0].edges[0].dir == kg::EdgeDir::reverse);
    CHECK(got.paths[0].edges[1].dir == kg::EdgeDir::forward);
}

TEST_CASE("enumerate_paths equals brute force on random graphs") {
    Rng rng(1234);
    for (int round = 0; round < 60; ++round) {
        std::size_t n = 4 + rng.below(17);
        std::size_t m = rng.below(61);
        std::size_t k = 1 + rng.below(3);
        auto kg = testing::random_kg(rng, n, m, 3);
        std::vector<kg::ConceptId> sources;
        std::vector<kg::ConceptId> targets;
        for (std::size_t i = 0; i < 1 + rng.below(3); ++i) {
            sources.push_back(static_cast<kg::ConceptId>(rng.below(n)));
            targets.push_back(static_cast<kg::ConceptId>(rng.below(n)));
        }
        auto got = sgraph::enumerate_paths(kg, sources, targets, uncapped(k));
        auto want = testing::brute_force_paths(kg, sources, targets, k);
        CHECK(got.paths == want);
    }
}

TEST_CASE("every enumerated path replays against the knowledge graph") {
    Rng rng(77);
    auto kg = testing::random_kg(rng, 12, 40, 3);
    auto got = sgraph::enumerate_paths(kg, {0, 1, 2}, {3, 4, 5}, uncapped(3));
    for (const auto& p : got.paths) {
        CHECK(p.edges.size() >= 1);
        CHECK(p.edges.size() <= 3);
        std::set<kg::ConceptId> seen(p.nodes.begin(), p.nodes.end());
        CHECK(seen.size() == p.nodes.size());  // simple
        for (std::size_t i = 0; i < p.edges.size(); ++i) {
            kg::ConceptId from = p.nodes[i];
            kg::ConceptId to = p.nodes[i + 1];
            kg::ConceptId head = p.edges[i].dir == kg::EdgeDir::forward ? from : to;
            kg::ConceptId tail = p.edges[i].dir == kg::EdgeDir::forward ? to : from;
            bool found = false;
            for (const auto& t : kg.triples()) {
                found = found ||
                        (t.head == head && t.tail == tail && t.relation == p.edges[i].relation);
            }
            CHECK(found);
        }
    }
}

TEST_CASE("per-pair cap keeps the shortest paths and sets the flag") {
    // 12 parallel length-2 routes plus one direct edge from s to t.
    std::vector<std::array<std::string, 3>> rows = {{"direct", "s", "t"}};
    for (int i = 0; i < 12; ++i) {
        rows.push_back({"r", "s", "m" + std::to_string(i)});
        rows.push_back({"r", "m" + std::to_string(i), "t"});
    }
    auto kg = kg::build_kg(rows);
    EnumerateOptions opts;
    opts.max_length = 2;
    opts.per_pair_cap = 5;
    auto got = sgraph::enumerate_paths(kg, {id_of(kg, "s")}, {id_of(kg, "t")}, opts);
    CHECK(got.truncated);
    REQUIRE(got.paths.size() == 5);
    // Shortest-first selection keeps the direct edge.
    bool has_direct = false;
    for (const auto& p : got.paths) has_direct = has_direct || p.edges.size() == 1;
    CHECK(has_direct);

    auto all = sgraph::enumerate_paths(kg, {id_of(kg, "s")}, {id_of(kg, "t")}, uncapped(2));
    CHECK_FALSE(all.truncated);
    CHECK(all.paths.size() == 13);
}

TEST_CASE("build_schema_graph") {
    SUBCASE("pathless grounded concepts become isolated nodes") {
        auto kg = kg::build_kg({{"r", "a", "b"}});
        auto sg = sgraph::build_schema_graph(kg, {}, {"a"}, {"b"}, "q1#A");
        REQUIRE(sg.nodes.size() == 2);
        CHECK(sg.edges.empty());
        CHECK(sg.paths.empty());
        CHECK(sg.nodes[0].term == "a");
        CHECK(sg.nodes[0].origin == NodeOrigin::question);
        CHECK(sg.nodes[1].origin == NodeOrigin::answer);
    }
    SUBCASE("triangle example yields 3 nodes and 3 edges") {
        auto kg = kg::build_kg({{"r1", "a", "b"}, {"r2", "b", "c"}, {"r3", "a", "c"}});
        auto paths =
            sgraph::enumerate_paths(kg, {id_of(kg, "a")}, {id_of(kg, "c")}, uncapped(2));
        auto sg = sgraph::build_schema_graph(kg, paths, {"a"}, {"c"}, "q1#A");
        CHECK(sg.nodes.size() == 3);
        CHECK(sg.edges.size() == 3);
        CHECK(sg.paths.size() == 2);
        std::map<std::string, NodeOrigin> origins;
        for (const auto& n : sg.nodes) origins[n.term] = n.origin;
        CHECK(origins.at("a") == NodeOrigin::question);
        CHECK(origins.at("b") == NodeOrigin::intermediate);
        CHECK(origins.at("c") == NodeOrigin::answer);
        // Paths reference valid node and edge indexes.
        for (const auto& p : sg.paths) {
            for (auto n : p.nodes) CHECK(n < sg.nodes.size());
            for (auto e : p.edges) CHECK(e < sg.edges.size());
        }
    }
    SUBCASE("concept in both sets gets origin both") {
        auto kg = kg::build_kg({{"r", "a", "b"}});
        auto sg = sgraph::build_schema_graph(kg, {}, {"a", "b"}, {"b"}, "q1#A");
        std::map<std::string, NodeOrigin> origins;
        for (const auto& n : sg.nodes) origins[n.term] = n.origin;
        CHECK(origins.at("a") == NodeOrigin::question);
        CHECK(origins.at("b") == NodeOrigin::both);
    }
    SUBCASE("question-to-choice shape on a hand-built mini graph") {
        // Question concepts ink / a4_paper against choice fountain_pen.
        auto kg = kg::build_kg({{"UsedFor", "fountain_pen", "ink"},
                                {"AtLocation", "ink", "pen"},
                                {"RelatedTo", "a4_paper", "paper"},
                                {"UsedFor", "fountain_pen", "paper"}});
        auto sg = sgraph::extract_schema_graph(kg, {"ink", "a4_paper"}, {"fountain_pen"},
                                               "fig#A", uncapped(2));
        // Both question concepts connect to the choice concept.
        CHECK(sg.paths.size() >= 2);
        std::set<std::string> path_starts;
        for (const auto& p : sg.paths) path_starts.insert(sg.nodes[p.nodes[0]].term);
        CHECK(path_starts == std::set<std::string>{"ink", "a4_paper"});
        for (const auto& p : sg.paths) {
            CHECK(sg.nodes[p.nodes.back()].term == "fountain_pen");
        }
    }
}

TEST_CASE("schema graph JSON round-trip") {
    auto kg = kg::build_kg({{"r1", "a", "b"}, {"r2", "b", "c"}, {"r3", "a", "c"}});
    auto sg = sgraph::extract_schema_graph(kg, {"a"}, {"c"}, "q7#B", uncapped(2));
    std::string line = sgraph::schema_graph_to_json(sg, "q7", "B");
    auto rec = sgraph::schema_graph_from_json(line);
    CHECK(rec.id == "q7");
    CHECK(rec.choice_label == "B");
    REQUIRE(rec.graph.nodes.size() == sg.nodes.size());
    for (std::size_t i = 0; i < sg.nodes.size(); ++i) {
        CHECK(rec.graph.nodes[i].term == sg.nodes[i].term);
        CHECK(rec.graph.nodes[i].origin == sg.nodes[i].origin);
    }
    REQUIRE(rec.graph.edges.size() == sg.edges.size());
    REQUIRE(rec.graph.paths.size() == sg.paths.size());
    CHECK(sgraph::schema_graph_to_json(rec.graph, "q7", "B") == line);

    CHECK_THROWS_AS(sgraph::schema_graph_from_json("{not json"), Error);
    CHECK_THROWS_AS(sgraph::schema_graph_from_json("{\"id\":\"x\"}"), Error);
}

TEST_CASE("expand_schema_graph") {
    SUBCASE("single IsA neighbor is forced") {
        auto kg = kg::build_kg({{"IsA", "dog", "animal"}});
        sgraph::SchemaGraph sg;
        sg.statement_ref = "q1#A";
        sg.nodes.push_back({"dog", NodeOrigin::question});
        auto out = sgraph::expand_schema_graph(kg, sg, 1);
        REQUIRE(out.nodes.size() == 2);
        CHECK(out.nodes[1].term == "animal");
        CHECK(out.nodes[1].origin == NodeOrigin::extra);
        REQUIRE(out.edges.size() == 1);
        CHECK(out.nodes[out.edges[0].head].term == "dog");
        CHECK(out.edges[0].relation == "IsA");
        CHECK(out.nodes[out.edges[0].tail].term == "animal");
        CHECK(out.edges[0].dir == kg::EdgeDir::forward);
    }
    SUBCASE("no IsA neighbors leaves the node alone") {
        auto kg = kg::build_kg({{"IsA", "dog", "animal"}, {"AtLocation", "bird", "tree"}});
        sgraph::SchemaGraph sg;
        sg.statement_ref = "q1#A";
        sg.nodes.push_back({"bird", NodeOrigin::question});
        auto out = sgraph::expand_schema_graph(kg, sg, 1);
        CHECK(out.nodes.size() == 1);
        CHECK(out.edges.empty());
    }
    SUBCASE("intermediate nodes are not expanded; kg without IsA is a no-op") {
        auto kg = kg::build_kg({{"IsA", "dog", "animal"}});
        sgraph::SchemaGraph sg;
        sg.statement_ref = "q1#A";
        sg.nodes.push_back({"dog", NodeOrigin::intermediate});
        CHECK(sgraph::expand_schema_graph(kg, sg, 1).nodes.size() == 1);

        auto kg_no_isa = kg::build_kg({{"AtLocation", "dog", "house"}});
        sgraph::SchemaGraph sg2;
        sg2.statement_ref = "q1#A";
        sg2.nodes.push_back({"dog", NodeOrigin::question});
        CHECK(sgraph::expand_schema_graph(kg_no_isa, sg2, 1).nodes.size() == 1);
    }
    SUBCASE("deterministic under a fixed seed, superset of the input") {
        Rng rng(5150);
        for (int round = 0; round < 40; ++round) {
            auto kg = testing::random_kg(rng, 10, 25, 2);
            // random_kg names relations r0/r1; rebuild with r0 renamed IsA.
            std::vector<std::array<std::string, 3>> rows;
            for (const auto& t : kg.triples()) {
                std::string rel = kg.relation_name(t.relation) == "r0"
                                      ? "IsA"
                                      : kg.relation_name(t.relation);
                rows.push_back({rel, kg.concept_name(t.head), kg.concept_name(t.tail)});
            }
            auto kg2 = kg::build_kg(rows);
            auto sg = sgraph::extract_schema_graph(
                kg2, {kg2.concept_name(0)}, {kg2.concept_name(1)}, "r#A", uncapped(2));
            std::uint64_t seed = rng.next();
            auto a = sgraph::expand_schema_graph(kg2, sg, seed);
            auto b = sgraph::expand_schema_graph(kg2, sg, seed);
            REQUIRE(a.nodes.size() == b.nodes.size());
            for (std::size_t i = 0; i < a.nodes.size(); ++i) {
                CHECK(a.nodes[i].term == b.nodes[i].term);
            }
            CHECK(a.edges.size() == b.edges.size());

            // Original nodes, edges and paths survive verbatim.
            REQUIRE(a.nodes.size() >= sg.nodes.size());
            for (std::size_t i = 0; i < sg.nodes.size(); ++i) {
                CHECK(a.nodes[i].term == sg.nodes[i].term);
                CHECK(a.nodes[i].origin == sg.nodes[i].origin);
            }
            for (std::size_t i = 0; i < sg.edges.size(); ++i) {
                CHECK(a.edges[i].head == sg.edges[i].head);
                CHECK(a.edges[i].tail == sg.edges[i].tail);
            }
            CHECK(a.paths.size() == sg.paths.size());

            // Added nodes are extra-origin and only touch IsA edges.
            std::size_t grounded = 0;
            for (const auto& n : sg.nodes) {
                grounded += (n.origin == NodeOrigin::question || n.origin == NodeOrigin::answer ||
                             n.origin == NodeOrigin::both)
                                ? 1
                                : 0;
            }
            CHECK(a.nodes.size() - sg.nodes.size() <= grounded);
            for (std::size_t i = sg.nodes.size(); i < a.nodes.size(); ++i) {
                CHECK(a.nodes[i].origin == NodeOrigin::extra);
                for (const auto& e : a.edges) {
                    if (e.head == i || e.tail == i) CHECK(e.relation == "IsA");
                }
            }
        }
    }
    SUBCASE("two-candidate choice is near-uniform across seeds") {
        auto kg = kg::build_kg({{"IsA", "dog", "animal"}, {"IsA", "dog", "pet"}});
        sgraph::SchemaGraph sg;
        sg.statement_ref = "q9#C";
        sg.nodes.push_back({"dog", NodeOrigin::answer});
        int animal = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            auto out = sgraph::expand_schema_graph(kg, sg, seed);
            REQUIRE(out.nodes.size() == 2);
            animal += out.nodes[1].term == "animal" ? 1 : 0;
        }
        CHECK(animal >= 400);
        CHECK(animal <= 600);
    }
}
