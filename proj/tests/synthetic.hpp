#pragma once
// Synthetic benchmark world for the end-to-end tests: a structured 100-item
// knowledge graph (ring, stride links, IsA groups) and generated questions
// whose correct choice is the only one reachable from the question concept
// within two hops. The text carries no usable signal by construction: every
// item appears as answer and as distractor at the same rate.

#include <queue>
#include <set>
#include <string>
#include <vector>

#include "schemaqa/kg/knowledge_graph.hpp"
#include "schemaqa/util/rng.hpp"

namespace schemaqa::testing {

struct SyntheticWorld {
    std::string kg_tsv;
    std::vector<std::string> dataset_lines;  // one JSON question per line
};

inline std::string item_name(std::size_t i) {
    std::string n = std::to_string(i);
    return "item" + std::string(n.size() < 2 ? 1 : 0, '0') + n;
}

inline SyntheticWorld make_synthetic_world(std::size_t num_items, std::size_t num_questions,
                                           std::uint64_t seed) {
    SyntheticWorld world;
    std::vector<std::array<std::string, 3>> rows;
    for (std::size_t i = 0; i < num_items; ++i) {
        rows.push_back({"next_to", item_name(i), item_name((i + 1) % num_items)});
        rows.push_back({"linked_to", item_name(i), item_name((i + 7) % num_items)});
        rows.push_back({"IsA", item_name(i), "group" + std::to_string(i % 10)});
        rows.push_back({"IsA", item_name(i), "group" + std::to_string((i + 3) % 10)});
    }
    for (const auto& r : rows) {
        world.kg_tsv += r[0] + "\t" + r[1] + "\t" + r[2] + "\t1.0\n";
    }

    auto kg = kg::build_kg(rows);

    // Two-hop reachable item set per item, both directions, all relations.
    auto reachable_items = [&](kg::ConceptId start) {
        std::set<std::string> result;
        std::vector<std::pair<kg::ConceptId, std::size_t>> frontier = {{start, 0}};
        std::set<kg::ConceptId> seen = {start};
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            auto [node, depth] = frontier[f];
            if (depth == 2) continue;
            for (const auto& nb : kg.neighbors(node, kg::Direction::both)) {
                if (seen.insert(nb.other).second) {
                    frontier.push_back({nb.other, depth + 1});
                }
                const std::string& name = kg.concept_name(nb.other);
                if (name.rfind("item", 0) == 0) result.insert(name);
            }
        }
        result.erase(kg.concept_name(start));
        return result;
    };

    Rng rng(seed);
    for (std::size_t qi = 0; qi < num_questions; ++qi) {
        std::size_t q_item = qi % num_items;
        std::string q_name = item_name(q_item);
        auto near = reachable_items(*kg.find_concept(q_name));
        std::vector<std::string> near_list(near.begin(), near.end());
        std::vector<std::string> far_list;
        for (std::size_t i = 0; i < num_items; ++i) {
            std::string name = item_name(i);
            if (i != q_item && !near.count(name)) far_list.push_back(name);
        }
        if (near_list.empty() || far_list.size() < 4) {
            throw Error("synthetic world is too small for disjoint choice pools");
        }
        std::string answer = near_list[rng.below(near_list.size())];
        std::vector<std::string> choices;
        std::set<std::size_t> used;
        while (choices.size() < 4) {
            std::size_t pick = static_cast<std::size_t>(rng.below(far_list.size()));
            if (used.insert(pick).second) choices.push_back(far_list[pick]);
        }
        std::size_t answer_pos = static_cast<std::size_t>(rng.below(5));
        choices.insert(choices.begin() + static_cast<std::ptrdiff_t>(answer_pos), answer);

        const char* labels = "ABCDE";
        std::string line = "{\"id\":\"syn" + std::to_string(qi) + "\",\"question\":{\"stem\":\"" +
                           "which one connects to " + q_name + "?\",\"choices\":[";
        for (std::size_t c = 0; c < 5; ++c) {
            if (c) line += ",";
            line += "{\"label\":\"" + std::string(1, labels[c]) + "\",\"text\":\"" + choices[c] +
                    "\"}";
        }
        line += "]},\"answerKey\":\"" + std::string(1, labels[answer_pos]) + "\"}";
        world.dataset_lines.push_back(std::move(line));
    }
    return world;
}

}  // namespace schemaqa::testing
