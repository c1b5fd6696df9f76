#pragma once
// ConceptNet-style triple store: interned concept/relation vocabularies plus
// forward and inverse adjacency indexes. Immutable once loaded.
//
// Input contract (load_kg_text): UTF-8 TSV, one triple per line,
//   relation <TAB> head <TAB> tail <TAB> weight
// Concepts may be bare terms ("fountain_pen") or ConceptNet URIs
// ("/c/en/fountain_pen/n/artifact"); URIs are reduced to the bare term, sense
// suffixes dropped, and rows in other languages filtered out.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schemaqa/error.hpp"

namespace schemaqa::kg {

using ConceptId = std::uint32_t;
using RelationId = std::uint32_t;

enum class EdgeDir : std::uint8_t { forward = 0, reverse = 1 };

struct Triple {
    ConceptId head = 0;
    RelationId relation = 0;
    ConceptId tail = 0;
    double weight = 1.0;
};

// Interned string table; ids are dense and assigned in first-appearance order.
class InternTable {
public:
    std::uint32_t intern(const std::string& s);
    std::optional<std::uint32_t> find(const std::string& s) const;
    const std::string& name(std::uint32_t id) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

struct AdjEntry {
    RelationId relation = 0;
    ConceptId other = 0;
    double weight = 1.0;
};

struct Neighbor {
    RelationId relation = 0;
    ConceptId other = 0;
    double weight = 1.0;
    EdgeDir dir = EdgeDir::forward;
};

enum class Direction { out, in, both };

struct LoadOptions {
    std::string language_prefix = "en";              // empty = accept all languages
    std::optional<std::vector<std::string>> relation_allowlist;  // case-insensitive
    std::optional<double> min_weight;
};

struct LoadReport {
    std::size_t lines = 0;
    std::size_t kept = 0;
    std::size_t duplicates = 0;
    std::size_t nonpositive_weight = 0;
    std::size_t filtered_language = 0;
    std::size_t filtered_relation = 0;
    std::size_t filtered_weight = 0;
};

class KnowledgeGraph {
public:
    std::size_t num_concepts() const { return concepts_.size(); }
    std::size_t num_relations() const { return relations_.size(); }
    std::size_t num_triples() const { return triples_.size(); }

    const std::string& concept_name(ConceptId c) const;
    const std::string& relation_name(RelationId r) const;
    std::optional<ConceptId> find_concept(const std::string& name) const;
    std::optional<RelationId> find_relation(const std::string& name) const;

    const std::vector<Triple>& triples() const { return triples_; }
    const std::vector<AdjEntry>& out_edges(ConceptId c) const;
    const std::vector<AdjEntry>& in_edges(ConceptId c) const;
    std::optional<RelationId> isa_relation() const { return isa_relation_; }
    const LoadReport& report() const { return report_; }

    std::vector<Neighbor> neighbors(ConceptId c, Direction dir) const;

    void save_snapshot(const std::string& path) const;

    friend KnowledgeGraph load_kg_text(const std::string& path, const LoadOptions& options);
    friend KnowledgeGraph load_kg_snapshot(const std::string& path);
    friend KnowledgeGraph build_kg(const std::vector<std::array<std::string, 3>>& rows,
                                   const std::vector<double>& weights);

private:
    void finalize_indexes();

    InternTable concepts_;
    InternTable relations_;
    std::vector<Triple> triples_;
    std::vector<std::vector<AdjEntry>> out_index_;
    std::vector<std::vector<AdjEntry>> in_index_;
    std::optional<RelationId> isa_relation_;
    LoadReport report_;
};

// Canonical concept surface form: lowercase, spaces joined with underscores,
// ConceptNet URI prefixes and sense suffixes stripped. Returns the term and
// its language tag ("" when the input is a bare term).
std::pair<std::string, std::string> canonical_concept(const std::string& raw);
std::string canonical_relation(const std::string& raw);

KnowledgeGraph load_kg_text(const std::string& path, const LoadOptions& options = {});
KnowledgeGraph load_kg_snapshot(const std::string& path);
// Detects snapshot vs TSV by the snapshot magic.
KnowledgeGraph load_kg_any(const std::string& path, const LoadOptions& options = {});

// In-memory construction for tests and generators: rows are
// {relation, head, tail} with parallel weights (pass empty for all 1.0).
KnowledgeGraph build_kg(const std::vector<std::array<std::string, 3>>& rows,
                        const std::vector<double>& weights = {});

}  // namespace schemaqa::kg
