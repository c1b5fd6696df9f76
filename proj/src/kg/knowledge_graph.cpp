#include "schemaqa/kg/knowledge_graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "schemaqa/util/log.hpp"

namespace schemaqa::kg {

namespace {

constexpr char kSnapshotMagic[4] = {'S', 'Q', 'K', 'G'};
constexpr std::uint32_t kSnapshotVersion = 1;

std::string to_lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

// Dedup key: 24 bits head, 24 bits tail, 16 bits relation.
std::uint64_t triple_key(ConceptId h, RelationId r, ConceptId t) {
    if (h >= (1u << 24) || t >= (1u << 24) || r >= (1u << 16)) {
        throw Error("knowledge graph exceeds dedup index capacity (16M concepts / 64K relations)");
    }
    return (static_cast<std::uint64_t>(h) << 40) | (static_cast<std::uint64_t>(t) << 16) |
           static_cast<std::uint64_t>(r);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw Error("snapshot: unexpected end of file");
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw Error("snapshot: unexpected end of file");
    return v;
}
double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw Error("snapshot: unexpected end of file");
    return v;
}
std::string read_str(std::istream& in) {
    std::uint32_t len = read_u32(in);
    if (len > (1u << 20)) throw Error("snapshot: implausible string length");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw Error("snapshot: unexpected end of file");
    return s;
}

}  // namespace

std::uint32_t InternTable::intern(const std::string& s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(s);
    ids_.emplace(s, id);
    return id;
}

std::optional<std::uint32_t> InternTable::find(const std::string& s) const {
    auto it = ids_.find(s);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& InternTable::name(std::uint32_t id) const {
    if (id >= names_.size()) throw Error("intern table: id out of range");
    return names_[id];
}

std::pair<std::string, std::string> canonical_concept(const std::string& raw) {
    std::string term = raw;
    std::string lang;
    if (term.rfind("/c/", 0) == 0) {
        // /c/<lang>/<term>[/<sense...>]
        std::size_t lang_end = term.find('/', 3);
        if (lang_end == std::string::npos) throw Error("malformed concept URI: " + raw);
        lang = term.substr(3, lang_end - 3);
        std::size_t term_end = term.find('/', lang_end + 1);
        term = term.substr(lang_end + 1,
                           term_end == std::string::npos ? std::string::npos
                                                         : term_end - lang_end - 1);
    }
    term = to_lower(term);
    for (auto& c : term) {
        if (c == ' ') c = '_';
    }
    if (term.empty()) throw Error("empty concept in: " + raw);
    return {term, lang};
}

std::string canonical_relation(const std::string& raw) {
    std::string rel = raw;
    if (rel.rfind("/r/", 0) == 0) rel = rel.substr(3);
    if (rel.empty()) throw Error("empty relation in: " + raw);
    return rel;
}

const std::string& KnowledgeGraph::concept_name(ConceptId c) const { return concepts_.name(c); }
const std::string& KnowledgeGraph::relation_name(RelationId r) const { return relations_.name(r); }

std::optional<ConceptId> KnowledgeGraph::find_concept(const std::string& name) const {
    return concepts_.find(name);
}

std::optional<RelationId> KnowledgeGraph::find_relation(const std::string& name) const {
    return relations_.find(name);
}

const std::vector<AdjEntry>& KnowledgeGraph::out_edges(ConceptId c) const {
    if (c >= out_index_.size()) throw Error("unknown concept id " + std::to_string(c));
    return out_index_[c];
}

const std::vector<AdjEntry>& KnowledgeGraph::in_edges(ConceptId c) const {
    if (c >= in_index_.size()) throw Error("unknown concept id " + std::to_string(c));
    return in_index_[c];
}

std::vector<Neighbor> KnowledgeGraph::neighbors(ConceptId c, Direction dir) const {
    if (c >= num_concepts()) throw Error("unknown concept id " + std::to_string(c));
    std::vector<Neighbor> result;
    if (dir == Direction::out || dir == Direction::both) {
        for (const auto& e : out_index_[c]) {
            result.push_back({e.relation, e.other, e.weight, EdgeDir::forward});
        }
    }
    if (dir == Direction::in || dir == Direction::both) {
        for (const auto& e : in_index_[c]) {
            result.push_back({e.relation, e.other, e.weight, EdgeDir::reverse});
        }
    }
    return result;
}

void KnowledgeGraph::finalize_indexes() {
    out_index_.assign(concepts_.size(), {});
    in_index_.assign(concepts_.size(), {});
    for (const auto& t : triples_) {
        out_index_[t.head].push_back({t.relation, t.tail, t.weight});
        in_index_[t.tail].push_back({t.relation, t.head, t.weight});
    }
    auto by_other_then_relation = [](const AdjEntry& a, const AdjEntry& b) {
        if (a.other != b.other) return a.other < b.other;
        return a.relation < b.relation;
    };
    for (auto& lst : out_index_) std::sort(lst.begin(), lst.end(), by_other_then_relation);
    for (auto& lst : in_index_) std::sort(lst.begin(), lst.end(), by_other_then_relation);

    isa_relation_.reset();
    for (std::uint32_t r = 0; r < relations_.size(); ++r) {
        if (iequals(relations_.name(r), "isa")) {
            isa_relation_ = r;
            break;
        }
    }
}

KnowledgeGraph load_kg_text(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open knowledge graph file: " + path);

    std::vector<std::string> allowlist_lower;
    if (options.relation_allowlist.has_value()) {
        for (const auto& r : *options.relation_allowlist) allowlist_lower.push_back(to_lower(r));
    }

    KnowledgeGraph kg;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        kg.report_.lines += 1;

        std::array<std::string, 4> fields;
        std::size_t field = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                if (field < 4) fields[field] = line.substr(start, i - start);
                ++field;
                start = i + 1;
            }
        }
        if (field != 4) {
            throw Error(path + ":" + std::to_string(line_no) + ": expected 4 tab-separated " +
                        "fields (relation, head, tail, weight), got " + std::to_string(field));
        }
        double weight = 0.0;
        try {
            std::size_t consumed = 0;
            weight = std::stod(fields[3], &consumed);
            if (consumed != fields[3].size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(line_no) + ": bad weight '" + fields[3] + "'");
        }
        if (weight <= 0.0 || !std::isfinite(weight)) {
            kg.report_.nonpositive_weight += 1;
            continue;
        }
        if (options.min_weight.has_value() && weight < *options.min_weight) {
            kg.report_.filtered_weight += 1;
            continue;
        }

        std::string relation = canonical_relation(fields[0]);
        if (!allowlist_lower.empty()) {
            std::string rel_lower = to_lower(relation);
            if (std::find(allowlist_lower.begin(), allowlist_lower.end(), rel_lower) ==
                allowlist_lower.end()) {
                kg.report_.filtered_relation += 1;
                continue;
            }
        }

        auto [head, head_lang] = canonical_concept(fields[1]);
        auto [tail, tail_lang] = canonical_concept(fields[2]);
        if (!options.language_prefix.empty() &&
            ((!head_lang.empty() && head_lang != options.language_prefix) ||
             (!tail_lang.empty() && tail_lang != options.language_prefix))) {
            kg.report_.filtered_language += 1;
            continue;
        }

        ConceptId h = kg.concepts_.intern(head);
        ConceptId t = kg.concepts_.intern(tail);
        RelationId r = kg.relations_.intern(relation);
        if (!seen.insert(triple_key(h, r, t)).second) {
            kg.report_.duplicates += 1;
            continue;
        }
        kg.triples_.push_back({h, r, t, weight});
        kg.report_.kept += 1;
    }
    kg.finalize_indexes();
    log::info("loaded knowledge graph: " + std::to_string(kg.num_concepts()) + " concepts, " +
              std::to_string(kg.num_relations()) + " relations, " +
              std::to_string(kg.num_triples()) + " triples");
    return kg;
}

KnowledgeGraph build_kg(const std::vector<std::array<std::string, 3>>& rows,
                        const std::vector<double>& weights) {
    KnowledgeGraph kg;
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double w = weights.empty() ? 1.0 : weights.at(i);
        if (w <= 0.0) {
            kg.report_.nonpositive_weight += 1;
            continue;
        }
        auto [head, hl] = canonical_concept(rows[i][1]);
        auto [tail, tl] = canonical_concept(rows[i][2]);
        ConceptId h = kg.concepts_.intern(head);
        ConceptId t = kg.concepts_.intern(tail);
        RelationId r = kg.relations_.intern(canonical_relation(rows[i][0]));
        if (!seen.insert(triple_key(h, r, t)).second) {
            kg.report_.duplicates += 1;
            continue;
        }
        kg.triples_.push_back({h, r, t, w});
        kg.report_.kept += 1;
    }
    kg.finalize_indexes();
    return kg;
}

void KnowledgeGraph::save_snapshot(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write snapshot: " + path);
    out.write(kSnapshotMagic, 4);
    write_u32(out, kSnapshotVersion);
    write_u64(out, num_concepts());
    write_u64(out, num_relations());
    write_u64(out, num_triples());
    for (std::uint32_t c = 0; c < num_concepts(); ++c) write_str(out, concepts_.name(c));
    for (std::uint32_t r = 0; r < num_relations(); ++r) write_str(out, relations_.name(r));
    for (const auto& t : triples_) {
        write_u32(out, t.head);
        write_u32(out, t.relation);
        write_u32(out, t.tail);
        write_f64(out, t.weight);
    }
    if (!out) throw Error("snapshot write failed: " + path);
}

KnowledgeGraph load_kg_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
        throw Error("not a knowledge graph snapshot: " + path);
    }
    std::uint32_t version = read_u32(in);
    if (version != kSnapshotVersion) {
        throw Error("unsupported snapshot version " + std::to_string(version));
    }
    KnowledgeGraph kg;
    std::uint64_t n_concepts = read_u64(in);
    std::uint64_t n_relations = read_u64(in);
    std::uint64_t n_triples = read_u64(in);
    for (std::uint64_t i = 0; i < n_concepts; ++i) kg.concepts_.intern(read_str(in));
    for (std::uint64_t i = 0; i < n_relations; ++i) kg.relations_.intern(read_str(in));
    kg.triples_.reserve(n_triples);
    for (std::uint64_t i = 0; i < n_triples; ++i) {
        Triple t;
        t.head = read_u32(in);
        t.relation = read_u32(in);
        t.tail = read_u32(in);
        t.weight = read_f64(in);
        if (t.head >= n_concepts || t.tail >= n_concepts || t.relation >= n_relations) {
            throw Error("snapshot: triple references unknown id");
        }
        kg.triples_.push_back(t);
    }
    kg.report_.kept = kg.triples_.size();
    kg.report_.lines = kg.triples_.size();
    kg.finalize_indexes();
    return kg;
}

KnowledgeGraph load_kg_any(const std::string& path, const LoadOptions& options) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw Error("cannot open knowledge graph file: " + path);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    probe.close();
    if (std::memcmp(magic, kSnapshotMagic, 4) == 0) return load_kg_snapshot(path);
    return load_kg_text(path, options);
}

}  // namespace schemaqa::kg
