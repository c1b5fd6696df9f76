#pragma once
// Text-to-concept grounding: lowercase, tokenize, lemmatize, then match lemma
// n-grams against the knowledge graph vocabulary with longest-span
// preference.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "schemaqa/kg/knowledge_graph.hpp"

namespace schemaqa::grounding {

struct TokenSequence {
    std::vector<std::string> tokens;   // lowercase surface tokens
    std::vector<std::string> lemmas;   // parallel lemmatized forms
};

struct Span {
    std::size_t start = 0;  // token index, inclusive
    std::size_t end = 0;    // token index, exclusive

    bool strictly_contains(const Span& other) const {
        return start <= other.start && other.end <= end &&
               (end - start) > (other.end - other.start);
    }
    auto operator<=>(const Span&) const = default;
};

struct GroundedConcepts {
    std::set<kg::ConceptId> concepts;
    std::map<kg::ConceptId, Span> spans;
};

// Rule-based lemmatizer: irregular-form table plus English suffix stripping
// (-ies, -es, -s, -ing, -ed with doubled-consonant undo). Idempotent.
std::string lemmatize(const std::string& token);

bool is_stopword(const std::string& lemma);

// Lowercases, splits on anything that is not [a-z0-9], lemmatizes token-wise.
TokenSequence normalize(const std::string& text);

// Matches every lemma n-gram (n <= max_ngram, joined with underscores)
// against the concept vocabulary. A match suppresses matches on strictly
// contained spans; stopword-only unigrams never match.
GroundedConcepts ground(const kg::KnowledgeGraph& kg, const std::string& text,
                        std::size_t max_ngram = 4);

// Pipeline-level grounding of a question-choice pair. Concepts are returned
// as surface strings; if the choice grounds to nothing, its full
// underscore-joined lemma string is inserted as a synthetic marker so scoring
// degrades to text-only rather than failing.
struct GroundedStatement {
    std::vector<std::string> question_concepts;
    std::vector<std::string> answer_concepts;
};

GroundedStatement ground_statement(const kg::KnowledgeGraph& kg, const std::string& question_text,
                                   const std::string& choice_text, std::size_t max_ngram = 4);

}  // namespace schemaqa::grounding
