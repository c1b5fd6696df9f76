#include "schemaqa/grounding/grounding.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

namespace schemaqa::grounding {

namespace {

const std::unordered_map<std::string, std::string>& irregular_forms() {
    static const std::unordered_map<std::string, std::string> table = {
        {"children", "child"}, {"people", "person"}, {"men", "man"},      {"women", "woman"},
        {"feet", "foot"},      {"teeth", "tooth"},   {"mice", "mouse"},   {"geese", "goose"},
        {"wolves", "wolf"},    {"knives", "knife"},  {"wives", "wife"},   {"loaves", "loaf"},
        {"shelves", "shelf"},  {"leaves", "leaf"},   {"ran", "run"},      {"went", "go"},
        {"gone", "go"},        {"going", "go"},      {"goes", "go"},      {"did", "do"},
        {"done", "do"},        {"does", "do"},       {"doing", "do"},     {"was", "be"},
        {"were", "be"},        {"been", "be"},       {"being", "be"},     {"is", "be"},
        {"are", "be"},         {"am", "be"},         {"has", "have"},     {"had", "have"},
        {"having", "have"},    {"said", "say"},      {"says", "say"},     {"made", "make"},
        {"ate", "eat"},        {"eaten", "eat"},     {"wrote", "write"},  {"written", "write"},
        {"knew", "know"},      {"known", "know"},    {"took", "take"},    {"taken", "take"},
        {"gave", "give"},      {"given", "give"},    {"found", "find"},   {"got", "get"},
        {"gotten", "get"},     {"saw", "see"},       {"seen", "see"},     {"came", "come"},
        {"thought", "think"},  {"bought", "buy"},    {"brought", "bring"},{"left", "leave"},
        {"better", "good"},    {"best", "good"},     {"worse", "bad"},    {"worst", "bad"},
        {"chose", "choose"},   {"chosen", "choose"}, {"drank", "drink"},  {"drove", "drive"},
        {"driven", "drive"},   {"flew", "fly"},      {"grew", "grow"},    {"grown", "grow"},
        {"heard", "hear"},     {"held", "hold"},     {"kept", "keep"},    {"lost", "lose"},
        {"met", "meet"},       {"paid", "pay"},      {"sold", "sell"},    {"sent", "send"},
        {"slept", "sleep"},    {"spoke", "speak"},   {"spoken", "speak"}, {"stood", "stand"},
        {"swam", "swim"},      {"told", "tell"},     {"wore", "wear"},    {"won", "win"},
    };
    return table;
}

// Words the suffix rules would mangle; their lemma is themselves.
const std::unordered_set<std::string>& keep_as_is() {
    static const std::unordered_set<std::string> table = {
        "during",  "nothing", "something", "anything", "everything", "morning", "evening",
        "spring",  "string",  "ceiling",   "hundred",  "naked",      "sacred",  "hatred",
        "indeed",  "wicked",  "always",    "perhaps",  "news",       "series",  "species",
        "lens",    "chaos",   "thing",
    };
    return table;
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> table = {
        "a",    "an",   "the",  "and",  "or",    "but",   "if",    "because", "as",    "of",
        "in",   "on",   "at",   "to",   "for",   "with",  "by",    "from",    "up",    "down",
        "out",  "off",  "over", "under","then",  "when",  "where", "why",     "how",   "what",
        "which","who",  "whom", "this", "that",  "these", "those", "be",      "do",    "have",
        "not",  "no",   "so",   "too",  "can",   "will",  "i",     "you",     "he",    "she",
        "it",   "we",   "they", "me",   "him",   "her",   "them",  "my",      "your",  "his",
        "its",  "our",  "their","one",
    };
    return table;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Doubled final consonant that suffixing introduced (run -> running), as
// opposed to doubles that belong to the stem (tell, miss, stuff).
bool undoable_double(const std::string& stem) {
    if (stem.size() < 3) return false;
    char last = stem.back();
    if (last != stem[stem.size() - 2]) return false;
    if (is_vowel(last)) return false;
    return last != 'l' && last != 's' && last != 'z' && last != 'f';
}

}  // namespace

std::string lemmatize(const std::string& token) {
    if (token.size() < 3) return token;
    auto irr = irregular_forms().find(token);
    if (irr != irregular_forms().end()) return irr->second;
    if (keep_as_is().count(token)) return token;
    const std::string& w = token;
    std::size_t n = w.size();

    auto ends_with = [&](const char* suffix) {
        std::size_t len = std::strlen(suffix);
        return n >= len && w.compare(n - len, len, suffix) == 0;
    };

    // Plurals.
    if (n >= 5 && ends_with("ies")) return w.substr(0, n - 3) + "y";
    if (n >= 5 && (ends_with("ches") || ends_with("shes") || ends_with("xes") ||
                   ends_with("zes") || ends_with("sses"))) {
        return w.substr(0, n - 2);
    }
    if (n >= 4 && w.back() == 's' && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
        return w.substr(0, n - 1);
    }
    // Progressive.
    if (n >= 5 && ends_with("ing")) {
        std::string stem = w.substr(0, n - 3);
        if (stem.size() >= 3) {
            if (undoable_double(stem)) stem.pop_back();
            return stem;
        }
        return w;
    }
    // Past tense.
    if (ends_with("eed")) {
        return n >= 6 ? w.substr(0, n - 1) : w;
    }
    if (n >= 4 && ends_with("ed")) {
        std::string stem = w.substr(0, n - 2);
        if (stem.size() >= 3) {
            if (undoable_double(stem)) stem.pop_back();
            return stem;
        }
        // Too short without "ed"; keep the e (used -> use).
        stem = w.substr(0, n - 1);
        if (stem.size() >= 3) return stem;
        return w;
    }
    return w;
}

bool is_stopword(const std::string& lemma) { return stopwords().count(lemma) > 0; }

TokenSequence normalize(const std::string& text) {
    TokenSequence seq;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            seq.tokens.push_back(current);
            seq.lemmas.push_back(lemmatize(current));
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            current.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return seq;
}

GroundedConcepts ground(const kg::KnowledgeGraph& kg, const std::string& text,
                        std::size_t max_ngram) {
    if (max_ngram < 1) throw Error("ground: max_ngram must be >= 1");
    TokenSequence seq = normalize(text);
    struct Match {
        Span span;
        kg::ConceptId id;
    };
    std::vector<Match> matches;
    for (std::size_t start = 0; start < seq.lemmas.size(); ++start) {
        std::string joined;
        for (std::size_t n = 1; n <= max_ngram && start + n <= seq.lemmas.size(); ++n) {
            if (n > 1) joined.push_back('_');
            joined += seq.lemmas[start + n - 1];
            if (n == 1 && is_stopword(seq.lemmas[start])) continue;
            if (auto id = kg.find_concept(joined)) {
                matches.push_back({Span{start, start + n}, *id});
            }
        }
    }
    GroundedConcepts out;
    for (const auto& m : matches) {
        bool suppressed = false;
        for (const auto& other : matches) {
            if (other.span.strictly_contains(m.span)) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) {
            out.concepts.insert(m.id);
            out.spans.emplace(m.id, m.span);  // first (leftmost) span wins
        }
    }
    return out;
}

GroundedStatement ground_statement(const kg::KnowledgeGraph& kg, const std::string& question_text,
                                   const std::string& choice_text, std::size_t max_ngram) {
    GroundedStatement out;
    for (kg::ConceptId c : ground(kg, question_text, max_ngram).concepts) {
        out.question_concepts.push_back(kg.concept_name(c));
    }
    for (kg::ConceptId c : ground(kg, choice_text, max_ngram).concepts) {
        out.answer_concepts.push_back(kg.concept_name(c));
    }
    std::sort(out.question_concepts.begin(), out.question_concepts.end());
    std::sort(out.answer_concepts.begin(), out.answer_concepts.end());
    if (out.answer_concepts.empty()) {
        TokenSequence seq = normalize(choice_text);
        std::string marker;
        for (std::size_t i = 0; i < seq.lemmas.size(); ++i) {
            if (i) marker.push_back('_');
            marker += seq.lemmas[i];
        }
        if (!marker.empty()) out.answer_concepts.push_back(marker);
    }
    return out;
}

}  // namespace schemaqa::grounding
