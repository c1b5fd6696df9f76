#include "schemaqa/text/statement.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace schemaqa::text {

namespace {

const std::array<std::string, 8> kInterrogatives = {"what", "who",  "whom", "where",
                                                    "when", "which", "why",  "how"};

std::string lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Token with surrounding punctuation stripped, for interrogative comparison.
std::string core_of(const std::string& token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
    return lower(token.substr(b, e - b));
}

}  // namespace

std::string make_statement(const std::string& question_text, const std::string& choice_text) {
    if (question_text.empty() || choice_text.empty()) {
        throw Error("make_statement: question and choice text must be non-empty");
    }
    std::string text = question_text;
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();
    while (!text.empty() && text.back() == '?') text.pop_back();
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();

    // Split on spaces, find the first interrogative token.
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (c == ' ') {
            if (!current.empty()) tokens.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(current);

    std::size_t hit = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string core = core_of(tokens[i]);
        if (std::find(kInterrogatives.begin(), kInterrogatives.end(), core) !=
            kInterrogatives.end()) {
            hit = i;
            break;
        }
    }

    if (hit < tokens.size()) {
        tokens[hit] = choice_text;
        std::string out;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) out.push_back(' ');
            out += tokens[i];
        }
        return out;
    }
    if (text.find(choice_text) != std::string::npos) return text;
    return text + " " + choice_text;
}

}  // namespace schemaqa::text
