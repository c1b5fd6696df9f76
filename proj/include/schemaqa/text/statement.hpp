#pragma once
// Question-choice pairs and their declarative statement text.

#include <optional>
#include <string>
#include <vector>

#include "schemaqa/error.hpp"

namespace schemaqa::text {

struct Statement {
    std::string question_id;
    std::string choice_label;
    std::string question_text;
    std::string choice_text;
    std::string declarative_text;
    std::optional<bool> is_answer;  // set only when the record carries an answerKey

    std::string ref() const { return question_id + "#" + choice_label; }
};

// Turns a question plus one choice into a declarative statement: the first
// interrogative token (what/who/whom/where/when/which/why/how) is replaced by
// the choice text and the trailing question mark dropped. Without an
// interrogative the choice text is appended, unless it already occurs in the
// text (which makes the operation idempotent).
std::string make_statement(const std::string& question_text, const std::string& choice_text);

}  // namespace schemaqa::text
