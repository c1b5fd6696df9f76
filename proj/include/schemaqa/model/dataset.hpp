#pragma once
// CommonsenseQA-format dataset ingestion: line-delimited JSON, one question
// per line, each with a stem and exactly five labeled choices.

#include <optional>
#include <string>
#include <vector>

#include "schemaqa/text/statement.hpp"

namespace schemaqa::model {

struct Choice {
    std::string label;
    std::string text;
};

struct QuestionRecord {
    std::string id;
    std::string stem;
    std::vector<Choice> choices;          // exactly 5, labels A-E unique
    std::optional<std::string> answer_key;
};

struct DatasetSplit {
    std::vector<QuestionRecord> questions;

    std::size_t size() const { return questions.size(); }
    bool has_answer_keys() const;
};

DatasetSplit load_dataset(const std::string& path);
DatasetSplit parse_dataset(const std::string& jsonl, const std::string& origin);

// One statement per choice, order preserved; is_answer is set only when the
// record carries an answerKey.
std::vector<text::Statement> question_to_pairs(const QuestionRecord& record);

}  // namespace schemaqa::model
