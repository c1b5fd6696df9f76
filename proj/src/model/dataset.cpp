#include "schemaqa/model/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schemaqa/util/log.hpp"

namespace schemaqa::model {

namespace {

const std::set<std::string> kValidLabels = {"A", "B", "C", "D", "E"};

QuestionRecord parse_record(const nlohmann::json& j, const std::string& where) {
    QuestionRecord rec;
    try {
        rec.id = j.at("id").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(where + ": record has no string 'id'");
    }
    try {
        const auto& q = j.at("question");
        rec.stem = q.at("stem").get<std::string>();
        for (const auto& c : q.at("choices")) {
            rec.choices.push_back(
                {c.at("label").get<std::string>(), c.at("text").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(where + ": malformed question in record '" + rec.id + "': " + e.what());
    }
    if (j.contains("answerKey")) {
        rec.answer_key = j.at("answerKey").get<std::string>();
    }
    if (rec.choices.size() != 5) {
        throw Error(where + ": record '" + rec.id + "' has " +
                    std::to_string(rec.choices.size()) + " choices, expected 5");
    }
    std::set<std::string> labels;
    for (const auto& c : rec.choices) {
        if (!kValidLabels.count(c.label)) {
            throw Error(where + ": record '" + rec.id + "' has invalid choice label '" + c.label +
                        "'");
        }
        if (!labels.insert(c.label).second) {
            throw Error(where + ": record '" + rec.id + "' repeats choice label '" + c.label +
                        "'");
        }
    }
    if (rec.answer_key.has_value() && !labels.count(*rec.answer_key)) {
        throw Error(where + ": record '" + rec.id + "' answerKey '" + *rec.answer_key +
                    "' is not a choice label");
    }
    return rec;
}

}  // namespace

bool DatasetSplit::has_answer_keys() const {
    for (const auto& q : questions) {
        if (!q.answer_key.has_value()) return false;
    }
    return !questions.empty();
}

DatasetSplit parse_dataset(const std::string& jsonl, const std::string& origin) {
    DatasetSplit split;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = origin + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(where + ": invalid JSON: " + e.what());
        }
        split.questions.push_back(parse_record(j, where));
    }
    return split;
}

DatasetSplit load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    DatasetSplit split = parse_dataset(buf.str(), path);
    log::info("loaded " + std::to_string(split.size()) + " questions from " + path);
    return split;
}

std::vector<text::Statement> question_to_pairs(const QuestionRecord& record) {
    if (record.choices.size() != 5) {
        throw Error("question '" + record.id + "' has " + std::to_string(record.choices.size()) +
                    " choices, expected 5");
    }
    std::vector<text::Statement> out;
    out.reserve(5);
    for (const auto& choice : record.choices) {
        text::Statement s;
        s.question_id = record.id;
        s.choice_label = choice.label;
        s.question_text = record.stem;
        s.choice_text = choice.text;
        s.declarative_text = text::make_statement(record.stem, choice.text);
        if (record.answer_key.has_value()) {
            s.is_answer = (choice.label == *record.answer_key);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace schemaqa::model
