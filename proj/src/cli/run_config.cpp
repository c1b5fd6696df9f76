#include "schemaqa/cli/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schemaqa/util/hash.hpp"

namespace schemaqa::cli {

namespace {

const std::set<std::string> kTrainKeys = {
    "encoder",    "optimizer", "text_encoder", "embedding_file", "learning_rate",
    "batch_size", "max_epochs", "patience",    "k",              "k_hop",
    "path_cap",   "max_ngram",  "sge",         "seed",           "statement_dim",
    "concept_dim", "path_dim",  "gcn_layers",
};

const std::set<std::string> kPathKeys = {
    "kg",     "train",        "dev",        "dataset", "grounded",
    "graphs", "train_graphs", "dev_graphs", "out",     "threads",
};

}  // namespace

RunConfig RunConfig::from_json(const std::string& json_text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(origin + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw Error(origin + ": config must be a JSON object");
    nlohmann::json train_part = nlohmann::json::object();
    RunConfig rc;
    for (const auto& [key, value] : j.items()) {
        if (kTrainKeys.count(key)) {
            train_part[key] = value;
            continue;
        }
        if (!kPathKeys.count(key)) {
            throw Error(origin + ": unknown config key '" + key + "'");
        }
        try {
            if (key == "kg") rc.kg_path = value.get<std::string>();
            else if (key == "train") rc.train_path = value.get<std::string>();
            else if (key == "dev") rc.dev_path = value.get<std::string>();
            else if (key == "dataset") rc.dataset_path = value.get<std::string>();
            else if (key == "grounded") rc.grounded_path = value.get<std::string>();
            else if (key == "graphs") rc.graphs_path = value.get<std::string>();
            else if (key == "train_graphs") rc.train_graphs_path = value.get<std::string>();
            else if (key == "dev_graphs") rc.dev_graphs_path = value.get<std::string>();
            else if (key == "out") rc.out_path = value.get<std::string>();
            else if (key == "threads") rc.threads = value.get<std::size_t>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(origin + ": mistyped config key '" + key + "': " + e.what());
        }
    }
    rc.train = model::TrainConfig::from_json(train_part.dump());
    return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str(), path);
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for checksum: " + path);
    std::uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
        if (!in) break;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << h;
    return os.str();
}

void write_manifest(const std::string& path, const std::string& command,
                    const model::TrainConfig& config,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = "0.1.0";
    j["config"] = nlohmann::json::parse(config.to_json());
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [file, checksum] : inputs) in[file] = checksum;
    j["inputs"] = std::move(in);
    j["outputs"] = outputs;
    write_file(path, j.dump(2) + "\n");
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed: " + path);
}

}  // namespace schemaqa::cli
