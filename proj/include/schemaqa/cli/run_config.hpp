#pragma once
// Run-config files and run manifests. A config file is a JSON object
// mirroring the training knobs plus file paths; unknown keys are rejected so
// typos fail loudly instead of silently using defaults.

#include <map>
#include <string>
#include <vector>

#include "schemaqa/model/model.hpp"

namespace schemaqa::cli {

struct RunConfig {
    model::TrainConfig train;
    std::string kg_path;
    std::string train_path;
    std::string dev_path;
    std::string dataset_path;
    std::string grounded_path;
    std::string graphs_path;
    std::string train_graphs_path;
    std::string dev_graphs_path;
    std::string out_path;
    std::size_t threads = 1;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_json(const std::string& json_text, const std::string& origin);
};

// FNV-1a 64 of the file bytes, as "fnv1a64:<hex>".
std::string file_checksum(const std::string& path);

// Manifest written next to every stage output: command, version, config and
// input checksums.
void write_manifest(const std::string& path, const std::string& command,
                    const model::TrainConfig& config,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs);

std::vector<std::string> read_lines(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace schemaqa::cli
