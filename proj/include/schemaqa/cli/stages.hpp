#pragma once
// Stage implementations behind the CLI subcommands. Each stage reads and
// writes files so pipelines can be cached and resumed stage by stage; all of
// them also back the integration tests directly.

#include <string>
#include <vector>

#include "schemaqa/cli/run_config.hpp"
#include "schemaqa/kg/knowledge_graph.hpp"
#include "schemaqa/model/train.hpp"

namespace schemaqa::cli {

void stage_ingest(const std::string& kg_path, const std::string& out_path,
                  const kg::LoadOptions& options);

void stage_ground(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& dataset_path, const std::string& out_path,
                  const model::TrainConfig& config, std::size_t threads);

void stage_extract(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                   const std::string& grounded_path, const std::string& out_path,
                   const model::TrainConfig& config, std::size_t threads);

void stage_expand(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& graphs_path, const std::string& out_path,
                  const model::TrainConfig& config, std::size_t threads);

struct TrainPaths {
    std::string kg_path;
    std::string train_path;
    std::string dev_path;
    std::string train_graphs_path;  // optional: precomputed schema graphs
    std::string dev_graphs_path;
    std::string out_dir;
};

// Trains and writes checkpoint.bin, training_log.jsonl and manifest.json into
// out_dir. Returns the best dev accuracy.
double stage_train(const kg::KnowledgeGraph& kg, const TrainPaths& paths,
                   const model::TrainConfig& config);

// Evaluates a checkpoint; writes predictions.csv and manifest.json into
// out_dir and returns the accuracy.
double stage_eval(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                  const std::string& checkpoint_path, const std::string& dataset_path,
                  const std::string& graphs_path, const std::string& out_dir);

// Scores every question-choice pair; writes JSONL {id, choice_label, score}.
void stage_score(const kg::KnowledgeGraph& kg, const std::string& kg_path,
                 const std::string& checkpoint_path, const std::string& dataset_path,
                 const std::string& graphs_path, const std::string& out_path,
                 std::size_t threads);

// Built-in oracle and gradient-check suite; returns the number of failures.
int run_selftest(std::uint64_t seed);

// Prepared statements for a split, either through the full in-process
// pipeline or from a precomputed schema-graph file.
std::vector<std::vector<model::PreparedStatement>> prepare_questions(
    const kg::KnowledgeGraph& kg, const model::DatasetSplit& split,
    const model::TrainConfig& config, const std::string& graphs_path, std::size_t threads = 1);

}  // namespace schemaqa::cli
