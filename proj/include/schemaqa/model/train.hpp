#pragma once
// Minibatch training loop with seeded shuffling, per-epoch dev evaluation and
// best-checkpoint early stopping.

#include <vector>

#include "schemaqa/model/model.hpp"

namespace schemaqa::model {

struct EpochLog {
    std::size_t epoch = 0;       // 1-based
    double train_loss = 0.0;
    double dev_accuracy = 0.0;
    double best_so_far = 0.0;
    bool stopped = false;
};

// Stop once the best dev accuracy has not been strictly exceeded for
// `patience` consecutive epochs.
class EarlyStopper {
public:
    explicit EarlyStopper(std::size_t patience);

    struct Decision {
        bool new_best = false;
        bool stop = false;
    };
    Decision observe(double dev_accuracy);
    double best() const { return best_; }

private:
    std::size_t patience_;
    std::size_t stale_ = 0;
    double best_ = -1.0;
    bool seen_any_ = false;
};

struct TrainResult {
    ModelParams params;          // best-dev checkpoint
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;  // 1-based; 0 if no epoch ran
};

// Preprocessed entry point: outer vectors hold one entry per question, inner
// vectors the five prepared statements. Train statements must carry labels;
// dev records must carry answer keys.
TrainResult train_prepared(const std::vector<std::vector<PreparedStatement>>& train_questions,
                           const std::vector<std::vector<PreparedStatement>>& dev_questions,
                           const std::vector<const QuestionRecord*>& dev_records,
                           const TrainConfig& config, encoders::Vocab concept_vocab,
                           encoders::Vocab relation_vocab);

// End-to-end: grounds, extracts, optionally expands and encodes both splits,
// builds vocabularies from the train split, then trains.
TrainResult train(const DatasetSplit& train_split, const DatasetSplit& dev_split,
                  const kg::KnowledgeGraph& kg, const TrainConfig& config);

// Vocabulary over concepts/relations appearing in the train schema graphs.
void collect_vocabs(const std::vector<std::vector<PreparedStatement>>& questions,
                    encoders::Vocab& concept_vocab, encoders::Vocab& relation_vocab);

std::string training_log_to_jsonl(const std::vector<EpochLog>& log);

}  // namespace schemaqa::model
