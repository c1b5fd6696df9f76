#pragma once
// Versioned binary checkpoint: full TrainConfig, both vocabularies and every
// named tensor, for exact resume and reproducibility audits.

#include <string>

#include "schemaqa/model/model.hpp"

namespace schemaqa::model {

void save_checkpoint(const std::string& path, ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace schemaqa::model
