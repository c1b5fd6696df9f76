#pragma once
// Adam and RAdam with the bias corrections from their original formulations.
// Epsilon sits in the denominator next to the root of the second moment for
// both optimizers.

#include <cstdint>

#include "schemaqa/numerics/tensor.hpp"

namespace schemaqa::numerics {

enum class OptimizerKind { adam, radam };

struct OptimizerHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::adam;
    std::int64_t step_count = 0;
    Tensor first_moment;
    Tensor second_moment;
    OptimizerHyper hyper;

    static OptimizerState make(OptimizerKind kind, const std::vector<std::size_t>& param_shape,
                               const OptimizerHyper& hyper);
};

// One update step; param is modified in place, state.step_count advances by 1.
void adam_step(Tensor& param, const Tensor& grad, OptimizerState& state);
void radam_step(Tensor& param, const Tensor& grad, OptimizerState& state);

// Dispatch on state.kind.
void optimizer_step(Tensor& param, const Tensor& grad, OptimizerState& state);

// RAdam's variance length; the rectified branch applies once this exceeds 4.
double radam_rho(double beta2, std::int64_t t);

}  // namespace schemaqa::numerics
