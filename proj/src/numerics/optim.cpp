#include "schemaqa/numerics/optim.hpp"

#include <cmath>

namespace schemaqa::numerics {

OptimizerState OptimizerState::make(OptimizerKind kind, const std::vector<std::size_t>& param_shape,
                                    const OptimizerHyper& hyper) {
    OptimizerState s;
    s.kind = kind;
    s.step_count = 0;
    s.first_moment = Tensor::zeros(param_shape);
    s.second_moment = Tensor::zeros(param_shape);
    s.hyper = hyper;
    return s;
}

namespace {

void check_shapes(const Tensor& param, const Tensor& grad, const OptimizerState& state,
                  const char* who) {
    if (!param.same_shape(grad)) {
        throw Error(std::string(who) + ": grad shape " + shape_str(grad.shape) +
                    " does not match param shape " + shape_str(param.shape));
    }
    if (!param.same_shape(state.first_moment) || !param.same_shape(state.second_moment)) {
        throw Error(std::string(who) + ": optimizer state shaped for a different parameter");
    }
}

void update_moments(const Tensor& grad, OptimizerState& state) {
    const auto& h = state.hyper;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.first_moment[i] = h.beta1 * state.first_moment[i] + (1.0 - h.beta1) * grad[i];
        state.second_moment[i] =
            h.beta2 * state.second_moment[i] + (1.0 - h.beta2) * grad[i] * grad[i];
    }
}

}  // namespace

void adam_step(Tensor& param, const Tensor& grad, OptimizerState& state) {
    if (state.kind != OptimizerKind::adam) throw Error("adam_step: state kind is not Adam");
    check_shapes(param, grad, state, "adam_step");
    state.step_count += 1;
    update_moments(grad, state);
    const auto& h = state.hyper;
    double t = static_cast<double>(state.step_count);
    double bc1 = 1.0 - std::pow(h.beta1, t);
    double bc2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < param.size(); ++i) {
        double m_hat = state.first_moment[i] / bc1;
        double v_hat = state.second_moment[i] / bc2;
        param[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

double radam_rho(double beta2, std::int64_t t) {
    double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
    double b2t = std::pow(beta2, static_cast<double>(t));
    return rho_inf - 2.0 * static_cast<double>(t) * b2t / (1.0 - b2t);
}

void radam_step(Tensor& param, const Tensor& grad, OptimizerState& state) {
    if (state.kind != OptimizerKind::radam) throw Error("radam_step: state kind is not RAdam");
    check_shapes(param, grad, state, "radam_step");
    state.step_count += 1;
    update_moments(grad, state);
    const auto& h = state.hyper;
    double t = static_cast<double>(state.step_count);
    double bc1 = 1.0 - std::pow(h.beta1, t);
    double rho_inf = 2.0 / (1.0 - h.beta2) - 1.0;
    double rho_t = radam_rho(h.beta2, state.step_count);
    if (rho_t > 4.0) {
        double bc2 = 1.0 - std::pow(h.beta2, t);
        double rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                                ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
        for (std::size_t i = 0; i < param.size(); ++i) {
            double m_hat = state.first_moment[i] / bc1;
            double v_hat = state.second_moment[i] / bc2;
            param[i] -= h.learning_rate * rect * m_hat / (std::sqrt(v_hat) + h.epsilon);
        }
    } else {
        // Variance not yet tractable: plain bias-corrected momentum.
        for (std::size_t i = 0; i < param.size(); ++i) {
            double m_hat = state.first_moment[i] / bc1;
            param[i] -= h.learning_rate * m_hat;
        }
    }
}

void optimizer_step(Tensor& param, const Tensor& grad, OptimizerState& state) {
    if (state.kind == OptimizerKind::adam) {
        adam_step(param, grad, state);
    } else {
        radam_step(param, grad, state);
    }
}

}  // namespace schemaqa::numerics
