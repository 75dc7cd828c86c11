#pragma once

#include "etgnn/autodiff.hpp"

#include <span>
#include <vector>

namespace etgnn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moments per parameter, lazily shaped on the first step.
struct AdamState {
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    long step = 0;
};

/// Bias-corrected Adam update using each Param's accumulated gradient.
void adam_step(std::span<ad::Param* const> params, AdamState& state, const AdamConfig& config);

/// Rescales gradients so their global L2 norm is at most `max_norm`; returns the pre-clip norm.
double clip_grad_norm(std::span<ad::Param* const> params, double max_norm);

}  // namespace etgnn
