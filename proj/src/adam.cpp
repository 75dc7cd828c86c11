#include "etgnn/adam.hpp"

#include <cmath>

namespace etgnn {

void adam_step(std::span<ad::Param* const> params, AdamState& state, const AdamConfig& config) {
    if (state.first_moment.empty()) {
        for (const ad::Param* p : params) {
            state.first_moment.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
            state.second_moment.push_back(Matrix::Zero(p->value().rows(), p->value().cols()));
        }
    }
    if (state.first_moment.size() != params.size()) {
        throw ContractError("adam_step: optimiser state tracks " + std::to_string(state.first_moment.size()) +
                            " params, got " + std::to_string(params.size()));
    }
    ++state.step;
    const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        ad::Param& p = *params[i];
        Matrix& m = state.first_moment[i];
        Matrix& v = state.second_moment[i];
        if (m.rows() != p.value().rows() || m.cols() != p.value().cols()) {
            throw ShapeError("adam_step: moment shape " + shape_string(m) + " does not match param " +
                             shape_string(p.value()));
        }
        const Matrix& g = p.grad();
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
        p.mutable_value().array() -=
            config.learning_rate * (m.array() / correction1) / ((v.array() / correction2).sqrt() + config.epsilon);
    }
}

double clip_grad_norm(std::span<ad::Param* const> params, double max_norm) {
    double sq = 0.0;
    for (const ad::Param* p : params) {
        sq += p->grad().squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double factor = max_norm / norm;
        for (ad::Param* p : params) {
            p->mutable_grad() *= factor;
        }
    }
    return norm;
}

}  // namespace etgnn
