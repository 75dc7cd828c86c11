#include "etgnn/evidential.hpp"

namespace etgnn {

ad::Var evidence(const ad::Var& h, const EvidenceNetParams& params) {
    const ad::Var hidden = ad::relu(ad::add_row_broadcast(ad::matmul(h, params.layer1_weight), params.layer1_bias));
    return ad::relu(ad::add_row_broadcast(ad::matmul(hidden, params.layer2_weight), params.layer2_bias));
}

Matrix evidence(const Matrix& h, const EvidenceNetParams& params) {
    if (h.cols() != params.layer1_weight.value().rows()) {
        throw ShapeError("evidence: input " + shape_string(h) + " does not match weight " +
                         shape_string(params.layer1_weight.value()));
    }
    Matrix hidden = ((h * params.layer1_weight.value()).rowwise() + params.layer1_bias.value().row(0)).cwiseMax(0.0);
    return ((hidden * params.layer2_weight.value()).rowwise() + params.layer2_bias.value().row(0)).cwiseMax(0.0);
}

BatchedOpinion mass_from_evidence(const ad::Var& evidence) {
    if ((evidence.value().array() < 0.0).any()) {
        throw ContractError("mass_from_evidence: evidence must be nonnegative");
    }
    const auto k = static_cast<double>(evidence.cols());
    ad::Var alpha = ad::add_scalar(evidence, 1.0);
    const ad::Var inv_strength = ad::reciprocal(ad::row_sum(alpha));
    const ad::Var beliefs = ad::mul_col_broadcast(evidence, inv_strength);
    const ad::Var uncertainty = ad::scale(inv_strength, k);
    const std::array<ad::Var, 2> parts{beliefs, uncertainty};
    return {ad::hcat(parts), std::move(alpha)};
}

ad::Var dirichlet_from_mass(const ad::Var& mass, int* saturated) {
    const Index k = mass.cols() - 1;
    if (k < 1) {
        throw ShapeError("dirichlet_from_mass: packed mass " + shape_string(mass.value()) + " has no classes");
    }
    const ad::Var beliefs = ad::slice_cols(mass, 0, k);
    const ad::Var uncertainty = ad::slice_cols(mass, k, 1);
    if (saturated != nullptr) {
        *saturated += static_cast<int>((uncertainty.value().array() <= kEpsilon).count());
    }
    const ad::Var floored = ad::clamp_min(uncertainty, kEpsilon);
    return ad::add_scalar(ad::scale(ad::div_col_broadcast(beliefs, floored), static_cast<double>(k)), 1.0);
}

MassFunction<double> mass_row(const Matrix& packed, Index row) {
    const Index k = packed.cols() - 1;
    return {packed.row(row).head(k).transpose(), packed(row, k)};
}

}  // namespace etgnn
