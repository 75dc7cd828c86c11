#pragma once

#include "etgnn/autodiff.hpp"
#include "etgnn/errors.hpp"
#include "etgnn/types.hpp"

#include <cmath>
#include <utility>

namespace etgnn {

/// Subjective-logic opinion: K singleton beliefs plus one uncertainty mass.
template <typename Scalar>
struct MassFunction {
    VectorX<Scalar> beliefs;
    Scalar uncertainty = Scalar(1);

    Index num_classes() const { return beliefs.size(); }
    Scalar total() const { return beliefs.sum() + uncertainty; }

    /// Zero belief, full uncertainty.
    static MassFunction vacuous(Index k) { return {VectorX<Scalar>::Zero(k), Scalar(1)}; }
};

template <typename Scalar>
struct DirichletParams {
    VectorX<Scalar> alpha;

    Scalar strength() const { return alpha.sum(); }
    /// alpha_k / S
    VectorX<Scalar> expected_probabilities() const { return alpha / strength(); }
};

/// True when all masses are nonnegative and sum to one within `tol`.
template <typename Scalar>
bool is_valid_mass(const MassFunction<Scalar>& m, Scalar tol = Scalar(1e-9)) {
    return (m.beliefs.array() >= Scalar(0)).all() && m.uncertainty >= Scalar(0) &&
           std::abs(m.total() - Scalar(1)) <= tol;
}

/// alpha = e + 1, b = e / S, u = K / S.
template <typename Derived>
auto mass_from_evidence(const Eigen::MatrixBase<Derived>& evidence) {
    using Scalar = typename Derived::Scalar;
    if ((evidence.array() < Scalar(0)).any()) {
        throw ContractError("mass_from_evidence: evidence must be nonnegative");
    }
    const auto k = evidence.size();
    DirichletParams<Scalar> dirichlet{(evidence.array() + Scalar(1)).matrix()};
    const Scalar strength = dirichlet.strength();
    MassFunction<Scalar> mass{evidence / strength, Scalar(k) / strength};
    return std::pair{std::move(mass), std::move(dirichlet)};
}

/// alpha_k = b_k K / u + 1. Throws SaturationError when u <= kEpsilon.
template <typename Scalar>
DirichletParams<Scalar> dirichlet_from_mass(const MassFunction<Scalar>& mass) {
    if (!(mass.uncertainty > Scalar(kEpsilon))) {
        throw SaturationError("dirichlet_from_mass: uncertainty mass " + std::to_string(static_cast<double>(mass.uncertainty)) +
                              " is at or below the floor");
    }
    const Scalar k = Scalar(mass.num_classes());
    return {(mass.beliefs * (k / mass.uncertainty)).array() + Scalar(1)};
}

/// Same as dirichlet_from_mass but clamps u to kEpsilon instead of throwing.
template <typename Scalar>
DirichletParams<Scalar> dirichlet_from_mass_clamped(const MassFunction<Scalar>& mass, bool* saturated = nullptr) {
    const bool low = !(mass.uncertainty > Scalar(kEpsilon));
    if (saturated != nullptr) {
        *saturated = low;
    }
    const Scalar u = low ? Scalar(kEpsilon) : mass.uncertainty;
    const Scalar k = Scalar(mass.num_classes());
    return {(mass.beliefs * (k / u)).array() + Scalar(1)};
}

/// Two-layer evidence collector with ReLU output.
struct EvidenceNetParams {
    ad::Param layer1_weight;  ///< d_embed x hidden
    ad::Param layer1_bias;    ///< 1 x hidden
    ad::Param layer2_weight;  ///< hidden x K
    ad::Param layer2_bias;    ///< 1 x K

    Index num_classes() const { return layer2_weight.value().cols(); }
};

/// ReLU(ReLU(h W1 + b1) W2 + b2), row per node.
ad::Var evidence(const ad::Var& h, const EvidenceNetParams& params);
Matrix evidence(const Matrix& h, const EvidenceNetParams& params);

/// Row-batched opinions: `mass` is n x (K+1) with beliefs then uncertainty.
struct BatchedOpinion {
    ad::Var mass;
    ad::Var alpha;
};

/// Recorded counterpart of mass_from_evidence over rows of an n x K evidence matrix.
BatchedOpinion mass_from_evidence(const ad::Var& evidence);

/// Recorded alpha = b K / max(u, eps) + 1. Rows with u <= eps increment `saturated`.
ad::Var dirichlet_from_mass(const ad::Var& mass, int* saturated = nullptr);

/// Row i of a packed n x (K+1) mass matrix.
MassFunction<double> mass_row(const Matrix& packed, Index row);

}  // namespace etgnn
