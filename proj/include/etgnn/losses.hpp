#pragma once

#include "etgnn/autodiff.hpp"
#include "etgnn/evidential.hpp"

#include <array>
#include <optional>
#include <span>

namespace etgnn {

struct LossWeights {
    double lambda_e = 1.0;
    double lambda_c = 5.0;
    /// When set, lambda_e ramps as min(1, epoch / annealing_epochs).
    std::optional<int> annealing_epochs;

    double effective_lambda_e(int epoch) const;
};

enum class LossScope { CombinedOnly, PerViewAndCombined };

// Scalar closed forms (one sample).

/// psi(S) - psi(alpha_y): the expected cross-entropy under Dir(alpha).
template <typename Derived>
typename Derived::Scalar edl_prediction_loss(const Eigen::MatrixBase<Derived>& alpha, int label);

/// KL[Dir(alpha) || Dir(1)].
template <typename Derived>
typename Derived::Scalar kl_to_uniform_dirichlet(const Eigen::MatrixBase<Derived>& alpha);

/// alpha with the true-class component replaced by 1.
template <typename Derived>
auto misleading_alpha(const Eigen::MatrixBase<Derived>& alpha, int label) {
    typename Derived::PlainObject out = alpha;
    out(label) = typename Derived::Scalar(1);
    return out;
}

// Recorded batch forms (row per sample, summed over the batch).

ad::Var edl_prediction_loss(const ad::Var& alpha, std::span<const int> labels);
ad::Var misleading_alpha(const ad::Var& alpha, std::span<const int> labels);
ad::Var kl_evidence_loss(const ad::Var& alpha_tilde);
/// Sum of squared Frobenius distances between the three row-normalised Gram matrices.
ad::Var consistency_loss(const ad::Var& h_hashtag, const ad::Var& h_entity, const ad::Var& h_user);

struct LossBreakdown {
    ad::Var total;
    double prediction = 0.0;
    double kl = 0.0;
    double consistency = 0.0;
    double lambda_e = 0.0;
    double lambda_c = 0.0;
};

struct LossInputs {
    std::array<ad::Var, 3> view_alpha;
    ad::Var combined_alpha;
    std::array<ad::Var, 3> embeddings;
};

/// L_p + lambda_e L_KL + lambda_c L_c. Prediction and KL terms always cover the
/// combined Dirichlet and, under PerViewAndCombined, each view's Dirichlet too.
LossBreakdown total_loss(const LossInputs& inputs, std::span<const int> labels, const LossWeights& weights,
                         LossScope scope, int epoch);

}  // namespace etgnn

#include "etgnn/special_functions.hpp"

namespace etgnn {

template <typename Derived>
typename Derived::Scalar edl_prediction_loss(const Eigen::MatrixBase<Derived>& alpha, int label) {
    using Scalar = typename Derived::Scalar;
    if (label < 0 || label >= alpha.size()) {
        throw ContractError("edl_prediction_loss: label out of range");
    }
    if ((alpha.array() < Scalar(1)).any()) {
        throw ContractError("edl_prediction_loss: alpha components must be >= 1");
    }
    return digamma(Scalar(alpha.sum())) - digamma(Scalar(alpha(label)));
}

template <typename Derived>
typename Derived::Scalar kl_to_uniform_dirichlet(const Eigen::MatrixBase<Derived>& alpha) {
    using Scalar = typename Derived::Scalar;
    if ((alpha.array() < Scalar(1)).any()) {
        throw ContractError("kl_evidence_loss: alpha components must be >= 1");
    }
    const Scalar k = Scalar(alpha.size());
    const Scalar s = alpha.sum();
    const Scalar psi_s = digamma(s);
    Scalar out = lgamma(s) - lgamma(k);
    for (Index j = 0; j < alpha.size(); ++j) {
        out += -lgamma(Scalar(alpha(j))) + (alpha(j) - Scalar(1)) * (digamma(Scalar(alpha(j))) - psi_s);
    }
    return out;
}

}  // namespace etgnn
