#pragma once

#include "etgnn/autodiff.hpp"
#include "etgnn/dataset.hpp"

#include <span>

namespace etgnn {

/// One temporal-aware aggregation layer.
struct TemporalLayerParams {
    ad::Param weight;        ///< shared transform, d_in x d_out
    ad::Param decay_weight;  ///< d_in x 1
    ad::Param decay_bias;    ///< 1 x 1

    Index input_dim() const { return weight.value().rows(); }
    Index output_dim() const { return weight.value().cols(); }
};

/// Two stacked layers (d_in -> hidden1 -> hidden2) for one view.
struct ViewEncoderParams {
    TemporalLayerParams layer1;
    TemporalLayerParams layer2;
};

/// Positive per-node decay rate softplus(w . h + b).
double decay_rate(const Eigen::Ref<const RowVector>& h, const TemporalLayerParams& params);

/// Normalised weights exp(-lambda * dt) over one neighbourhood, computed
/// with a max shift. Throws ContractError on an empty neighbourhood.
Vector attention_weights(double lambda, std::span<const double> dts);

/// sum_j a_ij * values_j over each node's neighbourhood plus a self-loop at dt = 0,
/// with a_ij = attention_weights(lambda_i, dt_i.). `lambda` is n x 1.
ad::Var temporal_aggregate(const ViewGraph& graph, const ad::Var& values, const ad::Var& lambda);

/// ReLU(temporal_aggregate(H W, softplus(H w_decay + b_decay))).
ad::Var layer_forward(const ViewGraph& graph, const ad::Var& h, const TemporalLayerParams& params);

/// Both layers; the result is the view embedding H^v.
ad::Var encode_view(const ViewGraph& graph, const ad::Var& x, const ViewEncoderParams& params);

}  // namespace etgnn
