#pragma once

#include "etgnn/dataset.hpp"
#include "etgnn/evidential.hpp"
#include "etgnn/temporal_gnn.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace etgnn {

/// Layer widths along d_in -> hidden1 -> hidden2 -> evidence_hidden -> K.
struct ModelDims {
    Index input_dim = 0;
    Index hidden1 = 512;
    Index hidden2 = 256;
    Index evidence_hidden = 128;
    Index num_classes = 0;

    void validate() const;
    bool operator==(const ModelDims&) const = default;
};

/// All trainable weights: one encoder and one evidence network per view.
struct ModelParams {
    ModelDims dims;
    std::array<ViewEncoderParams, kNumViews> encoders;
    std::array<EvidenceNetParams, kNumViews> heads;

    /// Stable (name, param) listing in view order, used by the optimiser and checkpoints.
    std::vector<std::pair<std::string, ad::Param*>> named_params();
    std::vector<std::pair<std::string, const ad::Param*>> named_params() const;
};

/// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

/// Recorded forward pass for the rows in `batch`.
struct ForwardPass {
    std::array<ad::Var, kNumViews> embeddings;     ///< full graph, n x hidden2
    std::array<ad::Var, kNumViews> batch_embeddings;
    std::array<BatchedOpinion, kNumViews> view_opinions;
    ad::Var combined_mass;
    ad::Var combined_alpha;
    int conflict_events = 0;
    int saturation_events = 0;
};

ForwardPass forward(const ModelParams& model, const MultiViewDataset& dataset, const ad::Var& features,
                    std::span<const Index> batch);

/// Full-graph embeddings per view without recording gradients for later use.
std::array<Matrix, kNumViews> encode_all_views(const ModelParams& model, const MultiViewDataset& dataset);

}  // namespace etgnn
