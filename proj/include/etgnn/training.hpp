#pragma once

#include "etgnn/adam.hpp"
#include "etgnn/checkpoint.hpp"
#include "etgnn/dataset.hpp"
#include "etgnn/evaluation.hpp"
#include "etgnn/losses.hpp"
#include "etgnn/model.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

namespace etgnn {

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 100;
    int batch_size = 2000;
    std::uint64_t seed = 1;
    LossWeights loss_weights;
    LossScope loss_scope = LossScope::PerViewAndCombined;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Global gradient-norm clip; <= 0 disables clipping.
    double grad_clip_norm = 5.0;
    Index hidden1 = 512;
    Index hidden2 = 256;
    Index evidence_hidden = 128;
    std::array<double, 3> split_ratios{0.8, 0.1, 0.1};

    void validate() const;
    AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_epsilon}; }
    ModelDims dims_for(const MultiViewDataset& dataset) const;
};

struct EpochMetrics {
    int epoch = 0;
    int batches = 0;
    double loss_total = 0.0;
    double loss_p = 0.0;
    double loss_kl = 0.0;
    double loss_c = 0.0;
    int conflict_events = 0;
    int saturation_events = 0;
};

struct HistoryRow {
    int epoch = 0;
    double loss_total = 0.0;
    double loss_p = 0.0;
    double loss_kl = 0.0;
    double loss_c = 0.0;
    double val_acc = 0.0;
    double val_macro_f1 = 0.0;
    double mean_uncertainty = 0.0;
    int conflict_events = 0;
};

/// One pass over the shuffled training nodes in batches of `batch_size`.
/// Each batch runs a full-graph forward, the loss on its rows, backward and
/// one Adam step. Throws DivergenceError on a non-finite loss or parameter.
EpochMetrics train_epoch(ModelParams& model, const MultiViewDataset& dataset, const TrainConfig& config,
                         int epoch, AdamState& adam);

struct FitResult {
    ModelParams model;  ///< best-validation parameters
    std::vector<HistoryRow> history;
    int best_epoch = 0;  ///< 0 means the initial parameters were kept
    double best_val_acc = 0.0;
    Metrics best_val_metrics;
};

/// Trains from init_params(derive_seed(seed, "init")) and keeps the parameters
/// with the highest validation accuracy; ties go to the later epoch.
FitResult fit(const MultiViewDataset& dataset, const TrainConfig& config);

void write_history_csv(const std::vector<HistoryRow>& history, std::ostream& out);

TensorArchive model_to_archive(const ModelParams& model);
/// Restores the model; throws SchemaError when tensors are missing or misshapen.
ModelParams model_from_archive(const TensorArchive& archive);

}  // namespace etgnn
