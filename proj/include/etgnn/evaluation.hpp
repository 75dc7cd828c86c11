#pragma once

#include "etgnn/adam.hpp"
#include "etgnn/dataset.hpp"
#include "etgnn/evidential.hpp"
#include "etgnn/model.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace etgnn {

struct PredictionRecord {
    Index node = 0;
    std::string id;
    int label = -1;  ///< -1 when unlabeled
    int predicted = 0;
    Vector expected_probabilities;  ///< alpha_k / S of the combined Dirichlet
    double uncertainty = 1.0;
    std::array<double, kNumViews> view_uncertainty{};
    std::array<int, kNumViews> view_predicted{};
    std::array<MassFunction<double>, kNumViews> view_masses;
};

struct PredictionSet {
    std::vector<PredictionRecord> records;
    int conflict_events = 0;
    int saturation_events = 0;

    std::vector<int> predicted() const;
    std::vector<int> labels() const;
    double mean_uncertainty() const;
};

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Index argmax(const Eigen::DenseBase<Derived>& values) {
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
        if (values(i) > values(best)) {
            best = i;
        }
    }
    return best;
}

/// Per-view evidence, Dempster combination and final Dirichlet for each node.
PredictionSet predict(const ModelParams& model, const MultiViewDataset& dataset, std::span<const Index> nodes);

/// Same pipeline starting from precomputed (possibly perturbed) view embeddings.
PredictionSet predict_from_embeddings(const ModelParams& model, const MultiViewDataset& dataset,
                                      const std::array<Matrix, kNumViews>& embeddings,
                                      std::span<const Index> nodes);

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
};

Metrics compute_metrics(std::span<const int> predicted, std::span<const int> labels, int num_classes);

enum class SimpleFusionRule {
    BeliefSum,     ///< argmax of the summed belief vectors
    MajorityVote,  ///< most frequent per-view argmax
};

int fuse_simple(std::span<const MassFunction<double>> masses, SimpleFusionRule rule = SimpleFusionRule::BeliefSum);

/// Attention-fusion baseline head over frozen view embeddings.
struct AttentionFusionParams {
    ad::Param query;              ///< d_embed x 1, per-view score s_v = h_v . q
    ad::Param classifier_weight;  ///< d_embed x K
    ad::Param classifier_bias;    ///< 1 x K
    bool trained = false;

    std::vector<std::pair<std::string, ad::Param*>> named_params();
};

AttentionFusionParams init_attention_fusion(Index embed_dim, Index num_classes, std::uint64_t seed);

struct AttentionTrainConfig {
    int epochs = 100;
    AdamConfig adam;
};

/// Full-batch cross-entropy training of the head on `train_nodes`.
void train_attention_fusion(AttentionFusionParams& params, const std::array<Matrix, kNumViews>& embeddings,
                            std::span<const int> labels, std::span<const Index> train_nodes,
                            const AttentionTrainConfig& config);

struct AttentionOutput {
    Matrix view_weights;  ///< rows x V, softmax over views
    Matrix logits;        ///< rows x K
    std::vector<int> predicted;
};

/// Throws ContractError if the head was never trained or loaded.
AttentionOutput fuse_attention(const std::array<Matrix, kNumViews>& embeddings, std::span<const Index> rows,
                               const AttentionFusionParams& params);

struct NoiseSweepConfig {
    std::vector<double> gammas{0.0, 0.5, 1.0, 1.5, 2.0};
    ViewKind target_view = ViewKind::Hashtag;
    SimpleFusionRule simple_rule = SimpleFusionRule::BeliefSum;
    std::uint64_t seed = 1;

    void validate() const;
};

struct NoiseSweepRow {
    double gamma = 0.0;
    double mean_uncertainty = 0.0;
    std::array<double, kNumViews> view_accuracy{};
    double acc_evidential = 0.0;
    double acc_simple = 0.0;
    double acc_attention = 0.0;
};

/// Standard-normal noise times gamma added to the target view's embeddings;
/// all fusion strategies at one gamma see the same noised matrix.
std::vector<NoiseSweepRow> noise_sweep(const ModelParams& model, const MultiViewDataset& dataset,
                                       std::span<const Index> nodes, const AttentionFusionParams& attention,
                                       const NoiseSweepConfig& config);

void write_predictions_csv(const PredictionSet& predictions, std::ostream& out);
void write_sweep_csv(std::span<const NoiseSweepRow> rows, std::ostream& out);

/// "%.17g" formatting shared by the CSV writers.
std::string format_double(double value);

}  // namespace etgnn
