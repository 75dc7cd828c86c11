#include "etgnn/training.hpp"

#include "etgnn/rng.hpp"

#include <cmath>
#include <string>

namespace etgnn {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || epochs < 0 || batch_size <= 0) {
        throw ValidationError("train config: learning_rate and batch_size must be positive, epochs nonnegative");
    }
    if (!(loss_weights.lambda_e >= 0.0) || !(loss_weights.lambda_c >= 0.0)) {
        throw ValidationError("train config: loss weights must be nonnegative");
    }
    if (loss_weights.annealing_epochs && *loss_weights.annealing_epochs <= 0) {
        throw ValidationError("train config: annealing_epochs must be positive when set");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
        !(adam_epsilon > 0.0)) {
        throw ValidationError("train config: invalid Adam hyperparameters");
    }
    if (hidden1 <= 0 || hidden2 <= 0 || evidence_hidden <= 0) {
        throw ValidationError("train config: layer widths must be positive");
    }
}

ModelDims TrainConfig::dims_for(const MultiViewDataset& dataset) const {
    return {dataset.feature_dim, hidden1, hidden2, evidence_hidden, dataset.num_classes};
}

namespace {

std::vector<ad::Param*> trainable(ModelParams& model) {
    std::vector<ad::Param*> out;
    for (auto& [name, p] : model.named_params()) {
        out.push_back(p);
    }
    return out;
}

}  // namespace

EpochMetrics train_epoch(ModelParams& model, const MultiViewDataset& dataset, const TrainConfig& config,
                         int epoch, AdamState& adam) {
    if (!dataset.split || dataset.split->train.empty()) {
        throw ContractError("train_epoch: dataset has no training nodes");
    }
    std::vector<Index> order = dataset.split->train;
    SeededRng rng(derive_seed(config.seed, "shuffle/" + std::to_string(epoch)));
    rng.shuffle(order);

    const ad::Var features(dataset.feature_matrix());
    const std::vector<int> all_labels = dataset.labels();
    const auto params = trainable(model);
    const AdamConfig adam_config = config.adam();

    EpochMetrics metrics;
    metrics.epoch = epoch;
    const auto batch = static_cast<std::size_t>(config.batch_size);
    for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::span<const Index> rows(order.data() + start, std::min(batch, order.size() - start));
        std::vector<int> labels;
        labels.reserve(rows.size());
        for (const Index r : rows) {
            labels.push_back(all_labels[static_cast<std::size_t>(r)]);
        }

        for (ad::Param* p : params) {
            p->zero_grad();
        }
        const ForwardPass pass = forward(model, dataset, features, rows);
        bool finite = pass.combined_alpha.value().allFinite();
        for (const auto& opinion : pass.view_opinions) {
            finite = finite && opinion.alpha.value().allFinite();
        }
        if (!finite) {
            throw DivergenceError("non-finite evidence at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(metrics.batches));
        }
        LossInputs inputs;
        for (std::size_t v = 0; v < kNumViews; ++v) {
            inputs.view_alpha[v] = pass.view_opinions[v].alpha;
            inputs.embeddings[v] = pass.batch_embeddings[v];
        }
        inputs.combined_alpha = pass.combined_alpha;
        const LossBreakdown loss = total_loss(inputs, labels, config.loss_weights, config.loss_scope, epoch);
        if (!std::isfinite(loss.total.item())) {
            throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(metrics.batches));
        }
        ad::backward(loss.total);
        if (config.grad_clip_norm > 0.0) {
            clip_grad_norm(params, config.grad_clip_norm);
        }
        adam_step(params, adam, adam_config);
        for (const auto& [name, p] : model.named_params()) {
            if (!p->value().allFinite()) {
                throw DivergenceError("parameter " + name + " became non-finite at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(metrics.batches));
            }
        }

        ++metrics.batches;
        metrics.loss_total += loss.total.item();
        metrics.loss_p += loss.prediction;
        metrics.loss_kl += loss.kl;
        metrics.loss_c += loss.consistency;
        metrics.conflict_events += pass.conflict_events;
        metrics.saturation_events += pass.saturation_events;
    }
    const auto nb = static_cast<double>(metrics.batches);
    metrics.loss_total /= nb;
    metrics.loss_p /= nb;
    metrics.loss_kl /= nb;
    metrics.loss_c /= nb;
    return metrics;
}

FitResult fit(const MultiViewDataset& dataset, const TrainConfig& config) {
    config.validate();
    if (!dataset.split) {
        throw ContractError("fit: dataset has no split masks");
    }
    ModelParams model = init_params(config.dims_for(dataset), derive_seed(config.seed, "init"));
    FitResult result{model, {}, 0, 0.0, {}};
    if (config.epochs == 0) {
        return result;
    }

    const auto& val = dataset.split->val;
    const int k = dataset.num_classes;
    bool have_best = false;
    AdamState adam;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const EpochMetrics em = train_epoch(model, dataset, config, epoch, adam);
        HistoryRow row;
        row.epoch = epoch;
        row.loss_total = em.loss_total;
        row.loss_p = em.loss_p;
        row.loss_kl = em.loss_kl;
        row.loss_c = em.loss_c;
        row.conflict_events = em.conflict_events;
        Metrics vm;
        if (!val.empty()) {
            const PredictionSet preds = predict(model, dataset, val);
            vm = compute_metrics(preds.predicted(), preds.labels(), k);
            row.mean_uncertainty = preds.mean_uncertainty();
        }
        row.val_acc = vm.accuracy;
        row.val_macro_f1 = vm.macro_f1;
        result.history.push_back(row);

        if (!have_best || vm.accuracy >= result.best_val_acc) {
            have_best = true;
            result.best_val_acc = vm.accuracy;
            result.best_val_metrics = vm;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

void write_history_csv(const std::vector<HistoryRow>& history, std::ostream& out) {
    out << "epoch,loss_total,loss_p,loss_kl,loss_c,val_acc,val_macro_f1,mean_uncertainty,conflict_events\n";
    for (const auto& r : history) {
        out << r.epoch << ',' << format_double(r.loss_total) << ',' << format_double(r.loss_p) << ','
            << format_double(r.loss_kl) << ',' << format_double(r.loss_c) << ',' << format_double(r.val_acc) << ','
            << format_double(r.val_macro_f1) << ',' << format_double(r.mean_uncertainty) << ','
            << r.conflict_events << '\n';
    }
}

TensorArchive model_to_archive(const ModelParams& model) {
    TensorArchive archive;
    archive.meta["kind"] = "etgnn-model";
    archive.meta["input_dim"] = std::to_string(model.dims.input_dim);
    archive.meta["hidden1"] = std::to_string(model.dims.hidden1);
    archive.meta["hidden2"] = std::to_string(model.dims.hidden2);
    archive.meta["evidence_hidden"] = std::to_string(model.dims.evidence_hidden);
    archive.meta["num_classes"] = std::to_string(model.dims.num_classes);
    for (const auto& [name, p] : model.named_params()) {
        archive.tensors.push_back({name, p->value()});
    }
    return archive;
}

namespace {

Index meta_index(const TensorArchive& archive, const std::string& key) {
    const auto it = archive.meta.find(key);
    if (it == archive.meta.end()) {
        throw SchemaError("checkpoint is missing meta entry '" + key + "'");
    }
    try {
        return static_cast<Index>(std::stoll(it->second));
    } catch (const std::exception&) {
        throw SchemaError("checkpoint meta entry '" + key + "' is not an integer");
    }
}

}  // namespace

ModelParams model_from_archive(const TensorArchive& archive) {
    ModelDims dims;
    dims.input_dim = meta_index(archive, "input_dim");
    dims.hidden1 = meta_index(archive, "hidden1");
    dims.hidden2 = meta_index(archive, "hidden2");
    dims.evidence_hidden = meta_index(archive, "evidence_hidden");
    dims.num_classes = meta_index(archive, "num_classes");
    // Shapes come from a fresh initialisation; values from the archive.
    ModelParams model = init_params(dims, 0);
    for (auto& [name, p] : model.named_params()) {
        const Matrix& stored = archive.tensor(name);
        if (stored.rows() != p->value().rows() || stored.cols() != p->value().cols()) {
            throw SchemaError("checkpoint tensor '" + name + "' has shape " + shape_string(stored) + ", expected " +
                              shape_string(p->value()));
        }
        *p = ad::Param(stored);
    }
    return model;
}

}  // namespace etgnn
