#include "etgnn/evaluation.hpp"

#include "etgnn/dst_fusion.hpp"
#include "etgnn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace etgnn {

std::vector<int> PredictionSet::predicted() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(r.predicted);
    }
    return out;
}

std::vector<int> PredictionSet::labels() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(r.label);
    }
    return out;
}

double PredictionSet::mean_uncertainty() const {
    if (records.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& r : records) {
        total += r.uncertainty;
    }
    return total / static_cast<double>(records.size());
}

PredictionSet predict_from_embeddings(const ModelParams& model, const MultiViewDataset& dataset,
                                      const std::array<Matrix, kNumViews>& embeddings,
                                      std::span<const Index> nodes) {
    std::array<Matrix, kNumViews> evidence_rows;
    for (std::size_t v = 0; v < kNumViews; ++v) {
        Matrix rows(static_cast<Index>(nodes.size()), embeddings[v].cols());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            rows.row(static_cast<Index>(i)) = embeddings[v].row(nodes[i]);
        }
        evidence_rows[v] = evidence(rows, model.heads[v]);
    }

    PredictionSet out;
    out.records.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        PredictionRecord rec;
        rec.node = nodes[i];
        rec.id = dataset.messages[static_cast<std::size_t>(rec.node)].id;
        rec.label = dataset.messages[static_cast<std::size_t>(rec.node)].label.value_or(-1);
        for (std::size_t v = 0; v < kNumViews; ++v) {
            auto [mass, dirichlet] = mass_from_evidence(evidence_rows[v].row(static_cast<Index>(i)).transpose());
            rec.view_uncertainty[v] = mass.uncertainty;
            rec.view_predicted[v] = static_cast<int>(argmax(dirichlet.alpha));
            rec.view_masses[v] = std::move(mass);
        }
        MassFunction<double> combined;
        try {
            combined = combine_all<double>(rec.view_masses).mass;
        } catch (const ConflictError&) {
            combined = MassFunction<double>::vacuous(model.dims.num_classes);
            ++out.conflict_events;
        }
        bool saturated = false;
        const DirichletParams<double> dirichlet = dirichlet_from_mass_clamped(combined, &saturated);
        out.saturation_events += saturated ? 1 : 0;
        rec.predicted = static_cast<int>(argmax(dirichlet.alpha));
        rec.expected_probabilities = dirichlet.expected_probabilities();
        rec.uncertainty = combined.uncertainty;
        out.records.push_back(std::move(rec));
    }
    return out;
}

PredictionSet predict(const ModelParams& model, const MultiViewDataset& dataset, std::span<const Index> nodes) {
    return predict_from_embeddings(model, dataset, encode_all_views(model, dataset), nodes);
}

Metrics compute_metrics(std::span<const int> predicted, std::span<const int> labels, int num_classes) {
    if (predicted.size() != labels.size()) {
        throw ShapeError("compute_metrics: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(labels.size()) + " labels");
    }
    if (predicted.empty()) {
        throw ContractError("compute_metrics: empty input");
    }
    const auto k = static_cast<std::size_t>(num_classes);
    std::vector<double> tp(k, 0.0), fp(k, 0.0), fn(k, 0.0), support(k, 0.0);
    double correct = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int p = predicted[i];
        const int y = labels[i];
        if (p < 0 || p >= num_classes || y < 0 || y >= num_classes) {
            throw ContractError("compute_metrics: class index out of range");
        }
        support[static_cast<std::size_t>(y)] += 1.0;
        if (p == y) {
            correct += 1.0;
            tp[static_cast<std::size_t>(p)] += 1.0;
        } else {
            fp[static_cast<std::size_t>(p)] += 1.0;
            fn[static_cast<std::size_t>(y)] += 1.0;
        }
    }
    Metrics m;
    const auto n = static_cast<double>(predicted.size());
    m.accuracy = correct / n;
    for (std::size_t c = 0; c < k; ++c) {
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        const double f1 = denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
        m.macro_f1 += f1 / static_cast<double>(k);
        m.weighted_f1 += f1 * support[c] / n;
    }
    return m;
}

int fuse_simple(std::span<const MassFunction<double>> masses, SimpleFusionRule rule) {
    if (masses.empty()) {
        throw ContractError("fuse_simple: no opinions");
    }
    const Index k = masses.front().num_classes();
    Vector score = Vector::Zero(k);
    for (const auto& m : masses) {
        if (rule == SimpleFusionRule::BeliefSum) {
            score += m.beliefs;
        } else {
            score(argmax(m.beliefs)) += 1.0;
        }
    }
    return static_cast<int>(argmax(score));
}

std::vector<std::pair<std::string, ad::Param*>> AttentionFusionParams::named_params() {
    return {{"attention.query", &query},
            {"attention.classifier.weight", &classifier_weight},
            {"attention.classifier.bias", &classifier_bias}};
}

AttentionFusionParams init_attention_fusion(Index embed_dim, Index num_classes, std::uint64_t seed) {
    SeededRng rng(seed);
    auto uniform = [&rng](Index rows, Index cols) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        Matrix w(rows, cols);
        for (Index i = 0; i < w.size(); ++i) {
            w.data()[i] = rng.uniform(-bound, bound);
        }
        return ad::Param(std::move(w));
    };
    AttentionFusionParams p;
    p.query = uniform(embed_dim, 1);
    p.classifier_weight = uniform(embed_dim, num_classes);
    p.classifier_bias = ad::Param(Matrix::Zero(1, num_classes));
    return p;
}

namespace {

struct AttentionGraph {
    ad::Var weights;
    ad::Var logits;
};

AttentionGraph attention_forward(const std::array<ad::Var, kNumViews>& views, const AttentionFusionParams& p) {
    std::array<ad::Var, kNumViews> scores;
    for (std::size_t v = 0; v < kNumViews; ++v) {
        scores[v] = ad::matmul(views[v], p.query);
    }
    const ad::Var weights = ad::softmax_rows(ad::hcat(scores));
    ad::Var fused = ad::mul_col_broadcast(views[0], ad::slice_cols(weights, 0, 1));
    for (std::size_t v = 1; v < kNumViews; ++v) {
        fused = fused + ad::mul_col_broadcast(views[v], ad::slice_cols(weights, static_cast<Index>(v), 1));
    }
    return {weights, ad::add_row_broadcast(ad::matmul(fused, p.classifier_weight), p.classifier_bias)};
}

std::array<ad::Var, kNumViews> gather_views(const std::array<Matrix, kNumViews>& embeddings,
                                            std::span<const Index> rows) {
    std::array<ad::Var, kNumViews> out;
    for (std::size_t v = 0; v < kNumViews; ++v) {
        Matrix m(static_cast<Index>(rows.size()), embeddings[v].cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            m.row(static_cast<Index>(i)) = embeddings[v].row(rows[i]);
        }
        out[v] = ad::Var(std::move(m));
    }
    return out;
}

}  // namespace

void train_attention_fusion(AttentionFusionParams& params, const std::array<Matrix, kNumViews>& embeddings,
                            std::span<const int> labels, std::span<const Index> train_nodes,
                            const AttentionTrainConfig& config) {
    std::vector<int> y;
    for (const Index n : train_nodes) {
        y.push_back(labels[static_cast<std::size_t>(n)]);
    }
    const auto views = gather_views(embeddings, train_nodes);
    std::vector<ad::Param*> trainable;
    for (auto& [name, p] : params.named_params()) {
        trainable.push_back(p);
    }
    AdamState state;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (ad::Param* p : trainable) {
            p->zero_grad();
        }
        const AttentionGraph g = attention_forward(views, params);
        const ad::Var loss = ad::scale(ad::softmax_cross_entropy(g.logits, y), 1.0 / static_cast<double>(y.size()));
        ad::backward(loss);
        adam_step(trainable, state, config.adam);
    }
    params.trained = true;
}

AttentionOutput fuse_attention(const std::array<Matrix, kNumViews>& embeddings, std::span<const Index> rows,
                               const AttentionFusionParams& params) {
    if (!params.trained) {
        throw ContractError("fuse_attention: attention-fusion head is untrained");
    }
    const AttentionGraph g = attention_forward(gather_views(embeddings, rows), params);
    AttentionOutput out;
    out.view_weights = g.weights.value();
    out.logits = g.logits.value();
    for (Index i = 0; i < out.logits.rows(); ++i) {
        out.predicted.push_back(static_cast<int>(argmax(out.logits.row(i))));
    }
    return out;
}

void NoiseSweepConfig::validate() const {
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] >= 0.0) || !std::isfinite(gammas[i])) {
            throw ValidationError("noise sweep: gammas must be finite and nonnegative");
        }
        if (i > 0 && gammas[i] < gammas[i - 1]) {
            throw ValidationError("noise sweep: gammas must be sorted ascending");
        }
    }
}

std::vector<NoiseSweepRow> noise_sweep(const ModelParams& model, const MultiViewDataset& dataset,
                                       std::span<const Index> nodes, const AttentionFusionParams& attention,
                                       const NoiseSweepConfig& config) {
    config.validate();
    if (!attention.trained) {
        throw ContractError("noise_sweep: attention-fusion head is untrained");
    }
    const auto clean = encode_all_views(model, dataset);
    const auto target = static_cast<std::size_t>(config.target_view);
    const int k = static_cast<int>(model.dims.num_classes);
    std::vector<int> labels;
    for (const Index n : nodes) {
        labels.push_back(dataset.messages[static_cast<std::size_t>(n)].label.value_or(-1));
    }

    std::vector<NoiseSweepRow> rows;
    for (std::size_t g = 0; g < config.gammas.size(); ++g) {
        const double gamma = config.gammas[g];
        auto noised = clean;
        if (gamma != 0.0) {
            SeededRng rng(derive_seed(config.seed, "noise/" + std::to_string(g)));
            noised[target] += gamma * rng.normal_matrix(clean[target].rows(), clean[target].cols());
        }
        const PredictionSet preds = predict_from_embeddings(model, dataset, noised, nodes);

        NoiseSweepRow row;
        row.gamma = gamma;
        row.mean_uncertainty = preds.mean_uncertainty();
        row.acc_evidential = compute_metrics(preds.predicted(), labels, k).accuracy;
        for (std::size_t v = 0; v < kNumViews; ++v) {
            std::vector<int> view_pred;
            for (const auto& r : preds.records) {
                view_pred.push_back(r.view_predicted[v]);
            }
            row.view_accuracy[v] = compute_metrics(view_pred, labels, k).accuracy;
        }
        std::vector<int> simple;
        for (const auto& r : preds.records) {
            simple.push_back(fuse_simple(r.view_masses, config.simple_rule));
        }
        row.acc_simple = compute_metrics(simple, labels, k).accuracy;
        row.acc_attention = compute_metrics(fuse_attention(noised, nodes, attention).predicted, labels, k).accuracy;
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_predictions_csv(const PredictionSet& predictions, std::ostream& out) {
    out << "id,pred,label,uncertainty,u_hashtag,u_entity,u_user\n";
    for (const auto& r : predictions.records) {
        out << r.id << ',' << r.predicted << ',';
        if (r.label >= 0) {
            out << r.label;
        }
        out << ',' << format_double(r.uncertainty);
        for (const double u : r.view_uncertainty) {
            out << ',' << format_double(u);
        }
        out << '\n';
    }
}

void write_sweep_csv(std::span<const NoiseSweepRow> rows, std::ostream& out) {
    out << "gamma,mean_uncertainty,acc_hashtag,acc_entity,acc_user,acc_evidential,acc_simple,acc_attention\n";
    for (const auto& r : rows) {
        out << format_double(r.gamma) << ',' << format_double(r.mean_uncertainty);
        for (const double a : r.view_accuracy) {
            out << ',' << format_double(a);
        }
        out << ',' << format_double(r.acc_evidential) << ',' << format_double(r.acc_simple) << ','
            << format_double(r.acc_attention) << '\n';
    }
}

}  // namespace etgnn
