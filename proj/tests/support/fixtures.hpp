#pragma once

// Small hand-built instances shared by the unit tests and the acceptance binary.

#include "support/oracles.hpp"

#include "etgnn/dataset.hpp"
#include "etgnn/losses.hpp"
#include "etgnn/model.hpp"
#include "etgnn/rng.hpp"

#include <string>
#include <vector>

namespace etgnn::fixture {

inline Message message(std::string id, double t, std::set<std::string> hashtags, std::set<std::string> entities,
                       std::set<std::string> users, Vector features, std::optional<int> label = std::nullopt) {
    Message m;
    m.id = std::move(id);
    m.time_days = t;
    m.hashtags = std::move(hashtags);
    m.entities = std::move(entities);
    m.users = std::move(users);
    m.features = std::move(features);
    m.label = label;
    return m;
}

/// Six messages, two classes, every view connected differently; node 5 is
/// isolated in the user view.
inline MultiViewDataset six_node_dataset(std::uint64_t seed = 5) {
    SeededRng rng(seed);
    std::vector<Message> messages;
    const std::vector<std::set<std::string>> hashtags{{"a"}, {"a", "b"}, {"b"}, {"c"}, {"c", "d"}, {"d", "a"}};
    const std::vector<std::set<std::string>> entities{{"x"}, {"x"}, {"y"}, {"y"}, {"z"}, {"z"}};
    const std::vector<std::set<std::string>> users{{"u1"}, {"u2"}, {"u1", "u2"}, {"u3"}, {"u3"}, {"u9"}};
    const std::vector<double> times{0.0, 0.4, 1.3, 2.0, 2.2, 3.7};
    for (int i = 0; i < 6; ++i) {
        const auto s = static_cast<std::size_t>(i);
        Vector x = rng.normal_matrix(1, 3).transpose();
        messages.push_back(message("n" + std::to_string(i), times[s], hashtags[s], entities[s], users[s], x, i < 3 ? 0 : 1));
    }
    return make_dataset(std::move(messages));
}

/// Narrow model with small positive biases so most ReLU units start active.
inline ModelParams small_model(const MultiViewDataset& dataset, std::uint64_t seed) {
    ModelDims dims{dataset.feature_dim, 5, 4, 3, dataset.num_classes};
    ModelParams model = init_params(dims, seed);
    SeededRng rng(seed + 1);
    for (auto& [name, p] : model.named_params()) {
        if (name.ends_with("bias")) {
            for (Index i = 0; i < p->value().size(); ++i) {
                p->mutable_value().data()[i] = rng.uniform(0.05, 0.3);
            }
        }
    }
    return model;
}

/// Total objective over every node of `dataset` with the given weights and scope.
inline ad::Var full_loss(const ModelParams& model, const MultiViewDataset& dataset, const LossWeights& weights,
                         LossScope scope) {
    std::vector<Index> rows;
    for (Index i = 0; i < dataset.size(); ++i) {
        rows.push_back(i);
    }
    const ForwardPass pass = forward(model, dataset, ad::Var(dataset.feature_matrix()), rows);
    LossInputs inputs;
    for (std::size_t v = 0; v < kNumViews; ++v) {
        inputs.view_alpha[v] = pass.view_opinions[v].alpha;
        inputs.embeddings[v] = pass.batch_embeddings[v];
    }
    inputs.combined_alpha = pass.combined_alpha;
    return total_loss(inputs, dataset.labels(), weights, scope, 1).total;
}

/// Finite-difference check of the full objective against every model parameter.
inline oracle::GradientCheck end_to_end_gradient_check(std::uint64_t seed, LossScope scope = LossScope::PerViewAndCombined) {
    const MultiViewDataset dataset = six_node_dataset(seed);
    ModelParams model = small_model(dataset, seed);
    std::vector<ad::Param*> params;
    for (auto& [name, p] : model.named_params()) {
        params.push_back(p);
    }
    const LossWeights weights;
    return oracle::check_gradients([&] { return full_loss(model, dataset, weights, scope); }, params);
}

}  // namespace etgnn::fixture
