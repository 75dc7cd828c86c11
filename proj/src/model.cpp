#include "etgnn/model.hpp"

#include "etgnn/dst_fusion.hpp"
#include "etgnn/rng.hpp"

#include <cmath>

namespace etgnn {

void ModelDims::validate() const {
    if (input_dim <= 0 || hidden1 <= 0 || hidden2 <= 0 || evidence_hidden <= 0 || num_classes <= 0) {
        throw ValidationError("model dims must be positive (d_in " + std::to_string(input_dim) + ", K " +
                              std::to_string(num_classes) + ")");
    }
}

namespace {

ad::Param glorot(Index fan_in, Index fan_out, SeededRng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (Index i = 0; i < fan_in; ++i) {
        for (Index j = 0; j < fan_out; ++j) {
            w(i, j) = rng.uniform(-bound, bound);
        }
    }
    return ad::Param(std::move(w));
}

ad::Param zeros(Index rows, Index cols) { return ad::Param(Matrix::Zero(rows, cols)); }

TemporalLayerParams init_layer(Index in, Index out, SeededRng& rng) {
    return {glorot(in, out, rng), glorot(in, 1, rng), zeros(1, 1)};
}

template <typename Model, typename ParamPtr>
std::vector<std::pair<std::string, ParamPtr>> list_params(Model& model) {
    std::vector<std::pair<std::string, ParamPtr>> out;
    for (const ViewKind v : kAllViews) {
        const std::string prefix(view_name(v));
        auto& enc = model.encoders[static_cast<std::size_t>(v)];
        auto& head = model.heads[static_cast<std::size_t>(v)];
        out.emplace_back(prefix + ".layer1.weight", &enc.layer1.weight);
        out.emplace_back(prefix + ".layer1.decay_weight", &enc.layer1.decay_weight);
        out.emplace_back(prefix + ".layer1.decay_bias", &enc.layer1.decay_bias);
        out.emplace_back(prefix + ".layer2.weight", &enc.layer2.weight);
        out.emplace_back(prefix + ".layer2.decay_weight", &enc.layer2.decay_weight);
        out.emplace_back(prefix + ".layer2.decay_bias", &enc.layer2.decay_bias);
        out.emplace_back(prefix + ".evidence.layer1.weight", &head.layer1_weight);
        out.emplace_back(prefix + ".evidence.layer1.bias", &head.layer1_bias);
        out.emplace_back(prefix + ".evidence.layer2.weight", &head.layer2_weight);
        out.emplace_back(prefix + ".evidence.layer2.bias", &head.layer2_bias);
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, ad::Param*>> ModelParams::named_params() {
    return list_params<ModelParams, ad::Param*>(*this);
}

std::vector<std::pair<std::string, const ad::Param*>> ModelParams::named_params() const {
    return list_params<const ModelParams, const ad::Param*>(*this);
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
    dims.validate();
    SeededRng rng(seed);
    ModelParams model;
    model.dims = dims;
    for (const ViewKind v : kAllViews) {
        auto& enc = model.encoders[static_cast<std::size_t>(v)];
        enc.layer1 = init_layer(dims.input_dim, dims.hidden1, rng);
        enc.layer2 = init_layer(dims.hidden1, dims.hidden2, rng);
        auto& head = model.heads[static_cast<std::size_t>(v)];
        head.layer1_weight = glorot(dims.hidden2, dims.evidence_hidden, rng);
        head.layer1_bias = zeros(1, dims.evidence_hidden);
        head.layer2_weight = glorot(dims.evidence_hidden, dims.num_classes, rng);
        head.layer2_bias = zeros(1, dims.num_classes);
    }
    return model;
}

ForwardPass forward(const ModelParams& model, const MultiViewDataset& dataset, const ad::Var& features,
                    std::span<const Index> batch) {
    ForwardPass pass;
    std::array<ad::Var, kNumViews> masses;
    for (const ViewKind v : kAllViews) {
        const auto vi = static_cast<std::size_t>(v);
        pass.embeddings[vi] = encode_view(dataset.graph(v), features, model.encoders[vi]);
        pass.batch_embeddings[vi] = ad::gather_rows(pass.embeddings[vi], batch);
        pass.view_opinions[vi] = mass_from_evidence(evidence(pass.batch_embeddings[vi], model.heads[vi]));
        masses[vi] = pass.view_opinions[vi].mass;
    }
    pass.combined_mass = combine_all(masses, &pass.conflict_events);
    pass.combined_alpha = dirichlet_from_mass(pass.combined_mass, &pass.saturation_events);
    return pass;
}

std::array<Matrix, kNumViews> encode_all_views(const ModelParams& model, const MultiViewDataset& dataset) {
    const ad::Var features(dataset.feature_matrix());
    std::array<Matrix, kNumViews> out;
    for (const ViewKind v : kAllViews) {
        const auto vi = static_cast<std::size_t>(v);
        out[vi] = encode_view(dataset.graph(v), features, model.encoders[vi]).value();
    }
    return out;
}

}  // namespace etgnn
