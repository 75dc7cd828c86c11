#include "etgnn/losses.hpp"

#include <algorithm>

namespace etgnn {

double LossWeights::effective_lambda_e(int epoch) const {
    if (!annealing_epochs || *annealing_epochs <= 0) {
        return lambda_e;
    }
    return lambda_e * std::min(1.0, static_cast<double>(epoch) / static_cast<double>(*annealing_epochs));
}

namespace {

void require_labels(const ad::Var& alpha, std::span<const int> labels, const char* op) {
    if (static_cast<Index>(labels.size()) != alpha.rows()) {
        throw ShapeError(std::string(op) + ": " + std::to_string(labels.size()) + " labels for alpha " +
                         shape_string(alpha.value()));
    }
    for (const int y : labels) {
        if (y < 0 || y >= alpha.cols()) {
            throw ContractError(std::string(op) + ": label " + std::to_string(y) + " out of range");
        }
    }
}

void require_alpha(const ad::Var& alpha, const char* op) {
    // Tolerate round-off just below 1 from the combined-mass inversion.
    if ((alpha.value().array() < 1.0 - 1e-9).any() || !alpha.value().allFinite()) {
        throw ContractError(std::string(op) + ": alpha components must be finite and >= 1");
    }
}

}  // namespace

ad::Var edl_prediction_loss(const ad::Var& alpha, std::span<const int> labels) {
    require_labels(alpha, labels, "edl_prediction_loss");
    require_alpha(alpha, "edl_prediction_loss");
    std::vector<int> y(labels.begin(), labels.end());
    const Matrix& a = alpha.value();
    double loss = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        loss += digamma(a.row(i).sum()) - digamma(a(i, y[static_cast<std::size_t>(i)]));
    }
    Matrix out(1, 1);
    out(0, 0) = loss;
    return ad::make_node(std::move(out), {alpha}, [y = std::move(y)](ad::Node& node) {
        ad::Node& pa = *node.parents[0];
        const Matrix& a = pa.value;
        Matrix g(a.rows(), a.cols());
        for (Index i = 0; i < a.rows(); ++i) {
            g.row(i).setConstant(trigamma(a.row(i).sum()));
            const int label = y[static_cast<std::size_t>(i)];
            g(i, label) -= trigamma(a(i, label));
        }
        pa.accumulate(g * node.grad(0, 0));
    });
}

ad::Var misleading_alpha(const ad::Var& alpha, std::span<const int> labels) {
    require_labels(alpha, labels, "misleading_alpha");
    Matrix keep = Matrix::Ones(alpha.rows(), alpha.cols());
    Matrix one_hot = Matrix::Zero(alpha.rows(), alpha.cols());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        keep(static_cast<Index>(i), labels[i]) = 0.0;
        one_hot(static_cast<Index>(i), labels[i]) = 1.0;
    }
    return ad::add(ad::hadamard(alpha, ad::Var(std::move(keep))), ad::Var(std::move(one_hot)));
}

ad::Var kl_evidence_loss(const ad::Var& alpha_tilde) {
    require_alpha(alpha_tilde, "kl_evidence_loss");
    const Matrix& a = alpha_tilde.value();
    double loss = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        loss += kl_to_uniform_dirichlet(a.row(i).cwiseMax(1.0));
    }
    Matrix out(1, 1);
    out(0, 0) = loss;
    return ad::make_node(std::move(out), {alpha_tilde}, [](ad::Node& node) {
        ad::Node& pa = *node.parents[0];
        const Matrix& a = pa.value;
        const auto k = static_cast<double>(a.cols());
        Matrix g(a.rows(), a.cols());
        for (Index i = 0; i < a.rows(); ++i) {
            const double s = a.row(i).sum();
            const double tail = (s - k) * trigamma(s);
            for (Index j = 0; j < a.cols(); ++j) {
                // d/d alpha_j = (alpha_j - 1) psi'(alpha_j) - (S - K) psi'(S)
                g(i, j) = (a(i, j) - 1.0) * trigamma(std::max(a(i, j), 1.0)) - tail;
            }
        }
        pa.accumulate(g * node.grad(0, 0));
    });
}

ad::Var consistency_loss(const ad::Var& h_hashtag, const ad::Var& h_entity, const ad::Var& h_user) {
    if (h_hashtag.rows() != h_entity.rows() || h_hashtag.rows() != h_user.rows() ||
        h_hashtag.cols() != h_entity.cols() || h_hashtag.cols() != h_user.cols()) {
        throw ShapeError("consistency_loss: embedding shapes " + shape_string(h_hashtag.value()) + ", " +
                         shape_string(h_entity.value()) + ", " + shape_string(h_user.value()));
    }
    auto gram = [](const ad::Var& h) {
        const ad::Var normalized = ad::row_l2_normalize(h);
        return ad::matmul_transposed(normalized, normalized);
    };
    const ad::Var c_h = gram(h_hashtag);
    const ad::Var c_e = gram(h_entity);
    const ad::Var c_u = gram(h_user);
    return ad::sum_squares(c_h - c_e) + ad::sum_squares(c_h - c_u) + ad::sum_squares(c_e - c_u);
}

LossBreakdown total_loss(const LossInputs& inputs, std::span<const int> labels, const LossWeights& weights,
                         LossScope scope, int epoch) {
    std::vector<ad::Var> alphas{inputs.combined_alpha};
    if (scope == LossScope::PerViewAndCombined) {
        alphas.insert(alphas.end(), inputs.view_alpha.begin(), inputs.view_alpha.end());
    }
    ad::Var prediction = edl_prediction_loss(alphas.front(), labels);
    ad::Var kl = kl_evidence_loss(misleading_alpha(alphas.front(), labels));
    for (std::size_t v = 1; v < alphas.size(); ++v) {
        prediction = prediction + edl_prediction_loss(alphas[v], labels);
        kl = kl + kl_evidence_loss(misleading_alpha(alphas[v], labels));
    }
    const ad::Var consistency = consistency_loss(inputs.embeddings[0], inputs.embeddings[1], inputs.embeddings[2]);

    LossBreakdown out;
    out.lambda_e = weights.effective_lambda_e(epoch);
    out.lambda_c = weights.lambda_c;
    out.prediction = prediction.item();
    out.kl = kl.item();
    out.consistency = consistency.item();
    out.total = prediction + ad::scale(kl, out.lambda_e) + ad::scale(consistency, out.lambda_c);
    return out;
}

}  // namespace etgnn
