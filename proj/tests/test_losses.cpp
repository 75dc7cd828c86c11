#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

#include "etgnn/losses.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace etgnn;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m(static_cast<Index>(values.size()), static_cast<Index>(values.begin()->size()));
    Index i = 0;
    for (const auto& r : values) {
        Index j = 0;
        for (double x : r) {
            m(i, j++) = x;
        }
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("prediction loss spot values") {
    CHECK(std::abs(edl_prediction_loss(vec({1, 1}), 0) - 1.0) < 1e-12);
    CHECK(std::abs(edl_prediction_loss(vec({2, 1}), 0) - 0.5) < 1e-12);
    const std::vector<int> labels{0, 0};
    CHECK(std::abs(edl_prediction_loss(ad::Var(rows({{1, 1}, {2, 1}})), labels).item() - 1.5) < 1e-12);
    CHECK_THROWS_AS(edl_prediction_loss(ad::Var(rows({{0.5, 1}})), std::vector<int>{0}), ContractError);
    CHECK_THROWS_AS(edl_prediction_loss(ad::Var(rows({{1, 1}})), std::vector<int>{2}), ContractError);
}

TEST_CASE("prediction loss matches Monte-Carlo integration over the simplex") {
    const auto r = property::loss_oracles(9, 200000, 0, 77);
    INFO("worst z " << r.worst_z);
    CHECK(r.monte_carlo_cases == 9);
    CHECK(r.monte_carlo_failures == 0);
}

TEST_CASE("misleading alpha") {
    CHECK(misleading_alpha(vec({5, 3}), 0) == vec({1, 3}));
    CHECK(misleading_alpha(vec({5, 3}), 1) == vec({5, 1}));
    CHECK(misleading_alpha(Vector::Ones(4), 2) == Vector::Ones(4));
    const std::vector<int> labels{0, 1};
    CHECK(misleading_alpha(ad::Var(rows({{5, 3}, {5, 3}})), labels).value() == rows({{1, 3}, {5, 1}}));
}

TEST_CASE("KL evidence term") {
    CHECK(std::abs(kl_to_uniform_dirichlet(Vector::Ones(3))) < 1e-14);
    CHECK(std::abs(kl_to_uniform_dirichlet(vec({2, 1})) - (std::numbers::ln2 - 0.5)) < 1e-12);
    CHECK(std::abs(kl_to_uniform_dirichlet(vec({2, 1})) - 0.19314718) < 1e-8);

    const auto quad = property::loss_oracles(0, 0, 20, 78);
    CHECK(quad.quadrature < 1e-6);

    SeededRng rng(12);
    for (int trial = 0; trial < 10000; ++trial) {
        const Index k = 2 + static_cast<Index>(rng.below(6));
        Vector alpha(k);
        for (Index j = 0; j < k; ++j) {
            alpha(j) = 1.0 + std::exp(rng.uniform(-8.0, 4.0));
        }
        CHECK(kl_to_uniform_dirichlet(alpha) >= 0.0);
    }
    CHECK_THROWS_AS(kl_evidence_loss(ad::Var(rows({{0.2, 1}}))), ContractError);
}

TEST_CASE("consistency loss") {
    SeededRng rng(13);
    const Matrix h = rng.normal_matrix(5, 4);
    CHECK(consistency_loss(ad::Var(h), ad::Var(h), ad::Var(h)).item() == 0.0);

    const Matrix single_a = rng.normal_matrix(1, 4);
    const Matrix single_b = rng.normal_matrix(1, 4);
    const Matrix single_c = rng.normal_matrix(1, 4);
    CHECK(std::abs(consistency_loss(ad::Var(single_a), ad::Var(single_b), ad::Var(single_c)).item()) < 1e-24);

    // Orthogonal hashtag rows against identical entity/user rows.
    const Matrix orthogonal = rows({{1, 0}, {0, 1}});
    const Matrix parallel = rows({{1, 1}, {2, 2}});
    CHECK(std::abs(consistency_loss(ad::Var(orthogonal), ad::Var(parallel), ad::Var(parallel)).item() - 4.0) < 1e-12);

    CHECK_THROWS_AS(consistency_loss(ad::Var(h), ad::Var(h), ad::Var(Matrix::Zero(4, 4))), ShapeError);

    // Right-multiplying every view by one orthogonal matrix leaves the Gram matrices alone.
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = rng.normal_matrix(6, 5);
        const Matrix b = rng.normal_matrix(6, 5);
        const Matrix c = rng.normal_matrix(6, 5);
        const Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(5, 5));
        const Matrix q = qr.householderQ();
        const double base = consistency_loss(ad::Var(a), ad::Var(b), ad::Var(c)).item();
        const double rotated = consistency_loss(ad::Var(a * q), ad::Var(b * q), ad::Var(c * q)).item();
        CHECK(base >= 0.0);
        CHECK(std::abs(base - rotated) < 1e-10 * std::max(1.0, base));
    }
}

TEST_CASE("total objective bookkeeping") {
    SeededRng rng(14);
    LossInputs inputs;
    for (auto& a : inputs.view_alpha) {
        a = ad::Var((rng.normal_matrix(4, 2).cwiseAbs().array() + 1.0).matrix());
    }
    inputs.combined_alpha = ad::Var((rng.normal_matrix(4, 2).cwiseAbs().array() + 1.0).matrix());
    for (auto& h : inputs.embeddings) {
        h = ad::Var(rng.normal_matrix(4, 3));
    }
    const std::vector<int> labels{0, 1, 1, 0};

    SUBCASE("breakdown sums to the total") {
        const LossWeights weights;
        const auto out = total_loss(inputs, labels, weights, LossScope::PerViewAndCombined, 3);
        CHECK(std::abs(out.total.item() - (out.prediction + out.lambda_e * out.kl + out.lambda_c * out.consistency)) <
              1e-9);
        CHECK(out.lambda_e == 1.0);
        CHECK(out.lambda_c == 5.0);
        CHECK(out.prediction >= 0.0);
        CHECK(out.kl >= 0.0);
        CHECK(out.consistency >= 0.0);
    }
    SUBCASE("zero weights leave the prediction terms") {
        LossWeights weights;
        weights.lambda_e = 0.0;
        weights.lambda_c = 0.0;
        const auto out = total_loss(inputs, labels, weights, LossScope::PerViewAndCombined, 1);
        double expected = edl_prediction_loss(inputs.combined_alpha, labels).item();
        for (const auto& a : inputs.view_alpha) {
            expected += edl_prediction_loss(a, labels).item();
        }
        CHECK(std::abs(out.total.item() - expected) < 1e-12);
        const auto combined = total_loss(inputs, labels, weights, LossScope::CombinedOnly, 1);
        CHECK(std::abs(combined.total.item() - edl_prediction_loss(inputs.combined_alpha, labels).item()) < 1e-12);
    }
    SUBCASE("vacuous views and a uniform combined Dirichlet") {
        LossInputs vacuous = inputs;
        for (auto& a : vacuous.view_alpha) {
            a = ad::Var(Matrix::Ones(1, 2));
        }
        vacuous.combined_alpha = ad::Var(Matrix::Ones(1, 2));
        for (auto& h : vacuous.embeddings) {
            h = ad::Var(Matrix::Ones(1, 3));
        }
        const auto out = total_loss(vacuous, std::vector<int>{1}, LossWeights{}, LossScope::CombinedOnly, 1);
        CHECK(std::abs(out.prediction - 1.0) < 1e-12);
        CHECK(std::abs(out.kl) < 1e-14);
    }
    SUBCASE("annealing") {
        LossWeights weights;
        weights.annealing_epochs = 10;
        CHECK(weights.effective_lambda_e(0) == 0.0);
        CHECK(weights.effective_lambda_e(5) == 0.5);
        CHECK(weights.effective_lambda_e(20) == 1.0);
        CHECK(LossWeights{}.effective_lambda_e(0) == 1.0);
    }
}

TEST_CASE("loss gradients match finite differences") {
    SeededRng rng(15);
    ad::Param alpha((rng.normal_matrix(5, 3).cwiseAbs().array() + 1.2).matrix());
    const std::vector<int> labels{0, 2, 1, 1, 0};
    CHECK(oracle::check_gradients([&] { return edl_prediction_loss(alpha, labels); }, {&alpha}).max_relative_error <
          1e-4);
    CHECK(oracle::check_gradients([&] { return kl_evidence_loss(misleading_alpha(alpha, labels)); }, {&alpha})
              .max_relative_error < 1e-4);
    ad::Param a(rng.normal_matrix(4, 3));
    ad::Param b(rng.normal_matrix(4, 3));
    ad::Param c(rng.normal_matrix(4, 3));
    CHECK(oracle::check_gradients([&] { return consistency_loss(a, b, c); }, {&a, &b, &c}).max_relative_error < 1e-4);
}

TEST_CASE("end-to-end gradient of the total objective") {
    for (std::uint64_t seed : {1U, 2U, 3U}) {
        const auto result = fixture::end_to_end_gradient_check(seed);
        INFO("seed " << seed << ": " << result.entries << " entries, max rel err " << result.max_relative_error);
        CHECK(result.max_relative_error < 1e-4);
    }
    const auto combined_only = fixture::end_to_end_gradient_check(4, LossScope::CombinedOnly);
    CHECK(combined_only.max_relative_error < 1e-4);
}
