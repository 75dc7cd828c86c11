#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include "etgnn/dst_fusion.hpp"
#include "etgnn/evaluation.hpp"
#include "etgnn/rng.hpp"
#include "etgnn/synthetic.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace etgnn;

namespace {

struct Trained {
    MultiViewDataset dataset;
    ModelParams model;
    AttentionFusionParams attention;
};

Trained trained_small() {
    SyntheticConfig config;
    config.num_events = 3;
    config.messages_per_event = 10;
    config.feature_dim = 6;
    config.seed = 2;
    Trained t{generate_synthetic(config), {}, {}};
    t.dataset.split = split_dataset(t.dataset, {0.8, 0.1, 0.1}, 2);
    t.model = fixture::small_model(t.dataset, 2);
    const auto embeddings = encode_all_views(t.model, t.dataset);
    t.attention = init_attention_fusion(t.model.dims.hidden2, t.model.dims.num_classes, 3);
    train_attention_fusion(t.attention, embeddings, t.dataset.labels(), t.dataset.split->train, {20, {}});
    return t;
}

std::vector<Index> all_nodes(const MultiViewDataset& ds) {
    std::vector<Index> nodes(static_cast<std::size_t>(ds.size()));
    for (Index i = 0; i < ds.size(); ++i) {
        nodes[static_cast<std::size_t>(i)] = i;
    }
    return nodes;
}

}  // namespace

TEST_CASE("compute_metrics") {
    SUBCASE("worked example") {
        const std::vector<int> pred{0, 0};
        const std::vector<int> label{0, 1};
        const Metrics m = compute_metrics(pred, label, 2);
        CHECK(m.accuracy == 0.5);
        CHECK(m.macro_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(m.weighted_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("perfect") {
        const std::vector<int> y{0, 1, 2, 2, 1};
        const Metrics m = compute_metrics(y, y, 3);
        CHECK(m.accuracy == 1.0);
        CHECK(m.macro_f1 == doctest::Approx(1.0));
        CHECK(m.weighted_f1 == doctest::Approx(1.0));
    }
    SUBCASE("absent class counts as zero in the macro mean") {
        const std::vector<int> y{0, 1, 0, 1};
        const Metrics m = compute_metrics(y, y, 3);
        CHECK(m.accuracy == 1.0);
        CHECK(m.macro_f1 == doctest::Approx(2.0 / 3.0));
        CHECK(m.weighted_f1 == doctest::Approx(1.0));
    }
    SUBCASE("errors") {
        const std::vector<int> none;
        const std::vector<int> one{0};
        const std::vector<int> two{0, 1};
        CHECK_THROWS_AS(compute_metrics(none, none, 2), ContractError);
        CHECK_THROWS_AS(compute_metrics(one, two, 2), ShapeError);
        CHECK_THROWS_AS(compute_metrics(std::vector<int>{2}, one, 2), ContractError);
    }
    SUBCASE("confusion-matrix oracle") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 200; ++trial) {
            const int k = 2 + static_cast<int>(rng() % 9);
            const std::size_t n = 1 + rng() % 1000;
            std::vector<int> pred(n);
            std::vector<int> label(n);
            for (std::size_t i = 0; i < n; ++i) {
                label[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
                pred[i] = rng() % 3 == 0 ? label[i] : static_cast<int>(rng() % static_cast<std::uint64_t>(k));
            }
            const Metrics m = compute_metrics(pred, label, k);
            const auto o = oracle::confusion_metrics(pred, label, k);
            CHECK(std::abs(m.accuracy - o.accuracy) < 1e-12);
            CHECK(std::abs(m.macro_f1 - o.macro_f1) < 1e-12);
            CHECK(std::abs(m.weighted_f1 - o.weighted_f1) < 1e-12);
        }
    }
}

TEST_CASE("fuse_simple") {
    auto mass = [](double b0, double b1) {
        MassFunction<double> m{Vector(2), 1.0 - b0 - b1};
        m.beliefs << b0, b1;
        return m;
    };
    const std::vector<MassFunction<double>> example{mass(0.6, 0.1), mass(0.1, 0.3), mass(0.1, 0.3)};
    CHECK(fuse_simple(example) == 0);
    CHECK(fuse_simple(example, SimpleFusionRule::MajorityVote) == 1);

    const std::vector<MassFunction<double>> vacuous(3, MassFunction<double>::vacuous(4));
    CHECK(fuse_simple(vacuous) == 0);
    CHECK(fuse_simple(vacuous, SimpleFusionRule::MajorityVote) == 0);

    SeededRng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = oracle::random_mass(rng, 5);
        const std::vector<MassFunction<double>> same(3, m);
        CHECK(fuse_simple(same) == static_cast<int>(argmax(m.beliefs)));
    }
    CHECK_THROWS_AS(fuse_simple(std::vector<MassFunction<double>>{}), ContractError);
}

TEST_CASE("argmax of alpha equals argmax of belief") {
    SeededRng rng(11);
    for (int trial = 0; trial < 10000; ++trial) {
        const int k = 2 + trial % 6;
        const auto m = oracle::random_mass(rng, k, 1e-3);
        const auto d = dirichlet_from_mass(m);
        REQUIRE(argmax(d.alpha) == argmax(m.beliefs));
        CHECK(std::abs(d.expected_probabilities().sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("predict") {
    const MultiViewDataset ds = fixture::six_node_dataset();
    const auto nodes = all_nodes(ds);

    SUBCASE("zero evidence is a vacuous prediction") {
        ModelParams model = fixture::small_model(ds, 1);
        for (auto& head : model.heads) {
            head.layer2_weight.mutable_value().setZero();
            head.layer2_bias.mutable_value().setZero();
        }
        const PredictionSet preds = predict(model, ds, nodes);
        REQUIRE(preds.records.size() == 6);
        for (const auto& r : preds.records) {
            CHECK(r.uncertainty == 1.0);
            CHECK(r.predicted == 0);
            CHECK((r.expected_probabilities.array() == 0.5).all());
            for (const double u : r.view_uncertainty) {
                CHECK(u == 1.0);
            }
        }
        CHECK(preds.mean_uncertainty() == 1.0);
    }
    SUBCASE("records are normalised and deterministic") {
        const ModelParams model = fixture::small_model(ds, 4);
        const PredictionSet a = predict(model, ds, nodes);
        const PredictionSet b = predict(model, ds, nodes);
        std::ostringstream ca;
        std::ostringstream cb;
        write_predictions_csv(a, ca);
        write_predictions_csv(b, cb);
        CHECK(ca.str() == cb.str());
        CHECK(ca.str().starts_with("id,pred,label,uncertainty,u_hashtag,u_entity,u_user\n"));
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            const auto& r = a.records[i];
            CHECK(r.id == ds.messages[i].id);
            CHECK(r.label == *ds.messages[i].label);
            CHECK(std::abs(r.expected_probabilities.sum() - 1.0) < 1e-12);
            CHECK(r.uncertainty > 0.0);
            CHECK(r.uncertainty <= 1.0);
            CHECK(r.predicted == static_cast<int>(argmax(r.expected_probabilities)));
            const auto combined = combine_all<double>(r.view_masses).mass;
            CHECK(std::abs(combined.uncertainty - r.uncertainty) < 1e-15);
        }
    }
    SUBCASE("subset of nodes") {
        const ModelParams model = fixture::small_model(ds, 4);
        const PredictionSet all = predict(model, ds, nodes);
        const std::vector<Index> subset{4, 1};
        const PredictionSet part = predict(model, ds, subset);
        REQUIRE(part.records.size() == 2);
        CHECK(part.records[0].id == ds.messages[4].id);
        CHECK(part.records[0].uncertainty == all.records[4].uncertainty);
        CHECK(part.records[1].predicted == all.records[1].predicted);
    }
}

TEST_CASE("fuse_attention") {
    const MultiViewDataset ds = fixture::six_node_dataset();
    const ModelParams model = fixture::small_model(ds, 4);
    const auto embeddings = encode_all_views(model, ds);
    const auto nodes = all_nodes(ds);
    AttentionFusionParams head = init_attention_fusion(model.dims.hidden2, 2, 5);
    CHECK_THROWS_AS(fuse_attention(embeddings, nodes, head), ContractError);

    train_attention_fusion(head, embeddings, ds.labels(), nodes, {50, {}});
    const AttentionOutput out = fuse_attention(embeddings, nodes, head);
    REQUIRE(out.view_weights.rows() == 6);
    REQUIRE(out.view_weights.cols() == 3);
    for (Index i = 0; i < 6; ++i) {
        CHECK(std::abs(out.view_weights.row(i).sum() - 1.0) < 1e-12);
        CHECK(out.predicted[static_cast<std::size_t>(i)] == static_cast<int>(argmax(out.logits.row(i))));
    }

    SUBCASE("equal scores use the mean embedding") {
        AttentionFusionParams flat = head;
        flat.query.mutable_value().setZero();
        const AttentionOutput o = fuse_attention(embeddings, nodes, flat);
        const Matrix mean = (embeddings[0] + embeddings[1] + embeddings[2]) / 3.0;
        const Matrix expected = (mean * flat.classifier_weight.value()).rowwise() + flat.classifier_bias.value().row(0);
        CHECK((o.view_weights.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);
        CHECK((o.logits - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("a dominant score selects one view") {
        std::array<Matrix, kNumViews> shifted = embeddings;
        AttentionFusionParams sharp = head;
        sharp.query.mutable_value().setZero();
        sharp.query.mutable_value()(0, 0) = 1.0;
        shifted[1].col(0).array() += 1e4;
        const AttentionOutput o = fuse_attention(shifted, nodes, sharp);
        const Matrix expected =
            (shifted[1] * sharp.classifier_weight.value()).rowwise() + sharp.classifier_bias.value().row(0);
        CHECK((o.view_weights.col(1).array() == 1.0).all());
        CHECK((o.logits - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("training reduces cross-entropy") {
        AttentionFusionParams fresh = init_attention_fusion(model.dims.hidden2, 2, 5);
        fresh.trained = true;
        auto xent = [&](const AttentionFusionParams& p) {
            const Matrix logits = fuse_attention(embeddings, nodes, p).logits;
            double total = 0.0;
            for (Index i = 0; i < logits.rows(); ++i) {
                const double mx = logits.row(i).maxCoeff();
                total += mx + std::log((logits.row(i).array() - mx).exp().sum()) -
                         logits(i, *ds.messages[static_cast<std::size_t>(i)].label);
            }
            return total;
        };
        CHECK(xent(head) < xent(fresh));
    }
}

TEST_CASE("noise_sweep") {
    const Trained t = trained_small();
    const auto& test = t.dataset.split->test;
    const NoiseSweepConfig config;
    const auto rows = noise_sweep(t.model, t.dataset, test, t.attention, config);
    REQUIRE(rows.size() == 5);

    const PredictionSet clean = predict(t.model, t.dataset, test);
    CHECK(rows[0].gamma == 0.0);
    CHECK(rows[0].mean_uncertainty == clean.mean_uncertainty());
    CHECK(rows[0].acc_evidential ==
          compute_metrics(clean.predicted(), clean.labels(), t.dataset.num_classes).accuracy);
    for (const auto& r : rows) {
        CHECK(r.view_accuracy[1] == rows[0].view_accuracy[1]);
        CHECK(r.view_accuracy[2] == rows[0].view_accuracy[2]);
        CHECK(r.mean_uncertainty > 0.0);
        CHECK(r.mean_uncertainty <= 1.0);
    }

    const auto again = noise_sweep(t.model, t.dataset, test, t.attention, config);
    std::ostringstream a;
    std::ostringstream b;
    write_sweep_csv(rows, a);
    write_sweep_csv(again, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().starts_with(
        "gamma,mean_uncertainty,acc_hashtag,acc_entity,acc_user,acc_evidential,acc_simple,acc_attention\n"));

    NoiseSweepConfig other = config;
    other.seed = 99;
    other.gammas = {2.0};
    const auto reseeded = noise_sweep(t.model, t.dataset, all_nodes(t.dataset), t.attention, other);
    const auto baseline = noise_sweep(t.model, t.dataset, all_nodes(t.dataset), t.attention, {{2.0}, ViewKind::Hashtag, SimpleFusionRule::BeliefSum, 1});
    CHECK(reseeded[0].mean_uncertainty != baseline[0].mean_uncertainty);

    NoiseSweepConfig entity = config;
    entity.target_view = ViewKind::Entity;
    const auto entity_rows = noise_sweep(t.model, t.dataset, test, t.attention, entity);
    for (const auto& r : entity_rows) {
        CHECK(r.view_accuracy[0] == rows[0].view_accuracy[0]);
    }

    SUBCASE("errors") {
        NoiseSweepConfig bad = config;
        bad.gammas = {1.0, 0.5};
        CHECK_THROWS_AS(noise_sweep(t.model, t.dataset, test, t.attention, bad), ValidationError);
        bad.gammas = {-1.0};
        CHECK_THROWS_AS(noise_sweep(t.model, t.dataset, test, t.attention, bad), ValidationError);
        AttentionFusionParams untrained = init_attention_fusion(t.model.dims.hidden2, 3, 1);
        CHECK_THROWS_AS(noise_sweep(t.model, t.dataset, test, untrained, config), ContractError);
    }
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<double>(static_cast<int>(rng() % 40)) - 20.0);
        CHECK(std::stod(format_double(x)) == x);
    }
}
