#include "support/oracles.hpp"
#include "support/properties.hpp"

#include "etgnn/dst_fusion.hpp"

#include <doctest.h>

using namespace etgnn;

namespace {

MassFunction<double> mass(std::initializer_list<double> beliefs, double u) {
    Vector b(static_cast<Index>(beliefs.size()));
    Index i = 0;
    for (double x : beliefs) {
        b(i++) = x;
    }
    return {b, u};
}

Matrix pack(std::span<const MassFunction<double>> rows) {
    const Index k = rows.front().num_classes();
    Matrix out(static_cast<Index>(rows.size()), k + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)).head(k) = rows[i].beliefs.transpose();
        out(static_cast<Index>(i), k) = rows[i].uncertainty;
    }
    return out;
}

}  // namespace

TEST_CASE("combine_pair examples") {
    const auto m1 = mass({0.6, 0.2}, 0.2);
    SUBCASE("vacuous partner is the identity") {
        const auto out = combine_pair(m1, MassFunction<double>::vacuous(2));
        CHECK(out.mass.beliefs == m1.beliefs);
        CHECK(out.mass.uncertainty == m1.uncertainty);
        CHECK(out.report.conflict == 0.0);
    }
    SUBCASE("worked example") {
        const auto m2 = mass({0.5, 0.3}, 0.2);
        const auto out = combine_pair(m1, m2);
        CHECK(out.report.conflict == doctest::Approx(0.28).epsilon(1e-14));
        CHECK(out.mass.beliefs(0) == doctest::Approx(0.52 / 0.72).epsilon(1e-14));
        CHECK(out.mass.beliefs(1) == doctest::Approx(0.16 / 0.72).epsilon(1e-14));
        CHECK(out.mass.uncertainty == doctest::Approx(0.04 / 0.72).epsilon(1e-14));
        CHECK(std::abs(out.mass.total() - 1.0) < 1e-15);
        const auto brute = oracle::dempster_enumerate(m1, m2);
        CHECK(property::max_abs_diff(out.mass, brute) < 1e-15);
    }
    SUBCASE("total conflict") {
        CHECK_THROWS_AS(combine_pair(mass({1, 0}, 0), mass({0, 1}, 0)), ConflictError);
        CHECK_THROWS_AS(combine_pair(mass({1, 0}, 0), mass({0, 1, 0}, 0)), ShapeError);
    }
}

TEST_CASE("combine_all examples") {
    const auto m = mass({0.3, 0.1, 0.2}, 0.4);
    const std::vector<MassFunction<double>> one{m};
    const auto single = combine_all<double>(one);
    CHECK(single.mass.beliefs == m.beliefs);
    CHECK(single.report.conflict == 0.0);

    const std::vector<MassFunction<double>> padded{m, MassFunction<double>::vacuous(3), MassFunction<double>::vacuous(3)};
    const auto out = combine_all<double>(padded);
    CHECK(out.mass.beliefs == m.beliefs);
    CHECK(out.mass.uncertainty == m.uncertainty);
    CHECK(out.report.pair_conflicts.size() == 2);

    CHECK_THROWS_AS(combine_all<double>(std::vector<MassFunction<double>>{}), ContractError);

    SeededRng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::vector<MassFunction<double>> three{oracle::random_mass(rng, 3, 0.05), oracle::random_mass(rng, 3, 0.05),
                                                      oracle::random_mass(rng, 3, 0.05)};
        const auto folded = combine_all<double>(three);
        const auto right = combine_pair(three[0], combine_pair(three[1], three[2]).mass).mass;
        const auto swapped = combine_pair(combine_pair(three[2], three[0]).mass, three[1]).mass;
        CHECK(property::max_abs_diff(folded.mass, right) < 1e-9);
        CHECK(property::max_abs_diff(folded.mass, swapped) < 1e-9);
        // Overall conflict accounts for all discarded mass.
        const double raw_u = three[0].uncertainty * three[1].uncertainty * three[2].uncertainty;
        CHECK(std::abs(folded.mass.uncertainty * (1.0 - folded.report.conflict) - raw_u) < 1e-12);
    }
}

TEST_CASE("Dempster algebra properties") {
    for (Index k : {2, 3, 5}) {
        const auto p = property::dst_algebra(k, 3000, 100 + static_cast<std::uint64_t>(k));
        INFO("K = " << k);
        CHECK(p.closure < 1e-9);
        CHECK(p.commutativity < 1e-9);
        CHECK(p.associativity < 1e-6);
        CHECK(p.vacuous_identity <= 4 * std::numeric_limits<double>::epsilon());
        CHECK(p.oracle < 1e-9);
        CHECK(p.negative_masses == 0);
    }
}

TEST_CASE("recorded combination matches the scalar rule") {
    SeededRng rng(9);
    std::vector<MassFunction<double>> a;
    std::vector<MassFunction<double>> b;
    for (int i = 0; i < 20; ++i) {
        a.push_back(oracle::random_mass(rng, 4));
        b.push_back(oracle::random_mass(rng, 4));
    }
    // A row in total conflict becomes vacuous and is counted.
    a.push_back(mass({1, 0, 0, 0}, 0));
    b.push_back(mass({0, 1, 0, 0}, 0));
    int conflicts = 0;
    const Matrix out = combine_pair(ad::Var(pack(a)), ad::Var(pack(b)), &conflicts).value();
    CHECK(conflicts == 1);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto expected = combine_pair(a[i], b[i]).mass;
        CHECK(property::max_abs_diff(mass_row(out, static_cast<Index>(i)), expected) < 1e-14);
    }
    const auto last = mass_row(out, 20);
    CHECK(last.beliefs == Vector::Zero(4));
    CHECK(last.uncertainty == 1.0);
}

TEST_CASE("combination gradients match finite differences") {
    SeededRng rng(10);
    std::vector<MassFunction<double>> rows1;
    std::vector<MassFunction<double>> rows2;
    std::vector<MassFunction<double>> rows3;
    for (int i = 0; i < 5; ++i) {
        rows1.push_back(oracle::random_mass(rng, 3, 0.05));
        rows2.push_back(oracle::random_mass(rng, 3, 0.05));
        rows3.push_back(oracle::random_mass(rng, 3, 0.05));
    }
    ad::Param m1(pack(rows1));
    ad::Param m2(pack(rows2));
    ad::Param m3(pack(rows3));
    const Matrix probe = rng.normal_matrix(5, 4);
    // Inputs are treated as free coordinates; the rule is a smooth function of them.
    const auto pair = oracle::check_gradients(
        [&] { return ad::sum(ad::hadamard(combine_pair(m1, m2), ad::Var(probe))); }, {&m1, &m2});
    CHECK(pair.max_relative_error < 1e-4);
    const auto fold = oracle::check_gradients(
        [&] {
            const std::array<ad::Var, 3> all{m1, m2, m3};
            return ad::sum(ad::hadamard(combine_all(all), ad::Var(probe)));
        },
        {&m1, &m2, &m3});
    CHECK(fold.max_relative_error < 1e-4);
}
