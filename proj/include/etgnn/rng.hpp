#pragma once

#include "etgnn/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace etgnn {

/// Seeded generator with a platform-independent output stream.
///
/// Only the raw mt19937_64 engine is used; every distribution is derived
/// here so identical seeds give bit-identical draws on any standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();

    /// n x m matrix of standard normal draws, filled row by row.
    Matrix normal_matrix(Index rows, Index cols);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[below(i)]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Derives an independent labelled sub-seed ("data", "init", "shuffle", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

}  // namespace etgnn
