#pragma once

#include "etgnn/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace etgnn {

namespace detail {

template <typename Scalar>
void require_positive(Scalar x, const char* name) {
    if (!(x > Scalar(0)) || !std::isfinite(x)) {
        throw DomainError(std::string(name) + ": argument must be positive and finite, got " +
                          std::to_string(static_cast<double>(x)));
    }
}

// Below this the recurrence shifts the argument upward before the asymptotic
// series is applied; at 10 the truncated series error is far below 1e-15.
template <typename Scalar>
inline constexpr Scalar kAsymptoticThreshold = Scalar(10);

}  // namespace detail

/// Digamma function psi(x) = d/dx ln Gamma(x) for x > 0.
template <typename Scalar>
Scalar digamma(Scalar x) {
    detail::require_positive(x, "digamma");
    Scalar shift = 0;
    while (x < detail::kAsymptoticThreshold<Scalar>) {
        shift -= Scalar(1) / x;
        x += Scalar(1);
    }
    const Scalar inv = Scalar(1) / x;
    const Scalar inv2 = inv * inv;
    // Bernoulli tail: B_2n / (2n x^2n)
    const Scalar series =
        inv2 * (Scalar(1) / 12 -
                inv2 * (Scalar(1) / 120 -
                        inv2 * (Scalar(1) / 252 -
                                inv2 * (Scalar(1) / 240 -
                                        inv2 * (Scalar(1) / 132 -
                                                inv2 * (Scalar(691) / 32760 - inv2 * (Scalar(1) / 12)))))));
    return shift + std::log(x) - Scalar(0.5) * inv - series;
}

/// Trigamma function psi'(x) for x > 0.
template <typename Scalar>
Scalar trigamma(Scalar x) {
    detail::require_positive(x, "trigamma");
    Scalar shift = 0;
    while (x < detail::kAsymptoticThreshold<Scalar>) {
        shift += Scalar(1) / (x * x);
        x += Scalar(1);
    }
    const Scalar inv = Scalar(1) / x;
    const Scalar inv2 = inv * inv;
    const Scalar series =
        inv * (Scalar(1) +
               inv * (Scalar(0.5) +
                      inv * (Scalar(1) / 6 -
                             inv2 * (Scalar(1) / 30 -
                                     inv2 * (Scalar(1) / 42 -
                                             inv2 * (Scalar(1) / 30 - inv2 * (Scalar(5) / 66)))))));
    return shift + series;
}

/// ln Gamma(x) for x > 0 via upward shift and the Stirling series.
template <typename Scalar>
Scalar lgamma(Scalar x) {
    detail::require_positive(x, "lgamma");
    Scalar log_shift = 0;
    if (x < detail::kAsymptoticThreshold<Scalar>) {
        Scalar product = 1;
        while (x < detail::kAsymptoticThreshold<Scalar>) {
            product *= x;
            x += Scalar(1);
        }
        log_shift = std::log(product);
    }
    const Scalar inv = Scalar(1) / x;
    const Scalar inv2 = inv * inv;
    const Scalar half_log_two_pi = Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
    const Scalar series =
        inv * (Scalar(1) / 12 -
               inv2 * (Scalar(1) / 360 -
                       inv2 * (Scalar(1) / 1260 -
                               inv2 * (Scalar(1) / 1680 -
                                       inv2 * (Scalar(1) / 1188 - inv2 * (Scalar(691) / 360360))))));
    return (x - Scalar(0.5)) * std::log(x) - x + half_log_two_pi + series - log_shift;
}

/// Numerically stable ln(1 + exp(x)).
template <typename Scalar>
Scalar softplus(Scalar x) {
    return std::max(x, Scalar(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    if (x >= Scalar(0)) {
        return Scalar(1) / (Scalar(1) + std::exp(-x));
    }
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

}  // namespace etgnn
