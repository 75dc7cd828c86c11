#pragma once

#include "etgnn/autodiff.hpp"
#include "etgnn/errors.hpp"
#include "etgnn/evidential.hpp"

#include <span>
#include <string>
#include <vector>

namespace etgnn {

/// Conflict T at or above 1 - kTotalConflictMargin is treated as total conflict.
inline constexpr double kTotalConflictMargin = 1e-12;

template <typename Scalar>
struct ConflictReport {
    /// Mass discarded overall: 1 - prod(1 - T_i) over the fold; equals T for a pair.
    Scalar conflict = Scalar(0);
    std::vector<Scalar> pair_conflicts;
};

template <typename Scalar>
struct Combination {
    MassFunction<Scalar> mass;
    ConflictReport<Scalar> report;
};

/// T = sum_{i != j} b1_i b2_j.
template <typename Scalar>
Scalar conflict_mass(const MassFunction<Scalar>& a, const MassFunction<Scalar>& b) {
    return a.beliefs.sum() * b.beliefs.sum() - a.beliefs.dot(b.beliefs);
}

/// Dempster's rule for two opinions over the same K singletons.
template <typename Scalar>
Combination<Scalar> combine_pair(const MassFunction<Scalar>& a, const MassFunction<Scalar>& b) {
    if (a.num_classes() != b.num_classes()) {
        throw ShapeError("combine_pair: opinions over " + std::to_string(a.num_classes()) + " and " +
                         std::to_string(b.num_classes()) + " classes");
    }
    const Scalar t = conflict_mass(a, b);
    if (t >= Scalar(1) - Scalar(kTotalConflictMargin)) {
        throw ConflictError("combine_pair: total conflict (T = " + std::to_string(static_cast<double>(t)) + ")");
    }
    const Scalar norm = Scalar(1) / (Scalar(1) - t);
    Combination<Scalar> out;
    out.mass.beliefs = norm * (a.beliefs.cwiseProduct(b.beliefs) + a.beliefs * b.uncertainty +
                               b.beliefs * a.uncertainty);
    out.mass.uncertainty = norm * a.uncertainty * b.uncertainty;
    out.report.conflict = t;
    out.report.pair_conflicts.push_back(t);
    return out;
}

/// Left fold of combine_pair in list order.
template <typename Scalar>
Combination<Scalar> combine_all(std::span<const MassFunction<Scalar>> masses) {
    if (masses.empty()) {
        throw ContractError("combine_all: no opinions to combine");
    }
    Combination<Scalar> acc{masses.front(), {}};
    Scalar kept = Scalar(1);
    for (std::size_t v = 1; v < masses.size(); ++v) {
        Combination<Scalar> step = combine_pair(acc.mass, masses[v]);
        kept *= Scalar(1) - step.report.conflict;
        acc.mass = std::move(step.mass);
        acc.report.pair_conflicts.push_back(step.report.conflict);
    }
    acc.report.conflict = Scalar(1) - kept;
    return acc;
}

/// Recorded row-wise Dempster combination of packed n x (K+1) masses.
///
/// Rows in total conflict yield the vacuous opinion (with zero gradient) and
/// increment `conflict_events` instead of throwing.
ad::Var combine_pair(const ad::Var& a, const ad::Var& b, int* conflict_events = nullptr);
ad::Var combine_all(std::span<const ad::Var> masses, int* conflict_events = nullptr);

}  // namespace etgnn
