#include "etgnn/dst_fusion.hpp"

namespace etgnn {

ad::Var combine_pair(const ad::Var& a, const ad::Var& b, int* conflict_events) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() < 2) {
        throw ShapeError("combine_pair: packed masses " + shape_string(a.value()) + " and " +
                         shape_string(b.value()));
    }
    const Index n = a.rows();
    const Index k = a.cols() - 1;
    Matrix out(n, k + 1);
    Vector denom(n);
    std::vector<bool> conflicted(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
        const auto b1 = a.value().row(i).head(k);
        const auto b2 = b.value().row(i).head(k);
        const double u1 = a.value()(i, k);
        const double u2 = b.value()(i, k);
        const double t = b1.sum() * b2.sum() - b1.dot(b2);
        if (t >= 1.0 - kTotalConflictMargin) {
            conflicted[static_cast<std::size_t>(i)] = true;
            out.row(i).setZero();
            out(i, k) = 1.0;
            denom(i) = 0.0;
            if (conflict_events != nullptr) {
                ++*conflict_events;
            }
            continue;
        }
        denom(i) = 1.0 - t;
        out.row(i).head(k) = (b1.cwiseProduct(b2) + b1 * u2 + b2 * u1) / denom(i);
        out(i, k) = u1 * u2 / denom(i);
    }

    return ad::make_node(std::move(out), {a, b}, [denom, conflicted](ad::Node& node) {
        ad::Node& pa = *node.parents[0];
        ad::Node& pb = *node.parents[1];
        const Index n = node.value.rows();
        const Index k = node.value.cols() - 1;
        Matrix ga = Matrix::Zero(n, k + 1);
        Matrix gb = Matrix::Zero(n, k + 1);
        for (Index i = 0; i < n; ++i) {
            if (conflicted[static_cast<std::size_t>(i)]) {
                continue;
            }
            const auto b1 = pa.value.row(i).head(k);
            const auto b2 = pb.value.row(i).head(k);
            const double u1 = pa.value(i, k);
            const double u2 = pb.value(i, k);
            const double s1 = b1.sum();
            const double s2 = b2.sum();
            const double d = denom(i);
            const auto g_beliefs = node.grad.row(i).head(k);
            const double g_u = node.grad(i, k);
            // Upstream gradient with respect to the denominator D = 1 - T.
            const double g_d = -node.grad.row(i).dot(node.value.row(i)) / d;
            // dD/db1_j = b2_j - s2, dD/db2_j = b1_j - s1
            ga.row(i).head(k) = (g_beliefs.cwiseProduct(b2) + g_beliefs * u2) / d +
                                g_d * (b2.array() - s2).matrix();
            gb.row(i).head(k) = (g_beliefs.cwiseProduct(b1) + g_beliefs * u1) / d +
                                g_d * (b1.array() - s1).matrix();
            ga(i, k) = (g_beliefs.dot(b2) + g_u * u2) / d;
            gb(i, k) = (g_beliefs.dot(b1) + g_u * u1) / d;
        }
        pa.accumulate(ga);
        pb.accumulate(gb);
    });
}

ad::Var combine_all(std::span<const ad::Var> masses, int* conflict_events) {
    if (masses.empty()) {
        throw ContractError("combine_all: no opinions to combine");
    }
    ad::Var acc = masses.front();
    for (std::size_t v = 1; v < masses.size(); ++v) {
        acc = combine_pair(acc, masses[v], conflict_events);
    }
    return acc;
}

}  // namespace etgnn
