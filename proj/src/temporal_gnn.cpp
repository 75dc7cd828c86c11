#include "etgnn/temporal_gnn.hpp"

#include "etgnn/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etgnn {

double decay_rate(const Eigen::Ref<const RowVector>& h, const TemporalLayerParams& params) {
    const double logit = h.dot(params.decay_weight.value().col(0)) + params.decay_bias.value()(0, 0);
    return softplus(logit);
}

Vector attention_weights(double lambda, std::span<const double> dts) {
    if (dts.empty()) {
        throw ContractError("attention_weights: empty neighbourhood");
    }
    Vector scores(static_cast<Index>(dts.size()));
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dts.size(); ++j) {
        scores(static_cast<Index>(j)) = -lambda * dts[j];
        top = std::max(top, scores(static_cast<Index>(j)));
    }
    Vector weights = (scores.array() - top).exp();
    return weights / weights.sum();
}

namespace {

// Neighbourhood of node i: itself at dt = 0 followed by its stored edges.
struct Neighbourhood {
    std::vector<Index> nodes;
    std::vector<double> dts;
};

Neighbourhood neighbourhood(const ViewGraph& graph, Index i) {
    Neighbourhood nb;
    const auto begin = static_cast<std::size_t>(graph.offsets[static_cast<std::size_t>(i)]);
    const auto end = static_cast<std::size_t>(graph.offsets[static_cast<std::size_t>(i) + 1]);
    nb.nodes.reserve(end - begin + 1);
    nb.dts.reserve(end - begin + 1);
    nb.nodes.push_back(i);
    nb.dts.push_back(0.0);
    for (std::size_t k = begin; k < end; ++k) {
        nb.nodes.push_back(graph.neighbors[k]);
        nb.dts.push_back(graph.edge_dt[k]);
    }
    return nb;
}

}  // namespace

ad::Var temporal_aggregate(const ViewGraph& graph, const ad::Var& values, const ad::Var& lambda) {
    if (values.rows() != graph.node_count || lambda.rows() != graph.node_count || lambda.cols() != 1) {
        throw ShapeError("temporal_aggregate: graph has " + std::to_string(graph.node_count) +
                         " nodes, values " + shape_string(values.value()) + ", lambda " +
                         shape_string(lambda.value()));
    }
    const Index n = graph.node_count;
    std::vector<Vector> weights(static_cast<std::size_t>(n));
    Matrix out = Matrix::Zero(n, values.cols());
    for (Index i = 0; i < n; ++i) {
        const Neighbourhood nb = neighbourhood(graph, i);
        Vector a = attention_weights(lambda.value()(i, 0), nb.dts);
        for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
            out.row(i) += a(static_cast<Index>(j)) * values.value().row(nb.nodes[j]);
        }
        weights[static_cast<std::size_t>(i)] = std::move(a);
    }

    return ad::make_node(std::move(out), {values, lambda}, [graph, weights = std::move(weights)](ad::Node& node) {
        ad::Node& pv = *node.parents[0];
        ad::Node& pl = *node.parents[1];
        const Index n = graph.node_count;
        Matrix grad_values = Matrix::Zero(pv.value.rows(), pv.value.cols());
        Matrix grad_lambda = Matrix::Zero(n, 1);
        for (Index i = 0; i < n; ++i) {
            const Neighbourhood nb = neighbourhood(graph, i);
            const Vector& a = weights[static_cast<std::size_t>(i)];
            const auto g = node.grad.row(i);
            double mean_dt = 0.0;
            for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
                mean_dt += a(static_cast<Index>(j)) * nb.dts[j];
            }
            double dl = 0.0;
            for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
                const double aj = a(static_cast<Index>(j));
                grad_values.row(nb.nodes[j]) += aj * g;
                // da_j / dlambda = -a_j (dt_j - sum_k a_k dt_k)
                dl += g.dot(pv.value.row(nb.nodes[j])) * (-aj * (nb.dts[j] - mean_dt));
            }
            grad_lambda(i, 0) = dl;
        }
        pv.accumulate(grad_values);
        pl.accumulate(grad_lambda);
    });
}

ad::Var layer_forward(const ViewGraph& graph, const ad::Var& h, const TemporalLayerParams& params) {
    if (h.rows() != graph.node_count) {
        throw ShapeError("layer_forward: input " + shape_string(h.value()) + " for graph with " +
                         std::to_string(graph.node_count) + " nodes");
    }
    if (h.cols() != params.input_dim()) {
        throw ShapeError("layer_forward: input " + shape_string(h.value()) + " does not match weight " +
                         shape_string(params.weight.value()));
    }
    const ad::Var transformed = ad::matmul(h, params.weight);
    const ad::Var lambda = ad::softplus(ad::add_row_broadcast(ad::matmul(h, params.decay_weight), params.decay_bias));
    return ad::relu(temporal_aggregate(graph, transformed, lambda));
}

ad::Var encode_view(const ViewGraph& graph, const ad::Var& x, const ViewEncoderParams& params) {
    return layer_forward(graph, layer_forward(graph, x, params.layer1), params.layer2);
}

}  // namespace etgnn
