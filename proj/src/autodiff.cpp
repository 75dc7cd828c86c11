#include "etgnn/autodiff.hpp"

#include "etgnn/special_functions.hpp"

#include <cmath>
#include <unordered_set>

namespace etgnn::ad {

void Node::accumulate(const Eigen::Ref<const Matrix>& g) {
    if (!requires_grad) {
        return;
    }
    if (!has_grad || grad.rows() != value.rows() || grad.cols() != value.cols()) {
        grad = Matrix::Zero(value.rows(), value.cols());
    }
    grad += g;
    has_grad = true;
}

Var::Var(Matrix value) : node_(std::make_shared<Node>()) {
    node_->value = std::move(value);
}

double Var::item() const {
    if (rows() != 1 || cols() != 1) {
        throw ContractError("item() on non-scalar node of shape " + shape_string(value()));
    }
    return value()(0, 0);
}

Param::Param(Matrix value) : var_(std::move(value)) {
    var_.node()->requires_grad = true;
    zero_grad();
}

Param& Param::operator=(const Param& other) {
    if (this != &other) {
        *this = Param(other.value());
    }
    return *this;
}

void Param::zero_grad() {
    auto& node = *var_.node();
    node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
    node.has_grad = true;
}

Var make_node(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->is_leaf = false;
    for (const auto& p : parents) {
        node->requires_grad = node->requires_grad || p.requires_grad();
        node->parents.push_back(p.node());
    }
    if (node->requires_grad) {
        node->backward = std::move(backward_fn);
    }
    return Var(std::move(node));
}

void backward(const Var& loss) {
    if (!loss.valid() || loss.rows() != 1 || loss.cols() != 1) {
        throw ContractError("backward() requires a scalar loss, got shape " +
                            (loss.valid() ? shape_string(loss.value()) : std::string("<null>")));
    }
    if (!loss.requires_grad()) {
        return;
    }

    // Iterative post-order DFS; reversed it is a topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(loss.node().get(), 0);
    visited.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [node, next_parent] = stack.back();
        if (next_parent < node->parents.size()) {
            Node* parent = node->parents[next_parent++].get();
            if (parent->requires_grad && !visited.contains(parent)) {
                visited.insert(parent);
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* node : order) {
        if (!node->is_leaf) {
            node->has_grad = false;
            node->grad.resize(0, 0);
        }
    }
    Node& root = *loss.node();
    root.accumulate(Matrix::Ones(1, 1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (!node->is_leaf && node->has_grad && node->backward) {
            node->backward(*node);
        }
    }
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.value()) + " vs " +
                         shape_string(b.value()));
    }
}

Node& parent(Node& n, std::size_t i) { return *n.parents[i]; }

}  // namespace

Var matmul(const Var& a, const Var& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.value()) + " x " +
                         shape_string(b.value()));
    }
    Matrix out = a.value() * b.value();
    return make_node(std::move(out), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) {
            pa.accumulate(n.grad * pb.value.transpose());
        }
        if (pb.requires_grad) {
            pb.accumulate(pa.value.transpose() * n.grad);
        }
    });
}

Var matmul_transposed(const Var& a, const Var& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_transposed: inner dimensions differ, " + shape_string(a.value()) +
                         " x " + shape_string(b.value()) + "^T");
    }
    Matrix out = a.value() * b.value().transpose();
    return make_node(std::move(out), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) {
            pa.accumulate(n.grad * pb.value);
        }
        if (pb.requires_grad) {
            pb.accumulate(n.grad.transpose() * pa.value);
        }
    });
}

Var transpose(const Var& a) {
    Matrix out = a.value().transpose();
    return make_node(std::move(out), {a}, [](Node& n) { parent(n, 0).accumulate(n.grad.transpose()); });
}

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    return make_node(a.value() + b.value(), {a, b}, [](Node& n) {
        parent(n, 0).accumulate(n.grad);
        parent(n, 1).accumulate(n.grad);
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    return make_node(a.value() - b.value(), {a, b}, [](Node& n) {
        parent(n, 0).accumulate(n.grad);
        parent(n, 1).accumulate(-n.grad);
    });
}

Var hadamard(const Var& a, const Var& b) {
    require_same_shape(a, b, "hadamard");
    return make_node(a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) {
            pa.accumulate(n.grad.cwiseProduct(pb.value));
        }
        if (pb.requires_grad) {
            pb.accumulate(n.grad.cwiseProduct(pa.value));
        }
    });
}

Var scale(const Var& a, double factor) {
    return make_node(a.value() * factor, {a},
                     [factor](Node& n) { parent(n, 0).accumulate(n.grad * factor); });
}

Var add_scalar(const Var& a, double c) {
    return make_node(a.value().array() + c, {a}, [](Node& n) { parent(n, 0).accumulate(n.grad); });
}

Var reciprocal(const Var& a) {
    Matrix out = a.value().cwiseInverse();
    return make_node(std::move(out), {a}, [](Node& n) {
        parent(n, 0).accumulate(-n.grad.cwiseProduct(n.value.cwiseProduct(n.value)));
    });
}

Var relu(const Var& a) {
    Matrix out = a.value().cwiseMax(0.0);
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate((pa.value.array() > 0.0).select(n.grad, 0.0));
    });
}

Var softplus(const Var& a) {
    Matrix out = a.value().unaryExpr([](double x) { return etgnn::softplus(x); });
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate(n.grad.cwiseProduct(pa.value.unaryExpr([](double x) { return etgnn::sigmoid(x); })));
    });
}

Var clamp_min(const Var& a, double lo) {
    Matrix out = a.value().cwiseMax(lo);
    return make_node(std::move(out), {a}, [lo](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate((pa.value.array() > lo).select(n.grad, 0.0));
    });
}

Var add_row_broadcast(const Var& a, const Var& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw ShapeError("add_row_broadcast: bias " + shape_string(bias.value()) + " does not match " +
                         shape_string(a.value()));
    }
    Matrix out = a.value().rowwise() + bias.value().row(0);
    return make_node(std::move(out), {a, bias}, [](Node& n) {
        parent(n, 0).accumulate(n.grad);
        parent(n, 1).accumulate(n.grad.colwise().sum());
    });
}

Var mul_col_broadcast(const Var& a, const Var& col) {
    if (col.cols() != 1 || col.rows() != a.rows()) {
        throw ShapeError("mul_col_broadcast: column " + shape_string(col.value()) + " does not match " +
                         shape_string(a.value()));
    }
    Matrix out = col.value().col(0).asDiagonal() * a.value();
    return make_node(std::move(out), {a, col}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pc = parent(n, 1);
        if (pa.requires_grad) {
            pa.accumulate(pc.value.col(0).asDiagonal() * n.grad);
        }
        if (pc.requires_grad) {
            pc.accumulate(n.grad.cwiseProduct(pa.value).rowwise().sum());
        }
    });
}

Var div_col_broadcast(const Var& a, const Var& col) {
    if (col.cols() != 1 || col.rows() != a.rows()) {
        throw ShapeError("div_col_broadcast: column " + shape_string(col.value()) + " does not match " +
                         shape_string(a.value()));
    }
    const Vector inv = col.value().col(0).cwiseInverse();
    Matrix out = inv.asDiagonal() * a.value();
    return make_node(std::move(out), {a, col}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pc = parent(n, 1);
        const Vector inv = pc.value.col(0).cwiseInverse();
        if (pa.requires_grad) {
            pa.accumulate(inv.asDiagonal() * n.grad);
        }
        if (pc.requires_grad) {
            // d(a/c)/dc = -(a/c)/c
            const Vector g = n.grad.cwiseProduct(n.value).rowwise().sum();
            pc.accumulate(-g.cwiseProduct(inv));
        }
    });
}

Var sum(const Var& a) {
    Matrix out(1, 1);
    out(0, 0) = a.value().sum();
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate(Matrix::Constant(pa.value.rows(), pa.value.cols(), n.grad(0, 0)));
    });
}

Var sum_squares(const Var& a) {
    Matrix out(1, 1);
    out(0, 0) = a.value().squaredNorm();
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate(pa.value * (2.0 * n.grad(0, 0)));
    });
}

Var row_sum(const Var& a) {
    Matrix out = a.value().rowwise().sum();
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        pa.accumulate(n.grad.col(0).replicate(1, pa.value.cols()));
    });
}

Var gather_rows(const Var& a, std::span<const Index> rows) {
    std::vector<Index> idx(rows.begin(), rows.end());
    Matrix out(static_cast<Index>(idx.size()), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= a.rows()) {
            throw ShapeError("gather_rows: row " + std::to_string(idx[i]) + " out of range for " +
                             shape_string(a.value()));
        }
        out.row(static_cast<Index>(i)) = a.value().row(idx[i]);
    }
    return make_node(std::move(out), {a}, [idx = std::move(idx)](Node& n) {
        Node& pa = parent(n, 0);
        Matrix g = Matrix::Zero(pa.value.rows(), pa.value.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            g.row(idx[i]) += n.grad.row(static_cast<Index>(i));
        }
        pa.accumulate(g);
    });
}

Var slice_cols(const Var& a, Index first, Index count) {
    if (first < 0 || count < 0 || first + count > a.cols()) {
        throw ShapeError("slice_cols: columns [" + std::to_string(first) + ", " +
                         std::to_string(first + count) + ") out of range for " + shape_string(a.value()));
    }
    Matrix out = a.value().middleCols(first, count);
    return make_node(std::move(out), {a}, [first, count](Node& n) {
        Node& pa = parent(n, 0);
        Matrix g = Matrix::Zero(pa.value.rows(), pa.value.cols());
        g.middleCols(first, count) = n.grad;
        pa.accumulate(g);
    });
}

Var hcat(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ContractError("hcat: no inputs");
    }
    Index cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != parts.front().rows()) {
            throw ShapeError("hcat: row counts differ, " + shape_string(parts.front().value()) + " vs " +
                             shape_string(p.value()));
        }
        cols += p.cols();
    }
    Matrix out(parts.front().rows(), cols);
    std::vector<Index> offsets;
    Index offset = 0;
    for (const auto& p : parts) {
        out.middleCols(offset, p.cols()) = p.value();
        offsets.push_back(offset);
        offset += p.cols();
    }
    return make_node(std::move(out), std::vector<Var>(parts.begin(), parts.end()),
                     [offsets = std::move(offsets)](Node& n) {
                         for (std::size_t i = 0; i < n.parents.size(); ++i) {
                             Node& p = *n.parents[i];
                             p.accumulate(n.grad.middleCols(offsets[i], p.value.cols()));
                         }
                     });
}

Var row_l2_normalize(const Var& a) {
    const Vector norms = a.value().rowwise().norm();
    const Vector denom = norms.cwiseMax(kEpsilon);
    Matrix out = denom.cwiseInverse().asDiagonal() * a.value();
    return make_node(std::move(out), {a}, [norms, denom](Node& n) {
        Node& pa = parent(n, 0);
        Matrix g(n.grad.rows(), n.grad.cols());
        for (Index i = 0; i < g.rows(); ++i) {
            if (norms(i) > kEpsilon) {
                const double proj = n.value.row(i).dot(n.grad.row(i));
                g.row(i) = (n.grad.row(i) - proj * n.value.row(i)) / denom(i);
            } else {
                g.row(i) = n.grad.row(i) / denom(i);
            }
        }
        pa.accumulate(g);
    });
}

namespace {

Matrix softmax_rows_value(const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        const double shift = x.row(i).maxCoeff();
        out.row(i) = (x.row(i).array() - shift).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

}  // namespace

Var softmax_rows(const Var& a) {
    return make_node(softmax_rows_value(a.value()), {a}, [](Node& n) {
        Node& pa = parent(n, 0);
        Matrix g(n.grad.rows(), n.grad.cols());
        for (Index i = 0; i < g.rows(); ++i) {
            const double dot = n.grad.row(i).dot(n.value.row(i));
            g.row(i) = n.value.row(i).cwiseProduct((n.grad.row(i).array() - dot).matrix());
        }
        pa.accumulate(g);
    });
}

Var softmax_cross_entropy(const Var& logits, std::span<const int> labels) {
    if (static_cast<Index>(labels.size()) != logits.rows()) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         shape_string(logits.value()));
    }
    Matrix probs = softmax_rows_value(logits.value());
    std::vector<int> y(labels.begin(), labels.end());
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0 || y[i] >= logits.cols()) {
            throw ContractError("softmax_cross_entropy: label " + std::to_string(y[i]) + " out of range");
        }
        const Index r = static_cast<Index>(i);
        const double shift = logits.value().row(r).maxCoeff();
        const double log_z = shift + std::log((logits.value().row(r).array() - shift).exp().sum());
        loss += log_z - logits.value()(r, y[i]);
    }
    Matrix out(1, 1);
    out(0, 0) = loss;
    return make_node(std::move(out), {logits}, [probs = std::move(probs), y = std::move(y)](Node& n) {
        Matrix g = probs;
        for (std::size_t i = 0; i < y.size(); ++i) {
            g(static_cast<Index>(i), y[i]) -= 1.0;
        }
        parent(n, 0).accumulate(g * n.grad(0, 0));
    });
}

}  // namespace etgnn::ad
