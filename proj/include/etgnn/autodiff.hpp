#pragma once

#include "etgnn/errors.hpp"
#include "etgnn/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace etgnn::ad {

/// One recorded value in a computation graph.
///
/// `backward` reads this node's accumulated gradient and adds the chain-rule
/// contributions into its parents. Leaves have no backward function.
struct Node {
    Matrix value;
    Matrix grad;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
    bool requires_grad = false;
    bool is_leaf = true;
    bool has_grad = false;

    void accumulate(const Eigen::Ref<const Matrix>& g);
};

/// Handle to a node. Cheap to copy; copies alias the same node.
class Var {
public:
    Var() = default;
    /// Constant leaf (no gradient).
    explicit Var(Matrix value);
    explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    const Matrix& value() const { return node_->value; }
    const Matrix& grad() const { return node_->grad; }
    Index rows() const { return node_->value.rows(); }
    Index cols() const { return node_->value.cols(); }
    bool requires_grad() const { return node_->requires_grad; }
    bool valid() const { return node_ != nullptr; }

    /// Scalar value of a 1x1 node.
    double item() const;

    const std::shared_ptr<Node>& node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

/// Trainable tensor. Copies are deep: the copy owns a fresh leaf node.
class Param {
public:
    Param() : Param(Matrix()) {}
    explicit Param(Matrix value);
    Param(const Param& other) : Param(other.value()) {}
    Param& operator=(const Param& other);
    Param(Param&&) noexcept = default;
    Param& operator=(Param&&) noexcept = default;

    const Matrix& value() const { return var_.value(); }
    Matrix& mutable_value() { return var_.node()->value; }
    /// Gradient accumulated by backward(); same shape as value.
    const Matrix& grad() const { return var_.grad(); }
    Matrix& mutable_grad() { return var_.node()->grad; }
    void zero_grad();

    const Var& var() const { return var_; }
    operator const Var&() const { return var_; }

private:
    Var var_;
};

/// Records a new interior node. `backward_fn` receives the node itself.
Var make_node(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward_fn);

/// Reverse sweep from a 1x1 loss. Interior gradients are reset on every call;
/// leaf (Param) gradients accumulate across calls until zeroed.
void backward(const Var& loss);

// Linear algebra.
Var matmul(const Var& a, const Var& b);
/// a * b^T
Var matmul_transposed(const Var& a, const Var& b);
Var transpose(const Var& a);

// Elementwise, same shape.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double c);
Var reciprocal(const Var& a);
Var relu(const Var& a);
Var softplus(const Var& a);
/// max(a, lo); the gradient is blocked where the floor is active.
Var clamp_min(const Var& a, double lo);

// Broadcasting over the rank-2 / rank-1 cases the model needs.
/// a[n x m] + bias[1 x m] on every row.
Var add_row_broadcast(const Var& a, const Var& bias);
/// a[n x m] with row i multiplied by col[i].
Var mul_col_broadcast(const Var& a, const Var& col);
/// a[n x m] with row i divided by col[i].
Var div_col_broadcast(const Var& a, const Var& col);

// Reductions.
Var sum(const Var& a);
Var sum_squares(const Var& a);
/// [n x m] -> [n x 1]
Var row_sum(const Var& a);

// Indexing.
Var gather_rows(const Var& a, std::span<const Index> rows);
Var slice_cols(const Var& a, Index first, Index count);
Var hcat(std::span<const Var> parts);

/// Each row divided by max(||row||_2, kEpsilon).
Var row_l2_normalize(const Var& a);
Var softmax_rows(const Var& a);
/// Summed negative log-likelihood of `labels` under row-wise softmax(logits).
Var softmax_cross_entropy(const Var& logits, std::span<const int> labels);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, double s) { return scale(a, s); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

}  // namespace etgnn::ad
