#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace mgcn {

/// One node of the reverse-mode tape. Interior nodes hold a backward closure
/// that scatters this node's gradient into its parents; the closure and the
/// parent links are released once backward has run, so a second backward
/// through the same graph raises a tape error.
struct TensorNode {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool leaf = true;
    bool consumed = false;
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> backward_fn;

    void ensure_grad() {
        if (!grad.same_shape(value)) grad = Matrix(value.rows(), value.cols());
    }
};

/// Cheap handle to a tape node. Copies share the node.
class Tensor {
public:
    Tensor() = default;

    /// A leaf holding `value`; parameters pass requires_grad = true.
    static Tensor leaf(Matrix value, bool requires_grad = false);

    const Matrix& value() const { return node_->value; }
    Matrix& value_mut() { return node_->value; }
    /// Accumulated gradient; throws if none has been recorded.
    const Matrix& grad() const;
    bool has_grad() const { return node_ && node_->grad.same_shape(node_->value); }
    void zero_grad();

    bool defined() const { return node_ != nullptr; }
    bool requires_grad() const { return node_->requires_grad; }
    int rows() const { return node_->value.rows(); }
    int cols() const { return node_->value.cols(); }

    std::shared_ptr<TensorNode>& node() { return node_; }
    const std::shared_ptr<TensorNode>& node() const { return node_; }

private:
    std::shared_ptr<TensorNode> node_;
};

/// Thread-local flag; when false, ops run forward math only and record
/// nothing (evaluation passes).
bool& grad_mode();

struct NoGradGuard {
    NoGradGuard() : prev_(grad_mode()) { grad_mode() = false; }
    ~NoGradGuard() { grad_mode() = prev_; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

Tensor matmul(const Tensor& a, const Tensor& b);

/// op is captured by pointer and must stay alive until backward has run.
Tensor spmm_op(const SparseMatrix* op, const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
/// bias is 1 x C, broadcast over rows of x.
Tensor add_row_broadcast(const Tensor& x, const Tensor& bias);
Tensor relu(const Tensor& x);
Tensor tanh_op(const Tensor& x);
Tensor concat_cols(const Tensor& a, const Tensor& b);

/// Inverted dropout: training keeps entries with probability 1-p and scales
/// survivors by 1/(1-p); evaluation is the identity. 0 <= p < 1.
Tensor dropout(const Tensor& x, double p, bool training, Rng& rng);

/// Per-range arithmetic mean of rows; ranges are [begin, end) and must cover
/// non-empty row spans. Column sums use order-canonical reduction.
Tensor segment_mean(const Tensor& x, const std::vector<std::pair<int, int>>& ranges);

/// Mean over rows of -x[label] + logsumexp(x), max-shifted. 1 x 1 result.
Tensor cross_entropy_mean(const Tensor& logits, const std::vector<int>& labels);

Tensor sum_all(const Tensor& x);

/// Elementwise product with an untracked constant.
Tensor hadamard_const(const Tensor& x, const Matrix& k);

/// Reverse pass from a scalar loss: seeds with 1, visits every reachable
/// node exactly once in reverse topological order, accumulates into leaf
/// gradients, then frees the interior graph.
void backward(const Tensor& loss);

}  // namespace mgcn
