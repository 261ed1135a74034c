#include "autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "error.hpp"

namespace mgcn {

namespace {

using NodePtr = std::shared_ptr<TensorNode>;

Tensor make_result(Matrix value, std::vector<NodePtr> parents,
                   std::function<void(TensorNode&)> backward_fn) {
    Tensor t = Tensor::leaf(std::move(value));
    bool track = grad_mode();
    if (track) {
        track = false;
        for (const auto& p : parents)
            if (p->requires_grad) track = true;
    }
    if (track) {
        auto& n = *t.node();
        n.leaf = false;
        n.requires_grad = true;
        n.parents = std::move(parents);
        n.backward_fn = std::move(backward_fn);
    }
    return t;
}

double row_max(const double* row, int n) {
    double m = row[0];
    for (int i = 1; i < n; ++i) m = std::max(m, row[i]);
    return m;
}

}  // namespace

bool& grad_mode() {
    thread_local bool mode = true;
    return mode;
}

Tensor Tensor::leaf(Matrix value, bool requires_grad) {
    Tensor t;
    t.node_ = std::make_shared<TensorNode>();
    t.node_->value = std::move(value);
    t.node_->requires_grad = requires_grad;
    return t;
}

const Matrix& Tensor::grad() const {
    if (!has_grad()) throw TapeError("tensor has no recorded gradient");
    return node_->grad;
}

void Tensor::zero_grad() {
    if (node_ && node_->grad.same_shape(node_->value)) node_->grad.fill(0.0);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    Matrix out = matmul(a.value(), b.value());
    auto an = a.node();
    auto bn = b.node();
    return make_result(std::move(out), {an, bn}, [an, bn](TensorNode& self) {
        if (an->requires_grad) {
            an->ensure_grad();
            add_inplace(an->grad, matmul_nt(self.grad, bn->value));
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            add_inplace(bn->grad, matmul_tn(an->value, self.grad));
        }
    });
}

Tensor spmm_op(const SparseMatrix* op, const Tensor& x) {
    Matrix out = spmm(*op, x.value());
    auto xn = x.node();
    return make_result(std::move(out), {xn}, [op, xn](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        spmm_transpose_accumulate(*op, self.grad, xn->grad);
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    Matrix out = add(a.value(), b.value());
    auto an = a.node();
    auto bn = b.node();
    return make_result(std::move(out), {an, bn}, [an, bn](TensorNode& self) {
        if (an->requires_grad) {
            an->ensure_grad();
            add_inplace(an->grad, self.grad);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            add_inplace(bn->grad, self.grad);
        }
    });
}

Tensor add_row_broadcast(const Tensor& x, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols())
        throw ShapeError("add_row_broadcast: bias must be 1 x cols(x)");
    Matrix out = x.value();
    const double* b = bias.value().row(0);
    for (int r = 0; r < out.rows(); ++r) {
        double* row = out.row(r);
        for (int c = 0; c < out.cols(); ++c) row[c] += b[c];
    }
    auto xn = x.node();
    auto bn = bias.node();
    return make_result(std::move(out), {xn, bn}, [xn, bn](TensorNode& self) {
        if (xn->requires_grad) {
            xn->ensure_grad();
            add_inplace(xn->grad, self.grad);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            double* bg = bn->grad.row(0);
            for (int r = 0; r < self.grad.rows(); ++r) {
                const double* g = self.grad.row(r);
                for (int c = 0; c < self.grad.cols(); ++c) bg[c] += g[c];
            }
        }
    });
}

Tensor relu(const Tensor& x) {
    Matrix out = x.value();
    double* p = out.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        if (p[i] < 0.0) p[i] = 0.0;
    auto xn = x.node();
    return make_result(std::move(out), {xn}, [xn](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double* in = xn->value.data();
        const double* g = self.grad.data();
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            if (in[i] > 0.0) xg[i] += g[i];
    });
}

Tensor tanh_op(const Tensor& x) {
    Matrix out = x.value();
    double* p = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) p[i] = std::tanh(p[i]);
    auto xn = x.node();
    return make_result(std::move(out), {xn}, [xn](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double* y = self.value.data();
        const double* g = self.grad.data();
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < self.grad.size(); ++i) xg[i] += g[i] * (1.0 - y[i] * y[i]);
    });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) throw ShapeError("concat_cols: row counts differ");
    const int ca = a.cols(), cb = b.cols();
    Matrix out(a.rows(), ca + cb);
    for (int r = 0; r < out.rows(); ++r) {
        double* row = out.row(r);
        std::copy(a.value().row(r), a.value().row(r) + ca, row);
        std::copy(b.value().row(r), b.value().row(r) + cb, row + ca);
    }
    auto an = a.node();
    auto bn = b.node();
    return make_result(std::move(out), {an, bn}, [an, bn, ca, cb](TensorNode& self) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (int r = 0; r < self.grad.rows(); ++r) {
                const double* g = self.grad.row(r);
                double* ag = an->grad.row(r);
                for (int c = 0; c < ca; ++c) ag[c] += g[c];
            }
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int r = 0; r < self.grad.rows(); ++r) {
                const double* g = self.grad.row(r);
                double* bg = bn->grad.row(r);
                for (int c = 0; c < cb; ++c) bg[c] += g[ca + c];
            }
        }
    });
}

Tensor dropout(const Tensor& x, double p, bool training, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout probability must be in [0, 1)");
    if (!training || p == 0.0) {
        // identity, but still a tracked node so gradients flow in training
        Matrix out = x.value();
        auto xn = x.node();
        return make_result(std::move(out), {xn}, [xn](TensorNode& self) {
            if (!xn->requires_grad) return;
            xn->ensure_grad();
            add_inplace(xn->grad, self.grad);
        });
    }
    const double keep_scale = 1.0 / (1.0 - p);
    auto mask = std::make_shared<Matrix>(x.rows(), x.cols());
    {
        double* m = mask->data();
        for (std::size_t i = 0; i < mask->size(); ++i)
            m[i] = (rng.uniform01() < p) ? 0.0 : keep_scale;
    }
    Matrix out = hadamard(x.value(), *mask);
    auto xn = x.node();
    return make_result(std::move(out), {xn}, [xn, mask](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        add_inplace(xn->grad, hadamard(self.grad, *mask));
    });
}

Tensor segment_mean(const Tensor& x, const std::vector<std::pair<int, int>>& ranges) {
    const int width = x.cols();
    Matrix out(static_cast<int>(ranges.size()), width);
    std::vector<double> terms;
    for (std::size_t g = 0; g < ranges.size(); ++g) {
        const auto& [begin, end] = ranges[g];
        if (begin < 0 || end > x.rows() || begin >= end)
            throw ShapeError("segment_mean: empty or out-of-range segment");
        const int n = end - begin;
        terms.resize(n);
        double* og = out.row(static_cast<int>(g));
        for (int c = 0; c < width; ++c) {
            bool finite = true;
            for (int r = 0; r < n; ++r) {
                terms[r] = x.value()(begin + r, c);
                if (!std::isfinite(terms[r])) finite = false;
            }
            if (finite)
                std::sort(terms.begin(), terms.end(),
                          [](double a, double b) { return a > b; });
            double s = 0.0;
            for (double t : terms) s += t;
            og[c] = s / n;
        }
    }
    auto xn = x.node();
    auto saved_ranges = ranges;
    return make_result(std::move(out), {xn}, [xn, saved_ranges](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t g = 0; g < saved_ranges.size(); ++g) {
            const auto& [begin, end] = saved_ranges[g];
            const double inv = 1.0 / (end - begin);
            const double* gr = self.grad.row(static_cast<int>(g));
            for (int r = begin; r < end; ++r) {
                double* xg = xn->grad.row(r);
                for (int c = 0; c < self.grad.cols(); ++c) xg[c] += gr[c] * inv;
            }
        }
    });
}

Tensor cross_entropy_mean(const Tensor& logits, const std::vector<int>& labels) {
    const int n = logits.rows();
    const int classes = logits.cols();
    if (static_cast<int>(labels.size()) != n)
        throw ShapeError("cross_entropy_mean: label count does not match logit rows");
    for (int label : labels)
        if (label < 0 || label >= classes)
            throw LabelError("label " + std::to_string(label) + " outside [0, " +
                             std::to_string(classes) + ")");

    auto probs = std::make_shared<Matrix>(n, classes);
    double total = 0.0;
    for (int r = 0; r < n; ++r) {
        const double* x = logits.value().row(r);
        double m = row_max(x, classes);
        double sum = 0.0;
        double* pr = probs->row(r);
        for (int c = 0; c < classes; ++c) {
            pr[c] = std::exp(x[c] - m);
            sum += pr[c];
        }
        for (int c = 0; c < classes; ++c) pr[c] /= sum;
        total += (m + std::log(sum)) - x[labels[r]];
    }
    Matrix out(1, 1);
    out(0, 0) = total / n;

    auto xn = logits.node();
    auto saved_labels = labels;
    return make_result(std::move(out), {xn}, [xn, probs, saved_labels](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double upstream = self.grad(0, 0);
        const double inv_n = 1.0 / static_cast<double>(saved_labels.size());
        for (int r = 0; r < static_cast<int>(saved_labels.size()); ++r) {
            const double* pr = probs->row(r);
            double* xg = xn->grad.row(r);
            for (int c = 0; c < xn->grad.cols(); ++c) xg[c] += upstream * inv_n * pr[c];
            xg[saved_labels[r]] -= upstream * inv_n;
        }
    });
}

Tensor sum_all(const Tensor& x) {
    Matrix out(1, 1);
    double s = 0.0;
    const double* p = x.value().data();
    for (std::size_t i = 0; i < x.value().size(); ++i) s += p[i];
    out(0, 0) = s;
    auto xn = x.node();
    return make_result(std::move(out), {xn}, [xn](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double g = self.grad(0, 0);
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < xn->grad.size(); ++i) xg[i] += g;
    });
}

Tensor hadamard_const(const Tensor& x, const Matrix& k) {
    Matrix out = hadamard(x.value(), k);
    auto xn = x.node();
    auto saved = std::make_shared<Matrix>(k);
    return make_result(std::move(out), {xn}, [xn, saved](TensorNode& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        add_inplace(xn->grad, hadamard(self.grad, *saved));
    });
}

void backward(const Tensor& loss) {
    if (!loss.defined()) throw TapeError("backward on an undefined tensor");
    if (loss.rows() != 1 || loss.cols() != 1)
        throw ShapeError("backward expects a 1x1 loss tensor");
    auto root = loss.node();
    if (root->consumed)
        throw TapeError("backward called twice on the same graph; run forward again first");
    if (!root->requires_grad)
        throw TapeError("loss does not depend on any tracked parameter (gradients disabled?)");

    // iterative post-order DFS
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> visited;
    std::vector<std::pair<TensorNode*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorNode* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second)
                stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad(0, 0) = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* node = *it;
        if (node->backward_fn) {
            node->ensure_grad();
            node->backward_fn(*node);
        }
    }
    for (TensorNode* node : order) {
        node->consumed = true;
        if (!node->leaf) {
            node->backward_fn = nullptr;
            node->parents.clear();
        }
    }
    root->consumed = true;
}

}  // namespace mgcn
