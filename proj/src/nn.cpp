#include "nn.hpp"

#include <cmath>

#include "error.hpp"

namespace mgcn::nn {

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "none") return Activation::none;
    throw ConfigError("unknown activation '" + s + "' (expected relu, tanh or none)");
}

std::string activation_to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::none: return "none";
    }
    return "relu";
}

std::vector<Tensor> DenseParams::parameters() const {
    std::vector<Tensor> out{weight};
    if (bias.defined()) out.push_back(bias);
    return out;
}

long long DenseParams::parameter_count() const {
    long long n = static_cast<long long>(in_dim) * out_dim;
    if (bias.defined()) n += out_dim;
    return n;
}

DenseParams make_dense(int in_dim, int out_dim, bool use_bias, Rng& rng) {
    if (in_dim <= 0 || out_dim <= 0)
        throw ConfigError("layer dimensions must be positive, got " + std::to_string(in_dim) +
                          " x " + std::to_string(out_dim));
    DenseParams p;
    p.in_dim = in_dim;
    p.out_dim = out_dim;
    Matrix w(in_dim, out_dim);
    const double limit = std::sqrt(6.0 / (in_dim + out_dim));
    for (int r = 0; r < in_dim; ++r)
        for (int c = 0; c < out_dim; ++c) w(r, c) = rng.uniform(-limit, limit);
    p.weight = Tensor::leaf(std::move(w), true);
    if (use_bias) p.bias = Tensor::leaf(Matrix(1, out_dim), true);
    return p;
}

namespace {

Tensor apply_activation(Tensor t, Activation activation) {
    switch (activation) {
        case Activation::relu: return relu(t);
        case Activation::tanh: return tanh_op(t);
        case Activation::none: return t;
    }
    return t;
}

}  // namespace

Tensor gcn_forward(const Tensor& x, const SparseMatrix* op, const DenseParams& params,
                   Activation activation) {
    if (x.cols() != params.in_dim)
        throw ShapeError("gcn_forward: input width " + std::to_string(x.cols()) +
                         " does not match layer in_dim " + std::to_string(params.in_dim));
    if (op->rows != x.rows())
        throw ShapeError("gcn_forward: operator size does not match node count");
    Tensor h = matmul(x, params.weight);  // cheaper than aggregating first: out_dim <= in_dim
    h = spmm_op(op, h);
    if (params.bias.defined()) h = add_row_broadcast(h, params.bias);
    return apply_activation(h, activation);
}

Tensor gcn_residual_forward(const Tensor& x, const SparseMatrix* op, const DenseParams& params,
                            Activation activation) {
    if (params.in_dim != params.out_dim)
        throw ShapeError("gcn_residual_forward requires in_dim == out_dim, got " +
                         std::to_string(params.in_dim) + " vs " +
                         std::to_string(params.out_dim));
    return add(gcn_forward(x, op, params, activation), x);
}

Tensor linear_forward(const Tensor& x, const DenseParams& params) {
    if (x.cols() != params.in_dim)
        throw ShapeError("linear_forward: input width " + std::to_string(x.cols()) +
                         " does not match layer in_dim " + std::to_string(params.in_dim));
    Tensor h = matmul(x, params.weight);
    if (params.bias.defined()) h = add_row_broadcast(h, params.bias);
    return h;
}

Tensor mean_nodes(const Tensor& node_features, const std::vector<std::pair<int, int>>& ranges) {
    if (ranges.empty()) throw ShapeError("mean_nodes: batch has no graphs");
    return segment_mean(node_features, ranges);
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p.value().rows(), p.value().cols());
        v_.emplace_back(p.value().rows(), p.value().cols());
    }
}

void Adam::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

void Adam::step() {
    ++step_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        Matrix& m = m_[i];
        Matrix& v = v_[i];
        double* pm = m.data();
        double* pv = v.data();
        if (!p.has_grad()) {
            // moments still decay toward zero on a skipped parameter
            for (std::size_t k = 0; k < m.size(); ++k) {
                pm[k] *= config_.beta1;
                pv[k] *= config_.beta2;
            }
            continue;
        }
        const double* g = p.grad().data();
        double* w = p.value_mut().data();
        for (std::size_t k = 0; k < m.size(); ++k) {
            pm[k] = config_.beta1 * pm[k] + (1.0 - config_.beta1) * g[k];
            pv[k] = config_.beta2 * pv[k] + (1.0 - config_.beta2) * g[k] * g[k];
            const double mhat = pm[k] / bc1;
            const double vhat = pv[k] / bc2;
            w[k] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

}  // namespace mgcn::nn
