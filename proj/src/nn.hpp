#pragma once

#include <string>
#include <vector>

#include "autodiff.hpp"
#include "rng.hpp"

namespace mgcn::nn {

enum class Activation { relu, tanh, none };

Activation activation_from_string(const std::string& s);
std::string activation_to_string(Activation a);

/// Weight (in x out) plus optional bias (1 x out).
struct DenseParams {
    Tensor weight;
    Tensor bias;  // undefined when the layer runs without bias
    int in_dim = 0;
    int out_dim = 0;

    std::vector<Tensor> parameters() const;
    long long parameter_count() const;
};

/// Glorot-uniform weight, zero bias.
DenseParams make_dense(int in_dim, int out_dim, bool use_bias, Rng& rng);

/// activation(op * x * W + b). `op` must outlive backward.
Tensor gcn_forward(const Tensor& x, const SparseMatrix* op, const DenseParams& params,
                   Activation activation);

/// gcn_forward plus the layer input (pre-activation aggregation result plus
/// x, i.e. activation(op x W + b) + x). Requires in_dim == out_dim.
Tensor gcn_residual_forward(const Tensor& x, const SparseMatrix* op, const DenseParams& params,
                            Activation activation);

/// x * W + b.
Tensor linear_forward(const Tensor& x, const DenseParams& params);

/// Per-graph mean over node rows of a batch.
Tensor mean_nodes(const Tensor& node_features, const std::vector<std::pair<int, int>>& ranges);

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Standard bias-corrected Adam over a fixed parameter list.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig config);

    void zero_grad();
    /// Applies one update from the gradients currently accumulated on the
    /// parameters. Parameters without a recorded gradient are skipped.
    void step();

    long long step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }
    std::vector<Tensor>& parameters() { return params_; }
    std::vector<Matrix>& first_moments() { return m_; }
    std::vector<Matrix>& second_moments() { return v_; }
    void set_step_count(long long t) { step_ = t; }

private:
    std::vector<Tensor> params_;
    AdamConfig config_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long long step_ = 0;
};

}  // namespace mgcn::nn
