#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "nn.hpp"

namespace mgcn {

enum class TaskKind { classification, segmentation };

TaskKind task_from_string(const std::string& s);
std::string task_to_string(TaskKind t);

struct ModelConfig {
    TaskKind task = TaskKind::classification;
    int input_width = 57;
    int tau = 1024;     // hidden node width
    int classes = 2;
    int dc_layers = 5;  // layers per densely connected block
    double dropout = 0.3;
    bool bias = true;
    nn::Activation activation = nn::Activation::relu;
    std::uint64_t seed = 0;
};

/// Throws ConfigError on degenerate settings (tau < 1, dc_layers < 2, ...).
void validate_model_config(const ModelConfig& config);

struct LayerSpec {
    enum class Kind { gcn, mean, linear };
    Kind kind = Kind::gcn;
    int in = 0;
    int out = 0;

    bool operator==(const LayerSpec&) const = default;
};

/// The architecture as a flat layer-width table (the wiring is fixed by the
/// task kind; densely connected blocks grow their input width by tau per
/// layer and emit (n+1)*tau).
std::vector<LayerSpec> layer_widths(const ModelConfig& config);

/// Exact trainable scalar count for the configuration.
long long count_parameters(const ModelConfig& config);

/// n GCN layers; layer l consumes the concatenation of the block input and
/// every earlier layer's output (width l*tau) and emits tau. The block
/// output concatenates input and all n outputs: width (n+1)*tau.
struct DcBlock {
    std::vector<nn::DenseParams> layers;
    int tau = 0;

    static DcBlock make(int tau, int n, bool bias, Rng& rng);
    Tensor forward(const Tensor& x, const SparseMatrix* op, nn::Activation activation,
                   double dropout_p, bool training, Rng& rng) const;
};

class Model {
public:
    virtual ~Model() = default;

    /// Logits: G x C for classification, N x C for segmentation. `batch`
    /// must outlive a subsequent backward pass.
    virtual Tensor forward(const GraphBatch& batch, bool training, Rng& dropout_rng) const = 0;

    const ModelConfig& config() const { return config_; }
    const std::vector<std::pair<std::string, Tensor>>& named_parameters() const {
        return named_params_;
    }
    std::vector<Tensor> parameters() const;
    long long parameter_count() const;

    /// Builds the architecture for the config, parameters initialized from
    /// config.seed (Glorot-uniform weights, zero biases).
    static std::unique_ptr<Model> make(const ModelConfig& config);

protected:
    explicit Model(ModelConfig config) : config_(std::move(config)) {}
    void register_dense(const std::string& name, const nn::DenseParams& params);

    ModelConfig config_;
    std::vector<std::pair<std::string, Tensor>> named_params_;
};

}  // namespace mgcn
