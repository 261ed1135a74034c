#include "models.hpp"

#include "error.hpp"

namespace mgcn {

TaskKind task_from_string(const std::string& s) {
    if (s == "classification") return TaskKind::classification;
    if (s == "segmentation") return TaskKind::segmentation;
    throw ConfigError("unknown task '" + s + "' (expected classification or segmentation)");
}

std::string task_to_string(TaskKind t) {
    return t == TaskKind::classification ? "classification" : "segmentation";
}

void validate_model_config(const ModelConfig& config) {
    if (config.input_width < 1) throw ConfigError("input width must be >= 1");
    if (config.tau < 1) throw ConfigError("hidden width tau must be >= 1");
    if (config.classes < 1) throw ConfigError("class count must be >= 1");
    if (config.dc_layers < 2) throw ConfigError("DC block needs at least 2 layers");
    if (config.dropout < 0.0 || config.dropout >= 1.0)
        throw ConfigError("dropout must be in [0, 1)");
}

std::vector<LayerSpec> layer_widths(const ModelConfig& config) {
    validate_model_config(config);
    const int tau = config.tau;
    const int n = config.dc_layers;
    std::vector<LayerSpec> specs;
    auto gcn = [&](int in, int out) { specs.push_back({LayerSpec::Kind::gcn, in, out}); };
    auto dc_block = [&] {
        for (int l = 1; l <= n; ++l) gcn(l * tau, tau);
    };

    gcn(config.input_width, tau);
    dc_block();
    if (config.task == TaskKind::classification) {
        specs.push_back({LayerSpec::Kind::mean, (n + 1) * tau, (n + 1) * tau});
        specs.push_back({LayerSpec::Kind::linear, (n + 1) * tau, config.classes});
    } else {
        gcn((n + 1) * tau, tau);
        dc_block();
        gcn((n + 1) * tau, config.classes);
    }
    return specs;
}

long long count_parameters(const ModelConfig& config) {
    long long total = 0;
    for (const auto& spec : layer_widths(config)) {
        if (spec.kind == LayerSpec::Kind::mean) continue;
        total += static_cast<long long>(spec.in) * spec.out;
        if (config.bias) total += spec.out;
    }
    return total;
}

DcBlock DcBlock::make(int tau, int n, bool bias, Rng& rng) {
    if (n < 2) throw ConfigError("DC block needs at least 2 layers");
    DcBlock block;
    block.tau = tau;
    block.layers.reserve(n);
    for (int l = 1; l <= n; ++l) block.layers.push_back(nn::make_dense(l * tau, tau, bias, rng));
    return block;
}

Tensor DcBlock::forward(const Tensor& x, const SparseMatrix* op, nn::Activation activation,
                        double dropout_p, bool training, Rng& rng) const {
    if (x.cols() != tau)
        throw ShapeError("DC block expects input width " + std::to_string(tau) + ", got " +
                         std::to_string(x.cols()));
    Tensor concat = x;
    for (const auto& layer : layers) {
        Tensor h = nn::gcn_forward(concat, op, layer, activation);
        h = dropout(h, dropout_p, training, rng);
        concat = concat_cols(concat, h);
    }
    return concat;
}

std::vector<Tensor> Model::parameters() const {
    std::vector<Tensor> out;
    out.reserve(named_params_.size());
    for (const auto& [name, t] : named_params_) out.push_back(t);
    return out;
}

long long Model::parameter_count() const {
    long long total = 0;
    for (const auto& [name, t] : named_params_)
        total += static_cast<long long>(t.value().rows()) * t.value().cols();
    return total;
}

void Model::register_dense(const std::string& name, const nn::DenseParams& params) {
    named_params_.emplace_back(name + ".weight", params.weight);
    if (params.bias.defined()) named_params_.emplace_back(name + ".bias", params.bias);
}

namespace {

class ClassifierModel final : public Model {
public:
    explicit ClassifierModel(ModelConfig config) : Model(std::move(config)) {
        Rng rng(config_.seed);
        const int tau = config_.tau;
        input_layer_ = nn::make_dense(config_.input_width, tau, config_.bias, rng);
        block_ = DcBlock::make(tau, config_.dc_layers, config_.bias, rng);
        output_ = nn::make_dense((config_.dc_layers + 1) * tau, config_.classes, config_.bias,
                                 rng);
        register_dense("input", input_layer_);
        for (std::size_t l = 0; l < block_.layers.size(); ++l)
            register_dense("dc." + std::to_string(l), block_.layers[l]);
        register_dense("output", output_);
    }

    Tensor forward(const GraphBatch& batch, bool training, Rng& dropout_rng) const override {
        Tensor x = Tensor::leaf(batch.features);
        Tensor h = nn::gcn_forward(x, &batch.op, input_layer_, config_.activation);
        h = block_.forward(h, &batch.op, config_.activation, config_.dropout, training,
                           dropout_rng);
        Tensor pooled = nn::mean_nodes(h, batch.ranges);
        return nn::linear_forward(pooled, output_);
    }

private:
    nn::DenseParams input_layer_;
    DcBlock block_;
    nn::DenseParams output_;
};

class SegmenterModel final : public Model {
public:
    explicit SegmenterModel(ModelConfig config) : Model(std::move(config)) {
        Rng rng(config_.seed);
        const int tau = config_.tau;
        const int block_out = (config_.dc_layers + 1) * tau;
        input_layer_ = nn::make_dense(config_.input_width, tau, config_.bias, rng);
        block1_ = DcBlock::make(tau, config_.dc_layers, config_.bias, rng);
        mid_layer_ = nn::make_dense(block_out, tau, config_.bias, rng);
        block2_ = DcBlock::make(tau, config_.dc_layers, config_.bias, rng);
        output_layer_ = nn::make_dense(block_out, config_.classes, config_.bias, rng);
        register_dense("input", input_layer_);
        for (std::size_t l = 0; l < block1_.layers.size(); ++l)
            register_dense("dc1." + std::to_string(l), block1_.layers[l]);
        register_dense("mid", mid_layer_);
        for (std::size_t l = 0; l < block2_.layers.size(); ++l)
            register_dense("dc2." + std::to_string(l), block2_.layers[l]);
        register_dense("output", output_layer_);
    }

    Tensor forward(const GraphBatch& batch, bool training, Rng& dropout_rng) const override {
        Tensor x = Tensor::leaf(batch.features);
        Tensor h = nn::gcn_forward(x, &batch.op, input_layer_, config_.activation);
        h = block1_.forward(h, &batch.op, config_.activation, config_.dropout, training,
                            dropout_rng);
        h = nn::gcn_forward(h, &batch.op, mid_layer_, config_.activation);
        h = block2_.forward(h, &batch.op, config_.activation, config_.dropout, training,
                            dropout_rng);
        // logits feed cross-entropy directly, no activation
        return nn::gcn_forward(h, &batch.op, output_layer_, nn::Activation::none);
    }

private:
    nn::DenseParams input_layer_;
    DcBlock block1_;
    nn::DenseParams mid_layer_;
    DcBlock block2_;
    nn::DenseParams output_layer_;
};

}  // namespace

std::unique_ptr<Model> Model::make(const ModelConfig& config) {
    validate_model_config(config);
    if (config.task == TaskKind::classification)
        return std::make_unique<ClassifierModel>(config);
    return std::make_unique<SegmenterModel>(config);
}

}  // namespace mgcn
