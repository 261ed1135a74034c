#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "models.hpp"
#include "testutil.hpp"

using namespace mgcn;

namespace {

ModelConfig make_config(TaskKind task, int input_width, int tau, int classes) {
    ModelConfig cfg;
    cfg.task = task;
    cfg.input_width = input_width;
    cfg.tau = tau;
    cfg.classes = classes;
    cfg.dropout = 0.3;
    cfg.seed = 7;
    return cfg;
}

FaceGraph toy_graph(int nodes, const std::vector<std::pair<int, int>>& edges, int width,
                    Rng& rng) {
    FaceGraph g;
    g.nodes = nodes;
    g.edges = edges;
    g.features = Matrix(nodes, width);
    for (int r = 0; r < nodes; ++r)
        for (int c = 0; c < width; ++c) g.features(r, c) = rng.uniform(-1, 1);
    g.op = aggregation_operator(nodes, edges, AggregationKind::symmetric_normalized);
    return g;
}

FaceGraph permute_graph(const FaceGraph& g, const std::vector<int>& perm) {
    FaceGraph out;
    out.nodes = g.nodes;
    for (auto [i, j] : g.edges) {
        int a = perm[i], b = perm[j];
        out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.features = Matrix(g.nodes, g.features.cols());
    for (int r = 0; r < g.nodes; ++r)
        for (int c = 0; c < g.features.cols(); ++c) out.features(perm[r], c) = g.features(r, c);
    out.op = aggregation_operator(out.nodes, out.edges, AggregationKind::symmetric_normalized);
    out.label = g.label;
    if (!g.node_labels.empty()) {
        out.node_labels.resize(g.nodes);
        for (int r = 0; r < g.nodes; ++r) out.node_labels[perm[r]] = g.node_labels[r];
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("DC block growth law: layer l consumes l*tau") {
    for (int tau : {1, 8, 1024}) {
        ModelConfig cfg = make_config(TaskKind::classification, 57, tau, 2);
        auto specs = layer_widths(cfg);
        // rows 1..5 are the in-block layers
        for (int l = 1; l <= 5; ++l) {
            CHECK(specs[l].in == l * tau);
            CHECK(specs[l].out == tau);
        }
    }
}

TEST_CASE("classification widths for tau=1024 match the 8-row architecture table") {
    ModelConfig cfg = make_config(TaskKind::classification, 57, 1024, 30);
    auto specs = layer_widths(cfg);
    REQUIRE(specs.size() == 8);
    using K = LayerSpec::Kind;
    CHECK(specs[0] == LayerSpec{K::gcn, 57, 1024});
    CHECK(specs[1] == LayerSpec{K::gcn, 1024, 1024});
    CHECK(specs[2] == LayerSpec{K::gcn, 2048, 1024});
    CHECK(specs[3] == LayerSpec{K::gcn, 3072, 1024});
    CHECK(specs[4] == LayerSpec{K::gcn, 4096, 1024});
    CHECK(specs[5] == LayerSpec{K::gcn, 5120, 1024});
    CHECK(specs[6].kind == K::mean);
    CHECK(specs[7] == LayerSpec{K::linear, 6144, 30});
}

TEST_CASE("segmentation widths for tau=1024 match the 13-layer table") {
    ModelConfig cfg = make_config(TaskKind::segmentation, 57, 1024, 8);
    auto specs = layer_widths(cfg);
    REQUIRE(specs.size() == 13);
    using K = LayerSpec::Kind;
    CHECK(specs[0] == LayerSpec{K::gcn, 57, 1024});
    for (int block = 0; block < 2; ++block) {
        int base = 1 + block * 6;
        CHECK(specs[base + 0].in == 1024);
        CHECK(specs[base + 1].in == 2048);
        CHECK(specs[base + 2].in == 3072);
        CHECK(specs[base + 3].in == 4096);
        CHECK(specs[base + 4].in == 5120);
        for (int l = 0; l < 5; ++l) CHECK(specs[base + l].out == 1024);
    }
    CHECK(specs[6] == LayerSpec{K::gcn, 6144, 1024});  // between the blocks
    CHECK(specs[12] == LayerSpec{K::gcn, 6144, 8});
}

TEST_CASE("DC block with tau=8 grows 8,16,24,32,40 and emits 48") {
    ModelConfig cfg = make_config(TaskKind::classification, 57, 8, 2);
    auto specs = layer_widths(cfg);
    CHECK(specs[1].in == 8);
    CHECK(specs[2].in == 16);
    CHECK(specs[3].in == 24);
    CHECK(specs[4].in == 32);
    CHECK(specs[5].in == 40);
    CHECK(specs[7].in == 48);
}

TEST_CASE("DC block with zero weights concatenates input with zeros") {
    const int tau = 3;
    Rng rng(41);
    DcBlock block = DcBlock::make(tau, 5, true, rng);
    for (auto& layer : block.layers) {
        layer.weight.value_mut().fill(0.0);
        layer.bias.value_mut().fill(0.0);
    }
    SparseMatrix op = aggregation_operator(2, {{0, 1}}, AggregationKind::symmetric_normalized);
    Matrix x(2, tau);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < tau; ++c) x(r, c) = 1.0 + r + c;
    Rng drop_rng(1);
    Tensor out =
        block.forward(Tensor::leaf(x), &op, nn::Activation::none, 0.0, false, drop_rng);
    REQUIRE(out.cols() == 6 * tau);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < tau; ++c) CHECK(out.value()(r, c) == x(r, c));
        for (int c = tau; c < 6 * tau; ++c) CHECK(out.value()(r, c) == 0.0);
    }
}

TEST_CASE("classifier on one graph emits 1 x C logits") {
    Rng rng(42);
    FaceGraph g = toy_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 10, rng);
    g.label = 0;
    GraphBatch batch = batch_graphs({&g});
    auto model = Model::make(make_config(TaskKind::classification, 10, 4, 3));
    Rng drop_rng(1);
    Tensor logits = model->forward(batch, false, drop_rng);
    CHECK(logits.rows() == 1);
    CHECK(logits.cols() == 3);
}

TEST_CASE("segmenter on a single-node graph emits 1 x C logits") {
    Rng rng(43);
    FaceGraph g = toy_graph(1, {}, 6, rng);
    g.node_labels = {0};
    GraphBatch batch = batch_graphs({&g});
    auto model = Model::make(make_config(TaskKind::segmentation, 6, 4, 5));
    Rng drop_rng(1);
    Tensor logits = model->forward(batch, false, drop_rng);
    CHECK(logits.rows() == 1);
    CHECK(logits.cols() == 5);
}

TEST_CASE("parameter count: lone 6144->30 linear layer") {
    CHECK(6144LL * 30 + 30 == 184350LL);
    ModelConfig cfg = make_config(TaskKind::classification, 57, 1024, 30);
    auto specs = layer_widths(cfg);
    long long linear = static_cast<long long>(specs[7].in) * specs[7].out + specs[7].out;
    CHECK(linear == 184350LL);
}

TEST_CASE("parameter count matches a hand-enumerated sum for a toy classifier") {
    ModelConfig cfg = make_config(TaskKind::classification, 57, 8, 2);
    // independent enumeration of the same wiring
    const std::vector<std::pair<int, int>> dims{{57, 8},  {8, 8},  {16, 8}, {24, 8},
                                                {32, 8},  {40, 8}, {48, 2}};
    long long expected = 0;
    for (auto [in, out] : dims) expected += static_cast<long long>(in) * out + out;
    CHECK(count_parameters(cfg) == expected);

    auto model = Model::make(cfg);
    CHECK(model->parameter_count() == expected);
}

TEST_CASE("parameter count for the tau=1 minimal config") {
    ModelConfig cfg = make_config(TaskKind::classification, 1, 1, 1);
    // input gcn (1,1), block layers (1,1),(2,1),(3,1),(4,1),(5,1), linear (6,1)
    long long expected = (1 + 1) + (1 + 1) + (2 + 1) + (3 + 1) + (4 + 1) + (5 + 1) + (6 + 1);
    CHECK(count_parameters(cfg) == expected);
}

TEST_CASE("degenerate configs are rejected") {
    ModelConfig cfg = make_config(TaskKind::classification, 57, 0, 2);
    CHECK_THROWS_AS(count_parameters(cfg), ConfigError);
    cfg.tau = 8;
    cfg.dc_layers = 1;
    CHECK_THROWS_AS(count_parameters(cfg), ConfigError);
    cfg.dc_layers = 5;
    cfg.classes = 0;
    CHECK_THROWS_AS(count_parameters(cfg), ConfigError);
}

TEST_CASE("bias-free config drops the bias terms from the count") {
    ModelConfig cfg = make_config(TaskKind::classification, 57, 8, 2);
    cfg.bias = false;
    const std::vector<std::pair<int, int>> dims{{57, 8},  {8, 8},  {16, 8}, {24, 8},
                                                {32, 8},  {40, 8}, {48, 2}};
    long long expected = 0;
    for (auto [in, out] : dims) expected += static_cast<long long>(in) * out;
    CHECK(count_parameters(cfg) == expected);
    auto model = Model::make(cfg);
    CHECK(model->parameter_count() == expected);
}

TEST_CASE("classification logits are invariant to node permutation, bitwise") {
    Rng rng(44);
    FaceGraph g = toy_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}, 7, rng);
    g.label = 0;
    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    FaceGraph gp = permute_graph(g, perm);

    auto model = Model::make(make_config(TaskKind::classification, 7, 4, 3));
    Rng drop_rng(1);
    GraphBatch a = batch_graphs({&g});
    GraphBatch b = batch_graphs({&gp});
    Tensor la = model->forward(a, false, drop_rng);
    Tensor lb = model->forward(b, false, drop_rng);
    for (int c = 0; c < 3; ++c) CHECK(la.value()(0, c) == lb.value()(0, c));
}

TEST_CASE("segmentation logits are equivariant to node permutation, bitwise") {
    Rng rng(45);
    FaceGraph g = toy_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, 6, rng);
    g.node_labels = {0, 1, 0, 1, 0};
    std::vector<int> perm{4, 2, 0, 3, 1};
    FaceGraph gp = permute_graph(g, perm);

    auto model = Model::make(make_config(TaskKind::segmentation, 6, 3, 2));
    Rng drop_rng(1);
    GraphBatch a = batch_graphs({&g});
    GraphBatch b = batch_graphs({&gp});
    Tensor la = model->forward(a, false, drop_rng);
    Tensor lb = model->forward(b, false, drop_rng);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 2; ++c) CHECK(la.value()(r, c) == lb.value()(perm[r], c));
}

TEST_CASE("evaluation forward is deterministic and dropout-free") {
    Rng rng(46);
    FaceGraph g = toy_graph(4, {{0, 1}, {1, 2}, {2, 3}}, 5, rng);
    g.label = 0;
    GraphBatch batch = batch_graphs({&g});
    ModelConfig cfg = make_config(TaskKind::classification, 5, 4, 2);
    cfg.dropout = 0.5;
    auto model = Model::make(cfg);
    Rng r1(111), r2(999);  // different rngs must not matter in eval mode
    Tensor a = model->forward(batch, false, r1);
    Tensor b = model->forward(batch, false, r2);
    CHECK(a.value() == b.value());
}

TEST_CASE("training forward with dropout differs between rng draws") {
    Rng rng(47);
    FaceGraph g = toy_graph(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {1, 2}, {5, 6}}, 5, rng);
    g.label = 0;
    GraphBatch batch = batch_graphs({&g});
    ModelConfig cfg = make_config(TaskKind::classification, 5, 6, 2);
    cfg.dropout = 0.5;
    auto model = Model::make(cfg);
    Rng r1(1), r2(2);
    Tensor a = model->forward(batch, true, r1);
    Tensor b = model->forward(batch, true, r2);
    CHECK(a.value() != b.value());
}

TEST_CASE("model rebuild from the same seed is bitwise identical") {
    ModelConfig cfg = make_config(TaskKind::segmentation, 9, 4, 3);
    auto m1 = Model::make(cfg);
    auto m2 = Model::make(cfg);
    const auto& p1 = m1->named_parameters();
    const auto& p2 = m2->named_parameters();
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].first == p2[i].first);
        CHECK(p1[i].second.value() == p2[i].second.value());
    }
}

TEST_SUITE_END();
