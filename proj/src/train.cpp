#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "checkpoint.hpp"
#include "error.hpp"
#include "features_io.hpp"
#include "log.hpp"
#include "mesh_io.hpp"
#include "version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mgcn {

// ---------------------------------------------------------------------------
// config (de)serialization

json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["task"] = task_to_string(cfg.task);
    j["dataset_root"] = cfg.dataset_root;
    j["features_dir"] = cfg.features_dir;
    j["out_dir"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["deterministic"] = cfg.deterministic;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["target_test_accuracy"] = cfg.target_test_accuracy;
    j["model"] = {{"tau", cfg.model.tau},
                  {"classes", cfg.model.classes},
                  {"input_width", cfg.model.input_width},
                  {"dc_layers", cfg.model.dc_layers},
                  {"dropout", cfg.model.dropout},
                  {"bias", cfg.model.bias},
                  {"activation", nn::activation_to_string(cfg.model.activation)}};
    j["features"] = {{"mask", cfg.features.mask.to_string()},
                     {"normalize_mesh", cfg.features.normalize_mesh},
                     {"curvature_third_area", cfg.features.curvature_third_area},
                     {"standardize", cfg.features.standardize}};
    j["graph"] = {{"literal_eq5", cfg.literal_eq5}};
    j["optim"] = {{"lr", cfg.optim.lr},
                  {"beta1", cfg.optim.beta1},
                  {"beta2", cfg.optim.beta2},
                  {"eps", cfg.optim.eps}};
    j["split"] = {{"train_per_class", cfg.split.train_per_class},
                  {"train_fraction", cfg.split.train_fraction},
                  {"repeats", cfg.split.repeats},
                  {"manifest_train", cfg.split.manifest_train},
                  {"manifest_test", cfg.split.manifest_test}};
    return j;
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    cfg.task = task_from_string(j.value("task", "classification"));
    cfg.dataset_root = j.value("dataset_root", "");
    cfg.features_dir = j.value("features_dir", "");
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.deterministic = j.value("deterministic", true);
    cfg.epochs = j.value("epochs", 200);
    cfg.batch_size = j.value("batch_size", 0);
    cfg.target_test_accuracy = j.value("target_test_accuracy", 0.0);
    if (j.contains("model")) {
        const auto& m = j.at("model");
        cfg.model.tau = m.value("tau", 1024);
        cfg.model.classes = m.value("classes", 0);
        cfg.model.input_width = m.value("input_width", 0);
        cfg.model.dc_layers = m.value("dc_layers", 5);
        cfg.model.dropout = m.value("dropout", 0.3);
        cfg.model.bias = m.value("bias", true);
        cfg.model.activation = nn::activation_from_string(m.value("activation", "relu"));
    } else {
        cfg.model.classes = 0;
        cfg.model.input_width = 0;
    }
    if (j.contains("features")) {
        const auto& f = j.at("features");
        cfg.features.mask = FeatureMask::parse(f.value("mask", "P,Nv,GC,Nf,Theta"));
        cfg.features.normalize_mesh = f.value("normalize_mesh", true);
        cfg.features.curvature_third_area = f.value("curvature_third_area", false);
        cfg.features.standardize = f.value("standardize", false);
    }
    if (j.contains("graph")) cfg.literal_eq5 = j.at("graph").value("literal_eq5", false);
    if (j.contains("optim")) {
        const auto& o = j.at("optim");
        cfg.optim.lr = o.value("lr", 3e-4);
        cfg.optim.beta1 = o.value("beta1", 0.9);
        cfg.optim.beta2 = o.value("beta2", 0.999);
        cfg.optim.eps = o.value("eps", 1e-8);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        cfg.split.train_per_class = s.value("train_per_class", 0);
        cfg.split.train_fraction = s.value("train_fraction", 0.8);
        cfg.split.repeats = s.value("repeats", 1);
        cfg.split.manifest_train = s.value("manifest_train", "");
        cfg.split.manifest_test = s.value("manifest_test", "");
    }
    cfg.model.task = cfg.task;
    cfg.model.seed = cfg.seed;
    return cfg;
}

// ---------------------------------------------------------------------------
// dataset preparation

NodeFeatures features_for_mesh(const Mesh& mesh, const EdgeTable& edges,
                               const FeatureOptions& options) {
    GeometryOptions gopts;
    gopts.curvature = options.curvature_third_area ? CurvatureDenominator::third_area_sum
                                                   : CurvatureDenominator::full_area_sum;
    MeshGeometry geom = compute_geometry(mesh, edges, gopts);
    return assemble_features(mesh, geom, options.mask);
}

namespace {

AggregationKind aggregation_kind(const RunConfig& cfg) {
    return cfg.literal_eq5 ? AggregationKind::neighbor_sum
                           : AggregationKind::symmetric_normalized;
}

std::string dump_path(const std::string& features_dir, const std::string& rel_path,
                      const char* ext) {
    fs::path p = fs::path(features_dir) / rel_path;
    p.replace_extension(ext);
    return p.string();
}

PreparedItem prepare_item(const RunConfig& cfg, const DatasetItem& entry, int index_pos) {
    PreparedItem item;
    item.index_pos = index_pos;
    item.mesh = load_mesh(entry.mesh_path);
    if (cfg.features.normalize_mesh) item.mesh = normalize_mesh(item.mesh);
    item.edges = build_edge_table(item.mesh);

    if (!cfg.features_dir.empty()) {
        auto loaded = read_features_file(dump_path(cfg.features_dir, entry.rel_path, ".feat"));
        if (loaded.features.rows != item.mesh.face_count())
            throw ShapeError("feature dump rows do not match face count for " + entry.rel_path);
        if (!(loaded.features.mask == cfg.features.mask))
            throw ConfigError("feature dump mask '" + loaded.features.mask.to_string() +
                              "' does not match requested mask '" +
                              cfg.features.mask.to_string() + "'");
        auto adjacency =
            read_adjacency_file(dump_path(cfg.features_dir, entry.rel_path, ".adj"));
        if (adjacency.nodes != loaded.features.rows)
            throw ShapeError("adjacency sidecar node count does not match features for " +
                             entry.rel_path);
        item.graph.nodes = adjacency.nodes;
        item.graph.edges = std::move(adjacency.edges);
        item.graph.features = Matrix(loaded.features.rows, loaded.features.width);
        std::copy(loaded.features.data.begin(), loaded.features.data.end(),
                  item.graph.features.data());
        item.graph.op =
            aggregation_operator(item.graph.nodes, item.graph.edges, aggregation_kind(cfg));
    } else {
        NodeFeatures features = features_for_mesh(item.mesh, item.edges, cfg.features);
        item.graph = mesh_to_graph(item.mesh, item.edges, features, aggregation_kind(cfg));
    }
    if (cfg.task == TaskKind::classification) {
        item.graph.label = entry.class_id;
    } else {
        item.labels = load_face_labels(entry.label_path, item.mesh);
        item.graph.node_labels = item.labels.labels;
    }
    return item;
}

}  // namespace

PreparedDataset prepare_dataset(const RunConfig& cfg) {
    if (cfg.dataset_root.empty()) throw ConfigError("dataset_root is not set");
    DatasetIndex index = cfg.task == TaskKind::classification
                             ? load_classification_dataset(cfg.dataset_root)
                             : load_segmentation_dataset(cfg.dataset_root);

    PreparedDataset out;
    out.index.root = index.root;
    out.index.layout = index.layout;
    out.index.class_ids = index.class_ids;
    out.index.class_count = index.class_count;

    int max_node_label = -1;
    for (int i = 0; i < index.size(); ++i) {
        try {
            PreparedItem item = prepare_item(cfg, index.items[i], i);
            if (!item.graph.node_labels.empty())
                max_node_label = std::max(
                    max_node_label, *std::max_element(item.graph.node_labels.begin(),
                                                      item.graph.node_labels.end()));
            out.items.push_back(std::move(item));
            out.index.items.push_back(index.items[i]);
        } catch (const Error& e) {
            out.failures.push_back(index.items[i].rel_path + ": " + e.what());
            log_warn("skipping item '" + index.items[i].rel_path + "': " + e.what());
        }
    }
    if (out.items.empty())
        throw IoError("no usable items in dataset '" + cfg.dataset_root + "' (" +
                      std::to_string(out.failures.size()) + " failures)");

    for (std::size_t i = 1; i < out.items.size(); ++i)
        if (out.items[i].graph.features.cols() != out.items[0].graph.features.cols())
            throw ShapeError("inconsistent feature widths across dataset items");

    out.feature_width = out.items[0].graph.features.cols();
    out.classes = index.layout == DatasetLayout::classification ? index.class_count
                                                                : std::max(index.class_count,
                                                                           max_node_label + 1);
    // renumber index positions after skips
    for (std::size_t i = 0; i < out.items.size(); ++i)
        out.items[i].index_pos = static_cast<int>(i);
    return out;
}

// ---------------------------------------------------------------------------
// training helpers

namespace {

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool active() const { return !mean.empty(); }

    void apply(Matrix& features) const {
        if (!active()) return;
        if (features.cols() != static_cast<int>(mean.size()))
            throw ShapeError("standardizer width does not match features");
        for (int r = 0; r < features.rows(); ++r) {
            double* row = features.row(r);
            for (int c = 0; c < features.cols(); ++c)
                row[c] = (row[c] - mean[c]) / stddev[c];
        }
    }
};

Standardizer fit_standardizer(const PreparedDataset& data, const std::vector<int>& train_items) {
    Standardizer s;
    const int width = data.feature_width;
    s.mean.assign(width, 0.0);
    s.stddev.assign(width, 0.0);
    long long rows = 0;
    for (int i : train_items) {
        const Matrix& f = data.items[i].graph.features;
        for (int r = 0; r < f.rows(); ++r) {
            const double* row = f.row(r);
            for (int c = 0; c < width; ++c) s.mean[c] += row[c];
        }
        rows += f.rows();
    }
    for (int c = 0; c < width; ++c) s.mean[c] /= static_cast<double>(rows);
    for (int i : train_items) {
        const Matrix& f = data.items[i].graph.features;
        for (int r = 0; r < f.rows(); ++r) {
            const double* row = f.row(r);
            for (int c = 0; c < width; ++c) {
                const double d = row[c] - s.mean[c];
                s.stddev[c] += d * d;
            }
        }
    }
    for (int c = 0; c < width; ++c) {
        s.stddev[c] = std::sqrt(s.stddev[c] / static_cast<double>(rows));
        if (s.stddev[c] < 1e-12) s.stddev[c] = 1.0;  // constant column
    }
    return s;
}

int argmax_row(const Matrix& m, int r) {
    int best = 0;
    const double* row = m.row(r);
    for (int c = 1; c < m.cols(); ++c)
        if (row[c] > row[best]) best = c;
    return best;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct EvalCounts {
    long long correct = 0;
    long long total = 0;
    double fraction() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

// test-side accuracy: graphs for classification, nodes for segmentation
EvalCounts evaluate_items(const Model& model, const std::vector<int>& item_ids,
                          const std::vector<const FaceGraph*>& standardized, int batch_size) {
    NoGradGuard no_grad;
    Rng unused_rng(0);
    EvalCounts counts;
    for (std::size_t start = 0; start < item_ids.size();
         start += static_cast<std::size_t>(batch_size)) {
        std::vector<const FaceGraph*> graphs;
        for (std::size_t k = start;
             k < std::min(item_ids.size(), start + static_cast<std::size_t>(batch_size)); ++k)
            graphs.push_back(standardized[item_ids[k]]);
        GraphBatch batch = batch_graphs(graphs);
        Tensor logits = model.forward(batch, /*training=*/false, unused_rng);
        if (model.config().task == TaskKind::classification) {
            for (int g = 0; g < batch.graph_count(); ++g) {
                counts.correct += argmax_row(logits.value(), g) == batch.graph_labels[g];
                counts.total += 1;
            }
        } else {
            for (int r = 0; r < batch.node_count(); ++r) {
                counts.correct += argmax_row(logits.value(), r) == batch.node_labels[r];
                counts.total += 1;
            }
        }
    }
    return counts;
}

std::vector<int> predict_node_labels(const Model& model, const FaceGraph& graph) {
    NoGradGuard no_grad;
    Rng unused_rng(0);
    GraphBatch batch = batch_graphs({&graph});
    Tensor logits = model.forward(batch, /*training=*/false, unused_rng);
    std::vector<int> out(batch.node_count());
    for (int r = 0; r < batch.node_count(); ++r) out[r] = argmax_row(logits.value(), r);
    return out;
}

Checkpoint snapshot(const Model& model, nn::Adam& adam_state, const json& config,
                    const Standardizer& standardizer) {
    Checkpoint ckpt;
    ckpt.config_json = config.dump();
    for (const auto& [name, t] : model.named_parameters())
        ckpt.tensors.emplace_back(name, t.value());
    ckpt.has_adam = true;
    ckpt.adam_step = adam_state.step_count();
    ckpt.adam_m = adam_state.first_moments();
    ckpt.adam_v = adam_state.second_moments();
    ckpt.feature_mean = standardizer.mean;
    ckpt.feature_std = standardizer.stddev;
    return ckpt;
}

void load_parameters(Model& model, const Checkpoint& ckpt) {
    const auto& named = model.named_parameters();
    if (named.size() != ckpt.tensors.size())
        throw ConfigError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                          " tensors, model expects " + std::to_string(named.size()));
    for (std::size_t i = 0; i < named.size(); ++i) {
        const auto& [name, tensor] = named[i];
        const auto& [ckpt_name, value] = ckpt.tensors[i];
        if (name != ckpt_name)
            throw ConfigError("checkpoint tensor '" + ckpt_name + "' does not match model '" +
                              name + "'");
        if (!value.same_shape(tensor.value()))
            throw ConfigError("checkpoint tensor '" + name + "' has shape " +
                              std::to_string(value.rows()) + "x" + std::to_string(value.cols()) +
                              ", model expects " + std::to_string(tensor.value().rows()) + "x" +
                              std::to_string(tensor.value().cols()));
        Tensor handle = tensor;  // shares the node
        handle.value_mut() = value;
    }
}

int resolved_batch_size(const RunConfig& cfg) {
    if (cfg.batch_size > 0) return cfg.batch_size;
    return cfg.task == TaskKind::classification ? 16 : 4;
}

std::vector<SplitSpec> resolve_splits(const RunConfig& cfg, const PreparedDataset& data) {
    if (!cfg.split.manifest_train.empty()) {
        if (cfg.split.manifest_test.empty())
            throw ConfigError("manifest_train given without manifest_test");
        SplitSpec split;
        split.seed = cfg.seed;
        split.train_items = read_split_manifest(data.index, cfg.split.manifest_train);
        split.test_items = read_split_manifest(data.index, cfg.split.manifest_test);
        return {split};
    }
    if (cfg.split.train_per_class > 0)
        return make_splits(data.index, cfg.split.train_per_class, cfg.seed, cfg.split.repeats);
    return make_splits_fraction(data.index, cfg.split.train_fraction, cfg.seed,
                                cfg.split.repeats);
}

}  // namespace

std::string parameter_count_note(const ModelConfig& config, long long count) {
    if (config.task != TaskKind::segmentation || config.tau != 1024 || config.dc_layers != 5)
        return "";
    return "exact trainable parameter count is " + std::to_string(count) +
           "; the externally circulated figure of 147,828 for a 1024-wide segmentation "
           "network of this layout is not reproducible (a single 1024x1024 layer already "
           "holds 1,049,600 parameters)";
}

json TrainResult::to_json() const {
    json j;
    j["version"] = kVersion;
    j["out_dir"] = out_dir;
    j["parameter_count"] = parameter_count;
    j["mean_best_test_accuracy"] = mean_best_test_accuracy;
    j["reported_metric"] = "best-test-epoch accuracy";
    j["splits"] = json::array();
    for (const auto& s : splits) {
        json js;
        js["split_index"] = s.split_index;
        js["split_seed"] = s.split_seed;
        js["best_test_accuracy"] = s.best_test_accuracy;
        js["best_epoch"] = s.best_epoch;
        js["final_train_accuracy"] = s.final_train_accuracy;
        js["epochs_run"] = s.epochs_run;
        js["checkpoint"] = s.checkpoint_path;
        js["metrics"] = s.metrics_path;
        j["splits"].push_back(js);
    }
    return j;
}

TrainResult run_train(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.model.task = cfg.task;

    PreparedDataset data = prepare_dataset(cfg);
    if (cfg.model.classes <= 0) cfg.model.classes = data.classes;
    if (cfg.model.classes < data.classes)
        throw ConfigError("dataset has " + std::to_string(data.classes) +
                          " classes but the model is configured for " +
                          std::to_string(cfg.model.classes));
    cfg.model.input_width = data.feature_width;
    const int batch_size = resolved_batch_size(cfg);

    fs::create_directories(cfg.out_dir);
    json resolved = run_config_to_json(cfg);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "config.json");
        out << resolved.dump(2) << "\n";
    }

    std::vector<SplitSpec> splits = resolve_splits(cfg, data);

    TrainResult result;
    result.out_dir = cfg.out_dir;
    result.parameter_count = count_parameters(cfg.model);

    for (std::size_t k = 0; k < splits.size(); ++k) {
        const SplitSpec& split = splits[k];
        const fs::path split_dir = fs::path(cfg.out_dir) / ("split_" + std::to_string(k));
        fs::create_directories(split_dir);
        write_split_manifest(data.index, split, (split_dir / "train.txt").string(),
                             (split_dir / "test.txt").string());

        // per-split feature standardization works on copies of the graphs
        Standardizer standardizer;
        std::vector<FaceGraph> graphs_storage;
        std::vector<const FaceGraph*> graphs(data.items.size());
        if (cfg.features.standardize) {
            standardizer = fit_standardizer(data, split.train_items);
            graphs_storage.reserve(data.items.size());
            for (const auto& item : data.items) {
                FaceGraph copy = item.graph;
                standardizer.apply(copy.features);
                graphs_storage.push_back(std::move(copy));
            }
            for (std::size_t i = 0; i < graphs_storage.size(); ++i)
                graphs[i] = &graphs_storage[i];
        } else {
            for (std::size_t i = 0; i < data.items.size(); ++i) graphs[i] = &data.items[i].graph;
        }

        ModelConfig mc = cfg.model;
        mc.seed = cfg.seed + 10007ull * k;
        auto model = Model::make(mc);
        nn::Adam adam(model->parameters(),
                      {cfg.optim.lr, cfg.optim.beta1, cfg.optim.beta2, cfg.optim.eps});
        Rng run_rng(cfg.seed ^ (0x9e3779b97f4a7c15ull + k));

        SplitResult sr;
        sr.split_index = static_cast<int>(k);
        sr.split_seed = split.seed;
        sr.metrics_path = (split_dir / "metrics.jsonl").string();
        sr.checkpoint_path = (split_dir / "best.ckpt").string();
        std::ofstream metrics(sr.metrics_path);
        if (!metrics) throw IoError("cannot write metrics log: " + sr.metrics_path);

        json ckpt_config = resolved;
        ckpt_config["split_index"] = static_cast<int>(k);
        ckpt_config["model"]["seed"] = mc.seed;

        double best_acc = -1.0;
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            std::vector<int> order = split.train_items;
            run_rng.shuffle(order);

            double loss_sum = 0.0;
            long long loss_items = 0;
            long long train_correct = 0;
            long long train_total = 0;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(batch_size)) {
                std::vector<const FaceGraph*> batch_graph_ptrs;
                for (std::size_t i = start;
                     i < std::min(order.size(), start + static_cast<std::size_t>(batch_size));
                     ++i)
                    batch_graph_ptrs.push_back(graphs[order[i]]);
                GraphBatch batch = batch_graphs(batch_graph_ptrs);

                Tensor logits = model->forward(batch, /*training=*/true, run_rng);
                const std::vector<int>& targets = cfg.task == TaskKind::classification
                                                      ? batch.graph_labels
                                                      : batch.node_labels;
                Tensor loss = cross_entropy_mean(logits, targets);
                const double loss_value = loss.value()(0, 0);
                if (!std::isfinite(loss_value))
                    throw Error(ErrorCode::internal,
                                "non-finite loss at epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(start / batch_size) +
                                    " (lr=" + fmt_double(cfg.optim.lr) + ")");
                adam.zero_grad();
                backward(loss);
                adam.step();

                loss_sum += loss_value * static_cast<double>(targets.size());
                loss_items += static_cast<long long>(targets.size());
                for (std::size_t r = 0; r < targets.size(); ++r) {
                    train_correct +=
                        argmax_row(logits.value(), static_cast<int>(r)) == targets[r];
                    train_total += 1;
                }
            }

            EvalCounts test =
                evaluate_items(*model, split.test_items, graphs, batch_size);

            EpochRecord rec;
            rec.epoch = epoch;
            rec.train_loss = loss_items ? loss_sum / static_cast<double>(loss_items) : 0.0;
            rec.train_accuracy =
                train_total ? static_cast<double>(train_correct) / train_total : 0.0;
            rec.test_accuracy = test.fraction();
            rec.best = rec.test_accuracy > best_acc;
            if (rec.best) {
                best_acc = rec.test_accuracy;
                sr.best_epoch = epoch;
                sr.best_test_accuracy = rec.test_accuracy;
                write_checkpoint(snapshot(*model, adam, ckpt_config, standardizer),
                                 sr.checkpoint_path);
            }
            sr.final_train_accuracy = rec.train_accuracy;
            sr.epochs_run = epoch;
            sr.epochs.push_back(rec);

            json line;
            line["epoch"] = rec.epoch;
            line["train_loss"] = rec.train_loss;
            line["train_accuracy"] = rec.train_accuracy;
            line["test_accuracy"] = rec.test_accuracy;
            line["best"] = rec.best;
            metrics << line.dump() << "\n";

            if (cfg.target_test_accuracy > 0.0 &&
                rec.test_accuracy >= cfg.target_test_accuracy)
                break;
        }
        result.splits.push_back(std::move(sr));
    }

    double sum = 0.0;
    for (const auto& s : result.splits) sum += s.best_test_accuracy;
    result.mean_best_test_accuracy =
        result.splits.empty() ? 0.0 : sum / static_cast<double>(result.splits.size());

    json results = result.to_json();
    results["config"] = resolved;
    if (auto note = parameter_count_note(cfg.model, result.parameter_count); !note.empty())
        results["parameter_count_note"] = note;
    {
        std::ofstream out(fs::path(cfg.out_dir) / "results.json");
        out << results.dump(2) << "\n";
    }
    return result;
}

// ---------------------------------------------------------------------------
// eval

json EvalResult::to_json() const {
    json j;
    j["version"] = kVersion;
    j["task"] = task_to_string(task);
    j["items"] = items;
    if (task == TaskKind::classification) {
        j["accuracy"] = accuracy;
    } else {
        j["face_accuracy"] = face_accuracy;
        j["edge_accuracy"] = edge_accuracy;
        if (edge_accuracy_soft >= 0.0) j["edge_accuracy_soft"] = edge_accuracy_soft;
    }
    return j;
}

EvalResult run_eval(const EvalOptions& options) {
    Checkpoint ckpt = read_checkpoint(options.checkpoint_path);
    RunConfig cfg = run_config_from_json(json::parse(ckpt.config_json));
    if (!options.dataset_root.empty()) cfg.dataset_root = options.dataset_root;
    cfg.features_dir = options.features_dir;

    PreparedDataset data = prepare_dataset(cfg);
    if (data.feature_width != cfg.model.input_width)
        throw ConfigError("dataset feature width " + std::to_string(data.feature_width) +
                          " does not match checkpoint input width " +
                          std::to_string(cfg.model.input_width));
    if (data.classes > cfg.model.classes)
        throw ConfigError("dataset has " + std::to_string(data.classes) +
                          " classes, checkpoint was trained with " +
                          std::to_string(cfg.model.classes));

    auto model = Model::make(cfg.model);
    load_parameters(*model, ckpt);

    Standardizer standardizer{ckpt.feature_mean, ckpt.feature_std};

    std::vector<int> item_ids;
    if (!options.split_manifest.empty()) {
        item_ids = read_split_manifest(data.index, options.split_manifest);
    } else {
        item_ids.resize(data.items.size());
        for (std::size_t i = 0; i < item_ids.size(); ++i) item_ids[i] = static_cast<int>(i);
    }

    std::vector<FaceGraph> standardized_storage;
    std::vector<const FaceGraph*> graphs(data.items.size());
    if (standardizer.active()) {
        standardized_storage.reserve(data.items.size());
        for (const auto& item : data.items) {
            FaceGraph copy = item.graph;
            standardizer.apply(copy.features);
            standardized_storage.push_back(std::move(copy));
        }
        for (std::size_t i = 0; i < graphs.size(); ++i) graphs[i] = &standardized_storage[i];
    } else {
        for (std::size_t i = 0; i < graphs.size(); ++i) graphs[i] = &data.items[i].graph;
    }

    EvalResult result;
    result.task = cfg.task;
    result.items = static_cast<int>(item_ids.size());
    result.edge_accuracy_soft = options.soft_edge_accuracy ? 0.0 : -1.0;

    if (cfg.task == TaskKind::classification) {
        EvalCounts counts =
            evaluate_items(*model, item_ids, graphs, resolved_batch_size(cfg));
        result.accuracy = counts.fraction();
        return result;
    }

    long long face_correct = 0, face_total = 0;
    long long edge_correct = 0, edge_total = 0;
    long long soft_correct = 0;
    for (int id : item_ids) {
        const PreparedItem& item = data.items[id];
        std::vector<int> pred = predict_node_labels(*model, *graphs[id]);
        for (std::size_t f = 0; f < pred.size(); ++f) {
            face_correct += pred[f] == item.labels.labels[f];
            face_total += 1;
        }
        FaceLabels pred_labels{pred};
        std::vector<int> pred_edges = face_to_edge_labels(item.mesh, item.edges, pred_labels);
        std::vector<int> true_edges = face_to_edge_labels(item.mesh, item.edges, item.labels);
        for (int e = 0; e < item.edges.edge_count(); ++e) {
            edge_correct += pred_edges[e] == true_edges[e];
            const auto& edge = item.edges.edges[e];
            const int truth_a = item.labels.labels[edge.f0];
            const int truth_b = edge.boundary() ? truth_a : item.labels.labels[edge.f1];
            soft_correct += (pred_edges[e] == truth_a || pred_edges[e] == truth_b);
            edge_total += 1;
        }
    }
    result.face_accuracy = face_total ? static_cast<double>(face_correct) / face_total : 0.0;
    result.edge_accuracy = edge_total ? static_cast<double>(edge_correct) / edge_total : 0.0;
    if (options.soft_edge_accuracy)
        result.edge_accuracy_soft =
            edge_total ? static_cast<double>(soft_correct) / edge_total : 0.0;
    return result;
}

// ---------------------------------------------------------------------------
// extract

namespace {

struct ComponentRange {
    const char* name;
    int begin;
    int end;
};

std::vector<ComponentRange> component_ranges(const FeatureMask& mask) {
    std::vector<ComponentRange> out;
    int c = 0;
    auto push = [&](bool enabled, const char* name, int width) {
        if (!enabled) return;
        out.push_back({name, c, c + width});
        c += width;
    };
    push(mask.positions, "P", 18);
    push(mask.vertex_normals, "Nv", 18);
    push(mask.curvature, "GC", 6);
    push(mask.face_normals, "Nf", 12);
    push(mask.angles, "Theta", 3);
    return out;
}

}  // namespace

ExtractResult run_extract(const ExtractOptions& options) {
    DatasetIndex index = load_dataset(options.dataset_root);
    fs::create_directories(options.out_dir);

    ExtractResult result;
    const auto ranges = component_ranges(options.features.mask);
    struct Stat {
        double min = std::numeric_limits<double>::infinity();
        double max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        long long count = 0;
    };
    std::vector<Stat> stats(ranges.size());

    for (const auto& entry : index.items) {
        try {
            Mesh mesh = load_mesh(entry.mesh_path);
            if (options.features.normalize_mesh) mesh = normalize_mesh(mesh);
            EdgeTable edges = build_edge_table(mesh);
            NodeFeatures features = features_for_mesh(mesh, edges, options.features);
            FaceGraph graph =
                mesh_to_graph(mesh, edges, features, AggregationKind::symmetric_normalized);

            fs::path feat_path = fs::path(options.out_dir) / entry.rel_path;
            fs::create_directories(feat_path.parent_path());
            feat_path.replace_extension(".feat");
            write_features_file(features, entry.rel_path, feat_path.string());
            fs::path adj_path = feat_path;
            adj_path.replace_extension(".adj");
            write_adjacency_file(graph.nodes, graph.edges, adj_path.string());

            for (std::size_t s = 0; s < ranges.size(); ++s) {
                for (int r = 0; r < features.rows; ++r) {
                    for (int c = ranges[s].begin; c < ranges[s].end; ++c) {
                        double v = features.at(r, c);
                        stats[s].min = std::min(stats[s].min, v);
                        stats[s].max = std::max(stats[s].max, v);
                        stats[s].sum += v;
                        stats[s].count += 1;
                    }
                }
            }
            result.written += 1;
        } catch (const Error& e) {
            result.failures.push_back(entry.rel_path + ": " + e.what());
            log_warn("extract failed for '" + entry.rel_path + "': " + e.what());
        }
    }
    if (result.written == 0) throw IoError("extract produced no output");

    json stats_json;
    for (std::size_t s = 0; s < ranges.size(); ++s) {
        stats_json[ranges[s].name] = {
            {"min", stats[s].count ? stats[s].min : 0.0},
            {"max", stats[s].count ? stats[s].max : 0.0},
            {"mean", stats[s].count ? stats[s].sum / static_cast<double>(stats[s].count) : 0.0}};
    }
    result.component_stats = stats_json;

    json report;
    report["version"] = kVersion;
    report["dataset_root"] = options.dataset_root;
    report["mask"] = options.features.mask.to_string();
    report["width"] = options.features.mask.width();
    report["normalize_mesh"] = options.features.normalize_mesh;
    report["curvature_third_area"] = options.features.curvature_third_area;
    report["written"] = result.written;
    report["failures"] = result.failures;
    report["component_stats"] = stats_json;
    std::ofstream out(fs::path(options.out_dir) / "extract_report.json");
    out << report.dump(2) << "\n";
    return result;
}

// ---------------------------------------------------------------------------
// export-seg

namespace {

// fixed qualitative palette so exported files are comparable across runs
constexpr Rgb kPalette[12] = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
    {148, 103, 189}, {140, 86, 75},  {227, 119, 194}, {127, 127, 127},
    {188, 189, 34}, {23, 190, 207}, {174, 199, 232}, {255, 187, 120}};

}  // namespace

ExportSegResult run_export_seg(const ExportSegOptions& options) {
    Checkpoint ckpt = read_checkpoint(options.checkpoint_path);
    RunConfig cfg = run_config_from_json(json::parse(ckpt.config_json));
    if (cfg.task != TaskKind::segmentation)
        throw ConfigError("export-seg needs a segmentation checkpoint");

    Mesh raw_mesh = load_mesh(options.mesh_path);
    Mesh mesh = cfg.features.normalize_mesh ? normalize_mesh(raw_mesh) : raw_mesh;
    EdgeTable edges = build_edge_table(mesh);
    NodeFeatures features = features_for_mesh(mesh, edges, cfg.features);
    if (features.width != cfg.model.input_width)
        throw ConfigError("mesh feature width does not match checkpoint input width");
    FaceGraph graph = mesh_to_graph(mesh, edges, features,
                                    cfg.literal_eq5 ? AggregationKind::neighbor_sum
                                                    : AggregationKind::symmetric_normalized);
    Standardizer standardizer{ckpt.feature_mean, ckpt.feature_std};
    standardizer.apply(graph.features);

    auto model = Model::make(cfg.model);
    load_parameters(*model, ckpt);
    std::vector<int> pred = predict_node_labels(*model, graph);

    ExportSegResult result;
    std::vector<Rgb> colors(pred.size());
    for (std::size_t f = 0; f < pred.size(); ++f) colors[f] = kPalette[pred[f] % 12];
    result.prediction_ply = options.out_prefix + "_pred.ply";
    // exported geometry keeps the original (unnormalized) coordinates
    write_ply_face_colors_file(raw_mesh, colors, result.prediction_ply);

    if (!options.labels_path.empty()) {
        FaceLabels truth = load_face_labels(options.labels_path, mesh);
        std::vector<Rgb> diff(pred.size());
        for (std::size_t f = 0; f < pred.size(); ++f)
            diff[f] = pred[f] == truth.labels[f] ? Rgb{0, 200, 0} : Rgb{220, 0, 0};
        result.difference_ply = options.out_prefix + "_diff.ply";
        write_ply_face_colors_file(raw_mesh, diff, result.difference_ply);
    }
    return result;
}

// ---------------------------------------------------------------------------
// ablation sweeps

std::vector<FeatureMask> ablation_masks() {
    auto mk = [](bool p, bool nv, bool gc, bool nf, bool th) {
        return FeatureMask{p, nv, gc, nf, th};
    };
    return {
        mk(false, false, false, false, true),  // {Theta} -> 3
        mk(false, false, true, false, false),  // {GC} -> 6
        mk(false, false, false, true, false),  // {Nf} -> 12
        mk(true, false, false, false, false),  // {P} -> 18
        mk(false, true, false, false, false),  // {Nv} -> 18
        mk(false, true, true, true, true),     // {Nv,GC,Nf,Theta} -> 39
        mk(true, false, true, true, true),     // {P,GC,Nf,Theta} -> 39
        mk(true, true, true, false, true),     // {P,Nv,GC,Theta} -> 45
        mk(true, true, false, true, true),     // {P,Nv,Nf,Theta} -> 51
        mk(true, true, true, true, false),     // {P,Nv,GC,Nf} -> 54
        mk(true, true, true, true, true),      // full -> 57
    };
}

std::vector<int> ablation_widths() { return {8, 16, 32, 64, 128, 256, 512, 1024}; }

json AblateResult::to_json() const {
    json j;
    j["version"] = kVersion;
    j["axis"] = axis;
    j["rows"] = json::array();
    for (const auto& row : rows)
        j["rows"].push_back({{"label", row.label},
                             {"dimension", row.dimension},
                             {"mean_best_test_accuracy", row.mean_best_test_accuracy}});
    return j;
}

std::string AblateResult::table() const {
    std::ostringstream out;
    const char* dim_header = axis == "width" ? "Nodes" : "Dimensions";
    out << "Feature/Config | " << dim_header << " | Accuracy\n";
    for (const auto& row : rows) {
        char acc[32];
        std::snprintf(acc, sizeof(acc), "%.2f%%", 100.0 * row.mean_best_test_accuracy);
        out << row.label << " | " << row.dimension << " | " << acc << "\n";
    }
    return out.str();
}

AblateResult run_ablate(const RunConfig& base, const std::string& axis) {
    if (axis != "mask" && axis != "width")
        throw ConfigError("ablation axis must be 'mask' or 'width', got '" + axis + "'");

    AblateResult result;
    result.axis = axis;
    fs::create_directories(base.out_dir);

    auto run_row = [&](const RunConfig& cfg, const std::string& label, int dimension) {
        TrainResult tr = run_train(cfg);
        result.rows.push_back({label, dimension, tr.mean_best_test_accuracy});
    };

    if (axis == "mask") {
        for (const auto& mask : ablation_masks()) {
            RunConfig cfg = base;
            cfg.features.mask = mask;
            std::string label = mask.to_string();
            std::string dir_label = label;
            std::replace(dir_label.begin(), dir_label.end(), ',', '-');
            cfg.out_dir = (fs::path(base.out_dir) / ("mask_" + dir_label)).string();
            run_row(cfg, label, mask.width());
        }
    } else {
        for (int tau : ablation_widths()) {
            RunConfig cfg = base;
            cfg.model.tau = tau;
            cfg.out_dir = (fs::path(base.out_dir) / ("width_" + std::to_string(tau))).string();
            run_row(cfg, std::to_string(tau), tau);
        }
    }

    json j = result.to_json();
    j["base_config"] = run_config_to_json(base);
    std::ofstream out(fs::path(base.out_dir) / "ablate_results.json");
    out << j.dump(2) << "\n";
    std::ofstream table_out(fs::path(base.out_dir) / "ablate_table.txt");
    table_out << result.table();
    return result;
}

// ---------------------------------------------------------------------------
// splits

void run_splits(const SplitsOptions& options) {
    DatasetIndex index = load_dataset(options.dataset_root);
    std::vector<SplitSpec> splits =
        options.split.train_per_class > 0
            ? make_splits(index, options.split.train_per_class, options.seed,
                          options.split.repeats)
            : make_splits_fraction(index, options.split.train_fraction, options.seed,
                                   options.split.repeats);
    fs::create_directories(options.out_dir);
    for (std::size_t k = 0; k < splits.size(); ++k) {
        const std::string prefix =
            (fs::path(options.out_dir) / ("split_" + std::to_string(k))).string();
        write_split_manifest(index, splits[k], prefix + "_train.txt", prefix + "_test.txt");
    }
}

}  // namespace mgcn
