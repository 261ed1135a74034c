#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "models.hpp"

namespace mgcn {

struct OptimConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct FeatureOptions {
    FeatureMask mask;                   // full 57-dim by default
    bool normalize_mesh = true;         // centroid to origin, max radius 1
    bool curvature_third_area = false;  // A/3 curvature denominator variant
    bool standardize = false;           // per-column zero-mean/unit-variance on train
};

struct SplitConfig {
    int train_per_class = 0;      // 0 = use train_fraction
    double train_fraction = 0.8;  // used when train_per_class == 0
    int repeats = 1;
    std::string manifest_train;   // optional: fixed split from manifests
    std::string manifest_test;
};

/// Fully resolved run description. Serializes losslessly to JSON; every run
/// writes its resolved config (plus the toolkit version) next to its
/// results.
struct RunConfig {
    TaskKind task = TaskKind::classification;
    std::string dataset_root;
    std::string features_dir;  // optional: consume extract dumps instead of recomputing
    std::string out_dir = "runs/out";
    std::uint64_t seed = 0;
    bool deterministic = true;
    int epochs = 200;
    int batch_size = 0;  // 0 = task default (16 classification, 4 segmentation)
    double target_test_accuracy = 0.0;  // > 0: stop once test accuracy reaches it
    ModelConfig model;
    FeatureOptions features;
    bool literal_eq5 = false;  // unnormalized neighbor-sum aggregation
    OptimConfig optim;
    SplitConfig split;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// One mesh fully prepared for training/evaluation.
struct PreparedItem {
    int index_pos = -1;  // position in the dataset index
    Mesh mesh;
    EdgeTable edges;
    FaceLabels labels;  // segmentation only
    FaceGraph graph;
};

struct PreparedDataset {
    DatasetIndex index;  // only successfully prepared items
    std::vector<PreparedItem> items;
    int feature_width = 0;
    int classes = 0;
    std::vector<std::string> failures;
};

/// Loads meshes, computes (or reads) features, attaches labels and builds
/// graphs. Corrupt items are skipped with a warning and recorded in
/// `failures`.
PreparedDataset prepare_dataset(const RunConfig& cfg);

/// The single-mesh pipeline used everywhere: optional normalization,
/// geometry, features under the mask.
NodeFeatures features_for_mesh(const Mesh& mesh, const EdgeTable& edges,
                               const FeatureOptions& options);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    bool best = false;
};

struct SplitResult {
    int split_index = 0;
    std::uint64_t split_seed = 0;
    double best_test_accuracy = 0.0;
    int best_epoch = 0;
    double final_train_accuracy = 0.0;
    int epochs_run = 0;
    std::string checkpoint_path;
    std::string metrics_path;
    std::vector<EpochRecord> epochs;
};

struct TrainResult {
    std::vector<SplitResult> splits;
    double mean_best_test_accuracy = 0.0;
    long long parameter_count = 0;
    std::string out_dir;

    nlohmann::json to_json() const;
};

/// Trains one model per split, logs one JSONL record per epoch, keeps the
/// best-test checkpoint, and reports the per-split and mean accuracies.
TrainResult run_train(const RunConfig& cfg);

struct EvalOptions {
    std::string checkpoint_path;
    std::string dataset_root;     // default: the checkpoint's dataset
    std::string split_manifest;   // optional subset (one rel path per line)
    std::string features_dir;
    bool soft_edge_accuracy = false;
};

struct EvalResult {
    TaskKind task = TaskKind::classification;
    int items = 0;
    double accuracy = 0.0;            // mesh accuracy (classification)
    double face_accuracy = 0.0;       // segmentation
    double edge_accuracy = 0.0;       // hard edge labels
    double edge_accuracy_soft = 0.0;  // computed when requested, else -1

    nlohmann::json to_json() const;
};

EvalResult run_eval(const EvalOptions& options);

struct ExtractOptions {
    std::string dataset_root;
    std::string out_dir;
    FeatureOptions features;
};

struct ExtractResult {
    int written = 0;
    std::vector<std::string> failures;
    nlohmann::json component_stats;  // min/max/mean per feature component
};

/// Writes one .feat dump plus one .adj sidecar per mesh, mirroring the
/// dataset-relative layout, and a summary report.
ExtractResult run_extract(const ExtractOptions& options);

struct ExportSegOptions {
    std::string checkpoint_path;
    std::string mesh_path;
    std::string labels_path;  // optional ground truth
    std::string out_prefix;
};

struct ExportSegResult {
    std::string prediction_ply;
    std::string difference_ply;  // empty when no labels were given
};

/// Colors faces by predicted segment (fixed 12-color palette); with ground
/// truth also writes an agreement file (green correct, red wrong).
ExportSegResult run_export_seg(const ExportSegOptions& options);

struct AblateRow {
    std::string label;
    int dimension = 0;  // feature width or tau
    double mean_best_test_accuracy = 0.0;
};

struct AblateResult {
    std::string axis;
    std::vector<AblateRow> rows;

    nlohmann::json to_json() const;
    std::string table() const;
};

/// axis "mask": the eleven feature-subset rows; axis "width": hidden widths
/// 8..1024. Each row is a full run_train under the modified config.
AblateResult run_ablate(const RunConfig& base, const std::string& axis);

/// The mask rows (in ablation-table order) and width sweep values.
std::vector<FeatureMask> ablation_masks();
std::vector<int> ablation_widths();

/// Non-empty for the 1024-wide segmentation layout: the circulated 147,828
/// reference count cannot be reproduced from these layer widths, so run logs
/// carry the exact count plus this explanation.
std::string parameter_count_note(const ModelConfig& config, long long count);

struct SplitsOptions {
    std::string dataset_root;
    std::string out_dir;
    SplitConfig split;
    std::uint64_t seed = 0;
};

/// Writes split_<k>_train.txt / split_<k>_test.txt manifests.
void run_splits(const SplitsOptions& options);

}  // namespace mgcn
