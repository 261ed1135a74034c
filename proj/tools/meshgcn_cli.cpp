// Command-line front end for the meshgcn shared library. Everything goes
// through the C API: flags are folded into a JSON run configuration, handed
// to the matching verb, and the JSON result is printed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "meshgcn/meshgcn.h"

using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_file;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool deterministic = false;
    bool no_normalize_mesh = false;
    bool literal_eq5 = false;
    bool curvature_third_area = false;
    bool standardize = false;
    std::string mask;
    std::string activation;
    int tau = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "JSON config file; flags override its fields");
    cmd->add_option("--seed", flags.seed, "random seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_flag("--deterministic", flags.deterministic,
                  "record and require deterministic single-threaded execution");
    cmd->add_option("--mask", flags.mask, "feature components, e.g. P,Nv,GC,Nf,Theta");
    cmd->add_option("--tau", flags.tau, "hidden node width");
    cmd->add_option("--activation", flags.activation, "relu | tanh");
    cmd->add_flag("--no-normalize-mesh", flags.no_normalize_mesh,
                  "skip centroid/scale normalization before feature extraction");
    cmd->add_flag("--literal-eq5", flags.literal_eq5,
                  "unnormalized neighbor-sum aggregation (no self loops)");
    cmd->add_flag("--curvature-third-area", flags.curvature_third_area,
                  "divide the angular deficit by a third of the incident area");
    cmd->add_flag("--standardize-features", flags.standardize,
                  "zero-mean/unit-variance feature columns fitted on the training split");
}

json base_config(const CommonFlags& flags) {
    json cfg = json::object();
    if (!flags.config_file.empty()) {
        std::ifstream in(flags.config_file);
        if (!in) {
            std::cerr << "error: cannot open config file " << flags.config_file << "\n";
            std::exit(2);
        }
        in >> cfg;
    }
    if (flags.seed_set) cfg["seed"] = flags.seed;
    if (flags.deterministic) cfg["deterministic"] = true;
    if (flags.tau > 0) cfg["model"]["tau"] = flags.tau;
    if (!flags.activation.empty()) cfg["model"]["activation"] = flags.activation;
    if (!flags.mask.empty()) cfg["features"]["mask"] = flags.mask;
    if (flags.no_normalize_mesh) cfg["features"]["normalize_mesh"] = false;
    if (flags.curvature_third_area) cfg["features"]["curvature_third_area"] = true;
    if (flags.standardize) cfg["features"]["standardize"] = true;
    if (flags.literal_eq5) cfg["graph"]["literal_eq5"] = true;
    return cfg;
}

int finish(mgcn_status status, char* result_json, bool print_result = true) {
    if (result_json) {
        if (print_result) std::cout << result_json << "\n";
        mgcn_string_free(result_json);
    }
    if (status != MGCN_OK) {
        std::cerr << "error: " << mgcn_last_error() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshgcn — face-graph GCN toolkit for 3D mesh classification and segmentation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mgcn_version()));

    // extract ---------------------------------------------------------------
    CommonFlags ex_flags;
    std::string ex_dataset, ex_out;
    auto* extract = app.add_subcommand("extract", "compute per-mesh feature dumps + adjacency");
    extract->add_option("--dataset", ex_dataset, "dataset root")->required();
    extract->add_option("--out", ex_out, "output directory")->required();
    add_common(extract, ex_flags);

    // train -----------------------------------------------------------------
    CommonFlags tr_flags;
    std::string tr_dataset, tr_out, tr_task, tr_features_dir;
    int tr_epochs = 0, tr_batch = 0, tr_repeats = 0, tr_train_per_class = 0;
    double tr_lr = 0.0, tr_dropout = -1.0, tr_fraction = 0.0, tr_target = 0.0;
    int tr_classes = 0;
    auto* train = app.add_subcommand("train", "train a model and keep the best-test checkpoint");
    train->add_option("--dataset", tr_dataset, "dataset root");
    train->add_option("--out", tr_out, "run output directory");
    train->add_option("--task", tr_task, "classification | segmentation");
    train->add_option("--features-dir", tr_features_dir, "consume extract dumps");
    train->add_option("--epochs", tr_epochs, "training epochs");
    train->add_option("--batch-size", tr_batch, "meshes per batch");
    train->add_option("--lr", tr_lr, "Adam learning rate");
    train->add_option("--dropout", tr_dropout, "dropout probability inside DC blocks");
    train->add_option("--classes", tr_classes, "class count (default: from dataset)");
    train->add_option("--repeats", tr_repeats, "number of seeded splits to train");
    train->add_option("--train-per-class", tr_train_per_class, "train meshes per class");
    train->add_option("--train-fraction", tr_fraction, "train fraction when no per-class count");
    train->add_option("--target-test-accuracy", tr_target, "stop once test accuracy reaches this");
    add_common(train, tr_flags);

    // eval ------------------------------------------------------------------
    std::string ev_checkpoint, ev_dataset, ev_manifest, ev_features_dir;
    bool ev_soft = false;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", ev_checkpoint, "checkpoint file")->required();
    eval->add_option("--dataset", ev_dataset, "dataset root (default: from checkpoint)");
    eval->add_option("--split", ev_manifest, "split manifest restricting the items");
    eval->add_option("--features-dir", ev_features_dir, "consume extract dumps");
    eval->add_flag("--soft-edge-acc", ev_soft,
                   "also report edge accuracy against either incident face label");

    // export-seg ------------------------------------------------------------
    std::string xs_checkpoint, xs_mesh, xs_labels, xs_prefix;
    auto* export_seg = app.add_subcommand("export-seg", "write segmentation PLY files");
    export_seg->add_option("--checkpoint", xs_checkpoint, "segmentation checkpoint")->required();
    export_seg->add_option("--mesh", xs_mesh, "mesh to segment")->required();
    export_seg->add_option("--labels", xs_labels, "ground-truth face labels (adds a diff file)");
    export_seg->add_option("--out-prefix", xs_prefix, "output file prefix")->required();

    // ablate ----------------------------------------------------------------
    CommonFlags ab_flags;
    std::string ab_dataset, ab_out, ab_task, ab_axis = "mask";
    int ab_epochs = 0, ab_repeats = 0;
    double ab_target = 0.0;
    auto* ablate = app.add_subcommand("ablate", "feature-mask or width sweep");
    ablate->add_option("--dataset", ab_dataset, "dataset root");
    ablate->add_option("--out", ab_out, "sweep output directory");
    ablate->add_option("--task", ab_task, "classification | segmentation");
    ablate->add_option("--axis", ab_axis, "mask | width")->required();
    ablate->add_option("--epochs", ab_epochs, "training epochs per row");
    ablate->add_option("--repeats", ab_repeats, "splits per row");
    ablate->add_option("--target-test-accuracy", ab_target, "per-row early stop");
    add_common(ablate, ab_flags);

    // splits ----------------------------------------------------------------
    CommonFlags sp_flags;
    std::string sp_dataset, sp_out;
    int sp_repeats = 0, sp_train_per_class = 0;
    double sp_fraction = 0.0;
    auto* splits = app.add_subcommand("splits", "write seeded train/test split manifests");
    splits->add_option("--dataset", sp_dataset, "dataset root")->required();
    splits->add_option("--out", sp_out, "manifest output directory")->required();
    splits->add_option("--repeats", sp_repeats, "number of splits");
    splits->add_option("--train-per-class", sp_train_per_class, "train meshes per class");
    splits->add_option("--train-fraction", sp_fraction, "train fraction");
    add_common(splits, sp_flags);

    CLI11_PARSE(app, argc, argv);

    char* result = nullptr;

    if (extract->parsed()) {
        json cfg = base_config(ex_flags);
        cfg["dataset_root"] = ex_dataset;
        cfg["out_dir"] = ex_out;
        mgcn_status status = mgcn_extract(cfg.dump().c_str(), &result);
        return finish(status, result);
    }

    if (train->parsed()) {
        json cfg = base_config(tr_flags);
        if (!tr_dataset.empty()) cfg["dataset_root"] = tr_dataset;
        if (!tr_out.empty()) cfg["out_dir"] = tr_out;
        if (!tr_task.empty()) cfg["task"] = tr_task;
        if (!tr_features_dir.empty()) cfg["features_dir"] = tr_features_dir;
        if (tr_epochs > 0) cfg["epochs"] = tr_epochs;
        if (tr_batch > 0) cfg["batch_size"] = tr_batch;
        if (tr_lr > 0.0) cfg["optim"]["lr"] = tr_lr;
        if (tr_dropout >= 0.0) cfg["model"]["dropout"] = tr_dropout;
        if (tr_classes > 0) cfg["model"]["classes"] = tr_classes;
        if (tr_repeats > 0) cfg["split"]["repeats"] = tr_repeats;
        if (tr_train_per_class > 0) cfg["split"]["train_per_class"] = tr_train_per_class;
        if (tr_fraction > 0.0) cfg["split"]["train_fraction"] = tr_fraction;
        if (tr_target > 0.0) cfg["target_test_accuracy"] = tr_target;
        mgcn_status status = mgcn_train(cfg.dump().c_str(), &result);
        int rc = finish(status, result);
        if (rc == 0)
            std::cerr << "note: accuracies are best-test-epoch values; see results.json\n";
        return rc;
    }

    if (eval->parsed()) {
        json cfg;
        cfg["checkpoint"] = ev_checkpoint;
        if (!ev_dataset.empty()) cfg["dataset_root"] = ev_dataset;
        if (!ev_manifest.empty()) cfg["split_manifest"] = ev_manifest;
        if (!ev_features_dir.empty()) cfg["features_dir"] = ev_features_dir;
        cfg["soft_edge_accuracy"] = ev_soft;
        mgcn_status status = mgcn_eval(cfg.dump().c_str(), &result);
        return finish(status, result);
    }

    if (export_seg->parsed()) {
        json cfg;
        cfg["checkpoint"] = xs_checkpoint;
        cfg["mesh"] = xs_mesh;
        if (!xs_labels.empty()) cfg["labels"] = xs_labels;
        cfg["out_prefix"] = xs_prefix;
        mgcn_status status = mgcn_export_seg(cfg.dump().c_str(), &result);
        return finish(status, result);
    }

    if (ablate->parsed()) {
        json cfg = base_config(ab_flags);
        if (!ab_dataset.empty()) cfg["dataset_root"] = ab_dataset;
        if (!ab_out.empty()) cfg["out_dir"] = ab_out;
        if (!ab_task.empty()) cfg["task"] = ab_task;
        if (ab_epochs > 0) cfg["epochs"] = ab_epochs;
        if (ab_repeats > 0) cfg["split"]["repeats"] = ab_repeats;
        if (ab_target > 0.0) cfg["target_test_accuracy"] = ab_target;
        cfg["axis"] = ab_axis;
        mgcn_status status = mgcn_ablate(cfg.dump().c_str(), &result);
        return finish(status, result);
    }

    if (splits->parsed()) {
        json cfg = base_config(sp_flags);
        cfg["dataset_root"] = sp_dataset;
        cfg["out_dir"] = sp_out;
        if (sp_repeats > 0) cfg["split"]["repeats"] = sp_repeats;
        if (sp_train_per_class > 0) cfg["split"]["train_per_class"] = sp_train_per_class;
        if (sp_fraction > 0.0) cfg["split"]["train_fraction"] = sp_fraction;
        int rc = finish(mgcn_make_splits(cfg.dump().c_str()), nullptr);
        if (rc == 0) std::cout << "split manifests written to " << sp_out << "\n";
        return rc;
    }

    return 0;
}
