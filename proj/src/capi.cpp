#include "meshgcn/meshgcn.h"

#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "error.hpp"
#include "features_io.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "mesh_io.hpp"
#include "models.hpp"
#include "train.hpp"
#include "version.hpp"

using nlohmann::json;

struct mgcn_mesh {
    mgcn::Mesh mesh;
};

struct mgcn_features {
    mgcn::NodeFeatures features;
};

namespace {

thread_local std::string g_last_error;

mgcn_status to_status(const mgcn::Error& e) {
    g_last_error = e.what();
    return static_cast<mgcn_status>(static_cast<int>(e.code()));
}

template <typename Fn>
mgcn_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MGCN_OK;
    } catch (const mgcn::Error& e) {
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MGCN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MGCN_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_out_json(char** out_json, const json& j) {
    if (out_json) *out_json = copy_string(j.dump(2));
}

mgcn::RunConfig parse_run_config(const char* config_json) {
    if (!config_json) throw mgcn::ConfigError("config JSON is null");
    return mgcn::run_config_from_json(json::parse(config_json));
}

}  // namespace

extern "C" {

const char* mgcn_version(void) { return mgcn::kVersion; }

const char* mgcn_last_error(void) { return g_last_error.c_str(); }

void mgcn_string_free(char* s) { delete[] s; }

mgcn_status mgcn_mesh_load(const char* path, mgcn_mesh** out_mesh) {
    return guarded([&] {
        if (!path || !out_mesh) throw mgcn::ConfigError("null argument");
        auto* handle = new mgcn_mesh{mgcn::load_mesh(path)};
        *out_mesh = handle;
    });
}

mgcn_status mgcn_mesh_from_string(const char* text, const char* format, mgcn_mesh** out_mesh) {
    return guarded([&] {
        if (!text || !format || !out_mesh) throw mgcn::ConfigError("null argument");
        std::istringstream in(text);
        mgcn::Mesh mesh;
        if (std::strcmp(format, "obj") == 0)
            mesh = mgcn::parse_obj(in, "<string>");
        else if (std::strcmp(format, "off") == 0)
            mesh = mgcn::parse_off(in, "<string>");
        else
            throw mgcn::ConfigError(std::string("unknown mesh format '") + format + "'");
        *out_mesh = new mgcn_mesh{std::move(mesh)};
    });
}

void mgcn_mesh_free(mgcn_mesh* mesh) { delete mesh; }

int32_t mgcn_mesh_vertex_count(const mgcn_mesh* mesh) {
    return mesh ? mesh->mesh.vertex_count() : -1;
}

int32_t mgcn_mesh_face_count(const mgcn_mesh* mesh) {
    return mesh ? mesh->mesh.face_count() : -1;
}

mgcn_status mgcn_mesh_euler_characteristic(const mgcn_mesh* mesh, int32_t* out_chi) {
    return guarded([&] {
        if (!mesh || !out_chi) throw mgcn::ConfigError("null argument");
        mgcn::EdgeTable edges = mgcn::build_edge_table(mesh->mesh);
        *out_chi = mgcn::euler_characteristic(mesh->mesh, edges);
    });
}

mgcn_status mgcn_mesh_normalize(mgcn_mesh* mesh) {
    return guarded([&] {
        if (!mesh) throw mgcn::ConfigError("null argument");
        mesh->mesh = mgcn::normalize_mesh(mesh->mesh);
    });
}

mgcn_status mgcn_mesh_write_obj(const mgcn_mesh* mesh, const char* path) {
    return guarded([&] {
        if (!mesh || !path) throw mgcn::ConfigError("null argument");
        mgcn::write_obj_file(mesh->mesh, path);
    });
}

mgcn_status mgcn_features_compute(const mgcn_mesh* mesh, const char* mask,
                                  int curvature_third_area, mgcn_features** out_features) {
    return guarded([&] {
        if (!mesh || !out_features) throw mgcn::ConfigError("null argument");
        mgcn::FeatureOptions options;
        if (mask && *mask) options.mask = mgcn::FeatureMask::parse(mask);
        options.curvature_third_area = curvature_third_area != 0;
        mgcn::EdgeTable edges = mgcn::build_edge_table(mesh->mesh);
        *out_features =
            new mgcn_features{mgcn::features_for_mesh(mesh->mesh, edges, options)};
    });
}

void mgcn_features_free(mgcn_features* features) { delete features; }

int32_t mgcn_features_rows(const mgcn_features* features) {
    return features ? features->features.rows : -1;
}

int32_t mgcn_features_width(const mgcn_features* features) {
    return features ? features->features.width : -1;
}

const double* mgcn_features_data(const mgcn_features* features) {
    return features ? features->features.data.data() : nullptr;
}

mgcn_status mgcn_features_write(const mgcn_features* features, const char* mesh_name,
                                const char* path) {
    return guarded([&] {
        if (!features || !path) throw mgcn::ConfigError("null argument");
        mgcn::write_features_file(features->features, mesh_name ? mesh_name : "", path);
    });
}

mgcn_status mgcn_count_parameters(const char* config_json, int64_t* out_count) {
    return guarded([&] {
        if (!out_count) throw mgcn::ConfigError("null argument");
        mgcn::RunConfig cfg = parse_run_config(config_json);
        if (cfg.model.input_width <= 0) cfg.model.input_width = cfg.features.mask.width();
        if (cfg.model.classes <= 0)
            throw mgcn::ConfigError("model.classes must be set to count parameters");
        *out_count = mgcn::count_parameters(cfg.model);
    });
}

mgcn_status mgcn_layer_widths(const char* config_json, char** out_json) {
    return guarded([&] {
        if (!out_json) throw mgcn::ConfigError("null argument");
        mgcn::RunConfig cfg = parse_run_config(config_json);
        if (cfg.model.input_width <= 0) cfg.model.input_width = cfg.features.mask.width();
        if (cfg.model.classes <= 0)
            throw mgcn::ConfigError("model.classes must be set to report layer widths");
        json rows = json::array();
        for (const auto& spec : mgcn::layer_widths(cfg.model)) {
            const char* kind = spec.kind == mgcn::LayerSpec::Kind::gcn      ? "gcn"
                               : spec.kind == mgcn::LayerSpec::Kind::linear ? "linear"
                                                                            : "mean";
            rows.push_back({{"kind", kind}, {"in", spec.in}, {"out", spec.out}});
        }
        set_out_json(out_json, rows);
    });
}

mgcn_status mgcn_extract(const char* config_json, char** out_json) {
    return guarded([&] {
        if (!config_json) throw mgcn::ConfigError("config JSON is null");
        json j = json::parse(config_json);
        mgcn::ExtractOptions options;
        options.dataset_root = j.value("dataset_root", "");
        options.out_dir = j.value("out_dir", "");
        if (j.contains("features")) {
            const auto& f = j.at("features");
            options.features.mask =
                mgcn::FeatureMask::parse(f.value("mask", "P,Nv,GC,Nf,Theta"));
            options.features.normalize_mesh = f.value("normalize_mesh", true);
            options.features.curvature_third_area = f.value("curvature_third_area", false);
        }
        if (options.dataset_root.empty() || options.out_dir.empty())
            throw mgcn::ConfigError("extract needs dataset_root and out_dir");
        mgcn::ExtractResult result = mgcn::run_extract(options);
        json out;
        out["written"] = result.written;
        out["failures"] = result.failures;
        out["component_stats"] = result.component_stats;
        set_out_json(out_json, out);
        if (!result.failures.empty())
            throw mgcn::IoError(std::to_string(result.failures.size()) +
                                " items failed during extract");
    });
}

mgcn_status mgcn_train(const char* config_json, char** out_json) {
    return guarded([&] {
        mgcn::TrainResult result = mgcn::run_train(parse_run_config(config_json));
        set_out_json(out_json, result.to_json());
    });
}

mgcn_status mgcn_eval(const char* config_json, char** out_json) {
    return guarded([&] {
        if (!config_json) throw mgcn::ConfigError("config JSON is null");
        json j = json::parse(config_json);
        mgcn::EvalOptions options;
        options.checkpoint_path = j.value("checkpoint", "");
        options.dataset_root = j.value("dataset_root", "");
        options.split_manifest = j.value("split_manifest", "");
        options.features_dir = j.value("features_dir", "");
        options.soft_edge_accuracy = j.value("soft_edge_accuracy", false);
        if (options.checkpoint_path.empty()) throw mgcn::ConfigError("eval needs a checkpoint");
        mgcn::EvalResult result = mgcn::run_eval(options);
        set_out_json(out_json, result.to_json());
    });
}

mgcn_status mgcn_export_seg(const char* config_json, char** out_json) {
    return guarded([&] {
        if (!config_json) throw mgcn::ConfigError("config JSON is null");
        json j = json::parse(config_json);
        mgcn::ExportSegOptions options;
        options.checkpoint_path = j.value("checkpoint", "");
        options.mesh_path = j.value("mesh", "");
        options.labels_path = j.value("labels", "");
        options.out_prefix = j.value("out_prefix", "");
        if (options.checkpoint_path.empty() || options.mesh_path.empty() ||
            options.out_prefix.empty())
            throw mgcn::ConfigError("export-seg needs checkpoint, mesh and out_prefix");
        mgcn::ExportSegResult result = mgcn::run_export_seg(options);
        json out;
        out["prediction_ply"] = result.prediction_ply;
        if (!result.difference_ply.empty()) out["difference_ply"] = result.difference_ply;
        set_out_json(out_json, out);
    });
}

mgcn_status mgcn_ablate(const char* config_json, char** out_json) {
    return guarded([&] {
        if (!config_json) throw mgcn::ConfigError("config JSON is null");
        json j = json::parse(config_json);
        const std::string axis = j.value("axis", "mask");
        mgcn::RunConfig base = mgcn::run_config_from_json(j);
        mgcn::AblateResult result = mgcn::run_ablate(base, axis);
        json out = result.to_json();
        out["table"] = result.table();
        set_out_json(out_json, out);
    });
}

mgcn_status mgcn_make_splits(const char* config_json) {
    return guarded([&] {
        if (!config_json) throw mgcn::ConfigError("config JSON is null");
        json j = json::parse(config_json);
        mgcn::SplitsOptions options;
        options.dataset_root = j.value("dataset_root", "");
        options.out_dir = j.value("out_dir", "");
        options.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("split")) {
            const auto& s = j.at("split");
            options.split.train_per_class = s.value("train_per_class", 0);
            options.split.train_fraction = s.value("train_fraction", 0.8);
            options.split.repeats = s.value("repeats", 1);
        }
        if (options.dataset_root.empty() || options.out_dir.empty())
            throw mgcn::ConfigError("splits needs dataset_root and out_dir");
        mgcn::run_splits(options);
    });
}

}  // extern "C"
