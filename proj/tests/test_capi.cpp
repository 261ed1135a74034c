// Exercises the shared library strictly through the public C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "meshgcn/meshgcn.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kTetraObj =
    "v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n"
    "f 1 2 3\nf 1 3 4\nf 1 4 2\nf 2 4 3\n";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("meshgcn_capi_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("version and error strings are always available") {
    REQUIRE(mgcn_version() != nullptr);
    CHECK(std::strlen(mgcn_version()) >= 5);
    REQUIRE(mgcn_last_error() != nullptr);
}

TEST_CASE("mesh lifecycle through the C surface") {
    mgcn_mesh* mesh = nullptr;
    REQUIRE(mgcn_mesh_from_string(kTetraObj, "obj", &mesh) == MGCN_OK);
    CHECK(mgcn_mesh_vertex_count(mesh) == 4);
    CHECK(mgcn_mesh_face_count(mesh) == 4);

    int32_t chi = 0;
    REQUIRE(mgcn_mesh_euler_characteristic(mesh, &chi) == MGCN_OK);
    CHECK(chi == 2);

    REQUIRE(mgcn_mesh_normalize(mesh) == MGCN_OK);

    TempDir dir("mesh");
    const std::string obj_path = (dir.path / "t.obj").string();
    REQUIRE(mgcn_mesh_write_obj(mesh, obj_path.c_str()) == MGCN_OK);

    mgcn_mesh* reloaded = nullptr;
    REQUIRE(mgcn_mesh_load(obj_path.c_str(), &reloaded) == MGCN_OK);
    CHECK(mgcn_mesh_face_count(reloaded) == 4);
    mgcn_mesh_free(reloaded);
    mgcn_mesh_free(mesh);
}

TEST_CASE("parse failures set a status code and message") {
    mgcn_mesh* mesh = nullptr;
    CHECK(mgcn_mesh_from_string("v 0 0 0\nf 1 2 3 4\n", "obj", &mesh) == MGCN_ERR_TOPOLOGY);
    CHECK(std::strlen(mgcn_last_error()) > 0);
    CHECK(mgcn_mesh_from_string("garbage", "off", &mesh) == MGCN_ERR_PARSE);
    CHECK(mgcn_mesh_load("/definitely/not/here.obj", &mesh) == MGCN_ERR_IO);
}

TEST_CASE("feature computation exposes the 57-column layout") {
    mgcn_mesh* mesh = nullptr;
    REQUIRE(mgcn_mesh_from_string(kTetraObj, "obj", &mesh) == MGCN_OK);

    mgcn_features* features = nullptr;
    REQUIRE(mgcn_features_compute(mesh, "P,Nv,GC,Nf,Theta", 0, &features) == MGCN_OK);
    CHECK(mgcn_features_rows(features) == 4);
    CHECK(mgcn_features_width(features) == 57);
    REQUIRE(mgcn_features_data(features) != nullptr);

    TempDir dir("feat");
    const std::string path = (dir.path / "t.feat").string();
    REQUIRE(mgcn_features_write(features, "tetra", path.c_str()) == MGCN_OK);
    CHECK(fs::file_size(path) > 0);
    mgcn_features_free(features);

    mgcn_features* masked = nullptr;
    REQUIRE(mgcn_features_compute(mesh, "Theta", 0, &masked) == MGCN_OK);
    CHECK(mgcn_features_width(masked) == 3);
    mgcn_features_free(masked);

    mgcn_features* bogus = nullptr;
    CHECK(mgcn_features_compute(mesh, "XY", 0, &bogus) == MGCN_ERR_CONFIG);
    mgcn_mesh_free(mesh);
}

TEST_CASE("count_parameters and layer_widths over JSON configs") {
    json cfg;
    cfg["task"] = "classification";
    cfg["model"]["tau"] = 1024;
    cfg["model"]["classes"] = 30;
    int64_t count = 0;
    REQUIRE(mgcn_count_parameters(cfg.dump().c_str(), &count) == MGCN_OK);
    // 57->1024, the five block layers, and the 6144->30 readout
    int64_t expected = 0;
    const int dims[][2] = {{57, 1024},   {1024, 1024}, {2048, 1024}, {3072, 1024},
                           {4096, 1024}, {5120, 1024}, {6144, 30}};
    for (auto [in, out] : dims) expected += int64_t(in) * out + out;
    CHECK(count == expected);

    char* layers_json = nullptr;
    REQUIRE(mgcn_layer_widths(cfg.dump().c_str(), &layers_json) == MGCN_OK);
    json layers = json::parse(layers_json);
    mgcn_string_free(layers_json);
    REQUIRE(layers.size() == 8);
    CHECK(layers[0]["in"] == 57);
    CHECK(layers[6]["kind"] == "mean");
    CHECK(layers[7]["out"] == 30);

    CHECK(mgcn_count_parameters("{not json", &count) == MGCN_ERR_INTERNAL);
    json bad = cfg;
    bad["model"]["tau"] = 0;
    CHECK(mgcn_count_parameters(bad.dump().c_str(), &count) == MGCN_ERR_CONFIG);
}

TEST_CASE("train/eval round trip through the verbs") {
    TempDir data("verbdata");
    TempDir out("verbout");
    // four one-triangle classes would be degenerate; write tetrahedra in two
    // class dirs with slight vertex shifts encoded in the OBJ text
    for (int c = 0; c < 2; ++c) {
        fs::create_directories(data.path / ("class" + std::to_string(c)));
        for (int i = 0; i < 3; ++i) {
            std::ofstream obj(data.path / ("class" + std::to_string(c)) /
                              ("m" + std::to_string(i) + ".obj"));
            const double s = c == 0 ? 1.0 : 0.4 + 0.05 * i;
            obj << "v " << s << " " << s << " " << s << "\n"
                << "v " << s << " -" << s << " -" << s << "\n"
                << "v -" << s << " " << s << " -" << s << "\n"
                << "v -" << s << " -" << s << " " << s << "\n"
                << "f 1 2 3\nf 1 3 4\nf 1 4 2\nf 2 4 3\n";
        }
    }

    json cfg;
    cfg["task"] = "classification";
    cfg["dataset_root"] = data.path.string();
    cfg["out_dir"] = (out.path / "run").string();
    cfg["epochs"] = 2;
    cfg["batch_size"] = 2;
    cfg["seed"] = 1;
    cfg["model"]["tau"] = 2;
    cfg["model"]["dropout"] = 0.0;
    cfg["features"]["normalize_mesh"] = false;  // classes differ only by scale
    cfg["split"]["train_fraction"] = 0.67;

    char* result_json = nullptr;
    REQUIRE(mgcn_train(cfg.dump().c_str(), &result_json) == MGCN_OK);
    json result = json::parse(result_json);
    mgcn_string_free(result_json);
    REQUIRE(result["splits"].size() == 1);
    const std::string ckpt = result["splits"][0]["checkpoint"];
    CHECK(fs::exists(ckpt));

    json eval_cfg;
    eval_cfg["checkpoint"] = ckpt;
    char* eval_json = nullptr;
    REQUIRE(mgcn_eval(eval_cfg.dump().c_str(), &eval_json) == MGCN_OK);
    json eval_result = json::parse(eval_json);
    mgcn_string_free(eval_json);
    CHECK(eval_result["task"] == "classification");
    CHECK(eval_result["accuracy"].get<double>() >= 0.0);
    CHECK(eval_result["accuracy"].get<double>() <= 1.0);
}

TEST_CASE("extract and splits verbs") {
    TempDir data("exdata");
    TempDir out("exout");
    fs::create_directories(data.path / "only");
    for (int i = 0; i < 2; ++i)
        std::ofstream(data.path / "only" / ("m" + std::to_string(i) + ".obj")) << kTetraObj;

    json ex;
    ex["dataset_root"] = data.path.string();
    ex["out_dir"] = (out.path / "feat").string();
    char* ex_json = nullptr;
    REQUIRE(mgcn_extract(ex.dump().c_str(), &ex_json) == MGCN_OK);
    json ex_result = json::parse(ex_json);
    mgcn_string_free(ex_json);
    CHECK(ex_result["written"] == 2);
    CHECK(fs::exists(out.path / "feat" / "extract_report.json"));

    json sp;
    sp["dataset_root"] = data.path.string();
    sp["out_dir"] = (out.path / "splits").string();
    sp["split"]["train_fraction"] = 0.5;
    sp["split"]["repeats"] = 2;
    REQUIRE(mgcn_make_splits(sp.dump().c_str()) == MGCN_OK);
    CHECK(fs::exists(out.path / "splits" / "split_1_test.txt"));

    // config errors surface as MGCN_ERR_CONFIG
    CHECK(mgcn_make_splits("{}") == MGCN_ERR_CONFIG);
}
