#include <doctest.h>

#include <fstream>
#include <set>

#include "dataset.hpp"
#include "error.hpp"
#include "mesh_io.hpp"
#include "shapes.hpp"
#include "testutil.hpp"

using namespace mgcn;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// tiny single-triangle OBJ, enough for index-level tests
void write_tiny_mesh(const std::string& path) {
    write_file(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
}

std::string make_class_tree(testutil::TempDir& dir, int classes, int per_class) {
    namespace fs = std::filesystem;
    for (int c = 0; c < classes; ++c) {
        char name[16];
        std::snprintf(name, sizeof(name), "class%02d", c);
        fs::create_directories(dir.path / name);
        for (int i = 0; i < per_class; ++i) {
            char mesh[16];
            std::snprintf(mesh, sizeof(mesh), "m%03d.obj", i);
            write_tiny_mesh((dir.path / name / mesh).string());
        }
    }
    return dir.str();
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("classification layout: 30 classes x 20 meshes gives 600 items") {
    testutil::TempDir dir("cls30");
    make_class_tree(dir, 30, 20);
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK(index.size() == 600);
    CHECK(index.class_count == 30);
}

TEST_CASE("single class, single mesh") {
    testutil::TempDir dir("cls1");
    make_class_tree(dir, 1, 1);
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK(index.size() == 1);
    CHECK(index.class_count == 1);
    CHECK(index.items[0].class_id == 0);
}

TEST_CASE("class ids follow sorted class names") {
    testutil::TempDir dir("clssort");
    namespace fs = std::filesystem;
    fs::create_directories(dir.path / "b");
    fs::create_directories(dir.path / "a");
    write_tiny_mesh((dir.path / "a" / "x.obj").string());
    write_tiny_mesh((dir.path / "b" / "y.obj").string());
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK(index.class_ids.at("a") == 0);
    CHECK(index.class_ids.at("b") == 1);
    CHECK(index.items[0].class_id == 0);
    CHECK(index.items[1].class_id == 1);
}

TEST_CASE("meshes nested one level (train/test style) are collected in order") {
    testutil::TempDir dir("clsnest");
    namespace fs = std::filesystem;
    fs::create_directories(dir.path / "a" / "train");
    fs::create_directories(dir.path / "a" / "test");
    write_tiny_mesh((dir.path / "a" / "train" / "m1.obj").string());
    write_tiny_mesh((dir.path / "a" / "test" / "m2.obj").string());
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK(index.size() == 2);
    CHECK(index.items[0].rel_path == "a/test/m2.obj");
    CHECK(index.items[1].rel_path == "a/train/m1.obj");
}

TEST_CASE("empty class directory warns but still claims an id") {
    testutil::TempDir dir("clsempty");
    namespace fs = std::filesystem;
    fs::create_directories(dir.path / "empty");
    fs::create_directories(dir.path / "full");
    write_tiny_mesh((dir.path / "full" / "m.obj").string());
    testutil::WarningCapture warnings;
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK(index.size() == 1);
    CHECK(warnings.contains("empty"));
}

TEST_CASE("segmentation layout pairs meshes with labels by stem") {
    testutil::TempDir dir("seg");
    namespace fs = std::filesystem;
    fs::create_directories(dir.path / "meshes");
    fs::create_directories(dir.path / "labels");
    write_obj_file(shapes::tetrahedron(), (dir.path / "meshes" / "t.obj").string());
    write_file((dir.path / "labels" / "t.txt").string(), "0\n0\n1\n1\n");
    write_obj_file(shapes::tetrahedron(), (dir.path / "meshes" / "u.obj").string());
    write_file((dir.path / "labels" / "u.txt").string(), "0\n2\n1\n1\n");
    DatasetIndex index = load_segmentation_dataset(dir.str());
    CHECK(index.size() == 2);
    CHECK(index.class_count == 3);
    CHECK(index.layout == DatasetLayout::segmentation);

    // auto-detection picks segmentation for this layout
    DatasetIndex redetected = load_dataset(dir.str());
    CHECK(redetected.layout == DatasetLayout::segmentation);
}

TEST_CASE("segmentation meshes without a label file are skipped with a warning") {
    testutil::TempDir dir("segmiss");
    namespace fs = std::filesystem;
    fs::create_directories(dir.path / "meshes");
    fs::create_directories(dir.path / "labels");
    write_obj_file(shapes::tetrahedron(), (dir.path / "meshes" / "t.obj").string());
    write_file((dir.path / "labels" / "t.txt").string(), "0\n0\n1\n1\n");
    write_obj_file(shapes::tetrahedron(), (dir.path / "meshes" / "orphan.obj").string());
    testutil::WarningCapture warnings;
    DatasetIndex index = load_segmentation_dataset(dir.str());
    CHECK(index.size() == 1);
    CHECK(warnings.contains("orphan"));
}

TEST_CASE("face labels load 0-based directly") {
    testutil::TempDir dir("lbl");
    Mesh tet = shapes::tetrahedron();
    write_file(dir.str() + "/l.txt", "0\n0\n1\n1\n");
    FaceLabels labels = load_face_labels(dir.str() + "/l.txt", tet);
    CHECK(labels.labels == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("1-based label files are detected by min value and shifted") {
    testutil::TempDir dir("lbl1");
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    m.faces = {{0, 1, 2}, {1, 3, 2}};
    write_file(dir.str() + "/l.txt", "1\n2\n");
    testutil::WarningCapture warnings;
    FaceLabels labels = load_face_labels(dir.str() + "/l.txt", m);
    CHECK(labels.labels == std::vector<int>{0, 1});
    CHECK(warnings.contains("1-based"));
}

TEST_CASE("label count mismatch is a label error") {
    testutil::TempDir dir("lblbad");
    Mesh tet = shapes::tetrahedron();
    write_file(dir.str() + "/l.txt", "0\n0\n1\n");
    CHECK_THROWS_AS(load_face_labels(dir.str() + "/l.txt", tet), LabelError);
    write_file(dir.str() + "/neg.txt", "0\n-2\n1\n1\n");
    CHECK_THROWS_AS(load_face_labels(dir.str() + "/neg.txt", tet), LabelError);
}

TEST_CASE("20-per-class dataset with train=16, k=5 gives five exact 480/120 splits") {
    testutil::TempDir dir("split16");
    make_class_tree(dir, 30, 20);
    DatasetIndex index = load_classification_dataset(dir.str());
    auto splits = make_splits(index, 16, 7, 5);
    REQUIRE(splits.size() == 5);
    for (const auto& split : splits) {
        CHECK(split.train_items.size() == 480);
        CHECK(split.test_items.size() == 120);

        // exact partition, counts exact per class
        std::set<int> all(split.train_items.begin(), split.train_items.end());
        all.insert(split.test_items.begin(), split.test_items.end());
        CHECK(static_cast<int>(all.size()) == index.size());
        std::vector<int> per_class(30, 0);
        for (int i : split.train_items) per_class[index.items[i].class_id] += 1;
        for (int c = 0; c < 30; ++c) CHECK(per_class[c] == 16);
    }
    // distinct seeds give distinct partitions
    CHECK(splits[0].train_items != splits[1].train_items);
}

TEST_CASE("splits are reproducible for a fixed seed") {
    testutil::TempDir dir("splitrep");
    make_class_tree(dir, 3, 6);
    DatasetIndex index = load_classification_dataset(dir.str());
    auto a = make_splits(index, 4, 123, 3);
    auto b = make_splits(index, 4, 123, 3);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].train_items == b[k].train_items);
        CHECK(a[k].test_items == b[k].test_items);
    }
}

TEST_CASE("train = class size empties the test set with a warning") {
    testutil::TempDir dir("splitfull");
    make_class_tree(dir, 2, 3);
    DatasetIndex index = load_classification_dataset(dir.str());
    testutil::WarningCapture warnings;
    auto splits = make_splits(index, 3, 1, 1);
    CHECK(splits[0].test_items.empty());
    CHECK(warnings.contains("empty test set"));
}

TEST_CASE("oversubscribed splits are a config error") {
    testutil::TempDir dir("splitover");
    make_class_tree(dir, 2, 3);
    DatasetIndex index = load_classification_dataset(dir.str());
    CHECK_THROWS_AS(make_splits(index, 4, 1, 1), ConfigError);
}

TEST_CASE("fractional splits honor the rounded per-class count") {
    testutil::TempDir dir("splitfrac");
    make_class_tree(dir, 2, 10);
    DatasetIndex index = load_classification_dataset(dir.str());
    auto splits = make_splits_fraction(index, 0.8, 5, 2);
    for (const auto& split : splits) {
        CHECK(split.train_items.size() == 16);
        CHECK(split.test_items.size() == 4);
    }
}

TEST_CASE("split manifests round-trip through files") {
    testutil::TempDir dir("manifest");
    make_class_tree(dir, 2, 4);
    DatasetIndex index = load_classification_dataset(dir.str());
    auto splits = make_splits(index, 3, 9, 1);
    const std::string train_path = dir.str() + "/train.txt";
    const std::string test_path = dir.str() + "/test.txt";
    write_split_manifest(index, splits[0], train_path, test_path);
    CHECK(read_split_manifest(index, train_path) == splits[0].train_items);
    CHECK(read_split_manifest(index, test_path) == splits[0].test_items);

    write_file(dir.str() + "/bogus.txt", "not/a/real/path.obj\n");
    CHECK_THROWS_AS(read_split_manifest(index, dir.str() + "/bogus.txt"), ConfigError);
}

TEST_CASE("edge labels: agreement, lower-face tie break, boundary rule") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    m.faces = {{0, 1, 2}, {1, 3, 2}};
    testutil::WarningCapture warnings;
    EdgeTable et = build_edge_table(m);

    FaceLabels agree{{4, 4}};
    for (int label : face_to_edge_labels(m, et, agree)) CHECK(label == 4);

    FaceLabels disagree{{0, 1}};
    std::vector<int> labels = face_to_edge_labels(m, et, disagree);
    for (int e = 0; e < et.edge_count(); ++e) {
        const auto& edge = et.edges[e];
        if (edge.boundary())
            CHECK(labels[e] == disagree.labels[edge.f0]);
        else
            CHECK(labels[e] == 0);  // disagreeing faces take the lower face index
    }
}

TEST_CASE("tetrahedron edge labels match brute-force enumeration") {
    Mesh tet = shapes::tetrahedron();
    EdgeTable et = build_edge_table(tet);
    FaceLabels labels{{0, 0, 1, 1}};
    std::vector<int> got = face_to_edge_labels(tet, et, labels);
    REQUIRE(et.edge_count() == 6);
    for (int e = 0; e < 6; ++e) {
        const auto& edge = et.edges[e];
        int a = labels.labels[edge.f0];
        int b = labels.labels[edge.f1];
        int expected = (a == b) ? a : labels.labels[std::min(edge.f0, edge.f1)];
        CHECK(got[e] == expected);
    }
    // every edge has exactly one label and the mapping is total
    CHECK(got.size() == 6);
}

TEST_SUITE_END();
