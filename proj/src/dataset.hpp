#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mesh.hpp"

namespace mgcn {

/// One dataset entry: a mesh path plus either a class id (classification) or
/// a face-label file (segmentation).
struct DatasetItem {
    std::string mesh_path;   // full path on disk
    std::string rel_path;    // root-relative key, used in split manifests
    int class_id = -1;       // classification only
    std::string label_path;  // segmentation only
};

enum class DatasetLayout { classification, segmentation };

struct DatasetIndex {
    std::string root;
    DatasetLayout layout = DatasetLayout::classification;
    std::vector<DatasetItem> items;
    std::map<std::string, int> class_ids;  // classification: sorted name -> id
    int class_count = 0;                   // classes or segment ids

    int size() const { return static_cast<int>(items.size()); }
};

/// Directory-per-class layout: root/<class>/[subdir/]*.obj|*.off. Class ids
/// follow sorted class names; items are enumerated in sorted path order.
/// Empty class directories warn; missing root throws IoError.
DatasetIndex load_classification_dataset(const std::string& root);

/// root/meshes/*.obj|*.off paired with root/labels/<stem>.txt (one integer
/// per face line). class_count is the max label + 1 across the dataset.
DatasetIndex load_segmentation_dataset(const std::string& root);

/// Auto-detects the layout: a root with meshes/ and labels/ subdirectories
/// is segmentation, anything else classification.
DatasetIndex load_dataset(const std::string& root);

struct FaceLabels {
    std::vector<int> labels;  // one per face, 0-based

    int size() const { return static_cast<int>(labels.size()); }
};

/// Reads one integer per line. Line count must equal the face count. Files
/// whose minimum label is >= 1 are treated as 1-based, shifted down and
/// logged.
FaceLabels load_face_labels(const std::string& path, const Mesh& mesh);

/// A seeded train/test partition over dataset item indices.
struct SplitSpec {
    std::uint64_t seed = 0;
    std::vector<int> train_items;
    std::vector<int> test_items;
};

/// k independent seeded splits. Exactly `train_per_class` items of every
/// class go to train (classification); for segmentation `train_per_class`
/// applies to the whole item list. Throws ConfigError on oversubscription;
/// warns when the test side comes out empty.
std::vector<SplitSpec> make_splits(const DatasetIndex& index, int train_per_class,
                                   std::uint64_t seed, int repeats);

/// Fractional variant: train count per class = round(fraction * class size),
/// clamped to [1, size] (or [0 ..] when the class has a single item).
std::vector<SplitSpec> make_splits_fraction(const DatasetIndex& index, double train_fraction,
                                            std::uint64_t seed, int repeats);

void write_split_manifest(const DatasetIndex& index, const SplitSpec& split,
                          const std::string& train_path, const std::string& test_path);

/// Reads a manifest (one rel_path per line) back to item indices.
std::vector<int> read_split_manifest(const DatasetIndex& index, const std::string& path);

/// Per-edge labels from per-face labels: a boundary edge takes its single
/// face's label; an interior edge takes the shared label, or the label of
/// the lower-index face when the two disagree.
std::vector<int> face_to_edge_labels(const Mesh& mesh, const EdgeTable& edges,
                                     const FaceLabels& labels);

}  // namespace mgcn
