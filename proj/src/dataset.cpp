#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "log.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace mgcn {

namespace {

bool is_mesh_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".obj" || ext == ".off";
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

// meshes directly in dir plus one optional level of subdirectories
// (train/test style nesting), sorted by relative path
std::vector<fs::path> collect_meshes(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : sorted_entries(dir)) {
        if (fs::is_directory(entry)) {
            for (const auto& sub : sorted_entries(entry))
                if (fs::is_regular_file(sub) && is_mesh_file(sub)) out.push_back(sub);
        } else if (fs::is_regular_file(entry) && is_mesh_file(entry)) {
            out.push_back(entry);
        }
    }
    return out;
}

}  // namespace

DatasetIndex load_classification_dataset(const std::string& root) {
    if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root);

    DatasetIndex index;
    index.root = root;
    index.layout = DatasetLayout::classification;

    std::vector<fs::path> class_dirs;
    for (const auto& entry : sorted_entries(root))
        if (fs::is_directory(entry)) class_dirs.push_back(entry);
    if (class_dirs.empty()) throw IoError("no class directories under dataset root: " + root);

    for (const auto& dir : class_dirs) {
        const std::string class_name = dir.filename().string();
        const int class_id = static_cast<int>(index.class_ids.size());
        index.class_ids.emplace(class_name, class_id);
        auto meshes = collect_meshes(dir);
        if (meshes.empty()) {
            log_warn("class directory '" + class_name + "' contains no meshes");
            continue;
        }
        for (const auto& mesh_path : meshes) {
            DatasetItem item;
            item.mesh_path = mesh_path.string();
            item.rel_path = fs::relative(mesh_path, root).generic_string();
            item.class_id = class_id;
            index.items.push_back(std::move(item));
        }
    }
    index.class_count = static_cast<int>(index.class_ids.size());
    return index;
}

DatasetIndex load_segmentation_dataset(const std::string& root) {
    const fs::path meshes_dir = fs::path(root) / "meshes";
    const fs::path labels_dir = fs::path(root) / "labels";
    if (!fs::is_directory(meshes_dir) || !fs::is_directory(labels_dir))
        throw IoError("segmentation dataset needs meshes/ and labels/ under: " + root);

    DatasetIndex index;
    index.root = root;
    index.layout = DatasetLayout::segmentation;

    int max_label = -1;
    for (const auto& mesh_path : collect_meshes(meshes_dir)) {
        fs::path label_path = labels_dir / (mesh_path.stem().string() + ".txt");
        if (!fs::is_regular_file(label_path)) {
            log_warn("no label file for mesh '" + mesh_path.filename().string() +
                     "', item skipped");
            continue;
        }
        DatasetItem item;
        item.mesh_path = mesh_path.string();
        item.rel_path = fs::relative(mesh_path, root).generic_string();
        item.label_path = label_path.string();

        std::ifstream in(item.label_path);
        std::string line;
        int min_val = std::numeric_limits<int>::max();
        int max_val = 0;
        bool any = false;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            int v;
            if (ls >> v) {
                any = true;
                min_val = std::min(min_val, v);
                max_val = std::max(max_val, v);
            }
        }
        if (any) {
            // account for the 1-based shift rule applied at load time
            int shifted_max = (min_val >= 1) ? max_val - 1 : max_val;
            max_label = std::max(max_label, shifted_max);
        }
        index.items.push_back(std::move(item));
    }
    if (index.items.empty()) throw IoError("segmentation dataset is empty: " + root);
    index.class_count = max_label + 1;
    return index;
}

DatasetIndex load_dataset(const std::string& root) {
    if (fs::is_directory(fs::path(root) / "meshes") &&
        fs::is_directory(fs::path(root) / "labels"))
        return load_segmentation_dataset(root);
    return load_classification_dataset(root);
}

FaceLabels load_face_labels(const std::string& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file: " + path);
    FaceLabels out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        int v;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw LabelError(path + ":" + std::to_string(lineno) + ": not an integer label");
        }
        out.labels.push_back(v);
    }
    if (out.size() != mesh.face_count())
        throw LabelError(path + ": " + std::to_string(out.size()) + " labels for " +
                         std::to_string(mesh.face_count()) + " faces");
    if (!out.labels.empty()) {
        int min_val = *std::min_element(out.labels.begin(), out.labels.end());
        if (min_val < 0) throw LabelError(path + ": negative label " + std::to_string(min_val));
        if (min_val >= 1) {
            for (int& v : out.labels) v -= 1;
            log_warn("label file '" + path + "' looks 1-based (min " +
                     std::to_string(min_val) + "), shifted to 0-based");
        }
    }
    return out;
}

namespace {

std::vector<SplitSpec> make_splits_impl(const DatasetIndex& index,
                                        const std::vector<int>& train_counts,
                                        std::uint64_t seed, int repeats) {
    if (repeats < 1) throw ConfigError("split repeats must be >= 1");

    // group item indices by class (segmentation: one group)
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < index.size(); ++i) {
        int key = index.layout == DatasetLayout::classification ? index.items[i].class_id : 0;
        groups[key].push_back(i);
    }

    std::vector<SplitSpec> splits;
    splits.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
        SplitSpec split;
        split.seed = seed + static_cast<std::uint64_t>(r);
        Rng rng(split.seed);
        for (auto& [key, members] : groups) {
            const int want = train_counts[key];
            if (want > static_cast<int>(members.size()))
                throw ConfigError("split asks for " + std::to_string(want) +
                                  " train items from a group of " +
                                  std::to_string(members.size()));
            std::vector<int> shuffled = members;
            rng.shuffle(shuffled);
            for (int k = 0; k < static_cast<int>(shuffled.size()); ++k)
                (k < want ? split.train_items : split.test_items).push_back(shuffled[k]);
        }
        std::sort(split.train_items.begin(), split.train_items.end());
        std::sort(split.test_items.begin(), split.test_items.end());
        if (split.test_items.empty())
            log_warn("split " + std::to_string(r) + " has an empty test set");
        splits.push_back(std::move(split));
    }
    return splits;
}

}  // namespace

std::vector<SplitSpec> make_splits(const DatasetIndex& index, int train_per_class,
                                   std::uint64_t seed, int repeats) {
    if (train_per_class < 0) throw ConfigError("train count must be >= 0");
    std::map<int, int> sizes;
    for (const auto& item : index.items)
        sizes[index.layout == DatasetLayout::classification ? item.class_id : 0] += 1;
    std::vector<int> counts(sizes.empty() ? 0 : sizes.rbegin()->first + 1, 0);
    for (auto& [key, size] : sizes) counts[key] = train_per_class;
    return make_splits_impl(index, counts, seed, repeats);
}

std::vector<SplitSpec> make_splits_fraction(const DatasetIndex& index, double train_fraction,
                                            std::uint64_t seed, int repeats) {
    if (train_fraction <= 0.0 || train_fraction > 1.0)
        throw ConfigError("train fraction must be in (0, 1]");
    std::map<int, int> sizes;
    for (const auto& item : index.items)
        sizes[index.layout == DatasetLayout::classification ? item.class_id : 0] += 1;
    std::vector<int> counts(sizes.empty() ? 0 : sizes.rbegin()->first + 1, 0);
    for (auto& [key, size] : sizes) {
        int want = static_cast<int>(std::lround(train_fraction * size));
        want = std::clamp(want, size > 1 ? 1 : 0, size);
        counts[key] = want;
    }
    return make_splits_impl(index, counts, seed, repeats);
}

void write_split_manifest(const DatasetIndex& index, const SplitSpec& split,
                          const std::string& train_path, const std::string& test_path) {
    auto write_list = [&](const std::vector<int>& items, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write split manifest: " + path);
        for (int i : items) out << index.items[i].rel_path << "\n";
    };
    write_list(split.train_items, train_path);
    write_list(split.test_items, test_path);
}

std::vector<int> read_split_manifest(const DatasetIndex& index, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open split manifest: " + path);
    std::map<std::string, int> by_rel;
    for (int i = 0; i < index.size(); ++i) by_rel[index.items[i].rel_path] = i;
    std::vector<int> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        auto it = by_rel.find(line);
        if (it == by_rel.end())
            throw ConfigError("manifest entry '" + line + "' is not in the dataset index");
        out.push_back(it->second);
    }
    return out;
}

std::vector<int> face_to_edge_labels(const Mesh& mesh, const EdgeTable& edges,
                                     const FaceLabels& labels) {
    if (labels.size() != mesh.face_count())
        throw LabelError("face label count does not match face count");
    std::vector<int> out(edges.edge_count());
    for (int e = 0; e < edges.edge_count(); ++e) {
        const auto& edge = edges.edges[e];
        if (edge.boundary()) {
            out[e] = labels.labels[edge.f0];
        } else {
            int a = labels.labels[edge.f0];
            int b = labels.labels[edge.f1];
            if (a == b)
                out[e] = a;
            else
                out[e] = labels.labels[std::min(edge.f0, edge.f1)];
        }
    }
    return out;
}

}  // namespace mgcn
