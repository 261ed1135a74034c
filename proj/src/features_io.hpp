#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace mgcn {

/// Textual per-mesh feature dump:
///   mgcn-features 1
///   mesh <name>
///   faces <F>
///   width <W>
///   mask <components>
///   F rows of W floats
void write_features(const NodeFeatures& features, const std::string& mesh_name,
                    std::ostream& out);
void write_features_file(const NodeFeatures& features, const std::string& mesh_name,
                         const std::string& path);

struct LoadedFeatures {
    NodeFeatures features;
    std::string mesh_name;
};

LoadedFeatures read_features(std::istream& in, const std::string& source = "");
LoadedFeatures read_features_file(const std::string& path);

/// Adjacency sidecar: node count plus sorted undirected face pairs.
void write_adjacency(int nodes, const std::vector<std::pair<int, int>>& edges,
                     std::ostream& out);
void write_adjacency_file(int nodes, const std::vector<std::pair<int, int>>& edges,
                          const std::string& path);

struct LoadedAdjacency {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;
};

LoadedAdjacency read_adjacency(std::istream& in, const std::string& source = "");
LoadedAdjacency read_adjacency_file(const std::string& path);

}  // namespace mgcn
