#include "features_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace mgcn {

namespace {

constexpr const char* kFeatureMagic = "mgcn-features";
constexpr const char* kAdjacencyMagic = "mgcn-adjacency";
constexpr int kVersion = 1;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
    throw ParseError((source.empty() ? std::string("<stream>") : source) + ": " + what);
}

std::string expect_field(std::istream& in, const std::string& key, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) fail(source, "unexpected end of file, expected '" + key + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(key + " ", 0) != 0) fail(source, "expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
}

}  // namespace

void write_features(const NodeFeatures& features, const std::string& mesh_name,
                    std::ostream& out) {
    out << kFeatureMagic << " " << kVersion << "\n";
    out << "mesh " << mesh_name << "\n";
    out << "faces " << features.rows << "\n";
    out << "width " << features.width << "\n";
    out << "mask " << features.mask.to_string() << "\n";
    char buf[32];
    for (int r = 0; r < features.rows; ++r) {
        for (int c = 0; c < features.width; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", features.at(r, c));
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
}

void write_features_file(const NodeFeatures& features, const std::string& mesh_name,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write feature file: " + path);
    write_features(features, mesh_name, out);
}

LoadedFeatures read_features(std::istream& in, const std::string& source) {
    std::string header;
    if (!std::getline(in, header)) fail(source, "empty feature file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::istringstream hs(header);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != kFeatureMagic)
        fail(source, "not a feature dump (bad magic)");
    if (version != kVersion) fail(source, "unsupported feature dump version");

    LoadedFeatures out;
    out.mesh_name = expect_field(in, "mesh", source);
    out.features.rows = std::stoi(expect_field(in, "faces", source));
    out.features.width = std::stoi(expect_field(in, "width", source));
    out.features.mask = FeatureMask::parse(expect_field(in, "mask", source));
    if (out.features.mask.width() != out.features.width)
        fail(source, "mask width disagrees with declared width");
    if (out.features.rows < 0) fail(source, "negative face count");

    out.features.data.resize(static_cast<std::size_t>(out.features.rows) * out.features.width);
    for (std::size_t i = 0; i < out.features.data.size(); ++i)
        if (!(in >> out.features.data[i])) fail(source, "truncated feature rows");
    return out;
}

LoadedFeatures read_features_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature file: " + path);
    return read_features(in, path);
}

void write_adjacency(int nodes, const std::vector<std::pair<int, int>>& edges,
                     std::ostream& out) {
    out << kAdjacencyMagic << " " << kVersion << "\n";
    out << "nodes " << nodes << "\n";
    out << "edges " << edges.size() << "\n";
    for (const auto& [i, j] : edges) out << i << " " << j << "\n";
}

void write_adjacency_file(int nodes, const std::vector<std::pair<int, int>>& edges,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write adjacency file: " + path);
    write_adjacency(nodes, edges, out);
}

LoadedAdjacency read_adjacency(std::istream& in, const std::string& source) {
    std::string header;
    if (!std::getline(in, header)) fail(source, "empty adjacency file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::istringstream hs(header);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != kAdjacencyMagic)
        fail(source, "not an adjacency sidecar (bad magic)");
    if (version != kVersion) fail(source, "unsupported adjacency version");

    LoadedAdjacency out;
    out.nodes = std::stoi(expect_field(in, "nodes", source));
    const int edge_count = std::stoi(expect_field(in, "edges", source));
    out.edges.reserve(edge_count);
    for (int e = 0; e < edge_count; ++e) {
        int i, j;
        if (!(in >> i >> j)) fail(source, "truncated edge list");
        if (i < 0 || j < 0 || i >= out.nodes || j >= out.nodes)
            fail(source, "edge endpoint out of range");
        out.edges.emplace_back(i, j);
    }
    return out;
}

LoadedAdjacency read_adjacency_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open adjacency file: " + path);
    return read_adjacency(in, path);
}

}  // namespace mgcn
