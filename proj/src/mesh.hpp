#pragma once

#include <array>
#include <string>
#include <vector>

#include "vec3.hpp"

namespace mgcn {

/// Indexed triangle mesh. Faces store 0-based vertex indices in the winding
/// order the source file declared; no re-orientation pass is applied.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string name;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

/// Unique undirected mesh edges plus both directions of the edge/face
/// incidence. Edges are sorted by (v0, v1) so ids are deterministic.
struct EdgeTable {
    struct Edge {
        int v0 = -1;  // v0 < v1
        int v1 = -1;
        int f0 = -1;            // first incident face (file order)
        int f1 = -1;            // second incident face, -1 on a boundary edge
        bool boundary() const { return f1 < 0; }
    };

    std::vector<Edge> edges;
    /// Per face, the edge ids of slots (v0,v1), (v1,v2), (v2,v0).
    std::vector<std::array<int, 3>> face_edges;

    int edge_count() const { return static_cast<int>(edges.size()); }
    int boundary_edge_count() const;
    bool closed() const { return boundary_edge_count() == 0; }
};

/// Checks index bounds, triangle-ness and repeated vertices within a face.
/// Throws TopologyError on violation.
void validate_mesh(const Mesh& mesh);

/// Builds the edge table. Throws TopologyError if any edge has more than two
/// incident faces (non-manifold). Warns once if the mesh has boundary edges.
EdgeTable build_edge_table(const Mesh& mesh);

/// Translates the vertex centroid to the origin and scales so the farthest
/// vertex sits at distance 1. Topology is untouched. Throws GeometryError if
/// all vertices coincide.
Mesh normalize_mesh(const Mesh& mesh);

/// V - E + F.
int euler_characteristic(const Mesh& mesh, const EdgeTable& edges);

}  // namespace mgcn
