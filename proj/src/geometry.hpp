#pragma once

#include <array>
#include <string>
#include <vector>

#include "mesh.hpp"

namespace mgcn {

/// Per-face differential geometry plus the 1-ring record. Slot k of a face
/// refers to its edge (v_k, v_{k+1 mod 3}); that order fixes neighbor and
/// angle ordering everywhere downstream.
struct FaceGeometry {
    std::vector<Vec3> normals;
    std::vector<double> areas;
    /// Neighbor face per edge slot. A boundary slot stores the face's own
    /// index (self padding).
    std::vector<std::array<int, 3>> neighbors;
    /// Vertex of the slot's neighbor that is not on the shared edge. For a
    /// self-padded slot, the face's own opposite vertex.
    std::vector<std::array<int, 3>> opposite_vertices;
    /// Angle between this face's normal and the slot neighbor's normal,
    /// radians in [0, pi]. Exactly 0 on self-padded slots.
    std::vector<std::array<double, 3>> dihedral_angles;
};

struct VertexGeometry {
    std::vector<Vec3> normals;               // unit length
    std::vector<double> gaussian_curvature;  // angular deficit / incident area
};

/// Eq. printed denominator (sum of incident triangle areas) vs. the common
/// one-third-area variant, selectable for experimentation.
enum class CurvatureDenominator { full_area_sum, third_area_sum };

/// Normals as normalized (v1-v0)x(v2-v0), areas as half the cross-product
/// magnitude. Throws GeometryError on faces with area below 1e-12.
FaceGeometry face_normals_areas(const Mesh& mesh);

/// Fills neighbors and opposite_vertices from the edge table.
void compute_one_ring(const Mesh& mesh, const EdgeTable& edges, FaceGeometry& fg);

/// Fills dihedral_angles; requires normals and neighbors. Dot products are
/// clamped to [-1,1] before acos.
void compute_dihedral_angles(const Mesh& mesh, FaceGeometry& fg);

/// Area-weighted sum of incident face normals, rescaled to unit length.
/// Throws GeometryError when the weighted sum vanishes (fold-back geometry).
std::vector<Vec3> vertex_normals(const Mesh& mesh, const FaceGeometry& fg);

/// Angular deficit (2*pi - incident angle sum) divided by the incident area
/// sum (or a third of it). Isolated vertices get 0 with a warning.
std::vector<double> gaussian_curvature(const Mesh& mesh, const FaceGeometry& fg,
                                       CurvatureDenominator denom);

struct GeometryOptions {
    CurvatureDenominator curvature = CurvatureDenominator::full_area_sum;
};

struct MeshGeometry {
    FaceGeometry face;
    VertexGeometry vertex;
};

/// Runs the full per-mesh geometry pass in dependency order.
MeshGeometry compute_geometry(const Mesh& mesh, const EdgeTable& edges,
                              const GeometryOptions& options = {});

/// Which feature components to emit, in fixed layout order
/// [P | N_v | GC | N_f | theta] with widths 18/18/6/12/3.
struct FeatureMask {
    bool positions = true;       // P, 18
    bool vertex_normals = true;  // N_v, 18
    bool curvature = true;       // GC, 6
    bool face_normals = true;    // N_f, 12
    bool angles = true;          // theta, 3

    int width() const {
        return (positions ? 18 : 0) + (vertex_normals ? 18 : 0) + (curvature ? 6 : 0) +
               (face_normals ? 12 : 0) + (angles ? 3 : 0);
    }
    bool any() const { return width() > 0; }

    static FeatureMask full() { return {}; }
    /// Parses "P,Nv,GC,Nf,Theta" (case-insensitive, any subset).
    static FeatureMask parse(const std::string& spec);
    std::string to_string() const;

    bool operator==(const FeatureMask&) const = default;
};

/// F x width per-face feature rows. Vertex-indexed components use the order
/// [v0, v1, v2, w0, w1, w2]; face-indexed components use [self, n0, n1, n2].
struct NodeFeatures {
    int rows = 0;
    int width = 0;
    FeatureMask mask;
    std::vector<double> data;  // row-major

    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
};

NodeFeatures assemble_features(const Mesh& mesh, const MeshGeometry& geom,
                               const FeatureMask& mask = {});

}  // namespace mgcn
