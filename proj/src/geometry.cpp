#include "geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "log.hpp"

namespace mgcn {

FaceGeometry face_normals_areas(const Mesh& mesh) {
    validate_mesh(mesh);
    FaceGeometry fg;
    const int nf = mesh.face_count();
    fg.normals.resize(nf);
    fg.areas.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& face = mesh.faces[f];
        Vec3 c = cross(mesh.vertices[face[1]] - mesh.vertices[face[0]],
                       mesh.vertices[face[2]] - mesh.vertices[face[0]]);
        double len = norm(c);
        double area = 0.5 * len;
        if (area < 1e-12)
            throw GeometryError("degenerate face " + std::to_string(f) + " (area " +
                                std::to_string(area) + " < 1e-12)");
        fg.normals[f] = c / len;
        fg.areas[f] = area;
    }
    return fg;
}

void compute_one_ring(const Mesh& mesh, const EdgeTable& edges, FaceGeometry& fg) {
    const int nf = mesh.face_count();
    fg.neighbors.assign(nf, {-1, -1, -1});
    fg.opposite_vertices.assign(nf, {-1, -1, -1});

    auto vertex_opposite = [&](int face, int a, int b) {
        for (int v : mesh.faces[face])
            if (v != a && v != b) return v;
        return mesh.faces[face][0];  // unreachable on a valid face
    };

    for (int f = 0; f < nf; ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            const auto& e = edges.edges[edges.face_edges[f][k]];
            int a = face[k];
            int b = face[(k + 1) % 3];
            int neighbor = (e.f0 == f) ? e.f1 : e.f0;
            if (neighbor < 0) neighbor = f;  // boundary: pad with self
            fg.neighbors[f][k] = neighbor;
            fg.opposite_vertices[f][k] = vertex_opposite(neighbor, a, b);
        }
    }
}

void compute_dihedral_angles(const Mesh& mesh, FaceGeometry& fg) {
    const int nf = mesh.face_count();
    fg.dihedral_angles.assign(nf, {0.0, 0.0, 0.0});
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            int g = fg.neighbors[f][k];
            if (g == f) continue;  // self-padded slot stays exactly 0
            double d = dot(fg.normals[f], fg.normals[g]);
            if (d > 1.0) d = 1.0;
            if (d < -1.0) d = -1.0;
            fg.dihedral_angles[f][k] = std::acos(d);
        }
    }
}

std::vector<Vec3> vertex_normals(const Mesh& mesh, const FaceGeometry& fg) {
    std::vector<Vec3> sums(mesh.vertex_count());
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int v : mesh.faces[f]) sums[v] += fg.normals[f] * fg.areas[f];

    for (int v = 0; v < mesh.vertex_count(); ++v) {
        double len = norm(sums[v]);
        if (len < 1e-12)
            throw GeometryError("degenerate vertex normal at vertex " + std::to_string(v) +
                                " (area-weighted normals cancel)");
        sums[v] = sums[v] / len;
    }
    return sums;
}

std::vector<double> gaussian_curvature(const Mesh& mesh, const FaceGeometry& fg,
                                       CurvatureDenominator denom) {
    const int nv = mesh.vertex_count();
    std::vector<double> angle_sum(nv, 0.0);
    std::vector<double> area_sum(nv, 0.0);
    std::vector<int> incident(nv, 0);

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            int i = face[k];
            const Vec3& p = mesh.vertices[i];
            const Vec3& q = mesh.vertices[face[(k + 1) % 3]];
            const Vec3& r = mesh.vertices[face[(k + 2) % 3]];
            angle_sum[i] += angle_between(q - p, r - p);
            area_sum[i] += fg.areas[f];
            incident[i] += 1;
        }
    }

    std::vector<double> gc(nv, 0.0);
    int isolated = 0;
    for (int v = 0; v < nv; ++v) {
        if (incident[v] == 0) {
            ++isolated;
            continue;
        }
        double area = area_sum[v];
        if (denom == CurvatureDenominator::third_area_sum) area /= 3.0;
        gc[v] = (2.0 * 3.14159265358979323846 - angle_sum[v]) / area;
    }
    if (isolated > 0)
        log_warn("mesh '" + mesh.name + "': " + std::to_string(isolated) +
                 " isolated vertices, curvature set to 0");
    return gc;
}

MeshGeometry compute_geometry(const Mesh& mesh, const EdgeTable& edges,
                              const GeometryOptions& options) {
    MeshGeometry g;
    g.face = face_normals_areas(mesh);
    compute_one_ring(mesh, edges, g.face);
    compute_dihedral_angles(mesh, g.face);
    g.vertex.normals = vertex_normals(mesh, g.face);
    g.vertex.gaussian_curvature = gaussian_curvature(mesh, g.face, options.curvature);
    return g;
}

FeatureMask FeatureMask::parse(const std::string& spec) {
    FeatureMask mask{false, false, false, false, false};
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::string token;
        for (char c : part)
            if (!std::isspace(static_cast<unsigned char>(c)))
                token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (token.empty()) continue;
        if (token == "p")
            mask.positions = true;
        else if (token == "nv")
            mask.vertex_normals = true;
        else if (token == "gc")
            mask.curvature = true;
        else if (token == "nf")
            mask.face_normals = true;
        else if (token == "theta")
            mask.angles = true;
        else
            throw ConfigError("unknown feature component '" + part +
                              "' (expected P, Nv, GC, Nf, Theta)");
    }
    if (!mask.any()) throw ConfigError("feature mask selects no components: '" + spec + "'");
    return mask;
}

std::string FeatureMask::to_string() const {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += ",";
        out += name;
    };
    if (positions) add("P");
    if (vertex_normals) add("Nv");
    if (curvature) add("GC");
    if (face_normals) add("Nf");
    if (angles) add("Theta");
    return out;
}

NodeFeatures assemble_features(const Mesh& mesh, const MeshGeometry& geom,
                               const FeatureMask& mask) {
    const int nf = mesh.face_count();
    NodeFeatures out;
    out.rows = nf;
    out.width = mask.width();
    out.mask = mask;
    out.data.resize(static_cast<std::size_t>(nf) * out.width);

    const auto& fg = geom.face;
    const auto& vg = geom.vertex;

    for (int f = 0; f < nf; ++f) {
        double* row = out.data.data() + static_cast<std::size_t>(f) * out.width;
        int c = 0;
        const auto& face = mesh.faces[f];
        const std::array<int, 6> ring_vertices = {face[0],
                                                  face[1],
                                                  face[2],
                                                  fg.opposite_vertices[f][0],
                                                  fg.opposite_vertices[f][1],
                                                  fg.opposite_vertices[f][2]};
        const std::array<int, 4> ring_faces = {f, fg.neighbors[f][0], fg.neighbors[f][1],
                                               fg.neighbors[f][2]};
        if (mask.positions) {
            for (int v : ring_vertices) {
                const Vec3& p = mesh.vertices[v];
                row[c++] = p.x;
                row[c++] = p.y;
                row[c++] = p.z;
            }
        }
        if (mask.vertex_normals) {
            for (int v : ring_vertices) {
                const Vec3& n = vg.normals[v];
                row[c++] = n.x;
                row[c++] = n.y;
                row[c++] = n.z;
            }
        }
        if (mask.curvature) {
            for (int v : ring_vertices) row[c++] = vg.gaussian_curvature[v];
        }
        if (mask.face_normals) {
            for (int g : ring_faces) {
                const Vec3& n = fg.normals[g];
                row[c++] = n.x;
                row[c++] = n.y;
                row[c++] = n.z;
            }
        }
        if (mask.angles) {
            for (int k = 0; k < 3; ++k) row[c++] = fg.dihedral_angles[f][k];
        }
    }
    return out;
}

}  // namespace mgcn
