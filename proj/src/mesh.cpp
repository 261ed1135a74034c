#include "mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "error.hpp"
#include "log.hpp"

namespace mgcn {

int EdgeTable::boundary_edge_count() const {
    int n = 0;
    for (const auto& e : edges)
        if (e.boundary()) ++n;
    return n;
}

void validate_mesh(const Mesh& mesh) {
    const int nv = mesh.vertex_count();
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (face[k] < 0 || face[k] >= nv)
                throw TopologyError("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(face[k]) + " outside [0, " +
                                    std::to_string(nv) + ")");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw TopologyError("face " + std::to_string(f) + " repeats a vertex");
    }
}

EdgeTable build_edge_table(const Mesh& mesh) {
    validate_mesh(mesh);

    struct Incidence {
        int f0 = -1;
        int f1 = -1;
    };
    auto key_of = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    };

    std::unordered_map<std::uint64_t, Incidence> incidence;
    incidence.reserve(mesh.faces.size() * 2);
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            int a = face[k];
            int b = face[(k + 1) % 3];
            auto& inc = incidence[key_of(a, b)];
            if (inc.f0 < 0) {
                inc.f0 = f;
            } else if (inc.f1 < 0) {
                inc.f1 = f;
            } else {
                if (a > b) std::swap(a, b);
                throw TopologyError("non-manifold edge (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ") shared by more than 2 faces");
            }
        }
    }

    EdgeTable table;
    table.edges.reserve(incidence.size());
    for (const auto& [key, inc] : incidence) {
        EdgeTable::Edge e;
        e.v0 = static_cast<int>(key >> 32);
        e.v1 = static_cast<int>(key & 0xffffffffu);
        e.f0 = inc.f0;
        e.f1 = inc.f1;
        table.edges.push_back(e);
    }
    std::sort(table.edges.begin(), table.edges.end(), [](const auto& a, const auto& b) {
        return std::make_pair(a.v0, a.v1) < std::make_pair(b.v0, b.v1);
    });

    std::unordered_map<std::uint64_t, int> edge_id;
    edge_id.reserve(table.edges.size());
    for (int i = 0; i < table.edge_count(); ++i)
        edge_id[key_of(table.edges[i].v0, table.edges[i].v1)] = i;

    table.face_edges.resize(mesh.faces.size());
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k)
            table.face_edges[f][k] = edge_id.at(key_of(face[k], face[(k + 1) % 3]));
    }

    if (int nb = table.boundary_edge_count(); nb > 0)
        log_warn("mesh '" + mesh.name + "' is not watertight: " + std::to_string(nb) +
                 " boundary edges; neighbor slots will be self-padded");
    return table;
}

Mesh normalize_mesh(const Mesh& mesh) {
    if (mesh.vertices.empty()) throw GeometryError("cannot normalize an empty mesh");

    Vec3 centroid;
    for (const auto& v : mesh.vertices) centroid += v;
    centroid = centroid / static_cast<double>(mesh.vertices.size());

    double max_r = 0.0;
    for (const auto& v : mesh.vertices) max_r = std::max(max_r, norm(v - centroid));
    if (max_r < 1e-12)
        throw GeometryError("degenerate geometry: all vertices of '" + mesh.name +
                            "' coincide");

    Mesh out = mesh;
    const double inv = 1.0 / max_r;
    for (auto& v : out.vertices) v = (v - centroid) * inv;
    return out;
}

int euler_characteristic(const Mesh& mesh, const EdgeTable& edges) {
    return mesh.vertex_count() - edges.edge_count() + mesh.face_count();
}

}  // namespace mgcn
