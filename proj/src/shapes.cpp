#include "shapes.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "error.hpp"

namespace mgcn::shapes {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Mesh tetrahedron(double edge_length) {
    // Vertices of a regular tetrahedron with edge length 2*sqrt(2).
    Mesh m;
    m.name = "tetrahedron";
    const double s = edge_length / (2.0 * std::sqrt(2.0));
    m.vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    m.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};  // outward winding
    return m;
}

Mesh icosahedron() {
    Mesh m;
    m.name = "icosahedron";
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    m.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                  {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                  {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices) v = normalized(v);
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

Mesh icosphere(int level) {
    if (level < 0) throw ConfigError("icosphere level must be >= 0");
    Mesh m = icosahedron();
    for (int l = 0; l < level; ++l) {
        std::unordered_map<std::uint64_t, int> midpoint;
        auto mid = [&](int a, int b) {
            std::uint64_t key = a < b
                                    ? (static_cast<std::uint64_t>(a) << 32) | std::uint32_t(b)
                                    : (static_cast<std::uint64_t>(b) << 32) | std::uint32_t(a);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = normalized((m.vertices[a] + m.vertices[b]) * 0.5);
            m.vertices.push_back(p);
            int id = m.vertex_count() - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.faces.size() * 4);
        for (const auto& f : m.faces) {
            int ab = mid(f[0], f[1]);
            int bc = mid(f[1], f[2]);
            int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    m.name = "icosphere" + std::to_string(level);
    return m;
}

Mesh box(int segments) {
    if (segments < 1) throw ConfigError("box segments must be >= 1");
    const int n = segments;
    Mesh m;
    m.name = "box" + std::to_string(n);

    // Lattice points (i,j,k) on the cube surface, welded across face seams.
    std::map<std::array<int, 3>, int> ids;
    auto vertex_at = [&](int i, int j, int k) {
        auto it = ids.find({i, j, k});
        if (it != ids.end()) return it->second;
        m.vertices.push_back({-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, -1.0 + 2.0 * k / n});
        int id = m.vertex_count() - 1;
        ids.emplace(std::array<int, 3>{i, j, k}, id);
        return id;
    };

    // axis = fixed coordinate; positive side uses (u,v) in cyclic order so
    // cross(du, dv) points outward, negative side swaps them.
    auto emit_side = [&](int axis, bool positive) {
        int ua = (axis + 1) % 3;
        int va = (axis + 2) % 3;
        if (!positive) std::swap(ua, va);
        auto lattice = [&](int u, int v) {
            std::array<int, 3> p{};
            p[axis] = positive ? n : 0;
            p[ua] = u;
            p[va] = v;
            return vertex_at(p[0], p[1], p[2]);
        };
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) {
                int p00 = lattice(u, v);
                int p10 = lattice(u + 1, v);
                int p11 = lattice(u + 1, v + 1);
                int p01 = lattice(u, v + 1);
                m.faces.push_back({p00, p10, p11});
                m.faces.push_back({p00, p11, p01});
            }
        }
    };
    for (int axis = 0; axis < 3; ++axis) {
        emit_side(axis, true);
        emit_side(axis, false);
    }
    return m;
}

Mesh cylinder(int segments, int stacks) {
    if (segments < 3 || stacks < 1) throw ConfigError("cylinder needs segments >= 3, stacks >= 1");
    Mesh m;
    m.name = "cylinder";
    for (int j = 0; j <= stacks; ++j) {
        double z = -1.0 + 2.0 * j / stacks;
        for (int i = 0; i < segments; ++i) {
            double th = 2.0 * kPi * i / segments;
            m.vertices.push_back({std::cos(th), std::sin(th), z});
        }
    }
    auto ring = [&](int i, int j) { return j * segments + (i % segments); };
    for (int j = 0; j < stacks; ++j) {
        for (int i = 0; i < segments; ++i) {
            int p00 = ring(i, j);
            int p10 = ring(i + 1, j);
            int p11 = ring(i + 1, j + 1);
            int p01 = ring(i, j + 1);
            m.faces.push_back({p00, p10, p11});
            m.faces.push_back({p00, p11, p01});
        }
    }
    int bottom_center = m.vertex_count();
    m.vertices.push_back({0, 0, -1});
    int top_center = m.vertex_count();
    m.vertices.push_back({0, 0, 1});
    for (int i = 0; i < segments; ++i) {
        m.faces.push_back({bottom_center, ring(i + 1, 0), ring(i, 0)});
        m.faces.push_back({top_center, ring(i, stacks), ring(i + 1, stacks)});
    }
    return m;
}

Mesh torus(int major_segments, int minor_segments, double minor_radius) {
    if (major_segments < 3 || minor_segments < 3)
        throw ConfigError("torus needs at least 3 segments in each direction");
    Mesh m;
    m.name = "torus";
    for (int i = 0; i < major_segments; ++i) {
        double th = 2.0 * kPi * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            double ph = 2.0 * kPi * j / minor_segments;
            double rad = 1.0 + minor_radius * std::cos(ph);
            m.vertices.push_back(
                {rad * std::cos(th), rad * std::sin(th), minor_radius * std::sin(ph)});
        }
    }
    auto at = [&](int i, int j) {
        return (i % major_segments) * minor_segments + (j % minor_segments);
    };
    for (int i = 0; i < major_segments; ++i) {
        for (int j = 0; j < minor_segments; ++j) {
            int p00 = at(i, j);
            int p10 = at(i + 1, j);
            int p11 = at(i + 1, j + 1);
            int p01 = at(i, j + 1);
            m.faces.push_back({p00, p10, p11});
            m.faces.push_back({p00, p11, p01});
        }
    }
    return m;
}

void add_vertex_noise(Mesh& mesh, double amplitude, Rng& rng) {
    for (auto& v : mesh.vertices) {
        v.x += amplitude * rng.normal();
        v.y += amplitude * rng.normal();
        v.z += amplitude * rng.normal();
    }
}

}  // namespace mgcn::shapes
