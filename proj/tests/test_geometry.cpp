#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "shapes.hpp"
#include "testutil.hpp"

using namespace mgcn;

namespace {

constexpr double kPi = 3.14159265358979323846;

// independent of the geometry module: corner angles straight from positions
std::vector<double> deficit_oracle(const Mesh& mesh) {
    std::vector<double> angle_sum(mesh.vertex_count(), 0.0);
    for (const auto& face : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const Vec3& p = mesh.vertices[face[k]];
            const Vec3& q = mesh.vertices[face[(k + 1) % 3]];
            const Vec3& r = mesh.vertices[face[(k + 2) % 3]];
            Vec3 e1 = q - p;
            Vec3 e2 = r - p;
            double cosv = dot(e1, e2) / (norm(e1) * norm(e2));
            cosv = std::clamp(cosv, -1.0, 1.0);
            angle_sum[face[k]] += std::acos(cosv);
        }
    }
    std::vector<double> deficits(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) deficits[v] = 2.0 * kPi - angle_sum[v];
    return deficits;
}

Vec3 rotate(const Vec3& v, const std::array<std::array<double, 3>, 3>& r) {
    return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
}

// rotation about a (normalized) axis by angle, Rodrigues form
std::array<std::array<double, 3>, 3> rotation_matrix(Vec3 axis, double angle) {
    axis = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    return {{{t * axis.x * axis.x + c, t * axis.x * axis.y - s * axis.z,
              t * axis.x * axis.z + s * axis.y},
             {t * axis.x * axis.y + s * axis.z, t * axis.y * axis.y + c,
              t * axis.y * axis.z - s * axis.x},
             {t * axis.x * axis.z - s * axis.y, t * axis.y * axis.z + s * axis.x,
              t * axis.z * axis.z + c}}};
}

MeshGeometry geometry_of(const Mesh& mesh) {
    return compute_geometry(mesh, build_edge_table(mesh));
}

// three half-unit-area triangles meeting at the origin like a cube corner
Mesh cube_corner_fan() {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}};
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("face normal and area of the unit right triangle") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    FaceGeometry fg = face_normals_areas(m);
    CHECK(testutil::near(fg.normals[0].x, 0.0, 1e-15));
    CHECK(testutil::near(fg.normals[0].y, 0.0, 1e-15));
    CHECK(testutil::near(fg.normals[0].z, 1.0, 1e-15));
    CHECK(testutil::near(fg.areas[0], 0.5, 1e-15));

    m.faces = {{0, 2, 1}};  // swapped winding flips the normal
    FaceGeometry flipped = face_normals_areas(m);
    CHECK(testutil::near(flipped.normals[0].z, -1.0, 1e-15));
}

TEST_CASE("regular tetrahedron of edge 1 has face areas sqrt(3)/4") {
    Mesh tet = shapes::tetrahedron(1.0);
    FaceGeometry fg = face_normals_areas(tet);
    const double expected = std::sqrt(3.0) / 4.0;
    for (double a : fg.areas) CHECK(testutil::near(a, expected, 1e-12));
}

TEST_CASE("degenerate face is rejected with its index") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}, {3, 0, 0}};
    m.faces = {{0, 1, 2}, {0, 3, 4}};  // second face is collinear
    try {
        face_normals_areas(m);
        FAIL("expected GeometryError");
    } catch (const GeometryError& e) {
        CHECK(std::string(e.what()).find("face 1") != std::string::npos);
    }
}

TEST_CASE("vertex normals of a flat fan all point +z") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {-0.5, 1, 0}, {-1, 0, 0}};
    m.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}};
    testutil::WarningCapture warnings;
    MeshGeometry g = geometry_of(m);
    for (const auto& n : g.vertex.normals) {
        CHECK(testutil::near(n.x, 0.0, 1e-12));
        CHECK(testutil::near(n.y, 0.0, 1e-12));
        CHECK(testutil::near(n.z, 1.0, 1e-12));
    }
}

TEST_CASE("cube corner vertex normal is (1,1,1)/sqrt(3)") {
    Mesh m = cube_corner_fan();
    FaceGeometry fg = face_normals_areas(m);
    std::vector<Vec3> normals = vertex_normals(m, fg);
    const double e = 1.0 / std::sqrt(3.0);
    CHECK(testutil::near(normals[0].x, e, 1e-12));
    CHECK(testutil::near(normals[0].y, e, 1e-12));
    CHECK(testutil::near(normals[0].z, e, 1e-12));
    CHECK(testutil::near(norm(normals[0]), 1.0, 1e-12));
}

TEST_CASE("icosphere vertex normals stay within 2 degrees of radial") {
    Mesh sphere = shapes::icosphere(3);
    MeshGeometry g = geometry_of(sphere);
    const double max_angle = 2.0 * kPi / 180.0;
    for (int v = 0; v < sphere.vertex_count(); ++v) {
        double angle = angle_between(g.vertex.normals[v], sphere.vertices[v]);
        CHECK(angle < max_angle);
    }
}

TEST_CASE("all vertex normals have unit length") {
    Rng rng(11);
    Mesh m = shapes::icosphere(2);
    shapes::add_vertex_noise(m, 0.01, rng);
    MeshGeometry g = geometry_of(m);
    for (const auto& n : g.vertex.normals) CHECK(testutil::near(norm(n), 1.0, 1e-9));
}

TEST_CASE("gaussian curvature vanishes at interior vertices of a plane") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0},  {0.5, 1, 0},  {-0.5, 1, 0},
                  {-1, 0, 0}, {-0.5, -1, 0}, {0.5, -1, 0}};
    m.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 6}, {0, 6, 1}};
    FaceGeometry fg = face_normals_areas(m);
    std::vector<double> gc =
        gaussian_curvature(m, fg, CurvatureDenominator::full_area_sum);
    CHECK(testutil::near(gc[0], 0.0, 1e-12));
}

TEST_CASE("cube corner curvature equals deficit over incident area") {
    Mesh m = cube_corner_fan();
    FaceGeometry fg = face_normals_areas(m);
    std::vector<double> gc =
        gaussian_curvature(m, fg, CurvatureDenominator::full_area_sum);
    // three right angles at the corner: deficit pi/2, incident area 3 * 1/2
    CHECK(testutil::near(gc[0], (kPi / 2.0) / 1.5, 1e-12));

    std::vector<double> gc3 =
        gaussian_curvature(m, fg, CurvatureDenominator::third_area_sum);
    CHECK(testutil::near(gc3[0], (kPi / 2.0) / 0.5, 1e-12));
}

TEST_CASE("discrete Gauss-Bonnet holds on closed meshes") {
    for (const Mesh& m : {shapes::tetrahedron(), shapes::icosphere(1), shapes::icosphere(2),
                          shapes::torus(12, 8), shapes::box(2)}) {
        EdgeTable et = build_edge_table(m);
        const int chi = euler_characteristic(m, et);
        std::vector<double> deficits = deficit_oracle(m);
        double total = 0.0;
        for (double d : deficits) total += d;
        CHECK(testutil::near_rel(total, 2.0 * kPi * chi, 1e-9));

        // gaussian_curvature agrees with the oracle: gc * area_sum == deficit
        FaceGeometry fg = face_normals_areas(m);
        std::vector<double> gc =
            gaussian_curvature(m, fg, CurvatureDenominator::full_area_sum);
        std::vector<double> area_sum(m.vertex_count(), 0.0);
        for (int f = 0; f < m.face_count(); ++f)
            for (int v : m.faces[f]) area_sum[v] += fg.areas[f];
        for (int v = 0; v < m.vertex_count(); ++v)
            CHECK(testutil::near(gc[v] * area_sum[v], deficits[v], 1e-9));
    }
}

TEST_CASE("isolated vertex gets zero curvature and a warning") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}};
    m.faces = {{0, 1, 2}};
    testutil::WarningCapture warnings;
    FaceGeometry fg = face_normals_areas(m);
    std::vector<double> gc =
        gaussian_curvature(m, fg, CurvatureDenominator::full_area_sum);
    CHECK(gc[3] == 0.0);
    CHECK(warnings.contains("isolated"));
}

TEST_CASE("one ring of a tetrahedron is the three other faces") {
    Mesh tet = shapes::tetrahedron();
    MeshGeometry g = geometry_of(tet);
    for (int f = 0; f < 4; ++f) {
        std::array<bool, 4> seen{};
        for (int k = 0; k < 3; ++k) {
            int n = g.face.neighbors[f][k];
            CHECK(n != f);
            seen[n] = true;
        }
        int count = 0;
        for (int i = 0; i < 4; ++i) count += seen[i];
        CHECK(count == 3);
    }
}

TEST_CASE("one ring of two triangles identifies the opposite vertex") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    m.faces = {{0, 1, 2}, {1, 3, 2}};
    testutil::WarningCapture warnings;
    MeshGeometry g = geometry_of(m);
    // face 0 slot 1 is edge (v1, v2), shared with face 1; w is face 1's vertex 3
    CHECK(g.face.neighbors[0][1] == 1);
    CHECK(g.face.opposite_vertices[0][1] == 3);
    // boundary slots pad with self and own opposite vertex
    CHECK(g.face.neighbors[0][0] == 0);
    CHECK(g.face.opposite_vertices[0][0] == 2);
}

TEST_CASE("single triangle pads all slots with itself") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.faces = {{0, 1, 2}};
    testutil::WarningCapture warnings;
    MeshGeometry g = geometry_of(m);
    CHECK(g.face.neighbors[0] == std::array<int, 3>{0, 0, 0});
    CHECK(g.face.opposite_vertices[0] == std::array<int, 3>{2, 0, 1});
    for (int k = 0; k < 3; ++k) CHECK(g.face.dihedral_angles[0][k] == 0.0);
}

TEST_CASE("coplanar neighbors have zero dihedral angle") {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    m.faces = {{0, 1, 2}, {1, 3, 2}};
    testutil::WarningCapture warnings;
    MeshGeometry g = geometry_of(m);
    CHECK(testutil::near(g.face.dihedral_angles[0][1], 0.0, 1e-12));
}

TEST_CASE("tetrahedron dihedral angle is arccos(-1/3)") {
    Mesh tet = shapes::tetrahedron();
    MeshGeometry g = geometry_of(tet);
    const double expected = std::acos(-1.0 / 3.0);
    for (int f = 0; f < 4; ++f)
        for (int k = 0; k < 3; ++k)
            CHECK(testutil::near(g.face.dihedral_angles[f][k], expected, 1e-9));
}

TEST_CASE("cube edge dihedral angle is pi/2") {
    Mesh cube = shapes::box(1);
    MeshGeometry g = geometry_of(cube);
    // every slot is either coplanar (same cube side) or across a cube edge
    int right_angles = 0;
    for (int f = 0; f < cube.face_count(); ++f) {
        for (int k = 0; k < 3; ++k) {
            double a = g.face.dihedral_angles[f][k];
            bool coplanar = testutil::near(a, 0.0, 1e-9);
            bool perpendicular = testutil::near(a, kPi / 2.0, 1e-9);
            CHECK((coplanar || perpendicular));
            right_angles += perpendicular;
        }
    }
    CHECK(right_angles > 0);
}

TEST_CASE("dihedral angles are symmetric across the shared edge, exactly") {
    Rng rng(5);
    Mesh m = shapes::icosphere(2);
    shapes::add_vertex_noise(m, 0.02, rng);
    MeshGeometry g = geometry_of(m);
    for (int f = 0; f < m.face_count(); ++f) {
        for (int k = 0; k < 3; ++k) {
            int n = g.face.neighbors[f][k];
            if (n == f) continue;
            int back = -1;
            for (int j = 0; j < 3; ++j)
                if (g.face.neighbors[n][j] == f) back = j;
            REQUIRE(back >= 0);
            CHECK(g.face.dihedral_angles[f][k] == g.face.dihedral_angles[n][back]);
        }
    }
}

TEST_CASE("full feature row layout is [P18|Nv18|GC6|Nf12|Theta3]") {
    Mesh tet = shapes::tetrahedron();
    MeshGeometry g = geometry_of(tet);
    NodeFeatures full = assemble_features(tet, g, FeatureMask::full());
    REQUIRE(full.width == 57);
    REQUIRE(full.rows == 4);

    // P block starts with the face's own vertices in order
    const auto& face = tet.faces[0];
    for (int k = 0; k < 3; ++k) {
        CHECK(full.at(0, 3 * k + 0) == tet.vertices[face[k]].x);
        CHECK(full.at(0, 3 * k + 1) == tet.vertices[face[k]].y);
        CHECK(full.at(0, 3 * k + 2) == tet.vertices[face[k]].z);
    }
    // Nf block leads with the face's own normal
    CHECK(full.at(0, 18 + 18 + 6 + 0) == g.face.normals[0].x);
    // Theta block tail
    CHECK(full.at(0, 54 + 0) == g.face.dihedral_angles[0][0]);
    CHECK(full.at(0, 54 + 2) == g.face.dihedral_angles[0][2]);
}

TEST_CASE("mask widths match the ablation dimension table") {
    CHECK(FeatureMask::parse("Theta").width() == 3);
    CHECK(FeatureMask::parse("GC").width() == 6);
    CHECK(FeatureMask::parse("Nf").width() == 12);
    CHECK(FeatureMask::parse("P").width() == 18);
    CHECK(FeatureMask::parse("Nv").width() == 18);
    CHECK(FeatureMask::parse("Nv,GC,Nf,Theta").width() == 39);
    CHECK(FeatureMask::parse("P,GC,Nf,Theta").width() == 39);
    CHECK(FeatureMask::parse("P,Nv,GC,Theta").width() == 45);
    CHECK(FeatureMask::parse("P,Nv,Nf,Theta").width() == 51);
    CHECK(FeatureMask::parse("P,Nv,GC,Nf").width() == 54);
    CHECK(FeatureMask::parse("P,Nv,GC,Nf,Theta").width() == 57);
}

TEST_CASE("masking preserves relative order of components") {
    Mesh tet = shapes::tetrahedron();
    MeshGeometry g = geometry_of(tet);
    NodeFeatures full = assemble_features(tet, g, FeatureMask::full());
    NodeFeatures masked = assemble_features(tet, g, FeatureMask::parse("GC,Theta"));
    REQUIRE(masked.width == 9);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 6; ++c) CHECK(masked.at(r, c) == full.at(r, 36 + c));
        for (int c = 0; c < 3; ++c) CHECK(masked.at(r, 6 + c) == full.at(r, 54 + c));
    }
}

TEST_CASE("mask parse round-trips and rejects junk") {
    FeatureMask m = FeatureMask::parse("p, nv ,THETA");
    CHECK(m.positions);
    CHECK(m.vertex_normals);
    CHECK(m.angles);
    CHECK(!m.curvature);
    CHECK(FeatureMask::parse(m.to_string()) == m);
    CHECK_THROWS_AS(FeatureMask::parse("P,banana"), ConfigError);
    CHECK_THROWS_AS(FeatureMask::parse(""), ConfigError);
}

TEST_CASE("features are finite on assorted valid meshes") {
    Rng rng(17);
    std::vector<Mesh> meshes = {shapes::icosphere(2), shapes::box(3), shapes::cylinder(12, 6),
                                shapes::torus(10, 6)};
    for (Mesh& m : meshes) {
        shapes::add_vertex_noise(m, 0.01, rng);
        MeshGeometry g = geometry_of(m);
        NodeFeatures nf = assemble_features(m, g, FeatureMask::full());
        for (double v : nf.data) CHECK(std::isfinite(v));
    }
}

TEST_CASE("rotation rotates P/Nv/Nf blocks and fixes GC/Theta") {
    Rng rng(23);
    Mesh m = shapes::icosphere(1);
    shapes::add_vertex_noise(m, 0.02, rng);

    auto r = rotation_matrix({1.0, 2.0, 0.5}, 1.1);
    Mesh rotated = m;
    for (auto& v : rotated.vertices) v = rotate(v, r);

    NodeFeatures base = assemble_features(m, geometry_of(m), FeatureMask::full());
    NodeFeatures rot = assemble_features(rotated, geometry_of(rotated), FeatureMask::full());

    for (int row = 0; row < base.rows; ++row) {
        // vector-valued blocks rotate triple by triple: P (6), Nv (6), Nf (4)
        for (int t = 0; t < 16; ++t) {
            int offset = t < 12 ? 3 * t : 42 + 3 * (t - 12);
            Vec3 v{base.at(row, offset), base.at(row, offset + 1), base.at(row, offset + 2)};
            Vec3 expect = rotate(v, r);
            CHECK(testutil::near(rot.at(row, offset + 0), expect.x, 1e-9));
            CHECK(testutil::near(rot.at(row, offset + 1), expect.y, 1e-9));
            CHECK(testutil::near(rot.at(row, offset + 2), expect.z, 1e-9));
        }
        // scalar blocks GC [36,42) and Theta [54,57) are invariant
        for (int c = 36; c < 42; ++c)
            CHECK(testutil::near(rot.at(row, c), base.at(row, c), 1e-9));
        for (int c = 54; c < 57; ++c)
            CHECK(testutil::near(rot.at(row, c), base.at(row, c), 1e-9));
    }
}

TEST_SUITE_END();
