#include "mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace mgcn {

namespace {

[[noreturn]] void fail_line(const std::string& name, int line, const std::string& what) {
    throw ParseError((name.empty() ? std::string("<stream>") : name) + ":" +
                     std::to_string(line) + ": " + what);
}

// First integer of an OBJ face token ("7", "7/1", "7//3", "7/1/3").
int obj_face_index(const std::string& token, const std::string& name, int line) {
    std::size_t end = token.find('/');
    std::string head = token.substr(0, end);
    int value = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
    if (ec != std::errc() || ptr != head.data() + head.size())
        fail_line(name, line, "bad face index '" + token + "'");
    if (value <= 0) fail_line(name, line, "face indices must be positive 1-based, got '" + token + "'");
    return value - 1;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Mesh parse_obj(std::istream& in, const std::string& name) {
    Mesh mesh;
    mesh.name = name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) fail_line(name, lineno, "malformed vertex record");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ls >> token) idx.push_back(obj_face_index(token, name, lineno));
            if (idx.size() < 3) fail_line(name, lineno, "face with fewer than 3 vertices");
            if (idx.size() > 3)
                throw TopologyError((name.empty() ? std::string("<stream>") : name) + ":" +
                                    std::to_string(lineno) + ": unsupported topology: face with " +
                                    std::to_string(idx.size()) + " vertices (triangles only)");
            mesh.faces.push_back({idx[0], idx[1], idx[2]});
        }
        // vn, vt, usemtl, g, o, s, mtllib and comments are ignored
    }
    validate_mesh(mesh);
    return mesh;
}

Mesh parse_off(std::istream& in, const std::string& name) {
    std::string line;
    int lineno = 0;
    auto next_content_line = [&](const char* what) -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos || line[start] == '#') continue;
            std::size_t stop = line.find_last_not_of(" \t\r");
            return line.substr(start, stop - start + 1);
        }
        fail_line(name, lineno, std::string("unexpected end of file, expected ") + what);
    };

    if (next_content_line("OFF header") != "OFF") fail_line(name, lineno, "missing OFF header");

    std::istringstream counts(next_content_line("counts line"));
    long nv = 0, nf = 0, ne = 0;
    if (!(counts >> nv >> nf >> ne) || nv < 0 || nf < 0)
        fail_line(name, lineno, "malformed counts line");

    Mesh mesh;
    mesh.name = name;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        std::istringstream vs(next_content_line("vertex"));
        Vec3 p;
        if (!(vs >> p.x >> p.y >> p.z)) fail_line(name, lineno, "malformed vertex line");
        mesh.vertices.push_back(p);
    }
    mesh.faces.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        std::istringstream fs(next_content_line("face"));
        int n = 0;
        if (!(fs >> n)) fail_line(name, lineno, "malformed face line");
        if (n != 3)
            throw TopologyError((name.empty() ? std::string("<stream>") : name) + ":" +
                                std::to_string(lineno) + ": unsupported topology: face with " +
                                std::to_string(n) + " vertices (triangles only)");
        std::array<int, 3> f{};
        if (!(fs >> f[0] >> f[1] >> f[2])) fail_line(name, lineno, "malformed face line");
        mesh.faces.push_back(f);
    }
    validate_mesh(mesh);
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    std::string lower = path;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.ends_with(".obj")) return parse_obj(in, path);
    if (lower.ends_with(".off")) return parse_off(in, path);
    throw IoError("unsupported mesh format (expected .obj or .off): " + path);
}

void write_obj(const Mesh& mesh, std::ostream& out) {
    if (!mesh.name.empty()) out << "# " << mesh.name << "\n";
    for (const auto& v : mesh.vertices)
        out << "v " << format_double(v.x) << " " << format_double(v.y) << " "
            << format_double(v.z) << "\n";
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

void write_obj_file(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file: " + path);
    write_obj(mesh, out);
}

void write_ply_face_colors(const Mesh& mesh, const std::vector<Rgb>& face_colors,
                           std::ostream& out) {
    if (static_cast<int>(face_colors.size()) != mesh.face_count())
        throw ShapeError("face color count " + std::to_string(face_colors.size()) +
                         " does not match face count " + std::to_string(mesh.face_count()));
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.face_count() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    for (const auto& v : mesh.vertices)
        out << format_double(v.x) << " " << format_double(v.y) << " " << format_double(v.z)
            << "\n";
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& face = mesh.faces[f];
        const auto& c = face_colors[f];
        out << "3 " << face[0] << " " << face[1] << " " << face[2] << " " << int(c.r) << " "
            << int(c.g) << " " << int(c.b) << "\n";
    }
}

void write_ply_face_colors_file(const Mesh& mesh, const std::vector<Rgb>& face_colors,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write PLY file: " + path);
    write_ply_face_colors(mesh, face_colors, out);
}

}  // namespace mgcn
