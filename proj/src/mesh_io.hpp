#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mesh.hpp"

namespace mgcn {

/// Reads Wavefront OBJ. `v` and `f` records only; vt/vn/usemtl/comments are
/// ignored. Faces must be triangles and use positive 1-based indices
/// (converted to 0-based). Throws ParseError with a line number on malformed
/// input and TopologyError on polygons with more than three vertices.
Mesh parse_obj(std::istream& in, const std::string& name = "");

/// Reads ASCII OFF: "OFF" header, counts line, vertices, faces. Throws
/// ParseError on count mismatches, TopologyError on non-triangles.
Mesh parse_off(std::istream& in, const std::string& name = "");

/// Dispatches on extension (.obj / .off, case-insensitive).
Mesh load_mesh(const std::string& path);

void write_obj(const Mesh& mesh, std::ostream& out);
void write_obj_file(const Mesh& mesh, const std::string& path);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// ASCII PLY with one uchar RGB property triple per face.
void write_ply_face_colors(const Mesh& mesh, const std::vector<Rgb>& face_colors,
                           std::ostream& out);
void write_ply_face_colors_file(const Mesh& mesh, const std::vector<Rgb>& face_colors,
                                const std::string& path);

}  // namespace mgcn
