#pragma once

#include "mesh.hpp"
#include "rng.hpp"

namespace mgcn::shapes {

/// Regular tetrahedron with the given edge length, centered at the origin.
Mesh tetrahedron(double edge_length = 1.0);

/// Regular icosahedron inscribed in the unit sphere.
Mesh icosahedron();

/// Icosahedron subdivided `level` times, vertices projected to the unit
/// sphere. 20 * 4^level faces.
Mesh icosphere(int level);

/// Axis-aligned cube [-1,1]^3 with `segments` quads per edge, welded into a
/// closed manifold. 12 * segments^2 faces.
Mesh box(int segments = 1);

/// Capped cylinder of radius 1, z in [-1,1]. 2*segments*stacks side faces
/// plus 2*segments cap faces.
Mesh cylinder(int segments, int stacks);

/// Torus with major radius 1. 2 * major_segments * minor_segments faces,
/// Euler characteristic 0.
Mesh torus(int major_segments, int minor_segments, double minor_radius = 0.35);

/// Gaussian jitter on every vertex component. Amplitude is in model units.
void add_vertex_noise(Mesh& mesh, double amplitude, Rng& rng);

}  // namespace mgcn::shapes
