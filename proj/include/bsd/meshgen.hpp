#pragma once

#include "bsd/mesh.hpp"

namespace bsd {

/// Subdivided icosahedron projected to the sphere |x - center| = radius.
/// subdivisions = 3 gives 642 vertices / 1280 triangles.
SurfaceMesh make_icosphere(int subdivisions, double radius = 1.0,
                           const Vec3& center = {0, 0, 0});

/// Torus of revolution about the z axis. Rings are offset by half an
/// azimuthal step ("zigzag" bands), so every triangle is mirror-symmetric
/// about a meridian plane and its normal has no azimuthal component.
SurfaceMesh make_torus(double major_radius, double minor_radius,
                       int n_major, int n_minor);

/// Genus-2 block: an extruded rectangle with two rectangular through-holes.
SurfaceMesh make_genus2_block();

/// Spherical shell boundary: concentric icospheres (both oriented outward
/// of the shell domain by build_surface).
SurfaceMesh make_shell(int outer_subdiv, double outer_radius,
                       int inner_subdiv, double inner_radius);

}  // namespace bsd
