#pragma once

#include <array>
#include <string>
#include <vector>

#include "bsd/vec3.hpp"

namespace bsd {

/// Closed, oriented, manifold triangle surface with per-panel derived data.
/// Construction validates manifoldness, closedness and panel quality, makes
/// the winding consistent per component and orients all normals outward of
/// the enclosed domain (inner cavity boundaries point into the cavity).
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  // per panel
  std::vector<Vec3> centroids;
  std::vector<Vec3> normals;        // unit, outward of the domain
  std::vector<double> areas;
  std::vector<int> component_id;
  std::vector<double> mean_curvature;             // neighbor-dip estimate
  std::vector<std::array<int, 3>> edge_neighbors;

  int num_components = 0;
  std::vector<double> component_areas;
  std::vector<double> component_signed_volumes;   // sum is Vol(domain)

  int panel_count() const { return static_cast<int>(triangles.size()); }
  double total_area() const;
  double enclosed_volume() const;  // Sum (centroid.normal)*area / 3
  /// || Sum normal*area || per component, relative to component area.
  std::vector<double> closure_residuals() const;

  double panel_diameter(int p) const;
  void panel_vertices(int p, Vec3& a, Vec3& b, Vec3& c) const;
};

/// Validates and orients a raw vertex/triangle soup. Throws NonManifold,
/// OpenSurface or DegeneratePanel.
SurfaceMesh build_surface(std::vector<Vec3> vertices,
                          std::vector<std::array<int, 3>> triangles,
                          double closure_tol = 1e-8);

/// Reads an ASCII OFF or OBJ (v/f records, triangles only) file.
SurfaceMesh load_surface(const std::string& path);

/// Exact unsigned distance from x to the triangle soup.
double distance_to_surface(const SurfaceMesh& mesh, const Vec3& x);

/// Squared distance from p to the closed triangle (a, b, c).
double point_triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b,
                                const Vec3& c);

/// Parity-based inside test (robust to edge grazing via direction retries).
bool point_inside(const SurfaceMesh& mesh, const Vec3& x);

}  // namespace bsd
