#pragma once

#include <memory>
#include <vector>

#include "bsd/mesh.hpp"
#include "bsd/vec3.hpp"

namespace bsd {

/// Interior midpoint-rule quadrature on an axis-aligned voxel grid.
/// Every node keeps a clearance of at least h/2 from the boundary.
struct VolumeQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // h^3 each
  double h = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;
};

/// The discrete domain: boundary mesh, interior quadrature and topology.
struct DomainModel {
  SurfaceMesh surface;
  VolumeQuadrature volume;
  std::vector<int> genus_per_component;
  int harmonic_dim = 0;

  double diameter() const;  // bounding-box diagonal of the surface
};

/// Keeps a cell iff its center is strictly deeper than h/2 inside the
/// surface (ties excluded). Throws EmptyQuadrature if nothing survives.
VolumeQuadrature voxelize(const SurfaceMesh& surface, double h);

DomainModel make_domain(SurfaceMesh surface, double h);

/// Negative inside, positive outside, |value| is the exact distance to the
/// triangle soup.
double signed_distance(const DomainModel& model, const Vec3& x);

/// log(2 + 1/dist(y, boundary)) for y strictly inside; throws OutsideDomain.
double ell(const DomainModel& model, const Vec3& y);

/// Flux of a panel-sampled vector field through each boundary component:
/// flux_j = Sum_{panels in component j} (sample . normal) * area.
std::vector<double> component_flux(const DomainModel& model,
                                   const std::vector<Vec3>& panel_samples);

/// Same for panel-sampled normal traces (scalar per panel).
std::vector<double> component_flux_scalar(const DomainModel& model,
                                          const std::vector<double>& normal_trace);

}  // namespace bsd
