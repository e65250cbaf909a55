#pragma once

#include <functional>
#include <vector>

#include "bsd/domain.hpp"
#include "bsd/vec3.hpp"

namespace bsd {

/// Vector samples aligned with the volume quadrature nodes.
struct VolumeField {
  std::vector<Vec3> samples;

  VolumeField() = default;
  explicit VolumeField(std::vector<Vec3> s) : samples(std::move(s)) {}
  static VolumeField zeros(int n) { return VolumeField(std::vector<Vec3>(n)); }
  static VolumeField sample(const VolumeQuadrature& quad,
                            const std::function<Vec3(const Vec3&)>& f);

  int size() const { return static_cast<int>(samples.size()); }
  double sup_norm() const;
  /// Indices of nonzero samples (for compactly supported fields).
  std::vector<int> support() const;
};

/// Free-space Biot-Savart volume integral
///   w(x) = Sum_nodes weight * F(y) x (x - y) / (4 pi |x - y|^3),
/// a node coinciding with x within h/10 is skipped (odd kernel), nodes
/// within 2h are re-integrated over a 4^3 subdivision of their voxel.
Vec3 bs_volume(const DomainModel& model, const VolumeField& field, const Vec3& x);

/// Same restricted to a support index list (identical arithmetic on it).
Vec3 bs_volume_support(const DomainModel& model, const VolumeField& field,
                       const std::vector<int>& support, const Vec3& x);

/// A^axis(x) = int nu_axis(y) (x - y) / (4 pi |x - y|^3) dsigma(y); the
/// bounded boundary field in the principal-value derivative formula.
Vec3 a_field(const DomainModel& model, const Vec3& x, int axis);

/// Gradient of the Biot-Savart field at an interior point (margin 2h):
/// entry (j, k) is d_j w_k. The strong singularity is handled as a
/// principal value by excluding the ball |x - y| < 2h (the traceless kernel
/// integrates to zero over it against the local value of F) plus the
/// boundary correction -eps_{klm} F_l(x) A^j_m(x); F(x) is the nearest
/// node's sample.
Mat3 bs_gradient_pv(const DomainModel& model, const VolumeField& field,
                    const Vec3& x);

/// Residual of the curl identity
///   curl w = F + grad int div F / (4 pi |x-y|) dy
///              - grad int F.nu / (4 pi |x-y|) dsigma(y)
/// with the gradients taken by central differences of step h/4.
Vec3 curl_identity_residual(const DomainModel& model, const VolumeField& field,
                            const std::vector<double>& div_field, const Vec3& x);

/// Nearest-node sample lookup (fields are smooth at this resolution).
Vec3 nearest_sample(const DomainModel& model, const VolumeField& field,
                    const Vec3& x);
int nearest_node(const DomainModel& model, const Vec3& x);

/// Volume Newton-kernel sum: Sum_nodes w * s(y) / (4 pi |x - y|), with the
/// same 4^3 near-field subcell refinement as bs_volume.
double volume_potential(const DomainModel& model,
                        const std::vector<double>& samples, const Vec3& x);

/// Its analytic gradient: -Sum_nodes w * s(y) (x - y) / (4 pi |x - y|^3).
Vec3 volume_potential_grad(const DomainModel& model,
                           const std::vector<double>& samples, const Vec3& x);

}  // namespace bsd
