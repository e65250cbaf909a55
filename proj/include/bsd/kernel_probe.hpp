#pragma once

#include <string>
#include <vector>

#include "bsd/divcurl.hpp"

namespace bsd {

/// Free-space Biot-Savart kernel action: w x (x - y) / (4 pi |x - y|^3).
/// This is exactly the integrand summed by bs_volume.
Vec3 k1_eval(const Vec3& x, const Vec3& y, const Vec3& w);

/// Compactly supported solenoidal probe: curl of chi(|x - c|) z_hat with the
/// bump chi(r) = (1 - (r/eps)^2)^3, scaled so the ring circulation (the flux
/// of the azimuthal vorticity through a meridian half-plane) is 1.
VolumeField vortex_ring(const DomainModel& model, const Vec3& center, double eps);

/// The same field as a closed-form function (zero outside the bump); usable
/// as the analytic trace of the sampled field.
Vec3 vortex_ring_value(const Vec3& center, double eps, const Vec3& x);

struct ProbeReport {
  Vec3 y;
  std::vector<double> distances;  // strictly increasing
  std::vector<double> responses;  // |u(x)| * 4 pi (unit ring circulation)
  double fitted_slope = 0.0;      // log-log least squares
  double ell_y = 0.0;

  void write_csv(const std::string& path) const;
};

/// Solves the tangential problem for a unit-circulation ring at y and
/// records the far-field response against distance; the slope probes the
/// inverse-square kernel bound.
ProbeReport probe_decay(const DomainModel& model, const Vec3& y, double eps,
                        const std::vector<Vec3>& x_list);

/// (-x2, x1, 0) / (x1^2 + x2^2): curl- and divergence-free away from the
/// z axis and tangent to every surface of revolution around it; spans the
/// harmonic space of a solid torus. Throws OnAxis on the axis.
Vec3 torus_harmonic_field(const Vec3& x);

}  // namespace bsd
