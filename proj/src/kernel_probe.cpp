#include "bsd/kernel_probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bsd/errors.hpp"

namespace bsd {

namespace {
constexpr double kPi = 3.14159265358979323846;

// chi(r) = A (1 - (r/eps)^2)^3 with A = 35/(32 eps), so that the meridian
// circulation 2 int_0^eps chi dr equals 1.
double bump_amplitude(double eps) { return 35.0 / (32.0 * eps); }
}  // namespace

Vec3 k1_eval(const Vec3& x, const Vec3& y, const Vec3& w) {
  const Vec3 d = x - y;
  const double r2 = d.norm2();
  if (r2 == 0.0) throw CoincidentPoints("k1_eval: x == y");
  return cross(w, d) / (4.0 * kPi * r2 * std::sqrt(r2));
}

Vec3 vortex_ring_value(const Vec3& center, double eps, const Vec3& x) {
  const Vec3 d = x - center;
  const double r2 = d.norm2();
  if (r2 >= eps * eps) return {};
  const double s = 1.0 - r2 / (eps * eps);
  // chi'(r)/r = -6 A / eps^2 * s^2, finite at the center
  const double factor = -6.0 * bump_amplitude(eps) / (eps * eps) * s * s;
  return cross(d, Vec3{0, 0, 1}) * factor;
}

VolumeField vortex_ring(const DomainModel& model, const Vec3& center, double eps) {
  const double h = model.volume.h;
  if (eps < 4.0 * h)
    throw std::invalid_argument("vortex_ring: eps must be at least 4h");
  if (!point_inside(model.surface, center) ||
      distance_to_surface(model.surface, center) < eps + 2.0 * h)
    throw TooCloseToBoundary(
        "vortex_ring: support ball must lie inside the domain with margin 2h");
  return VolumeField::sample(model.volume, [&](const Vec3& y) {
    return vortex_ring_value(center, eps, y);
  });
}

ProbeReport probe_decay(const DomainModel& model, const Vec3& y, double eps,
                        const std::vector<Vec3>& x_list) {
  if (x_list.empty())
    throw std::invalid_argument("probe_decay: empty probe list");
  const double h = model.volume.h;
  for (const Vec3& x : x_list) {
    if ((x - y).norm() < 3.0 * eps)
      throw std::invalid_argument("probe_decay: probe within 3 eps of the ring");
    if (distance_to_surface(model.surface, x) < 4.0 * h ||
        !point_inside(model.surface, x))
      throw TooCloseToBoundary("probe_decay: probe violates the 4h margin");
  }

  const VolumeField omega = vortex_ring(model, y, eps);
  const FieldEvaluator u = solve_tangential(
      model, omega,
      [&](const Vec3& p) { return vortex_ring_value(y, eps, p); });

  ProbeReport rep;
  rep.y = y;
  rep.ell_y = ell(model, y);
  std::vector<std::pair<double, double>> samples;
  for (const Vec3& x : x_list)
    samples.push_back({(x - y).norm(), u(x).norm() * 4.0 * kPi});
  std::sort(samples.begin(), samples.end());
  for (size_t i = 1; i < samples.size(); ++i)
    if (samples[i].first <= samples[i - 1].first)
      throw std::invalid_argument("probe_decay: coincident probe distances");
  for (auto& [d, r] : samples) {
    rep.distances.push_back(d);
    rep.responses.push_back(r);
  }

  // log-log least-squares slope
  if (samples.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].second <= 0) continue;
      const double lx = std::log(samples[i].first);
      const double ly = std::log(samples[i].second);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n >= 2) rep.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

void ProbeReport::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "distance,response,response_times_r2,ell_y\n");
  for (size_t i = 0; i < distances.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", distances[i], responses[i],
                 responses[i] * distances[i] * distances[i], ell_y);
  std::fclose(f);
}

Vec3 torus_harmonic_field(const Vec3& x) {
  const double rho2 = x.x * x.x + x.y * x.y;
  if (rho2 == 0.0) throw OnAxis("torus_harmonic_field: point on the z axis");
  return Vec3{-x.y, x.x, 0.0} / rho2;
}

}  // namespace bsd
