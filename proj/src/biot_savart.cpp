#include "bsd/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsd/errors.hpp"
#include "bsd/layer_potentials.hpp"
#include "bsd/tolerances.hpp"

namespace bsd {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_field(const DomainModel& model, const VolumeField& f, const char* what) {
  if (f.size() != model.volume.node_count())
    throw SizeMismatch(std::string(what) + ": field has " +
                       std::to_string(f.size()) + " samples for " +
                       std::to_string(model.volume.node_count()) + " nodes");
}

void require_margin(const DomainModel& model, const Vec3& x, double margin,
                    const char* what) {
  if (distance_to_surface(model.surface, x) < margin * tol::margin_slack)
    throw TooCloseToBoundary(std::string(what) +
                             ": evaluation point violates the interior margin");
}

inline Vec3 bs_kernel(const Vec3& w, const Vec3& d, double r2) {
  return cross(w, d) / (4.0 * kPi * r2 * std::sqrt(r2));
}

// 4^3 subcell centers of an h-cell, relative to its center.
struct SubcellOffsets {
  Vec3 off[64];
  explicit SubcellOffsets(double h) {
    int m = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          off[m++] = Vec3{(i - 1.5) * h / 4, (j - 1.5) * h / 4, (k - 1.5) * h / 4};
  }
};

}  // namespace

VolumeField VolumeField::sample(const VolumeQuadrature& quad,
                                const std::function<Vec3(const Vec3&)>& f) {
  std::vector<Vec3> s(quad.nodes.size());
  for (size_t i = 0; i < quad.nodes.size(); ++i) s[i] = f(quad.nodes[i]);
  return VolumeField(std::move(s));
}

double VolumeField::sup_norm() const {
  double m = 0.0;
  for (const Vec3& v : samples) m = std::max(m, v.norm());
  return m;
}

std::vector<int> VolumeField::support() const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i)
    if (samples[i].norm2() > 0.0) idx.push_back(i);
  return idx;
}

int nearest_node(const DomainModel& model, const Vec3& x) {
  const auto& nodes = model.volume.nodes;
  if (nodes.empty()) throw EmptyQuadrature("nearest_node: no volume nodes");
  int best = 0;
  double best2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double d2 = (nodes[i] - x).norm2();
    if (d2 < best2) {
      best2 = d2;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Vec3 nearest_sample(const DomainModel& model, const VolumeField& field,
                    const Vec3& x) {
  check_field(model, field, "nearest_sample");
  return field.samples[nearest_node(model, x)];
}

Vec3 bs_volume_support(const DomainModel& model, const VolumeField& field,
                       const std::vector<int>& support, const Vec3& x) {
  const auto& quad = model.volume;
  const double h = quad.h;
  const double skip2 = (h / 10) * (h / 10);
  const double near2 = (2 * h) * (2 * h);
  const double sub_skip2 = (h / 40) * (h / 40);
  const SubcellOffsets sub(h);
  const double wsub = h * h * h / 64.0;

  Vec3 acc{};
  for (int i : support) {
    const Vec3& y = quad.nodes[i];
    const Vec3 d = x - y;
    const double r2 = d.norm2();
    if (r2 < skip2) continue;  // coincident node: odd kernel, PV drops it
    const Vec3& F = field.samples[i];
    if (r2 < near2) {
      Vec3 cell{};
      for (int m = 0; m < 64; ++m) {
        const Vec3 ds = x - (y + sub.off[m]);
        const double rs2 = ds.norm2();
        if (rs2 < sub_skip2) continue;
        cell += bs_kernel(F, ds, rs2);
      }
      acc += cell * wsub;
    } else {
      acc += bs_kernel(F, d, r2) * quad.weights[i];
    }
  }
  return acc;
}

Vec3 bs_volume(const DomainModel& model, const VolumeField& field, const Vec3& x) {
  check_field(model, field, "bs_volume");
  const auto& quad = model.volume;
  const double h = quad.h;
  const double skip2 = (h / 10) * (h / 10);
  const double near2 = (2 * h) * (2 * h);
  const double sub_skip2 = (h / 40) * (h / 40);
  const SubcellOffsets sub(h);
  const double wsub = h * h * h / 64.0;

  Vec3 acc{};
  const int n = quad.node_count();
  for (int i = 0; i < n; ++i) {
    const Vec3& F = field.samples[i];
    if (F.norm2() == 0.0) continue;
    const Vec3& y = quad.nodes[i];
    const Vec3 d = x - y;
    const double r2 = d.norm2();
    if (r2 < skip2) continue;
    if (r2 < near2) {
      Vec3 cell{};
      for (int m = 0; m < 64; ++m) {
        const Vec3 ds = x - (y + sub.off[m]);
        const double rs2 = ds.norm2();
        if (rs2 < sub_skip2) continue;
        cell += bs_kernel(F, ds, rs2);
      }
      acc += cell * wsub;
    } else {
      acc += bs_kernel(F, d, r2) * quad.weights[i];
    }
  }
  return acc;
}

Vec3 a_field(const DomainModel& model, const Vec3& x, int axis) {
  if (axis < 0 || axis > 2)
    throw std::out_of_range("a_field: axis must be 0, 1 or 2");
  require_margin(model, x, 0.5 * model.volume.h, "a_field");
  const auto& mesh = model.surface;
  std::vector<double> nu_axis(mesh.panel_count());
  for (int p = 0; p < mesh.panel_count(); ++p) nu_axis[p] = mesh.normals[p][axis];
  // Same integral as the single-layer gradient with density nu_axis.
  return grad_single_layer(model, BoundaryDensity(std::move(nu_axis)), x);
}

Mat3 bs_gradient_pv(const DomainModel& model, const VolumeField& field,
                    const Vec3& x) {
  check_field(model, field, "bs_gradient_pv");
  const auto& quad = model.volume;
  const double h = quad.h;
  require_margin(model, x, 2.0 * h, "bs_gradient_pv");

  const double excl2 = (2 * h) * (2 * h);
  Mat3 grad{};
  const int n = quad.node_count();
  for (int i = 0; i < n; ++i) {
    const Vec3& F = field.samples[i];
    if (F.norm2() == 0.0) continue;
    const Vec3 d = x - quad.nodes[i];
    const double r2 = d.norm2();
    if (r2 < excl2) continue;  // symmetric excluded ball: PV
    const double r = std::sqrt(r2);
    const double c = quad.weights[i] / (4.0 * kPi * r2 * r2 * r);
    for (int j = 0; j < 3; ++j) {
      // K_j has components (r^2 e_j - 3 d_j d) / (4 pi r^5)
      Vec3 kj{-3.0 * d[j] * d.x, -3.0 * d[j] * d.y, -3.0 * d[j] * d.z};
      kj[j] += r2;
      const Vec3 term = cross(F, kj) * c;
      grad(j, 0) += term.x;
      grad(j, 1) += term.y;
      grad(j, 2) += term.z;
    }
  }

  const Vec3 fx = nearest_sample(model, field, x);
  if (fx.norm2() > 0.0) {
    for (int j = 0; j < 3; ++j) {
      const Vec3 aj = a_field(model, x, j);
      const Vec3 term = cross(fx, aj);
      grad(j, 0) -= term.x;
      grad(j, 1) -= term.y;
      grad(j, 2) -= term.z;
    }
  }
  return grad;
}

double volume_potential(const DomainModel& model,
                        const std::vector<double>& samples, const Vec3& x) {
  if ((int)samples.size() != model.volume.node_count())
    throw SizeMismatch("volume_potential: sample count mismatch");
  const auto& quad = model.volume;
  const double h = quad.h;
  const double near2 = (2 * h) * (2 * h);
  const double sub_skip2 = (h / 40) * (h / 40);
  const SubcellOffsets sub(h);
  const double wsub = h * h * h / 64.0;

  double acc = 0.0;
  const int n = quad.node_count();
  for (int i = 0; i < n; ++i) {
    if (samples[i] == 0.0) continue;
    const Vec3 d = x - quad.nodes[i];
    const double r2 = d.norm2();
    if (r2 < near2) {
      double cell = 0.0;
      for (int m = 0; m < 64; ++m) {
        const double rs2 = (x - (quad.nodes[i] + sub.off[m])).norm2();
        if (rs2 < sub_skip2) continue;
        cell += 1.0 / std::sqrt(rs2);
      }
      acc += samples[i] * cell * wsub / (4.0 * kPi);
    } else {
      acc += samples[i] * quad.weights[i] / (4.0 * kPi * std::sqrt(r2));
    }
  }
  return acc;
}

Vec3 volume_potential_grad(const DomainModel& model,
                           const std::vector<double>& samples, const Vec3& x) {
  if ((int)samples.size() != model.volume.node_count())
    throw SizeMismatch("volume_potential_grad: sample count mismatch");
  const auto& quad = model.volume;
  const double h = quad.h;
  const double near2 = (2 * h) * (2 * h);
  const double sub_skip2 = (h / 40) * (h / 40);
  const SubcellOffsets sub(h);
  const double wsub = h * h * h / 64.0;

  Vec3 acc{};
  const int n = quad.node_count();
  for (int i = 0; i < n; ++i) {
    if (samples[i] == 0.0) continue;
    const Vec3 d = x - quad.nodes[i];
    const double r2 = d.norm2();
    if (r2 < near2) {
      Vec3 cell{};
      for (int m = 0; m < 64; ++m) {
        const Vec3 ds = x - (quad.nodes[i] + sub.off[m]);
        const double rs2 = ds.norm2();
        if (rs2 < sub_skip2) continue;
        cell -= ds / (rs2 * std::sqrt(rs2));
      }
      acc += cell * (samples[i] * wsub / (4.0 * kPi));
    } else {
      acc -= d * (samples[i] * quad.weights[i] / (4.0 * kPi * r2 * std::sqrt(r2)));
    }
  }
  return acc;
}

Vec3 curl_identity_residual(const DomainModel& model, const VolumeField& field,
                            const std::vector<double>& div_field, const Vec3& x) {
  check_field(model, field, "curl_identity_residual");
  if ((int)div_field.size() != model.volume.node_count())
    throw SizeMismatch("curl_identity_residual: divergence sample count mismatch");
  const double h = model.volume.h;
  require_margin(model, x, 2.0 * h, "curl_identity_residual");

  const Mat3 grad = bs_gradient_pv(model, field, x);
  const Vec3 curl_w{grad(1, 2) - grad(2, 1), grad(2, 0) - grad(0, 2),
                    grad(0, 1) - grad(1, 0)};

  // F . nu on the boundary via the inward-offset nearest-node trace.
  const auto& mesh = model.surface;
  std::vector<double> trace(mesh.panel_count());
  for (int p = 0; p < mesh.panel_count(); ++p) {
    const Vec3 probe = mesh.centroids[p] - mesh.normals[p] * (0.5 * h);
    trace[p] = nearest_sample(model, field, probe).dot(mesh.normals[p]);
  }
  const BoundaryDensity trace_density{trace};

  const double step = h / 4;
  Vec3 grad_newton{}, grad_surface{};
  for (int k = 0; k < 3; ++k) {
    Vec3 e{};
    e[k] = step;
    grad_newton[k] = (volume_potential(model, div_field, x + e) -
                      volume_potential(model, div_field, x - e)) /
                     (2 * step);
    // single_layer carries the leading minus; the identity's surface term
    // is the plain positive kernel.
    grad_surface[k] = (-single_layer(model, trace_density, x + e) +
                       single_layer(model, trace_density, x - e)) /
                      (2 * step);
  }

  const Vec3 fx = nearest_sample(model, field, x);
  return curl_w - (fx + grad_newton - grad_surface);
}

}  // namespace bsd
