#include "bsd/divcurl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <thread>

#include "bsd/errors.hpp"
#include "bsd/tolerances.hpp"

namespace bsd {

namespace {

void parallel_for(int n, const std::function<void(int)>& job) {
  const unsigned n_threads =
      std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < n_threads; ++t)
    workers.emplace_back([&, t]() {
      for (int i = (int)t; i < n; i += (int)n_threads) job(i);
    });
  for (auto& w : workers) w.join();
}

// Nodes sit on a regular lattice, so quantized offsets from the first node
// are exact integer keys; used to find axis neighbors for finite differences.
class NodeLattice {
 public:
  explicit NodeLattice(const VolumeQuadrature& q) : quad_(q) {
    keys_.reserve(q.nodes.size());
    for (size_t i = 0; i < q.nodes.size(); ++i)
      keys_.push_back({pack(q.nodes[i]), (int)i});
    std::sort(keys_.begin(), keys_.end());
  }

  // Node index at position p, or -1.
  int find(const Vec3& p) const {
    const int64_t key = pack(p);
    auto it = std::lower_bound(keys_.begin(), keys_.end(),
                               std::make_pair(key, -1));
    if (it != keys_.end() && it->first == key) return it->second;
    return -1;
  }

 private:
  int64_t pack(const Vec3& p) const {
    const Vec3& o = quad_.nodes[0];
    const int64_t di = llround((p.x - o.x) / quad_.h);
    const int64_t dj = llround((p.y - o.y) / quad_.h);
    const int64_t dk = llround((p.z - o.z) / quad_.h);
    return ((di + (1 << 20)) << 42) | ((dj + (1 << 20)) << 21) | (dk + (1 << 20));
  }
  const VolumeQuadrature& quad_;
  std::vector<std::pair<int64_t, int>> keys_;
};

// Boundary trace of a volume field at the inward-offset panel points.
std::vector<double> normal_trace(const DomainModel& model, const VolumeField& field,
                                 const TraceFn& analytic) {
  const auto& mesh = model.surface;
  const double h = model.volume.h;
  std::vector<double> trace(mesh.panel_count());
  parallel_for(mesh.panel_count(), [&](int p) {
    const Vec3 probe = mesh.centroids[p] - mesh.normals[p] * (0.5 * h);
    const Vec3 value = analytic ? analytic(probe) : nearest_sample(model, field, probe);
    trace[p] = value.dot(mesh.normals[p]);
  });
  return trace;
}

void divergence_advisory(const DomainModel& model, const VolumeField& omega,
                         SolveDiagnostics* diag) {
  const auto& quad = model.volume;
  const int n = quad.node_count();
  if (n == 0) return;
  const NodeLattice lattice(quad);
  const double sup = omega.sup_norm();
  if (sup == 0.0) return;
  const double tol_div = tol::div_advisory * sup / model.diameter();

  double worst = 0.0;
  const int stride = std::max(1, n / 512);
  for (int i = 0; i < n; i += stride) {
    const Vec3& p = quad.nodes[i];
    double div = 0.0;
    bool complete = true;
    for (int k = 0; k < 3 && complete; ++k) {
      Vec3 e{};
      e[k] = quad.h;
      const int ip = lattice.find(p + e), im = lattice.find(p - e);
      if (ip < 0 || im < 0) {
        complete = false;
        break;
      }
      div += (omega.samples[ip][k] - omega.samples[im][k]) / (2 * quad.h);
    }
    if (complete) worst = std::max(worst, std::abs(div));
  }
  diag->div_advisory_value = worst;
  if (worst > tol_div) {
    diag->div_advisory_triggered = true;
    std::cerr << "[bsd] advisory: discrete div(omega) reaches " << worst
              << " (tolerance " << tol_div
              << "); the construction projects onto the solvable part\n";
  }
}

}  // namespace

Vec3 FieldEvaluator::operator()(const Vec3& x) const {
  Vec3 u = bs_volume_support(*model_, omega_, omega_support_, x);
  if (!grad_sf_support_.empty())
    u -= bs_volume_support(*model_, grad_sf_, grad_sf_support_, x);
  if (f_.size() > 0 || g_.size() > 0) {
    if (g_.size() > 0) u -= grad_single_layer(*model_, g_, x);
  }
  if (newton_src_) {
    u -= volume_potential_grad(*model_, *newton_src_, x);
    if (q_.size() > 0) u += grad_single_layer(*model_, q_, x);
  }
  if (extra_) u += extra_(x);
  return u;
}

FieldEvaluator FieldEvaluator::with_added_field(
    std::function<Vec3(const Vec3&)> extra) const {
  FieldEvaluator out = *this;
  if (extra_) {
    auto base = extra_;
    out.extra_ = [base, extra](const Vec3& x) { return base(x) + extra(x); };
  } else {
    out.extra_ = std::move(extra);
  }
  return out;
}

class PipelineBuilder {
 public:
  static FieldEvaluator run(const DomainModel& model, const VolumeField& omega,
                            const TraceFn& omega_trace, const LayerOperator* t0_in,
                            const std::vector<double>* f_src,
                            const BoundaryDensity* g_bc) {
    const auto& mesh = model.surface;
    const int n_panels = mesh.panel_count();
    if (omega.size() != model.volume.node_count())
      throw SizeMismatch("solve: omega sample count mismatch");

    FieldEvaluator ev;
    ev.model_ = &model;
    ev.omega_ = omega;
    ev.omega_support_ = omega.support();

    divergence_advisory(model, omega, &ev.diag_);

    // boundary trace of omega and the admissibility gate
    const std::vector<double> om_nu = normal_trace(model, omega, omega_trace);
    ev.diag_.omega_fluxes = component_flux_scalar(model, om_nu);
    double l1 = 0.0;
    for (int p = 0; p < n_panels; ++p) l1 += std::abs(om_nu[p]) * mesh.areas[p];
    ev.diag_.omega_trace_l1 = l1;

    LayerOperator t0_local;
    const LayerOperator* t0 = t0_in;
    if (!t0) {
      t0_local = assemble_T0(model);
      t0 = &t0_local;
    }

    // f from (I/2 + T0) f = omega . nu; solve_f re-checks the fluxes.
    ev.f_ = solve_f(model, *t0, BoundaryDensity(om_nu), &ev.diag_.f_info);
    ev.diag_.f_sup = ev.f_.sup_norm();

    // grad(S f) sampled at the volume nodes feeds the second volume term.
    if (ev.diag_.f_sup > 1e-14 * (1.0 + ev.diag_.omega_trace_l1)) {
      ev.grad_sf_ = VolumeField(
          grad_single_layer_batch(model, ev.f_, model.volume.nodes));
      ev.grad_sf_support_ = ev.grad_sf_.support();
    } else {
      ev.f_ = BoundaryDensity::zeros(n_panels);
      ev.grad_sf_ = VolumeField::zeros(model.volume.node_count());
    }

    // v = v1 + v2 at the offset points, then the Neumann correction.
    std::vector<double> v_nu(n_panels);
    double v_sup = 0.0;
    {
      std::vector<double> sup_per_thread(n_panels, 0.0);
      parallel_for(n_panels, [&](int p) {
        const Vec3 probe = mesh.centroids[p] - mesh.normals[p] * (0.5 * model.volume.h);
        Vec3 v = bs_volume_support(model, ev.omega_, ev.omega_support_, probe);
        if (!ev.grad_sf_support_.empty())
          v -= bs_volume_support(model, ev.grad_sf_, ev.grad_sf_support_, probe);
        v_nu[p] = v.dot(mesh.normals[p]);
        sup_per_thread[p] = v.norm();
      });
      for (double s : sup_per_thread) v_sup = std::max(v_sup, s);
    }
    ev.diag_.v_trace_sup = v_sup;

    // The trace of the divergence-free v is compatible analytically; the
    // discrete defect is quadrature noise, so the gate scales with the
    // field, not with the (possibly tiny) trace itself.
    const double compat_scale =
        std::max(l1, v_sup * mesh.total_area()) + 1e-300;
    ev.g_ = solve_g(model, *t0, BoundaryDensity(v_nu), &ev.diag_.g_info,
                    compat_scale);
    ev.diag_.g_sup = ev.g_.sup_norm();

    // General system: v = u + grad(phi0), phi0 = -N f_src + S q.
    if (f_src) {
      ev.newton_src_ = std::make_shared<const std::vector<double>>(*f_src);
      std::vector<double> q_rhs(n_panels);
      double nf_l1 = 0.0, g_l1 = 0.0;
      std::vector<double> nf_trace(n_panels);
      parallel_for(n_panels, [&](int p) {
        nf_trace[p] = volume_potential_grad(model, *f_src, mesh.centroids[p])
                          .dot(mesh.normals[p]);
      });
      for (int p = 0; p < n_panels; ++p) {
        q_rhs[p] = (*g_bc)[p] + nf_trace[p];
        nf_l1 += std::abs(nf_trace[p]) * mesh.areas[p];
        g_l1 += std::abs((*g_bc)[p]) * mesh.areas[p];
      }
      ev.q_ = solve_g(model, *t0, BoundaryDensity(q_rhs), &ev.diag_.q_info,
                      std::max({nf_l1, g_l1, 1e-300}));
      ev.diag_.q_sup = ev.q_.sup_norm();
    }

    // Reference velocity scale for residual normalization: sup |u| over a
    // deterministic interior sample.
    {
      const auto& nodes = model.volume.nodes;
      const int n = (int)nodes.size();
      const int stride = std::max(1, n / 64);
      double scale = 0.0;
      std::vector<Vec3> pts;
      for (int i = 0; i < n && (int)pts.size() < 64; i += stride) {
        if (distance_to_surface(mesh, nodes[i]) >= 2.0 * model.volume.h)
          pts.push_back(nodes[i]);
      }
      std::vector<double> mags(pts.size(), 0.0);
      parallel_for((int)pts.size(), [&](int i) { mags[i] = ev(pts[i]).norm(); });
      for (double m : mags) scale = std::max(scale, m);
      ev.diag_.reference_scale = scale;
    }
    return ev;
  }
};

FieldEvaluator solve_tangential(const DomainModel& model, const VolumeField& omega,
                                const TraceFn& omega_trace) {
  return PipelineBuilder::run(model, omega, omega_trace, nullptr, nullptr, nullptr);
}

FieldEvaluator solve_general(const DomainModel& model, const VolumeField& omega,
                             const std::vector<double>& f_src,
                             const BoundaryDensity& g_bc,
                             const TraceFn& omega_trace) {
  const auto& mesh = model.surface;
  if ((int)f_src.size() != model.volume.node_count())
    throw SizeMismatch("solve_general: f_src sample count mismatch");
  if (g_bc.size() != mesh.panel_count())
    throw SizeMismatch("solve_general: g_bc panel count mismatch");

  // Compatibility: int f dx = int g dsigma. The voxel sum carries an O(h)
  // volume bias, corrected by rescaling to the surface-integral volume.
  double f_int = 0.0;
  for (int i = 0; i < model.volume.node_count(); ++i)
    f_int += f_src[i] * model.volume.weights[i];
  f_int *= mesh.enclosed_volume() / model.volume.total_weight();
  double g_int = 0.0, g_l1 = 0.0, f_l1 = 0.0;
  for (int p = 0; p < mesh.panel_count(); ++p) {
    g_int += g_bc[p] * mesh.areas[p];
    g_l1 += std::abs(g_bc[p]) * mesh.areas[p];
  }
  for (int i = 0; i < model.volume.node_count(); ++i)
    f_l1 += std::abs(f_src[i]) * model.volume.weights[i];
  const double scale = std::max({std::abs(f_int), std::abs(g_int), f_l1, g_l1});
  if (std::abs(f_int - g_int) > tol::compat * scale + 1e-14 * (1.0 + mesh.total_area()))
    throw CompatibilityViolation(
        "solve_general: int f dx = " + std::to_string(f_int) +
        " but int g dsigma = " + std::to_string(g_int));

  const LayerOperator t0 = assemble_T0(model);
  return PipelineBuilder::run(model, omega, omega_trace, &t0, &f_src, &g_bc);
}

double newton_potential(const DomainModel& model, const std::vector<double>& f_src,
                        const Vec3& x) {
  return volume_potential(model, f_src, x);
}

ResidualReport residuals(const DomainModel& model, const FieldEvaluator& u,
                         const VolumeField& omega, int max_probes) {
  const auto& mesh = model.surface;
  const double h = model.volume.h;
  const double omega_sup = std::max(omega.sup_norm(), 1e-300);

  // Deterministic probe set: volume nodes with margin >= 4h.
  std::vector<int> probes;
  {
    const int n = model.volume.node_count();
    const int stride = std::max(1, n / (4 * max_probes));
    for (int i = 0; i < n && (int)probes.size() < max_probes; i += stride)
      if (distance_to_surface(mesh, model.volume.nodes[i]) >= 4.0 * h)
        probes.push_back(i);
  }

  ResidualReport rep;
  rep.probe_count = (int)probes.size();
  const double step = h / 4;

  std::vector<double> curl_err(probes.size()), div_err(probes.size());
  parallel_for((int)probes.size(), [&](int m) {
    const Vec3 p = model.volume.nodes[probes[m]];
    Vec3 du[3][2];  // du[axis][plus/minus]
    for (int k = 0; k < 3; ++k) {
      Vec3 e{};
      e[k] = step;
      du[k][0] = u(p + e);
      du[k][1] = u(p - e);
    }
    auto d = [&](int k, int comp) {
      return (du[k][0][comp] - du[k][1][comp]) / (2 * step);
    };
    const Vec3 fd_curl{d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)};
    const double fd_div = d(0, 0) + d(1, 1) + d(2, 2);
    curl_err[m] = (fd_curl - omega.samples[probes[m]]).norm() / omega_sup;
    div_err[m] = std::abs(fd_div) / omega_sup;
  });

  double c2 = 0.0, d2 = 0.0;
  for (size_t m = 0; m < probes.size(); ++m) {
    rep.curl_max = std::max(rep.curl_max, curl_err[m]);
    rep.div_max = std::max(rep.div_max, div_err[m]);
    c2 += curl_err[m] * curl_err[m];
    d2 += div_err[m] * div_err[m];
  }
  if (!probes.empty()) {
    rep.curl_l2 = std::sqrt(c2 / probes.size());
    rep.div_l2 = std::sqrt(d2 / probes.size());
  }

  // Tangency at the inward-offset panel points, normalized by the solved
  // field's reference scale (stable under gauge perturbations).
  const double uscale = std::max(u.diagnostics().reference_scale, 1e-300);
  std::vector<double> tang(mesh.panel_count());
  parallel_for(mesh.panel_count(), [&](int p) {
    const Vec3 probe = mesh.centroids[p] - mesh.normals[p] * (0.5 * h);
    tang[p] = std::abs(u(probe).dot(mesh.normals[p])) / uscale;
  });
  double t2 = 0.0;
  for (int p = 0; p < mesh.panel_count(); ++p) {
    rep.tang_max = std::max(rep.tang_max, tang[p]);
    t2 += tang[p] * tang[p] * mesh.areas[p];
  }
  rep.tang_l2 = std::sqrt(t2 / mesh.total_area());
  return rep;
}

}  // namespace bsd
