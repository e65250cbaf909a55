#include "bsd/layer_potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "bsd/errors.hpp"
#include "bsd/panel_quadrature.hpp"
#include "bsd/tolerances.hpp"

namespace bsd {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_density(const DomainModel& model, const BoundaryDensity& d,
                   const char* what) {
  if (d.size() != model.surface.panel_count())
    throw SizeMismatch(std::string(what) + ": density has " +
                       std::to_string(d.size()) + " values for " +
                       std::to_string(model.surface.panel_count()) + " panels");
  for (double v : d.values)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": non-finite density");
}

// In-plane line integral \oint R(phi) dphi of the triangle about its
// centroid: the closed form of int dA / |y - c| over the flat panel.
double centroid_ring_integral(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 cen = (a + b + c) / 3.0;
  Vec3 n = cross(b - a, c - a);
  n = n / n.norm();
  const Vec3 e1 = (b - a).normalized();
  const Vec3 e2 = cross(n, e1);
  double px[3], py[3];
  const Vec3 vs[3] = {a, b, c};
  for (int k = 0; k < 3; ++k) {
    px[k] = (vs[k] - cen).dot(e1);
    py[k] = (vs[k] - cen).dot(e2);
  }
  auto antideriv = [](double t) { return std::log(std::abs(1.0 / std::cos(t) + std::tan(t))); };
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int m = (k + 1) % 3;
    double ex = px[m] - px[k], ey = py[m] - py[k];
    const double len = std::hypot(ex, ey);
    ex /= len;
    ey /= len;
    double nx = -ey, ny = ex;
    double d = px[k] * nx + py[k] * ny;
    if (d < 0) {
      nx = -nx;
      ny = -ny;
      d = -d;
    }
    const double phi0 = std::atan2(ny, nx);
    auto wrap = [](double t) {
      while (t > kPi) t -= 2 * kPi;
      while (t < -kPi) t += 2 * kPi;
      return t;
    };
    const double pa = wrap(std::atan2(py[k], px[k]) - phi0);
    const double pb = wrap(std::atan2(py[m], px[m]) - phi0);
    total += d * std::abs(antideriv(pb) - antideriv(pa));
  }
  return total;
}

struct PanelGeom {
  Vec3 a, b, c;
  double area;
  double diam;
  Vec3 centroid;
  // curved-panel reconstruction: quadratic sag q(y) vanishing at the
  // vertices with in-plane Hessian H * I; lift y -> y - n * q(y)
  Vec3 normal;
  Vec3 frame_u, frame_v;
  double lift_h = 0.0;        // mean curvature of the panel
  double lin0 = 0.0;          // linear part of |.|^2 interpolated at vertices
  double linu = 0.0, linv = 0.0;

  Vec3 lift(const Vec3& y) const {
    const Vec3 d = y - centroid;
    const double u = d.dot(frame_u), v = d.dot(frame_v);
    const double q = 0.5 * lift_h * (u * u + v * v - (lin0 + linu * u + linv * v));
    return y - normal * q;
  }
};

std::vector<PanelGeom> panel_geometry(const SurfaceMesh& mesh) {
  std::vector<PanelGeom> g(mesh.panel_count());
  for (int p = 0; p < mesh.panel_count(); ++p) {
    auto& pg = g[p];
    mesh.panel_vertices(p, pg.a, pg.b, pg.c);
    pg.area = mesh.areas[p];
    pg.diam = mesh.panel_diameter(p);
    pg.centroid = mesh.centroids[p];
    pg.normal = mesh.normals[p];
    pg.frame_u = (pg.b - pg.a).normalized();
    pg.frame_v = cross(pg.normal, pg.frame_u);
    pg.lift_h = mesh.mean_curvature[p];
    // solve the 3x3 system lin(u,v) = |(u,v)|^2 at the vertices
    Eigen::Matrix3d M;
    Eigen::Vector3d rhs;
    const Vec3 vs[3] = {pg.a, pg.b, pg.c};
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = vs[k] - pg.centroid;
      const double u = d.dot(pg.frame_u), v = d.dot(pg.frame_v);
      M(k, 0) = 1.0;
      M(k, 1) = u;
      M(k, 2) = v;
      rhs[k] = u * u + v * v;
    }
    const Eigen::Vector3d lin = M.partialPivLu().solve(rhs);
    pg.lin0 = lin[0];
    pg.linu = lin[1];
    pg.linv = lin[2];
  }
  return g;
}

void parallel_rows(int n, const std::function<void(int)>& row_job) {
  const unsigned n_threads =
      std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < n_threads; ++t)
    workers.emplace_back([&, t]() {
      for (int i = (int)t; i < n; i += (int)n_threads) row_job(i);
    });
  for (auto& w : workers) w.join();
}

void require_clearance(const DomainModel& model, const Vec3& x, const char* what) {
  const double margin = 0.5 * model.volume.h * tol::margin_slack;
  if (distance_to_surface(model.surface, x) < margin)
    throw TooCloseToBoundary(std::string(what) +
                             ": evaluation point within h/2 of the boundary");
}

}  // namespace

double BoundaryDensity::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

LayerOperator assemble_T0(const DomainModel& model, const T0Options& opts) {
  const auto& mesh = model.surface;
  const int n = mesh.panel_count();
  const auto geom = panel_geometry(mesh);

  LayerOperator op;
  op.matrix.resize(n, n);

  parallel_rows(n, [&](int i) {
    // collocation on the reconstructed (lifted) surface when lifting is on
    const Vec3 x = opts.curvature_lift ? geom[i].lift(geom[i].centroid)
                                       : geom[i].centroid;
    const Vec3 nu = mesh.normals[i];
    const double hcurv = mesh.mean_curvature[i];
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        op.matrix(i, i) =
            opts.curvature_diagonal
                ? hcurv / (8.0 * kPi) *
                      centroid_ring_integral(geom[i].a, geom[i].b, geom[i].c)
                : 0.0;
        continue;
      }
      const auto& pj = geom[j];
      const bool near = (x - pj.centroid).norm() < 3.0 * pj.diam;
      const bool lift = near && opts.curvature_lift;
      auto kernel = [&](const Vec3& y0) {
        const Vec3 y = lift ? pj.lift(y0) : y0;
        const Vec3 d = x - y;
        const double r2 = d.norm2();
        return d.dot(nu) / (4.0 * kPi * r2 * std::sqrt(r2));
      };
      op.matrix(i, j) =
          near ? integrate_triangle<double>(kernel, pj.a, pj.b, pj.c, pj.area,
                                            tol::panel, tol::panel_max_depth)
               : rule7<double>(kernel, pj.a, pj.b, pj.c, pj.area);
    }
  });

  if (!op.matrix.allFinite())
    throw NumericalError("assemble_T0 produced non-finite entries");
  return op;
}

namespace {

template <class T>
T surface_potential(const DomainModel& model, const BoundaryDensity& f,
                    const Vec3& x, const std::vector<PanelGeom>& geom) {
  const int n = model.surface.panel_count();
  T acc{};
  for (int j = 0; j < n; ++j) {
    if (f[j] == 0.0) continue;
    const auto& pj = geom[j];
    const bool near = (x - pj.centroid).norm() < 3.0 * pj.diam;
    T term{};
    if constexpr (std::is_same_v<T, double>) {
      auto kernel = [&](const Vec3& y) { return 1.0 / (4.0 * kPi * (x - y).norm()); };
      term = near ? integrate_triangle<double>(kernel, pj.a, pj.b, pj.c, pj.area,
                                               tol::panel, tol::panel_max_depth)
                  : rule7<double>(kernel, pj.a, pj.b, pj.c, pj.area);
    } else {
      auto kernel = [&](const Vec3& y) {
        const Vec3 d = x - y;
        const double r = d.norm();
        return d / (4.0 * kPi * r * r * r);
      };
      term = near ? integrate_triangle<Vec3>(kernel, pj.a, pj.b, pj.c, pj.area,
                                             tol::panel, tol::panel_max_depth)
                  : rule7<Vec3>(kernel, pj.a, pj.b, pj.c, pj.area);
    }
    acc += term * f[j];
  }
  return acc;
}

}  // namespace

double single_layer(const DomainModel& model, const BoundaryDensity& f,
                    const Vec3& x) {
  check_density(model, f, "single_layer");
  require_clearance(model, x, "single_layer");
  const auto geom = panel_geometry(model.surface);
  return -surface_potential<double>(model, f, x, geom);
}

Vec3 grad_single_layer(const DomainModel& model, const BoundaryDensity& f,
                       const Vec3& x) {
  check_density(model, f, "grad_single_layer");
  require_clearance(model, x, "grad_single_layer");
  const auto geom = panel_geometry(model.surface);
  return surface_potential<Vec3>(model, f, x, geom);
}

std::vector<Vec3> grad_single_layer_batch(const DomainModel& model,
                                          const BoundaryDensity& f,
                                          const std::vector<Vec3>& points) {
  check_density(model, f, "grad_single_layer");
  const auto geom = panel_geometry(model.surface);
  std::vector<Vec3> out(points.size());
  parallel_rows(static_cast<int>(points.size()), [&](int i) {
    out[i] = surface_potential<Vec3>(model, f, points[i], geom);
  });
  return out;
}

namespace {

BoundaryDensity min_norm_solve(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& rhs, BieSolveInfo* info,
                               const char* what) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A.rows(), A.cols());
  cod.setThreshold(tol::rank_rel);
  cod.compute(A);
  const int rank = static_cast<int>(cod.rank());

  const Eigen::VectorXd x = cod.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double res = rhs_norm > 0 ? (A * x - rhs).norm() / rhs_norm : 0.0;

  // Pivot-ratio condition estimate on the retained block.
  const auto& qtz = cod.matrixQTZ();
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < rank; ++k) {
    const double p = std::abs(qtz(k, k));
    pmax = std::max(pmax, p);
    pmin = std::min(pmin, p);
  }
  const double cond = (pmin > 0 && rank > 0) ? pmax / pmin
                                             : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond) || cond > tol::cond_limit)
    throw IllConditioned(std::string(what) + ": condition estimate " +
                         std::to_string(cond) + " exceeds limit");
  if (rank == A.rows() && res > tol::bie_residual)
    throw IllConditioned(std::string(what) + ": full-rank solve residual " +
                         std::to_string(res));
  if (info) {
    info->residual_rel = res;
    info->rank = rank;
    info->cond_estimate = cond;
  }
  std::vector<double> vals(x.data(), x.data() + x.size());
  return BoundaryDensity(std::move(vals));
}

}  // namespace

BoundaryDensity solve_f(const DomainModel& model, const LayerOperator& t0,
                        const BoundaryDensity& omega_nu, BieSolveInfo* info) {
  check_density(model, omega_nu, "solve_f");
  const auto& mesh = model.surface;
  const int n = mesh.panel_count();
  if (t0.size() != n) throw SizeMismatch("solve_f: operator size mismatch");

  double l1 = 0.0;
  for (int p = 0; p < n; ++p) l1 += std::abs(omega_nu[p]) * mesh.areas[p];
  const auto fluxes = component_flux_scalar(model, omega_nu.values);
  const double thresh = tol::flux * l1 + 1e-14 * mesh.total_area();
  for (size_t c = 0; c < fluxes.size(); ++c)
    if (std::abs(fluxes[c]) > thresh)
      throw FluxViolation("solve_f: nonzero flux through boundary component " +
                              std::to_string(c) + ": " + std::to_string(fluxes[c]),
                          fluxes);

  Eigen::VectorXd rhs(n);
  for (int p = 0; p < n; ++p) rhs[p] = omega_nu[p];
  Eigen::MatrixXd A = t0.matrix;
  A.diagonal().array() += 0.5;
  return min_norm_solve(A, rhs, info, "solve_f");
}

BoundaryDensity solve_g(const DomainModel& model, const LayerOperator& t0,
                        const BoundaryDensity& v_nu, BieSolveInfo* info,
                        double compat_scale) {
  check_density(model, v_nu, "solve_g");
  const auto& mesh = model.surface;
  const int n = mesh.panel_count();
  if (t0.size() != n) throw SizeMismatch("solve_g: operator size mismatch");

  double total = 0.0, l1 = 0.0;
  for (int p = 0; p < n; ++p) {
    total += v_nu[p] * mesh.areas[p];
    l1 += std::abs(v_nu[p]) * mesh.areas[p];
  }
  const double scale = compat_scale > 0 ? compat_scale : l1;
  if (std::abs(total) > tol::compat * scale + 1e-14 * mesh.total_area())
    throw CompatibilityViolation(
        "solve_g: net boundary flux " + std::to_string(total) +
        " violates the interior Neumann compatibility condition");

  Eigen::VectorXd rhs(n);
  for (int p = 0; p < n; ++p) rhs[p] = -v_nu[p];
  Eigen::MatrixXd A = -t0.matrix;
  A.diagonal().array() += 0.5;
  return min_norm_solve(A, rhs, info, "solve_g");
}

void dump_operator(const LayerOperator& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const uint64_t dims[2] = {(uint64_t)op.matrix.rows(), (uint64_t)op.matrix.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      const double v = op.matrix(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

}  // namespace bsd
