#include "bsd/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <thread>

#include "bsd/errors.hpp"

namespace bsd {

double VolumeQuadrature::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DomainModel::diameter() const {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const Vec3& v : surface.vertices)
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  return (hi - lo).norm();
}

double signed_distance(const DomainModel& model, const Vec3& x) {
  const double d = distance_to_surface(model.surface, x);
  if (d == 0.0) return 0.0;
  return point_inside(model.surface, x) ? -d : d;
}

double ell(const DomainModel& model, const Vec3& y) {
  const double sd = signed_distance(model, y);
  if (sd >= 0.0)
    throw OutsideDomain("ell: point is not strictly inside the domain");
  return std::log(2.0 + 1.0 / (-sd));
}

namespace {

struct GridSpec {
  Vec3 lo;
  int nx = 0, ny = 0, nz = 0;
  double h = 0.0;
  Vec3 center(int i, int j, int k) const {
    return {lo.x + (i + 0.5) * h, lo.y + (j + 0.5) * h, lo.z + (k + 0.5) * h};
  }
};

// Crossing x-value of the line {y = y0, z = z0} with a triangle, via
// barycentric coordinates of the (y,z) projection. Rejects grazing hits so
// the caller can retry a nudged line.
bool line_x_crossing(const Vec3& a, const Vec3& b, const Vec3& c, double y0,
                     double z0, double* x_out) {
  const double d00 = b.y - a.y, d01 = c.y - a.y;
  const double d10 = b.z - a.z, d11 = c.z - a.z;
  const double det = d00 * d11 - d01 * d10;
  const double scale = std::abs(d00) + std::abs(d01) + std::abs(d10) +
                       std::abs(d11) + 1e-300;
  if (std::abs(det) < 1e-14 * scale * scale) return false;  // seen edge-on
  const double py = y0 - a.y, pz = z0 - a.z;
  const double u = (py * d11 - pz * d01) / det;
  const double v = (pz * d00 - py * d10) / det;
  const double eps = 1e-12;
  if (u < eps || v < eps || u + v > 1.0 - eps) return false;
  *x_out = a.x + u * (b.x - a.x) + v * (c.x - a.x);
  return true;
}

}  // namespace

VolumeQuadrature voxelize(const SurfaceMesh& surface, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("voxelize: h must be positive");

  Vec3 blo{1e300, 1e300, 1e300}, bhi{-1e300, -1e300, -1e300};
  for (const Vec3& v : surface.vertices)
    for (int k = 0; k < 3; ++k) {
      blo[k] = std::min(blo[k], v[k]);
      bhi[k] = std::max(bhi[k], v[k]);
    }
  GridSpec g;
  g.h = h;
  g.lo = blo - Vec3{h, h, h};
  g.nx = static_cast<int>(std::ceil((bhi.x - g.lo.x + h) / h));
  g.ny = static_cast<int>(std::ceil((bhi.y - g.lo.y + h) / h));
  g.nz = static_cast<int>(std::ceil((bhi.z - g.lo.z + h) / h));

  const int nt = surface.panel_count();
  const int ncols = g.ny * g.nz;

  // Column candidate lists from (y,z) triangle bounding boxes.
  std::vector<std::vector<int>> col_tris(ncols);
  // Near-surface band cells (must pass an exact h/2-clearance test) and the
  // triangles that can be that close to them.
  std::vector<uint8_t> near_band((size_t)g.nx * ncols, 0);
  std::vector<std::vector<int>> cell_tris((size_t)g.nx * ncols);
  const double band = 0.5 * h + 0.87 * h + 0.2 * h;  // h/2 + cell half-diagonal + slack

  for (int p = 0; p < nt; ++p) {
    Vec3 a, b, c;
    surface.panel_vertices(p, a, b, c);
    const Vec3 tlo{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}),
                   std::min({a.z, b.z, c.z})};
    const Vec3 thi{std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y}),
                   std::max({a.z, b.z, c.z})};
    {
      int j0 = std::max(0, (int)std::floor((tlo.y - g.lo.y) / h - 0.5));
      int j1 = std::min(g.ny - 1, (int)std::ceil((thi.y - g.lo.y) / h));
      int k0 = std::max(0, (int)std::floor((tlo.z - g.lo.z) / h - 0.5));
      int k1 = std::min(g.nz - 1, (int)std::ceil((thi.z - g.lo.z) / h));
      for (int j = j0; j <= j1; ++j)
        for (int k = k0; k <= k1; ++k) col_tris[j * g.nz + k].push_back(p);
    }
    {
      int i0 = std::max(0, (int)std::floor((tlo.x - band - g.lo.x) / h));
      int i1 = std::min(g.nx - 1, (int)std::floor((thi.x + band - g.lo.x) / h));
      int j0 = std::max(0, (int)std::floor((tlo.y - band - g.lo.y) / h));
      int j1 = std::min(g.ny - 1, (int)std::floor((thi.y + band - g.lo.y) / h));
      int k0 = std::max(0, (int)std::floor((tlo.z - band - g.lo.z) / h));
      int k1 = std::min(g.nz - 1, (int)std::floor((thi.z + band - g.lo.z) / h));
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
          for (int k = k0; k <= k1; ++k) {
            size_t idx = ((size_t)i * g.ny + j) * g.nz + k;
            near_band[idx] = 1;
            cell_tris[idx].push_back(p);
          }
    }
  }

  // Scanline parity per column, exact clearance test inside the band.
  const unsigned n_threads =
      std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::vector<std::pair<int, int>>> thread_kept(n_threads);

  auto column_pass = [&](unsigned tid) {
    std::vector<double> hits;
    for (int col = tid; col < ncols; col += (int)n_threads) {
      const auto& cand = col_tris[col];
      if (cand.empty()) continue;
      const int j = col / g.nz, k = col % g.nz;
      bool clean = false;
      for (int attempt = 0; attempt < 6 && !clean; ++attempt) {
        const double y0 = g.lo.y + (j + 0.5) * h + h * 3e-7 * attempt;
        const double z0 = g.lo.z + (k + 0.5) * h + h * 1.7e-7 * attempt;
        hits.clear();
        clean = true;
        for (int p : cand) {
          Vec3 a, b, c;
          surface.panel_vertices(p, a, b, c);
          double xh;
          if (line_x_crossing(a, b, c, y0, z0, &xh)) hits.push_back(xh);
        }
        std::sort(hits.begin(), hits.end());
        if (hits.size() % 2 != 0) clean = false;  // closed surface: even count
        for (size_t m = 1; clean && m < hits.size(); ++m)
          if (hits[m] - hits[m - 1] < 1e-10 * h) clean = false;
      }
      if (!clean || hits.empty()) continue;
      for (int i = 0; i < g.nx; ++i) {
        const double xc = g.lo.x + (i + 0.5) * h;
        const size_t below =
            std::lower_bound(hits.begin(), hits.end(), xc) - hits.begin();
        if (below % 2 == 0) continue;  // outside
        const size_t idx = ((size_t)i * g.ny + j) * g.nz + k;
        bool keep = true;
        if (near_band[idx]) {
          const Vec3 x = g.center(i, j, k);
          double best2 = std::numeric_limits<double>::infinity();
          for (int p : cell_tris[idx]) {
            Vec3 a, b, c;
            surface.panel_vertices(p, a, b, c);
            best2 = std::min(best2, point_triangle_distance2(x, a, b, c));
          }
          keep = best2 > 0.25 * h * h;  // strict: threshold ties excluded
        }
        if (keep) thread_kept[tid].push_back({col, i});
      }
    }
  };
  {
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < n_threads; ++t) workers.emplace_back(column_pass, t);
    for (auto& w : workers) w.join();
  }

  std::vector<std::pair<int, int>> kept;
  size_t total = 0;
  for (const auto& tk : thread_kept) total += tk.size();
  kept.reserve(total);
  for (const auto& tk : thread_kept) kept.insert(kept.end(), tk.begin(), tk.end());
  std::sort(kept.begin(), kept.end());

  VolumeQuadrature quad;
  quad.h = h;
  quad.nodes.reserve(kept.size());
  for (auto [col, i] : kept) quad.nodes.push_back(g.center(i, col / g.nz, col % g.nz));
  quad.weights.assign(kept.size(), h * h * h);

  if (quad.nodes.empty())
    throw EmptyQuadrature("voxelize: no interior nodes at h = " + std::to_string(h));
  if (quad.nodes.size() < 1000)
    std::cerr << "[bsd] warning: only " << quad.nodes.size()
              << " volume nodes at h = " << h << "; consider a finer spacing\n";
  return quad;
}

DomainModel make_domain(SurfaceMesh surface, double h) {
  DomainModel model;
  model.volume = voxelize(surface, h);
  model.surface = std::move(surface);

  // Genus from the Euler characteristic of each component; every edge of a
  // validated mesh is shared by exactly two triangles, so E = 3F/2.
  const auto& mesh = model.surface;
  model.genus_per_component.assign(mesh.num_components, 0);
  std::vector<int> vmark(mesh.vertices.size(), -1);
  for (int c = 0; c < mesh.num_components; ++c) {
    long V = 0, F = 0;
    for (int p = 0; p < mesh.panel_count(); ++p) {
      if (mesh.component_id[p] != c) continue;
      ++F;
      for (int vtx : mesh.triangles[p])
        if (vmark[vtx] != c) {
          vmark[vtx] = c;
          ++V;
        }
    }
    const long E = 3 * F / 2;
    const long chi = V - E + F;
    model.genus_per_component[c] = static_cast<int>((2 - chi) / 2);
  }
  model.harmonic_dim = 0;
  for (int gk : model.genus_per_component) model.harmonic_dim += gk;
  return model;
}

std::vector<double> component_flux(const DomainModel& model,
                                   const std::vector<Vec3>& panel_samples) {
  const auto& mesh = model.surface;
  if ((int)panel_samples.size() != mesh.panel_count())
    throw SizeMismatch("component_flux: " + std::to_string(panel_samples.size()) +
                       " samples for " + std::to_string(mesh.panel_count()) +
                       " panels");
  std::vector<double> flux(mesh.num_components, 0.0);
  for (int p = 0; p < mesh.panel_count(); ++p)
    flux[mesh.component_id[p]] +=
        panel_samples[p].dot(mesh.normals[p]) * mesh.areas[p];
  return flux;
}

std::vector<double> component_flux_scalar(const DomainModel& model,
                                          const std::vector<double>& normal_trace) {
  const auto& mesh = model.surface;
  if ((int)normal_trace.size() != mesh.panel_count())
    throw SizeMismatch("component_flux: trace size mismatch");
  std::vector<double> flux(mesh.num_components, 0.0);
  for (int p = 0; p < mesh.panel_count(); ++p)
    flux[mesh.component_id[p]] += normal_trace[p] * mesh.areas[p];
  return flux;
}

}  // namespace bsd
