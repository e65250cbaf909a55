#include "bsd/meshgen.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace bsd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SurfaceMesh make_icosphere(int subdivisions, double radius, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v = v.normalized();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * faces.size());
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  for (auto& v : verts) v = v * radius + center;
  return build_surface(std::move(verts), std::move(faces));
}

SurfaceMesh make_torus(double major_radius, double minor_radius, int n_major,
                       int n_minor) {
  // Ring j sits at poloidal angle v_j; odd rings are rotated half an
  // azimuthal step so each band triangulates as symmetric zigzag triangles.
  // The alternation only closes up poloidally for even ring counts.
  if (n_minor % 2 != 0) throw std::invalid_argument("n_minor must be even");
  std::vector<Vec3> verts;
  verts.reserve(n_major * n_minor);
  auto point = [&](double u, double v) {
    const double rho = major_radius + minor_radius * std::cos(v);
    return Vec3{rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(v)};
  };
  const double du = 2.0 * kPi / n_major, dv = 2.0 * kPi / n_minor;
  for (int j = 0; j < n_minor; ++j) {
    const double off = (j % 2) ? 0.5 * du : 0.0;
    for (int i = 0; i < n_major; ++i)
      verts.push_back(point(i * du + off, j * dv));
  }
  auto vid = [&](int i, int j) {
    return ((j % n_minor + n_minor) % n_minor) * n_major +
           ((i % n_major + n_major) % n_major);
  };
  std::vector<std::array<int, 3>> faces;
  faces.reserve(2 * n_major * n_minor);
  for (int j = 0; j < n_minor; ++j) {
    for (int i = 0; i < n_major; ++i) {
      if (j % 2 == 0) {
        // apex on the offset ring j+1, centered between i and i+1
        faces.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
        faces.push_back({vid(i, j + 1), vid(i + 1, j), vid(i + 1, j + 1)});
      } else {
        faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
    }
  }
  return build_surface(std::move(verts), std::move(faces));
}

SurfaceMesh make_genus2_block() {
  // Rectangle [0,12]x[0,8] cells of size 1 (scaled by 0.25 at the end),
  // holes at cells x in [2,5), y in [2,6) and x in [7,10), y in [2,6),
  // extruded between z = 0 and z = 2 (one cell layer of height 2).
  const int NX = 12, NY = 8;
  auto in_hole = [](int cx, int cy) {
    bool hy = cy >= 2 && cy < 6;
    return hy && ((cx >= 2 && cx < 5) || (cx >= 7 && cx < 10));
  };
  auto in_region = [&](int cx, int cy) {
    return cx >= 0 && cx < NX && cy >= 0 && cy < NY && !in_hole(cx, cy);
  };

  std::vector<Vec3> verts;
  std::unordered_map<int, int> vid_map;  // key = ((ix*64)+iy)*2 + top
  auto vid = [&](int ix, int iy, int top) {
    int key = ((ix * 64) + iy) * 2 + top;
    auto it = vid_map.find(key);
    if (it != vid_map.end()) return it->second;
    verts.push_back({0.25 * ix, 0.25 * iy, top ? 0.5 : 0.0});
    vid_map[key] = static_cast<int>(verts.size()) - 1;
    return vid_map[key];
  };

  std::vector<std::array<int, 3>> faces;
  for (int cx = 0; cx < NX; ++cx)
    for (int cy = 0; cy < NY; ++cy) {
      if (!in_region(cx, cy)) continue;
      int v00t = vid(cx, cy, 1), v10t = vid(cx + 1, cy, 1);
      int v01t = vid(cx, cy + 1, 1), v11t = vid(cx + 1, cy + 1, 1);
      faces.push_back({v00t, v10t, v11t});
      faces.push_back({v00t, v11t, v01t});
      int v00b = vid(cx, cy, 0), v10b = vid(cx + 1, cy, 0);
      int v01b = vid(cx, cy + 1, 0), v11b = vid(cx + 1, cy + 1, 0);
      faces.push_back({v00b, v11b, v10b});
      faces.push_back({v00b, v01b, v11b});
      // side walls along region boundary edges
      auto wall = [&](int ax, int ay, int bx, int by) {
        int a0 = vid(ax, ay, 0), b0 = vid(bx, by, 0);
        int a1 = vid(ax, ay, 1), b1 = vid(bx, by, 1);
        faces.push_back({a0, b0, b1});
        faces.push_back({a0, b1, a1});
      };
      if (!in_region(cx, cy - 1)) wall(cx, cy, cx + 1, cy);
      if (!in_region(cx, cy + 1)) wall(cx + 1, cy + 1, cx, cy + 1);
      if (!in_region(cx - 1, cy)) wall(cx, cy + 1, cx, cy);
      if (!in_region(cx + 1, cy)) wall(cx + 1, cy, cx + 1, cy + 1);
    }
  return build_surface(std::move(verts), std::move(faces));
}

SurfaceMesh make_shell(int outer_subdiv, double outer_radius, int inner_subdiv,
                       double inner_radius) {
  SurfaceMesh outer = make_icosphere(outer_subdiv, outer_radius);
  SurfaceMesh inner = make_icosphere(inner_subdiv, inner_radius);
  std::vector<Vec3> verts = outer.vertices;
  std::vector<std::array<int, 3>> faces = outer.triangles;
  const int off = static_cast<int>(verts.size());
  verts.insert(verts.end(), inner.vertices.begin(), inner.vertices.end());
  for (auto t : inner.triangles)
    faces.push_back({t[0] + off, t[1] + off, t[2] + off});
  return build_surface(std::move(verts), std::move(faces));
}

}  // namespace bsd
