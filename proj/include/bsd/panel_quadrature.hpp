#pragma once

#include <cmath>

#include "bsd/tolerances.hpp"
#include "bsd/vec3.hpp"

namespace bsd {

// Degree-5 7-point rule on the triangle (barycentric weights/points).
namespace tri_rule {
inline constexpr double w[7] = {
    0.225,
    0.13239415278850616, 0.13239415278850616, 0.13239415278850616,
    0.12593918054482717, 0.12593918054482717, 0.12593918054482717};
inline constexpr double b[7][3] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3},
    {0.059715871789770, 0.470142064105115, 0.470142064105115},
    {0.470142064105115, 0.059715871789770, 0.470142064105115},
    {0.470142064105115, 0.470142064105115, 0.059715871789770},
    {0.797426985353087, 0.101286507323456, 0.101286507323456},
    {0.101286507323456, 0.797426985353087, 0.101286507323456},
    {0.101286507323456, 0.101286507323456, 0.797426985353087}};
}  // namespace tri_rule

inline double quad_mag(double v) { return std::abs(v); }
inline double quad_mag(const Vec3& v) { return v.norm(); }

template <class T, class F>
T rule7(const F& f, const Vec3& a, const Vec3& b, const Vec3& c, double area) {
  T acc{};
  for (int q = 0; q < 7; ++q) {
    const Vec3 y = a * tri_rule::b[q][0] + b * tri_rule::b[q][1] +
                   c * tri_rule::b[q][2];
    acc += f(y) * tri_rule::w[q];
  }
  return acc * area;
}

// Adaptive 4-way subdivision: accept when one refinement changes the value
// by less than rel_tol, or at the depth cap.
template <class T, class F>
T integrate_triangle(const F& f, const Vec3& a, const Vec3& b, const Vec3& c,
                     double area, double rel_tol, int depth) {
  const T coarse = rule7<T>(f, a, b, c, area);
  if (depth <= 0) return coarse;
  const Vec3 mab = (a + b) * 0.5, mbc = (b + c) * 0.5, mca = (c + a) * 0.5;
  const double qa = 0.25 * area;
  T fine = rule7<T>(f, a, mab, mca, qa);
  fine += rule7<T>(f, mab, b, mbc, qa);
  fine += rule7<T>(f, mca, mbc, c, qa);
  fine += rule7<T>(f, mab, mbc, mca, qa);
  if (quad_mag(fine - coarse) <= rel_tol * quad_mag(fine) + 1e-300) return fine;
  T out = integrate_triangle<T>(f, a, mab, mca, qa, rel_tol, depth - 1);
  out += integrate_triangle<T>(f, mab, b, mbc, qa, rel_tol, depth - 1);
  out += integrate_triangle<T>(f, mca, mbc, c, qa, rel_tol, depth - 1);
  out += integrate_triangle<T>(f, mab, mbc, mca, qa, rel_tol, depth - 1);
  return out;
}

}  // namespace bsd
