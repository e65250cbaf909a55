#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsd/divcurl.hpp"
#include "bsd/errors.hpp"
#include "bsd/meshgen.hpp"

using namespace bsd;

namespace {

const double kPi = 3.14159265358979323846;

DomainModel& ball() {  // acceptance-grade resolution
  static DomainModel m = make_domain(make_icosphere(3), 0.05);
  return m;
}

std::vector<Vec3> probe_points(const DomainModel& m, int count, double margin) {
  std::vector<Vec3> pts;
  const int n = m.volume.node_count();
  const int stride = std::max(1, n / (3 * count));
  for (int i = 0; i < n && (int)pts.size() < count; i += stride)
    if (distance_to_surface(m.surface, m.volume.nodes[i]) >= margin)
      pts.push_back(m.volume.nodes[i]);
  return pts;
}

double rel_l2_error(const std::vector<Vec3>& got, const std::vector<Vec3>& want) {
  double num = 0, den = 0;
  for (size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]).norm2();
    den += want[i].norm2();
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("solve_tangential: constant vorticity on the unit ball") {
  const auto& m = ball();
  const VolumeField omega(std::vector<Vec3>(m.volume.node_count(), Vec3{0, 0, 1}));
  const FieldEvaluator u =
      solve_tangential(m, omega, [](const Vec3&) { return Vec3{0, 0, 1}; });

  const auto pts = probe_points(m, 200, 4 * m.volume.h);
  REQUIRE((int)pts.size() == 200);
  std::vector<Vec3> got, want;
  for (const Vec3& x : pts) {
    got.push_back(u(x));
    want.push_back(cross(Vec3{0, 0, 1}, x) * 0.5);
  }
  CHECK(rel_l2_error(got, want) <= 0.05);
}

TEST_CASE("solve_tangential: zero vorticity gives the zero field") {
  DomainModel m = make_domain(make_icosphere(2), 0.1);
  const FieldEvaluator u =
      solve_tangential(m, VolumeField::zeros(m.volume.node_count()));
  double sup = 0;
  for (const Vec3& x : probe_points(m, 20, 2 * m.volume.h))
    sup = std::max(sup, u(x).norm());
  CHECK(sup <= 1e-10);
}

TEST_CASE("solve_tangential: radial vorticity on the shell is rejected") {
  DomainModel shell = make_domain(make_shell(2, 2.0, 2, 1.0), 0.15);
  auto radial = [](const Vec3& y) {
    const double r = y.norm();
    return y / (r * r * r);
  };
  const VolumeField omega = VolumeField::sample(shell.volume, radial);
  CHECK_THROWS_AS(solve_tangential(shell, omega, radial), FluxViolation);
  try {
    solve_tangential(shell, omega, radial);
  } catch (const FluxViolation& e) {
    double worst = 0;
    for (double f : e.component_fluxes) worst = std::max(worst, std::abs(f));
    CHECK(worst == doctest::Approx(4 * kPi).epsilon(0.02));
  }
}

TEST_CASE("newton_potential") {
  DomainModel m = make_domain(make_icosphere(2), 0.1);
  const std::vector<double> one(m.volume.node_count(), 1.0);
  CHECK(newton_potential(m, one, {0, 0, 0}) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(newton_potential(m, one, {2, 0, 0}) ==
        doctest::Approx(1.0 / 6.0).epsilon(0.02));
  const std::vector<double> zero(m.volume.node_count(), 0.0);
  CHECK(newton_potential(m, zero, {0.2, 0.1, 0}) == 0.0);
}

TEST_CASE("solve_general") {
  const auto& m = ball();
  const int nv = m.volume.node_count();
  const int np = m.surface.panel_count();

  SUBCASE("all-zero data") {
    const FieldEvaluator v = solve_general(m, VolumeField::zeros(nv),
                                           std::vector<double>(nv, 0.0),
                                           BoundaryDensity::zeros(np));
    double sup = 0;
    for (const Vec3& x : probe_points(m, 10, 4 * m.volume.h))
      sup = std::max(sup, v(x).norm());
    CHECK(sup <= 1e-10);
  }
  SUBCASE("pure source: div v = 3, v.nu = 1 gives v = x") {
    const FieldEvaluator v =
        solve_general(m, VolumeField::zeros(nv), std::vector<double>(nv, 3.0),
                      BoundaryDensity(std::vector<double>(np, 1.0)));
    const auto pts = probe_points(m, 50, 4 * m.volume.h);
    std::vector<Vec3> got, want;
    for (const Vec3& x : pts) {
      got.push_back(v(x));
      want.push_back(x);
    }
    CHECK(rel_l2_error(got, want) <= 0.05);
  }
  SUBCASE("superposition with the constant vorticity") {
    const FieldEvaluator v = solve_general(
        m, VolumeField(std::vector<Vec3>(nv, Vec3{0, 0, 1})),
        std::vector<double>(nv, 3.0),
        BoundaryDensity(std::vector<double>(np, 1.0)),
        [](const Vec3&) { return Vec3{0, 0, 1}; });
    const auto pts = probe_points(m, 50, 4 * m.volume.h);
    std::vector<Vec3> got, want;
    for (const Vec3& x : pts) {
      got.push_back(v(x));
      want.push_back(x + cross(Vec3{0, 0, 1}, x) * 0.5);
    }
    CHECK(rel_l2_error(got, want) <= 0.05);
  }
  SUBCASE("incompatible data is rejected") {
    CHECK_THROWS_AS(
        solve_general(m, VolumeField::zeros(nv), std::vector<double>(nv, 3.0),
                      BoundaryDensity(std::vector<double>(np, 1.1))),
        CompatibilityViolation);
  }
}

TEST_CASE("residuals") {
  const auto& m = ball();
  const int nv = m.volume.node_count();
  const VolumeField omega(std::vector<Vec3>(nv, Vec3{0, 0, 1}));

  SUBCASE("analytic evaluator: curl and div residuals are FD-exact") {
    // wrap the exact solution around a zero solve
    FieldEvaluator zero = solve_tangential(m, VolumeField::zeros(nv));
    FieldEvaluator exact = zero.with_added_field(
        [](const Vec3& x) { return cross(Vec3{0, 0, 1}, x) * 0.5; });
    // the added field does not change the cached normalization, so feed the
    // tangency scale by hand through a fresh report
    const ResidualReport rep = residuals(m, exact, omega, 60);
    CHECK(rep.curl_max <= 1e-6);
    CHECK(rep.div_max <= 1e-6);
    // tangency is limited by panel faceting, not by the field
    CHECK(rep.tang_max * exact.diagnostics().reference_scale <= 0.02);
  }
  SUBCASE("solved field: all residuals within 5%") {
    const FieldEvaluator u =
        solve_tangential(m, omega, [](const Vec3&) { return Vec3{0, 0, 1}; });
    const ResidualReport rep = residuals(m, u, omega);
    CHECK(rep.curl_l2 <= 0.05);
    CHECK(rep.div_l2 <= 0.05);
    CHECK(rep.tang_l2 <= 0.05);
  }
}

TEST_CASE("pipeline is linear in the vorticity") {
  DomainModel m = make_domain(make_icosphere(2), 0.1);
  const int nv = m.volume.node_count();
  auto w1 = [](const Vec3&) { return Vec3{0, 0, 1}; };
  auto w2 = [](const Vec3&) { return Vec3{1, 0, 0}; };
  const double alpha = 0.7, beta = -1.3;
  auto combo = [&](const Vec3& y) { return w1(y) * alpha + w2(y) * beta; };

  const FieldEvaluator u1 = solve_tangential(m, VolumeField::sample(m.volume, w1), w1);
  const FieldEvaluator u2 = solve_tangential(m, VolumeField::sample(m.volume, w2), w2);
  const FieldEvaluator uc =
      solve_tangential(m, VolumeField::sample(m.volume, combo), combo);

  double worst = 0, scale = 0;
  for (const Vec3& x : probe_points(m, 20, 4 * m.volume.h)) {
    const Vec3 lhs = uc(x);
    const Vec3 rhs = u1(x) * alpha + u2(x) * beta;
    worst = std::max(worst, (lhs - rhs).norm());
    scale = std::max(scale, lhs.norm());
  }
  CHECK(worst <= 1e-8 * scale);
}
