#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bsd/biot_savart.hpp"
#include "bsd/layer_potentials.hpp"
#include "bsd/errors.hpp"
#include "bsd/meshgen.hpp"

using namespace bsd;

namespace {

const double kPi = 3.14159265358979323846;

DomainModel& ball() {
  static DomainModel m = make_domain(make_icosphere(3), 0.1);
  return m;
}

VolumeField constant_field(const DomainModel& m, const Vec3& v) {
  return VolumeField(std::vector<Vec3>(m.volume.node_count(), v));
}

std::vector<Vec3> random_interior_points(const DomainModel& m, int count,
                                         double margin, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vec3> pts;
  while ((int)pts.size() < count) {
    const Vec3 x{U(rng), U(rng), U(rng)};
    if (point_inside(m.surface, x) &&
        distance_to_surface(m.surface, x) >= margin)
      pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("bs_volume on the unit ball with constant vorticity") {
  const auto& m = ball();
  const VolumeField f = constant_field(m, {0, 0, 1});

  SUBCASE("center: odd integrand") {
    CHECK(bs_volume(m, f, {0, 0, 0}).norm() < 1e-3);
  }
  SUBCASE("interior: w = z_hat x x / 3") {
    const Vec3 got = bs_volume(m, f, {0.5, 0, 0});
    CHECK((got - Vec3{0, 1.0 / 6.0, 0}).norm() <= 0.02 * (1.0 / 6.0));
  }
  SUBCASE("exterior: w = z_hat x x / (3 |x|^3)") {
    const Vec3 got = bs_volume(m, f, {3, 0, 0});
    CHECK((got - Vec3{0, 1.0 / 27.0, 0}).norm() <= 0.02 * (1.0 / 27.0));
  }
}

TEST_CASE("a_field") {
  const auto& m = ball();
  SUBCASE("surface moment at the center: -e_j / 3") {
    for (int j = 0; j < 3; ++j) {
      Vec3 want{};
      want[j] = -1.0 / 3.0;
      CHECK((a_field(m, {0, 0, 0}, j) - want).norm() <= 0.02 / 3.0);
    }
  }
  SUBCASE("uniformly bounded at 1000 interior points") {
    const auto pts = random_interior_points(m, 1000, 0.5 * m.volume.h, 42);
    double sup = 0.0;
    for (const Vec3& x : pts)
      for (int j = 0; j < 3; ++j) sup = std::max(sup, a_field(m, x, j).norm());
    CHECK(sup <= 2.0);
  }
  SUBCASE("axis out of range") {
    CHECK_THROWS_AS(a_field(m, {0, 0, 0}, 3), std::out_of_range);
    CHECK_THROWS_AS(a_field(m, {0, 0, 0}, -1), std::out_of_range);
  }
}

TEST_CASE("bs_gradient_pv") {
  const auto& m = ball();
  SUBCASE("constant z_hat field at the center") {
    const Mat3 g = bs_gradient_pv(m, constant_field(m, {0, 0, 1}), {0, 0, 0});
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double want = 0.0;
        if (j == 0 && k == 1) want = 1.0 / 3.0;
        if (j == 1 && k == 0) want = -1.0 / 3.0;
        CHECK(std::abs(g(j, k) - want) <= 0.03 / 3.0);
      }
  }
  SUBCASE("zero field") {
    const Mat3 g = bs_gradient_pv(m, VolumeField::zeros(m.volume.node_count()),
                                  {0.2, 0.1, 0});
    CHECK(g.frobenius_norm() == 0.0);
  }
  SUBCASE("margin enforced") {
    CHECK_THROWS_AS(
        bs_gradient_pv(m, constant_field(m, {0, 0, 1}), {0.99, 0, 0}),
        TooCloseToBoundary);
  }
}

TEST_CASE("divergence-free: trace of the gradient vanishes") {
  const auto& m = ball();
  // a couple of smooth non-trivial fields sampled at the nodes
  std::vector<std::function<Vec3(const Vec3&)>> fields = {
      [](const Vec3&) { return Vec3{0, 0, 1}; },
      [](const Vec3& y) { return Vec3{std::sin(y.z), y.x * y.x, y.y}; },
      [](const Vec3& y) {
        return Vec3{y.y * y.z, -y.x, std::cos(y.x + y.y)};
      }};
  const auto pts = random_interior_points(m, 34, 2.0 * m.volume.h, 7);
  for (const auto& fn : fields) {
    const VolumeField f = VolumeField::sample(m.volume, fn);
    for (const Vec3& x : pts) {
      const Mat3 g = bs_gradient_pv(m, f, x);
      CHECK(std::abs(g.trace()) <= 0.03 * g.frobenius_norm() + 1e-12);
    }
  }
}

TEST_CASE("consistency: finite differences of bs_volume match the PV gradient") {
  const auto& m = ball();
  const VolumeField f = VolumeField::sample(
      m.volume, [](const Vec3& y) { return Vec3{std::sin(y.z), y.x * y.x, y.y}; });
  const double step = m.volume.h / 4;
  const auto pts = random_interior_points(m, 8, 4.0 * m.volume.h, 99);
  for (const Vec3& x : pts) {
    const Mat3 g = bs_gradient_pv(m, f, x);
    for (int j = 0; j < 3; ++j) {
      Vec3 e{};
      e[j] = step;
      const Vec3 dp = bs_volume(m, f, x + e), dm = bs_volume(m, f, x - e);
      for (int k = 0; k < 3; ++k) {
        const double fd = (dp[k] - dm[k]) / (2 * step);
        CHECK(std::abs(fd - g(j, k)) <= 0.05 * std::abs(fd) + 0.02);
      }
    }
  }
}

TEST_CASE("curl identity") {
  const auto& m = ball();
  const int nv = m.volume.node_count();
  const auto pts = random_interior_points(m, 12, 2.0 * m.volume.h, 5);

  SUBCASE("constant field: curl w = (2/3) z_hat and the boundary term is z_hat/3") {
    const VolumeField f = constant_field(m, {0, 0, 1});
    const std::vector<double> divf(nv, 0.0);
    for (const Vec3& x : pts)
      CHECK(curl_identity_residual(m, f, divf, x).norm() <= 0.05);

    // the boundary correction in closed form: grad of the single layer of
    // F . nu = z is z_hat / 3 inside the sphere
    std::vector<double> trace(m.surface.panel_count());
    for (int p = 0; p < m.surface.panel_count(); ++p)
      trace[p] = m.surface.normals[p].z;
    const Vec3 corr =
        -grad_single_layer(m, BoundaryDensity(trace), {0.2, -0.1, 0.3});
    CHECK((corr - Vec3{0, 0, 1.0 / 3.0}).norm() <= 0.05 / 3.0);
  }
  SUBCASE("zero field") {
    const VolumeField f = VolumeField::zeros(nv);
    const std::vector<double> divf(nv, 0.0);
    CHECK(curl_identity_residual(m, f, divf, {0.1, 0.2, 0.3}).norm() == 0.0);
  }
  SUBCASE("radial field y: everything cancels") {
    const VolumeField f =
        VolumeField::sample(m.volume, [](const Vec3& y) { return y; });
    const std::vector<double> divf(nv, 3.0);
    for (const Vec3& x : pts)
      CHECK(curl_identity_residual(m, f, divf, x).norm() <= 0.05);
  }
}

TEST_CASE("volume potential (Newton kernel)") {
  const auto& m = ball();
  const std::vector<double> one(m.volume.node_count(), 1.0);
  CHECK(volume_potential(m, one, {0, 0, 0}) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(volume_potential(m, one, {2, 0, 0}) ==
        doctest::Approx(1.0 / 6.0).epsilon(0.02));
  const std::vector<double> zero(m.volume.node_count(), 0.0);
  CHECK(volume_potential(m, zero, {0.4, 0, 0}) == 0.0);
}

TEST_CASE("refinement reduces the residuals of the identities") {
  DomainModel coarse = make_domain(make_icosphere(3), 0.1);
  DomainModel fine = make_domain(make_icosphere(3), 0.05);
  auto field_fn = [](const Vec3& y) { return Vec3{std::sin(y.z), y.x * y.x, y.y}; };
  const std::vector<Vec3> pts = {{0.3, 0.1, -0.2}, {-0.4, 0.2, 0.3}, {0, -0.5, 0.1}};

  auto worst_residuals = [&](const DomainModel& m) {
    const VolumeField f = VolumeField::sample(m.volume, field_fn);
    const std::vector<double> divf(m.volume.node_count(), 0.0);  // solenoidal
    double trace_res = 0, curl_res = 0;
    for (const Vec3& x : pts) {
      const Mat3 g = bs_gradient_pv(m, f, x);
      trace_res = std::max(trace_res, std::abs(g.trace()) / g.frobenius_norm());
      curl_res =
          std::max(curl_res, curl_identity_residual(m, f, divf, x).norm());
    }
    return std::pair{trace_res, curl_res};
  };

  const auto [t1, c1] = worst_residuals(coarse);
  const auto [t2, c2] = worst_residuals(fine);
  CHECK(t2 < t1);
  CHECK(c2 < c1);
  CHECK(std::log2(c1 / c2) >= 0.8);
}
