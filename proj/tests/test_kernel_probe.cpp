#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bsd/errors.hpp"
#include "bsd/kernel_probe.hpp"
#include "bsd/meshgen.hpp"

using namespace bsd;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("k1_eval") {
  SUBCASE("unit values") {
    const Vec3 got = k1_eval({1, 0, 0}, {0, 0, 0}, {0, 0, 1});
    CHECK((got - Vec3{0, 1.0 / (4 * kPi), 0}).norm() < 1e-15);
  }
  SUBCASE("parallel arguments vanish") {
    CHECK(k1_eval({2, 0, 0}, {1, 0, 0}, {5, 0, 0}).norm() == 0.0);
  }
  SUBCASE("inverse-square homogeneity") {
    const double n1 = k1_eval({1, 0, 0}, {0, 0, 0}, {0, 0, 1}).norm();
    const double n2 = k1_eval({2, 0, 0}, {0, 0, 0}, {0, 0, 1}).norm();
    CHECK(n1 / n2 == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("coincident points") {
    CHECK_THROWS_AS(k1_eval({1, 1, 1}, {1, 1, 1}, {0, 0, 1}), CoincidentPoints);
  }
}

TEST_CASE("k1_eval is exactly the bs_volume integrand") {
  DomainModel m = make_domain(make_icosphere(2), 0.1);
  const VolumeField f = VolumeField::sample(
      m.volume, [](const Vec3& y) { return Vec3{y.y, std::sin(y.x), 1.0}; });
  const Vec3 x{3, 0, 0};  // beyond every near-field rule
  Vec3 manual{};
  for (int i = 0; i < m.volume.node_count(); ++i)
    manual += k1_eval(x, m.volume.nodes[i], f.samples[i]) * m.volume.weights[i];
  const Vec3 fast = bs_volume(m, f, x);
  CHECK((manual - fast).norm() <= 1e-12 * manual.norm());
}

TEST_CASE("vortex_ring") {
  DomainModel m = make_domain(make_icosphere(3), 0.05);
  const Vec3 c{0.1, 0, 0};
  const double eps = 0.25;
  const VolumeField omega = vortex_ring(m, c, eps);

  SUBCASE("solenoidal in closed form") {
    // analytic divergence of chi'(r) rhat x zhat is identically zero;
    // spot-check with central differences of the closed-form field
    const double d = 1e-5;
    for (const Vec3 x : {c + Vec3{0.1, 0.05, 0.02}, c + Vec3{-0.07, 0.1, -0.04}}) {
      double div = 0;
      for (int k = 0; k < 3; ++k) {
        Vec3 e{};
        e[k] = d;
        div += (vortex_ring_value(c, eps, x + e)[k] -
                vortex_ring_value(c, eps, x - e)[k]) /
               (2 * d);
      }
      CHECK(std::abs(div) < 1e-6);
    }
  }
  SUBCASE("compact support: zero flux through every component") {
    std::vector<Vec3> at_centroids(m.surface.panel_count());
    for (int p = 0; p < m.surface.panel_count(); ++p)
      at_centroids[p] = vortex_ring_value(c, eps, m.surface.centroids[p]);
    for (double f : component_flux(m, at_centroids)) CHECK(std::abs(f) < 1e-14);
  }
  SUBCASE("total integral vanishes (curl of compact support)") {
    Vec3 total{};
    double l1 = 0;
    for (int i = 0; i < m.volume.node_count(); ++i) {
      total += omega.samples[i] * m.volume.weights[i];
      l1 += omega.samples[i].norm() * m.volume.weights[i];
    }
    CHECK(total.norm() < 0.02 * l1);
  }
  SUBCASE("support must clear the boundary") {
    CHECK_THROWS_AS(vortex_ring(m, {0.9, 0, 0}, 0.25), TooCloseToBoundary);
    CHECK_THROWS_AS(vortex_ring(m, {0, 0, 0}, 0.1), std::invalid_argument);
  }
}

TEST_CASE("torus_harmonic_field") {
  SUBCASE("value") {
    CHECK((torus_harmonic_field({1, 0, 0}) - Vec3{0, 1, 0}).norm() < 1e-15);
  }
  SUBCASE("closed-form curl and divergence vanish off the axis") {
    const double d = 1e-6;
    for (const Vec3 x : {Vec3{0.8, 0.3, 0.2}, Vec3{-1.2, 0.5, -0.4}}) {
      Vec3 du[3][2];
      for (int k = 0; k < 3; ++k) {
        Vec3 e{};
        e[k] = d;
        du[k][0] = torus_harmonic_field(x + e);
        du[k][1] = torus_harmonic_field(x - e);
      }
      auto D = [&](int k, int comp) {
        return (du[k][0][comp] - du[k][1][comp]) / (2 * d);
      };
      CHECK(std::abs(D(0, 0) + D(1, 1) + D(2, 2)) < 1e-6);
      CHECK(std::abs(D(1, 2) - D(2, 1)) < 1e-6);
      CHECK(std::abs(D(2, 0) - D(0, 2)) < 1e-6);
      CHECK(std::abs(D(0, 1) - D(1, 0)) < 1e-6);
    }
  }
  SUBCASE("tangent to the zigzag torus to machine precision") {
    SurfaceMesh torus = make_torus(1.0, 0.4, 48, 20);
    for (int p = 0; p < torus.panel_count(); ++p) {
      const Vec3 h = torus_harmonic_field(torus.centroids[p]);
      CHECK(std::abs(dot(h, torus.normals[p])) <= 1e-12 * h.norm());
    }
  }
  SUBCASE("axis") {
    CHECK_THROWS_AS(torus_harmonic_field({0, 0, 0.5}), OnAxis);
  }
}

TEST_CASE("probe_decay on the unit ball") {
  // Needs h <= eps/4; keep the mesh moderate, the ring support is tiny.
  DomainModel m = make_domain(make_icosphere(3), 0.02);
  const double eps = 0.08;
  std::vector<Vec3> xs;
  for (double r : {0.3, 0.38, 0.47, 0.56, 0.65, 0.72, 0.8})
    xs.push_back({r, 0, 0});

  const ProbeReport rep = probe_decay(m, {0, 0, 0}, eps, xs);
  CHECK(rep.ell_y == doctest::Approx(std::log(3.0)).epsilon(0.01));
  REQUIRE(rep.distances.size() == xs.size());
  for (size_t i = 1; i < rep.distances.size(); ++i)
    CHECK(rep.distances[i] > rep.distances[i - 1]);
  for (double r : rep.responses) CHECK(r > 0);
  CHECK(rep.fitted_slope >= -2.4);
  CHECK(rep.fitted_slope <= -1.6);

  SUBCASE("csv serialization") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "bsd_probe.csv").string();
    rep.write_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "distance,response,response_times_r2,ell_y");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == (int)xs.size());
  }
}

TEST_CASE("probe_decay rejects bad probe sets") {
  DomainModel m = make_domain(make_icosphere(2), 0.1);
  CHECK_THROWS_AS(probe_decay(m, {0, 0, 0}, 0.08, {}), std::invalid_argument);
  CHECK_THROWS_AS(probe_decay(m, {0, 0, 0}, 0.08, {{0.1, 0, 0}}),
                  std::invalid_argument);
}
