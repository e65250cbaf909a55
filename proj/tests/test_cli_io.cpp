#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsd/field_io.hpp"
#include "bsd/meshgen.hpp"

using namespace bsd;

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("BSD_CLI");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>&1";
  std::array<char, 4096> buf;
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WEXITSTATUS(status);
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("CSV round trip at full precision") {
  const std::vector<Vec3> pts = {{0.1, -0.2, 0.30000000000000004},
                                 {1.0 / 3.0, 2.0 / 7.0, -1e-17}};
  const std::vector<Vec3> vals = {{-1.5, 0.123456789012345678, 3.0},
                                  {0, 2e300, -2.2250738585072014e-308}};
  const auto path = temp_dir("bsd_io") / "field.csv";
  write_field_csv(path.string(), pts, vals);

  std::vector<Vec3> rpts, rvals;
  read_field_csv(path.string(), &rpts, &rvals);
  REQUIRE(rpts.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK((rpts[i] - pts[i]).norm() == 0.0);
    CHECK(rvals[i].x == vals[i].x);
    CHECK(rvals[i].y == vals[i].y);
    CHECK(rvals[i].z == vals[i].z);
  }
}

TEST_CASE("identical data writes byte-identical files") {
  const std::vector<Vec3> pts = {{0.1, 0.2, 0.3}};
  const std::vector<Vec3> vals = {{1.0 / 3, 1.0 / 7, 1.0 / 11}};
  const auto d = temp_dir("bsd_io");
  write_field_csv((d / "a.csv").string(), pts, vals);
  write_field_csv((d / "b.csv").string(), pts, vals);
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
}

TEST_CASE("VTK legacy structure") {
  const auto path = temp_dir("bsd_io") / "field.vtk";
  write_field_vtk(path.string(), {{0, 0, 0}, {1, 0, 0}},
                  {{0, 1, 0}, {0, 0, 1}});
  const std::string text = slurp(path);
  CHECK(text.find("# vtk DataFile Version 3.0") == 0);
  CHECK(text.find("ASCII") != std::string::npos);
  CHECK(text.find("POINTS 2 double") != std::string::npos);
  CHECK(text.find("POINT_DATA 2") != std::string::npos);
  CHECK(text.find("VECTORS u double") != std::string::npos);
}

TEST_CASE("cli: mesh-info on the builtin fixtures") {
  SUBCASE("icosphere") {
    const RunResult r = run_cli("mesh-info --mesh icosphere:3:1.0 --voxel-h 0.1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("components: 1") != std::string::npos);
    CHECK(r.output.find("genus: [0]") != std::string::npos);
    CHECK(r.output.find("harmonic_dim: 0") != std::string::npos);
  }
  SUBCASE("torus") {
    const RunResult r = run_cli("mesh-info --mesh torus:1.0:0.4:32:16 --voxel-h 0.08");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("genus: [1]") != std::string::npos);
    CHECK(r.output.find("harmonic_dim: 1") != std::string::npos);
  }
}

TEST_CASE("cli: open mesh exits 2 and names the edge") {
  SurfaceMesh s = make_icosphere(1);
  const auto path = temp_dir("bsd_io") / "open.off";
  {
    std::ofstream out(path);
    out << "OFF\n" << s.vertices.size() << " " << s.triangles.size() - 1
        << " 0\n";
    for (const Vec3& v : s.vertices)
      out << v.x << " " << v.y << " " << v.z << "\n";
    for (size_t t = 0; t + 1 < s.triangles.size(); ++t)
      out << "3 " << s.triangles[t][0] << " " << s.triangles[t][1] << " "
          << s.triangles[t][2] << "\n";
  }
  const RunResult r = run_cli("mesh-info --mesh " + path.string() + " --voxel-h 0.2");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("edge (") != std::string::npos);
}

TEST_CASE("cli: solve writes the sampled field and diagnostics") {
  const auto out = temp_dir("bsd_solve_out");
  const std::string args =
      "solve --mesh icosphere:2:1.0 --voxel-h 0.1 --vorticity constant:0,0,1 "
      "--probe-points nodes:50 --vtk --output-dir " +
      out.string();
  const RunResult r = run_cli(args);
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out / "u.csv"));
  CHECK(fs::exists(out / "u.vtk"));
  CHECK(fs::exists(out / "diagnostics.json"));

  std::vector<Vec3> pts, vals;
  read_field_csv((out / "u.csv").string(), &pts, &vals);
  REQUIRE(pts.size() == 50);
  double num = 0, den = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec3 want = cross(Vec3{0, 0, 1}, pts[i]) * 0.5;
    num += (vals[i] - want).norm2();
    den += want.norm2();
  }
  CHECK(std::sqrt(num / den) <= 0.15);  // coarse smoke resolution

  SUBCASE("byte-identical on a re-run") {
    const std::string csv1 = slurp(out / "u.csv");
    const RunResult r2 = run_cli(args);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(out / "u.csv") == csv1);
  }
}

TEST_CASE("cli: inadmissible shell vorticity exits 3 with the fluxes") {
  const auto out = temp_dir("bsd_solve_rej");
  const RunResult r = run_cli(
      "solve --mesh shell:2:2.0:2:1.0 --voxel-h 0.15 --vorticity radial "
      "--output-dir " +
      out.string());
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("flux[Gamma_") != std::string::npos);
  CHECK(r.output.find("12.56") != std::string::npos);  // |flux| = 4 pi
}

TEST_CASE("cli: config file plus override") {
  const auto d = temp_dir("bsd_cfg");
  const auto cfg = d / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "mesh = icosphere:2:1.0\n"
        << "voxel-h = 0.15\n"
        << "vorticity = constant:0,0,1\n";
  }
  const RunResult r =
      run_cli("mesh-info --config " + cfg.string() + " --voxel-h 0.2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("components: 1") != std::string::npos);
}
