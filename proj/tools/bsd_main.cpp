// bsd: generalized Biot-Savart solver for bounded domains.
//
// Subcommands: mesh-info, solve, solve-general, verify, probe-kernel,
// convergence. Configuration is a flat key=value file plus command-line
// overrides; see README.md.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bsd/divcurl.hpp"
#include "bsd/errors.hpp"
#include "bsd/field_io.hpp"
#include "bsd/kernel_probe.hpp"
#include "bsd/meshgen.hpp"
#include "bsd/tolerances.hpp"

using json = nlohmann::json;
using namespace bsd;

namespace {

struct RunConfig {
  std::string mesh = "icosphere:3:1.0";
  double voxel_h = 0.1;
  std::string vorticity = "constant:0,0,1";
  std::string source_f = "constant:0";
  std::string boundary_g = "constant:0";
  std::string probe_points = "nodes:200";
  std::string output_dir = ".";
  bool vtk = false;
  double tol_flux = tol::flux;
  double tol_panel = tol::panel;
  // probe-kernel
  std::string ring_center = "0,0,0";
  double ring_eps = 0.08;
  std::string probe_distances = "0.3,0.38,0.47,0.56,0.65,0.72,0.8";
  std::string probe_direction = "1,0,0";
  // convergence
  int levels = 3;
  std::string mesh_fine, mesh_finer;
  std::string analytic = "ball_constant";
};

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

Vec3 parse_vec3(const std::string& s) {
  const auto v = parse_numbers(s);
  if (v.size() != 3) throw std::invalid_argument("expected x,y,z: " + s);
  return {v[0], v[1], v[2]};
}

SurfaceMesh build_mesh(const std::string& spec) {
  if (spec.rfind("icosphere:", 0) == 0) {
    int subdiv;
    double r;
    if (std::sscanf(spec.c_str(), "icosphere:%d:%lf", &subdiv, &r) != 2)
      throw std::invalid_argument("mesh spec: icosphere:<subdiv>:<radius>");
    return make_icosphere(subdiv, r);
  }
  if (spec.rfind("torus:", 0) == 0) {
    double R, r;
    int nu, nv;
    if (std::sscanf(spec.c_str(), "torus:%lf:%lf:%d:%d", &R, &r, &nu, &nv) != 4)
      throw std::invalid_argument("mesh spec: torus:<R>:<r>:<n_major>:<n_minor>");
    return make_torus(R, r, nu, nv);
  }
  if (spec.rfind("shell:", 0) == 0) {
    int so, si;
    double ro, ri;
    if (std::sscanf(spec.c_str(), "shell:%d:%lf:%d:%lf", &so, &ro, &si, &ri) != 4)
      throw std::invalid_argument("mesh spec: shell:<subdiv>:<R>:<subdiv>:<r>");
    return make_shell(so, ro, si, ri);
  }
  if (spec == "genus2") return make_genus2_block();
  return load_surface(spec);
}

struct Vorticity {
  VolumeField field;
  TraceFn trace;  // null for file-sampled input
};

Vorticity build_vorticity(const RunConfig& cfg, const DomainModel& model) {
  const std::string& s = cfg.vorticity;
  if (s.rfind("constant:", 0) == 0) {
    const Vec3 w = parse_vec3(s.substr(9));
    return {VolumeField(std::vector<Vec3>(model.volume.node_count(), w)),
            [w](const Vec3&) { return w; }};
  }
  if (s == "radial") {
    auto fn = [](const Vec3& y) {
      const double r = y.norm();
      return y / (r * r * r);
    };
    return {VolumeField::sample(model.volume, fn), fn};
  }
  if (s.rfind("vortex_ring:", 0) == 0) {
    const auto rest = s.substr(12);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("vorticity spec: vortex_ring:<cx,cy,cz>:<eps>");
    const Vec3 c = parse_vec3(rest.substr(0, colon));
    const double eps = std::stod(rest.substr(colon + 1));
    return {vortex_ring(model, c, eps),
            [c, eps](const Vec3& x) { return vortex_ring_value(c, eps, x); }};
  }
  if (s.rfind("file:", 0) == 0) {
    std::vector<Vec3> pts, vecs;
    read_field_csv(s.substr(5), &pts, &vecs);
    if ((int)vecs.size() != model.volume.node_count())
      throw std::invalid_argument(
          "vorticity file must provide one row per volume node (" +
          std::to_string(model.volume.node_count()) + " expected, " +
          std::to_string(vecs.size()) + " found)");
    return {VolumeField(std::move(vecs)), nullptr};
  }
  throw std::invalid_argument("unknown vorticity spec: " + s);
}

std::vector<Vec3> build_probe_points(const RunConfig& cfg, const DomainModel& model) {
  const std::string& s = cfg.probe_points;
  const double margin = 4.0 * model.volume.h;
  if (s.rfind("nodes:", 0) == 0) {
    const int count = std::stoi(s.substr(6));
    std::vector<Vec3> pts;
    const int n = model.volume.node_count();
    const int stride = std::max(1, n / (3 * count));
    for (int i = 0; i < n && (int)pts.size() < count; i += stride)
      if (distance_to_surface(model.surface, model.volume.nodes[i]) >= margin)
        pts.push_back(model.volume.nodes[i]);
    return pts;
  }
  if (s.rfind("list:", 0) == 0) {
    std::vector<Vec3> pts;
    std::istringstream ss(s.substr(5));
    std::string item;
    while (std::getline(ss, item, ';')) pts.push_back(parse_vec3(item));
    return pts;
  }
  if (s.rfind("file:", 0) == 0) {
    std::ifstream in(s.substr(5));
    if (!in) throw std::runtime_error("cannot open probe file");
    std::vector<Vec3> pts;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      for (char& c : line)
        if (c == ',') c = ' ';
      std::istringstream ls(line);
      Vec3 p;
      if (ls >> p.x >> p.y >> p.z) pts.push_back(p);
    }
    return pts;
  }
  throw std::invalid_argument("unknown probe_points spec: " + s);
}

json residual_json(const ResidualReport& rep) {
  return json{{"curl_max", rep.curl_max}, {"curl_l2", rep.curl_l2},
              {"div_max", rep.div_max},   {"div_l2", rep.div_l2},
              {"tang_max", rep.tang_max}, {"tang_l2", rep.tang_l2},
              {"probes", rep.probe_count}};
}

json diagnostics_json(const SolveDiagnostics& d) {
  json j;
  j["omega_fluxes"] = d.omega_fluxes;
  j["omega_trace_l1"] = d.omega_trace_l1;
  j["f"] = {{"residual", d.f_info.residual_rel},
            {"rank", d.f_info.rank},
            {"cond", d.f_info.cond_estimate},
            {"sup", d.f_sup}};
  j["g"] = {{"residual", d.g_info.residual_rel},
            {"rank", d.g_info.rank},
            {"cond", d.g_info.cond_estimate},
            {"sup", d.g_sup}};
  j["v_trace_sup"] = d.v_trace_sup;
  j["reference_scale"] = d.reference_scale;
  j["div_advisory"] = {{"triggered", d.div_advisory_triggered},
                       {"value", d.div_advisory_value}};
  return j;
}

int cmd_mesh_info(const RunConfig& cfg) {
  SurfaceMesh mesh = build_mesh(cfg.mesh);
  DomainModel model = make_domain(mesh, cfg.voxel_h);
  std::printf("components: %d\n", mesh.num_components);
  std::string genus = "[";
  for (size_t c = 0; c < model.genus_per_component.size(); ++c)
    genus += (c ? ", " : "") + std::to_string(model.genus_per_component[c]);
  genus += "]";
  std::printf("genus: %s\n", genus.c_str());
  std::printf("harmonic_dim: %d\n", model.harmonic_dim);
  std::printf("area: %.10g\n", mesh.total_area());
  std::printf("volume: %.10g\n", mesh.enclosed_volume());
  double worst = 0;
  for (double r : mesh.closure_residuals()) worst = std::max(worst, r);
  std::printf("closure_residual: %.3e\n", worst);
  return 0;
}

int cmd_solve(const RunConfig& cfg, bool general) {
  SurfaceMesh mesh = build_mesh(cfg.mesh);
  DomainModel model = make_domain(std::move(mesh), cfg.voxel_h);
  Vorticity omega = build_vorticity(cfg, model);

  FieldEvaluator u = [&] {
    if (!general) return solve_tangential(model, omega.field, omega.trace);
    auto parse_const = [](const std::string& s, const char* what) {
      if (s.rfind("constant:", 0) != 0)
        throw std::invalid_argument(std::string(what) + ": only constant:<v>");
      return std::stod(s.substr(9));
    };
    const double fv = parse_const(cfg.source_f, "source_f");
    const double gv = parse_const(cfg.boundary_g, "boundary_g");
    return solve_general(
        model, omega.field, std::vector<double>(model.volume.node_count(), fv),
        BoundaryDensity(std::vector<double>(model.surface.panel_count(), gv)),
        omega.trace);
  }();

  const auto pts = build_probe_points(cfg, model);
  std::vector<Vec3> values(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) values[i] = u(pts[i]);

  std::filesystem::create_directories(cfg.output_dir);
  const auto out = std::filesystem::path(cfg.output_dir);
  write_field_csv((out / "u.csv").string(), pts, values);
  if (cfg.vtk) write_field_vtk((out / "u.vtk").string(), pts, values);

  const ResidualReport rep = residuals(model, u, omega.field);
  json diag = diagnostics_json(u.diagnostics());
  diag["residuals"] = residual_json(rep);
  std::ofstream(out / "diagnostics.json") << diag.dump(2) << "\n";

  std::printf("wrote %s (%zu points)\n", (out / "u.csv").string().c_str(),
              pts.size());
  std::printf("residuals: curl %.3g, div %.3g, tangency %.3g\n", rep.curl_l2,
              rep.div_l2, rep.tang_l2);
  return 0;
}

int cmd_probe_kernel(const RunConfig& cfg) {
  SurfaceMesh mesh = build_mesh(cfg.mesh);
  DomainModel model = make_domain(std::move(mesh), cfg.voxel_h);
  const Vec3 y = parse_vec3(cfg.ring_center);
  const Vec3 dir = parse_vec3(cfg.probe_direction).normalized();
  std::vector<Vec3> xs;
  for (double d : parse_numbers(cfg.probe_distances)) xs.push_back(y + dir * d);

  const ProbeReport rep = probe_decay(model, y, cfg.ring_eps, xs);
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / "probe.csv";
  rep.write_csv(path.string());
  std::printf("ell(y) = %.6g\n", rep.ell_y);
  std::printf("fitted_slope = %.6g\n", rep.fitted_slope);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

bool check_line(const char* name, double value, double limit) {
  const bool ok = value <= limit;
  std::printf("%-42s %10.4g  (limit %.3g)  %s\n", name, value, limit,
              ok ? "PASS" : "FAIL");
  return ok;
}

int cmd_verify(const RunConfig& cfg) {
  bool ok = true;

  {  // ball-constant: end-to-end solve against the rigid rotation
    DomainModel m = make_domain(make_icosphere(3), cfg.voxel_h);
    const VolumeField omega(
        std::vector<Vec3>(m.volume.node_count(), Vec3{0, 0, 1}));
    const FieldEvaluator u =
        solve_tangential(m, omega, [](const Vec3&) { return Vec3{0, 0, 1}; });
    double num = 0, den = 0;
    int used = 0;
    const int stride = std::max(1, m.volume.node_count() / 600);
    for (int i = 0; i < m.volume.node_count() && used < 200; i += stride) {
      const Vec3 x = m.volume.nodes[i];
      if (distance_to_surface(m.surface, x) < 4 * m.volume.h) continue;
      const Vec3 want = cross(Vec3{0, 0, 1}, x) * 0.5;
      num += (u(x) - want).norm2();
      den += want.norm2();
      ++used;
    }
    ok &= check_line("ball-constant: rel L2 error vs exact", std::sqrt(num / den),
                     0.05);
    const ResidualReport rep = residuals(m, u, omega);
    ok &= check_line("ball-constant: curl residual", rep.curl_l2, 0.05);
    ok &= check_line("ball-constant: div residual", rep.div_l2, 0.05);
    ok &= check_line("ball-constant: tangency residual", rep.tang_l2, 0.05);
  }

  {  // ball identities for F in {zhat, y}
    DomainModel m = make_domain(make_icosphere(3), 0.1);
    const int nv = m.volume.node_count();
    std::vector<Vec3> ptset;
    for (const Vec3 p : {Vec3{0.3, 0.1, -0.2}, Vec3{-0.4, 0.2, 0.3},
                         Vec3{0.1, -0.5, 0.2}, Vec3{0, 0, 0}})
      ptset.push_back(p);
    double worst_const = 0, worst_radial = 0, worst_trace = 0;
    const VolumeField fz(std::vector<Vec3>(nv, Vec3{0, 0, 1}));
    const VolumeField fy =
        VolumeField::sample(m.volume, [](const Vec3& y) { return y; });
    for (const Vec3& x : ptset) {
      worst_const = std::max(
          worst_const,
          curl_identity_residual(m, fz, std::vector<double>(nv, 0.0), x).norm());
      worst_radial = std::max(
          worst_radial,
          curl_identity_residual(m, fy, std::vector<double>(nv, 3.0), x).norm());
      const Mat3 g = bs_gradient_pv(m, fz, x);
      worst_trace = std::max(worst_trace, std::abs(g.trace()));
    }
    ok &= check_line("ball-identities: curl residual (F = zhat)", worst_const, 0.05);
    ok &= check_line("ball-identities: curl residual (F = y)", worst_radial, 0.05);
    ok &= check_line("ball-identities: |div| of the PV gradient", worst_trace, 0.03);
  }

  {  // torus: genus-1 gauge invariance
    DomainModel m = make_domain(make_torus(1.0, 0.4, 48, 20), 0.04);
    const VolumeField omega(
        std::vector<Vec3>(m.volume.node_count(), Vec3{0, 0, 1}));
    const FieldEvaluator u =
        solve_tangential(m, omega, [](const Vec3&) { return Vec3{0, 0, 1}; });
    const ResidualReport base = residuals(m, u, omega);
    ok &= check_line("torus: curl residual", base.curl_l2, 0.05);
    ok &= check_line("torus: tangency residual", base.tang_l2, 0.05);
    double worst = 0;
    for (double c : {1.0, -1.0}) {
      const FieldEvaluator pert = u.with_added_field(
          [c](const Vec3& x) { return torus_harmonic_field(x) * c; });
      const ResidualReport rep = residuals(m, pert, omega);
      worst = std::max({worst, std::abs(rep.curl_l2 - base.curl_l2),
                        std::abs(rep.div_l2 - base.div_l2),
                        std::abs(rep.tang_l2 - base.tang_l2)});
    }
    ok &= check_line("torus: residual shift under +/- harmonic field", worst, 1e-3);
  }

  std::printf("%s\n", ok ? "ALL PASS" : "FAILURES PRESENT");
  return ok ? 0 : 1;
}

int cmd_convergence(const RunConfig& cfg) {
  std::vector<std::string> meshes = {cfg.mesh};
  if (!cfg.mesh_fine.empty()) meshes.push_back(cfg.mesh_fine);
  if (!cfg.mesh_finer.empty()) meshes.push_back(cfg.mesh_finer);
  if ((int)meshes.size() < cfg.levels)
    std::fprintf(stderr,
                 "[bsd] warning: missing finer meshes; falling back to "
                 "voxel-only refinement\n");

  if (cfg.vorticity.rfind("constant:", 0) != 0 || cfg.analytic != "ball_constant")
    throw std::invalid_argument(
        "convergence: only the ball_constant analytic case is built in");
  const Vec3 w = parse_vec3(cfg.vorticity.substr(9));

  // shared probe points from the coarsest level
  SurfaceMesh mesh0 = build_mesh(meshes[0]);
  DomainModel model0 = make_domain(mesh0, cfg.voxel_h);
  std::vector<Vec3> pts;
  {
    const double margin = 4.0 * cfg.voxel_h;
    const int n = model0.volume.node_count();
    const int stride = std::max(1, n / 600);
    for (int i = 0; i < n && (int)pts.size() < 200; i += stride)
      if (distance_to_surface(model0.surface, model0.volume.nodes[i]) >= margin)
        pts.push_back(model0.volume.nodes[i]);
  }

  std::printf("%-8s %-12s %-12s %-8s\n", "level", "h", "rel_L2_err", "order");
  double prev = 0;
  bool monotone = true;
  std::vector<double> errs;
  for (int lvl = 0; lvl < cfg.levels; ++lvl) {
    const double h = cfg.voxel_h / std::pow(2.0, lvl);
    SurfaceMesh mesh = build_mesh(meshes[std::min<size_t>(lvl, meshes.size() - 1)]);
    DomainModel model = make_domain(std::move(mesh), h);
    const VolumeField omega(std::vector<Vec3>(model.volume.node_count(), w));
    const FieldEvaluator u =
        solve_tangential(model, omega, [w](const Vec3&) { return w; });
    double num = 0, den = 0;
    for (const Vec3& x : pts) {
      const Vec3 want = cross(w, x) * 0.5;
      num += (u(x) - want).norm2();
      den += want.norm2();
    }
    const double err = std::sqrt(num / den);
    errs.push_back(err);
    if (lvl == 0)
      std::printf("%-8d %-12.5g %-12.5g %-8s\n", lvl, h, err, "-");
    else {
      std::printf("%-8d %-12.5g %-12.5g %-8.3f\n", lvl, h, err,
                  std::log2(prev / err));
      if (err >= prev) monotone = false;
    }
    prev = err;
  }
  if (!monotone) std::fprintf(stderr, "[bsd] warning: errors not monotone\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Biot-Savart operator for bounded domains"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->set_config("--config", "", "flat key=value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--mesh", cfg.mesh, "mesh file (OFF/OBJ) or builtin spec");
    sub->add_option("--voxel-h", cfg.voxel_h, "volume quadrature spacing");
    sub->add_option("--vorticity", cfg.vorticity, "vorticity spec");
    sub->add_option("--probe-points", cfg.probe_points, "probe point spec");
    sub->add_option("--output-dir", cfg.output_dir, "output directory");
    sub->add_flag("--vtk", cfg.vtk, "also write legacy VTK output");
    sub->add_option("--tol-flux", cfg.tol_flux, "flux admissibility tolerance");
    sub->add_option("--tol-panel", cfg.tol_panel, "panel quadrature tolerance");
  };

  auto* info = app.add_subcommand("mesh-info", "mesh diagnostics");
  add_common(info);
  auto* solve = app.add_subcommand("solve", "tangential Biot-Savart solve");
  add_common(solve);
  auto* general = app.add_subcommand("solve-general", "full div-curl system");
  add_common(general);
  general->add_option("--source-f", cfg.source_f, "divergence source spec");
  general->add_option("--boundary-g", cfg.boundary_g, "normal trace spec");
  auto* verify = app.add_subcommand("verify", "run the built-in fixtures");
  add_common(verify);
  auto* probe = app.add_subcommand("probe-kernel", "kernel decay probe");
  add_common(probe);
  probe->add_option("--ring-center", cfg.ring_center, "vortex ring center");
  probe->add_option("--ring-eps", cfg.ring_eps, "vortex ring radius");
  probe->add_option("--probe-distances", cfg.probe_distances, "distances");
  probe->add_option("--probe-direction", cfg.probe_direction, "ray direction");
  auto* conv = app.add_subcommand("convergence", "three-level refinement study");
  add_common(conv);
  conv->add_option("--levels", cfg.levels, "refinement levels");
  conv->add_option("--mesh-fine", cfg.mesh_fine, "mesh for level 1");
  conv->add_option("--mesh-finer", cfg.mesh_finer, "mesh for level 2");
  conv->add_option("--analytic", cfg.analytic, "analytic reference");

  CLI11_PARSE(app, argc, argv);
  tol::flux = cfg.tol_flux;
  tol::panel = cfg.tol_panel;

  try {
    if (info->parsed()) return cmd_mesh_info(cfg);
    if (solve->parsed()) return cmd_solve(cfg, false);
    if (general->parsed()) return cmd_solve(cfg, true);
    if (verify->parsed()) return cmd_verify(cfg);
    if (probe->parsed()) return cmd_probe_kernel(cfg);
    if (conv->parsed()) return cmd_convergence(cfg);
  } catch (const FluxViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    for (size_t c = 0; c < e.component_fluxes.size(); ++c)
      std::fprintf(stderr, "flux[Gamma_%zu] = %.6g\n", c, e.component_fluxes[c]);
    return 3;
  } catch (const AdmissibilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const MeshError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
