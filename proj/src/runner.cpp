#include "vem/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vem/errors.hpp"
#include "vem/meshgen.hpp"

namespace vem {

namespace {

using nlohmann::json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

// Append one line to <dir>/run.log.  Timings and other non-reproducible data
// go here so the CSV outputs stay byte-identical across reruns.
void log_line(const std::string& dir, const std::string& line) {
  if (dir.empty()) return;
  std::ofstream f(dir + "/run.log", std::ios::app);
  f << line << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& e) {
  const int n = static_cast<int>(h.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::log(h[i]);
    y[i] = std::log(std::max(e[i], 1e-300));
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

ProblemSpec spec_for_test(const std::string& test) {
  if (test == "1a") return patch_tension();
  if (test == "1b") return patch_shear();
  if (test == "2a") return cubic_solution();
  if (test == "2b") return trig_solution();
  throw ConfigError("unknown test id: " + test + " (expected 1a, 1b, 2a or 2b)");
}

std::string vtk_path(const std::string& dir, int level) {
  return dir + "/solution_" + std::to_string(level) + ".vtk";
}

}  // namespace

MeshFamily parse_family(const std::string& token) {
  if (token == "squares") return MeshFamily::squares;
  if (token == "concave") return MeshFamily::concave;
  if (token == "trapezoids") return MeshFamily::trapezoids;
  if (token == "quads") return MeshFamily::quads;
  if (token == "triangles") return MeshFamily::triangles;
  if (token == "hexagons") return MeshFamily::hexagons;
  if (token == "voronoi") return MeshFamily::voronoi;
  if (token == "voronoi-random") return MeshFamily::voronoi_random;
  throw ConfigError("unknown mesh family: " + token);
}

std::string family_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::squares: return "squares";
    case MeshFamily::concave: return "concave";
    case MeshFamily::trapezoids: return "trapezoids";
    case MeshFamily::quads: return "quads";
    case MeshFamily::triangles: return "triangles";
    case MeshFamily::hexagons: return "hexagons";
    case MeshFamily::voronoi: return "voronoi";
    case MeshFamily::voronoi_random: return "voronoi-random";
  }
  return "?";
}

Mesh family_mesh_n(MeshFamily f, int n, unsigned seed) {
  switch (f) {
    case MeshFamily::squares: return unit_square_quads(n);
    case MeshFamily::concave: return distorted_concave_quads(n);
    case MeshFamily::trapezoids: return trapezoid_quads(n);
    case MeshFamily::quads: return graded_quads(n);
    case MeshFamily::triangles: return jittered_triangles(n, seed);
    case MeshFamily::hexagons: return hexagon_mesh(n);
    case MeshFamily::voronoi: return voronoi_mesh(n, 20, seed);
    case MeshFamily::voronoi_random: return voronoi_mesh(n, 0, seed);
  }
  throw ConfigError("unknown mesh family");
}

Mesh family_mesh(MeshFamily f, int level, unsigned seed) {
  const bool voronoi =
      f == MeshFamily::voronoi || f == MeshFamily::voronoi_random;
  return family_mesh_n(f, voronoi ? (64 << (2 * level)) : (8 << level), seed);
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        h = std::max(h, dist(mesh.vertices[cell[i]], mesh.vertices[cell[j]]));
  }
  return h;
}

SolveOutcome solve_on_mesh(Mesh mesh, const ProblemSpec& spec, int k,
                           double tau, const SolveOptions& so) {
  SolveOutcome out;
  out.problem = make_problem(std::move(mesh), k, spec.mat, tau);
  const AssembledSystem sys = assemble(out.problem, spec.body, spec.bc);
  const Constraints cons = dirichlet_constraints(out.problem, spec.bc);
  out.u = solve_constrained(sys, cons, so, &out.report);
  return out;
}

PatchResult run_patch(const PatchOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec spec;
  Mesh mesh;
  if (opt.test == "1a") {
    spec = patch_tension();
    mesh = patch_mesh_tension();
  } else if (opt.test == "1b") {
    spec = patch_shear();
    mesh = patch_mesh_shear();
  } else {
    throw ConfigError("unknown patch test id: " + opt.test +
                      " (expected 1a or 1b)");
  }

  SolveOutcome sol = solve_on_mesh(std::move(mesh), spec, opt.k, opt.tau);
  const Problem& p = sol.problem;

  PatchResult res;
  res.ndofs = p.dofs.n_dofs;

  // Projected stress sampled on a half-offset grid over the unit square.
  std::vector<Eigen::VectorXd> coeffs(p.mesh.n_cells());
  for (int c = 0; c < p.mesh.n_cells(); ++c)
    coeffs[c] = projected_strain_coeffs(p, c, sol.u);
  const Eigen::Matrix3d C = p.mat.C();
  double sig_scale = 0.0;
  for (int i = 0; i < opt.grid_n; ++i) {
    for (int j = 0; j < opt.grid_n; ++j) {
      const Point2 x{(i + 0.5) / opt.grid_n, (j + 0.5) / opt.grid_n};
      const int c = locate_cell(p.mesh, x);
      if (c < 0) throw Error("patch sample point not inside any cell");
      const Eigen::Vector3d sh = C * strain_at(p, c, coeffs[c], x);
      const Eigen::Vector3d se = spec.exact->stress(x);
      sig_scale = std::max(sig_scale, se.lpNorm<Eigen::Infinity>());
      res.max_rel_stress_dev =
          std::max(res.max_rel_stress_dev, (sh - se).lpNorm<Eigen::Infinity>());
    }
  }
  res.max_rel_stress_dev /= sig_scale;

  double disp_scale = 0.0, disp_err = 0.0;
  for (int v = 0; v < p.mesh.n_vertices(); ++v) {
    const Point2 uh = displacement_at_vertex(p, v, sol.u);
    const Point2 ue = spec.exact->displacement(p.mesh.vertices[v]);
    disp_scale = std::max({disp_scale, std::abs(ue.x), std::abs(ue.y)});
    disp_err = std::max({disp_err, std::abs(uh.x - ue.x), std::abs(uh.y - ue.y)});
  }
  res.max_rel_disp_err = disp_err / disp_scale;

  if (!opt.out_dir.empty()) {
    ensure_dir(opt.out_dir);
    write_csv(opt.out_dir + "/results.csv",
              "k,ndofs,max_rel_stress_dev,max_rel_disp_err",
              {{static_cast<double>(opt.k), static_cast<double>(res.ndofs),
                res.max_rel_stress_dev, res.max_rel_disp_err}});
    if (opt.write_vtk) write_vtk(p, sol.u, opt.out_dir + "/solution_0.vtk");
    std::ostringstream os;
    os << "patch " << opt.test << " k=" << opt.k << " ndofs=" << res.ndofs
       << " stress_dev=" << res.max_rel_stress_dev << " ["
       << seconds_since(t0) << " s]";
    log_line(opt.out_dir, os.str());
  }
  return res;
}

ConvergenceResult run_convergence(const ConvergenceOptions& opt) {
  const ProblemSpec spec = spec_for_test(opt.test);
  if (!spec.exact) throw ConfigError("test has no exact solution: " + opt.test);

  ConvergenceResult res;
  if (!opt.out_dir.empty()) ensure_dir(opt.out_dir);
  std::vector<double> hs, d1s, d2s;
  std::vector<std::vector<double>> rows;
  for (int level = 0; level < opt.levels; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    Mesh mesh = family_mesh(opt.family, level, opt.seed);
    SolveOutcome sol = solve_on_mesh(std::move(mesh), spec, opt.k, opt.tau);

    ConvergenceRow row;
    row.level = level;
    row.h = mesh_size(sol.problem.mesh);
    row.ndofs = sol.problem.dofs.n_dofs;
    row.d1 = error_D1(sol.problem, sol.u, spec.exact->strain);
    row.d2 = error_D2(sol.problem, sol.u, spec.exact->gradient);
    res.rows.push_back(row);
    hs.push_back(row.h);
    d1s.push_back(row.d1);
    d2s.push_back(row.d2);
    rows.push_back({static_cast<double>(level), row.h,
                    static_cast<double>(row.ndofs), row.d1, row.d2});

    if (!opt.out_dir.empty()) {
      if (opt.write_vtk)
        write_vtk(sol.problem, sol.u, vtk_path(opt.out_dir, level));
      std::ostringstream os;
      os << "converge " << opt.test << " " << family_name(opt.family)
         << " k=" << opt.k << " level=" << level << " h=" << row.h
         << " ndofs=" << row.ndofs << " d1=" << row.d1 << " d2=" << row.d2
         << " [" << seconds_since(t0) << " s]";
      log_line(opt.out_dir, os.str());
    }
  }
  res.slope_d1 = loglog_slope(hs, d1s);
  res.slope_d2 = loglog_slope(hs, d2s);
  if (!opt.out_dir.empty()) {
    write_csv(opt.out_dir + "/results.csv", "level,h,ndofs,d1,d2", rows);
    std::ostringstream os;
    os << "slopes: d1=" << res.slope_d1 << " d2=" << res.slope_d2;
    log_line(opt.out_dir, os.str());
  }
  return res;
}

StabSweepResult run_stabsweep(const StabSweepOptions& opt) {
  const ProblemSpec spec = spec_for_test(opt.test);
  if (!spec.exact) throw ConfigError("test has no exact solution: " + opt.test);
  if (opt.alpha0.empty()) throw ConfigError("empty alpha0 list");

  const Mesh mesh = family_mesh(opt.family, opt.level, opt.seed);
  StabSweepResult res;
  if (!opt.out_dir.empty()) ensure_dir(opt.out_dir);
  std::vector<std::vector<double>> rows;
  double lo = 0.0, hi = 0.0;
  for (double a : opt.alpha0) {
    if (a <= 0.0) throw ConfigError("alpha0 must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    SolveOutcome sol = solve_on_mesh(mesh, spec, opt.k, 0.5 * a);
    const double d1 = error_D1(sol.problem, sol.u, spec.exact->strain);
    res.rows.push_back({a, d1});
    rows.push_back({a, d1});
    lo = (lo == 0.0) ? d1 : std::min(lo, d1);
    hi = std::max(hi, d1);
    if (!opt.out_dir.empty()) {
      std::ostringstream os;
      os << "stabsweep " << opt.test << " " << family_name(opt.family)
         << " k=" << opt.k << " alpha0=" << a << " d1=" << d1 << " ["
         << seconds_since(t0) << " s]";
      log_line(opt.out_dir, os.str());
    }
  }
  res.spread = hi / lo;
  if (!opt.out_dir.empty())
    write_csv(opt.out_dir + "/results.csv", "alpha0,d1", rows);
  return res;
}

Richardson richardson_limit(double coarse, double medium, double fine) {
  Richardson r;
  const double d1 = medium - coarse;
  const double d2 = fine - medium;
  if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) {
    const double q = d1 / d2;
    if (q > 1.02) {
      r.limit = fine + d2 / (q - 1.0);
      r.rate = std::log2(q);
      r.ok = true;
      return r;
    }
  }
  r.limit = fine;
  return r;
}

CookResult run_cook(const CookOptions& opt) {
  const ProblemSpec spec = cook_membrane();
  CookResult res;
  if (!opt.out_dir.empty()) ensure_dir(opt.out_dir);
  std::vector<std::vector<double>> rows;
  for (int level = 0; level < opt.levels; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    Mesh mesh;
    if (opt.mesh == "quads") {
      mesh = cook_quads(opt.base_n << level);
    } else if (opt.mesh == "voronoi") {
      mesh = cook_voronoi(opt.base_seeds << (2 * level), opt.seed);
    } else {
      throw ConfigError("unknown cook mesh type: " + opt.mesh +
                        " (expected quads or voronoi)");
    }
    SolveOutcome sol = solve_on_mesh(std::move(mesh), spec, opt.k, opt.tau);

    CookRow row;
    row.level = level;
    row.h = mesh_size(sol.problem.mesh);
    row.ndofs = sol.problem.dofs.n_dofs;
    const int v = nearest_vertex(sol.problem.mesh, *spec.monitor);
    row.v_monitor = displacement_at_vertex(sol.problem, v, sol.u).y;
    res.rows.push_back(row);
    rows.push_back({static_cast<double>(level), row.h,
                    static_cast<double>(row.ndofs), row.v_monitor});

    if (!opt.out_dir.empty()) {
      if (opt.write_vtk)
        write_vtk(sol.problem, sol.u, vtk_path(opt.out_dir, level));
      std::ostringstream os;
      os << "cook " << opt.mesh << " k=" << opt.k << " level=" << level
         << " h=" << row.h << " ndofs=" << row.ndofs
         << " v_monitor=" << row.v_monitor << " [" << seconds_since(t0)
         << " s]";
      log_line(opt.out_dir, os.str());
    }
  }
  const int nr = static_cast<int>(res.rows.size());
  if (nr >= 3) {
    const Richardson r =
        richardson_limit(res.rows[nr - 3].v_monitor, res.rows[nr - 2].v_monitor,
                         res.rows[nr - 1].v_monitor);
    res.limit = r.limit;
    res.rate = r.rate;
    res.richardson_ok = r.ok;
  } else if (nr > 0) {
    res.limit = res.rows[nr - 1].v_monitor;
  }
  if (!opt.out_dir.empty()) {
    write_csv(opt.out_dir + "/results.csv", "level,h,ndofs,v_monitor", rows);
    std::ostringstream os;
    os << "cook limit=" << res.limit << " rate=" << res.rate
       << " richardson_ok=" << res.richardson_ok;
    log_line(opt.out_dir, os.str());
  }
  return res;
}

namespace {

// Side classification against the mesh bounding box.
std::function<bool(Point2)> side_predicate(const std::string& side,
                                           const Mesh& mesh) {
  double xmin = mesh.vertices[0].x, xmax = xmin;
  double ymin = mesh.vertices[0].y, ymax = ymin;
  for (const Point2& v : mesh.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const double tol =
      1e-9 * std::max({xmax - xmin, ymax - ymin, 1.0});
  if (side == "left") return [=](Point2 p) { return std::abs(p.x - xmin) < tol; };
  if (side == "right") return [=](Point2 p) { return std::abs(p.x - xmax) < tol; };
  if (side == "bottom") return [=](Point2 p) { return std::abs(p.y - ymin) < tol; };
  if (side == "top") return [=](Point2 p) { return std::abs(p.y - ymax) < tol; };
  if (side == "all") return [](Point2) { return true; };
  throw ConfigError("unknown side token: " + side +
                    " (expected left/right/bottom/top/all)");
}

Material material_from_json(const json& m) {
  if (m.contains("E") || m.contains("nu")) {
    if (!(m.contains("E") && m.contains("nu")))
      throw ConfigError("material needs both E and nu");
    return Material::from_youngs(m.at("E").get<double>(),
                                 m.at("nu").get<double>());
  }
  if (m.contains("lambda") && m.contains("mu"))
    return Material::from_lame(m.at("lambda").get<double>(),
                               m.at("mu").get<double>());
  throw ConfigError("material needs either {E, nu} or {lambda, mu}");
}

ProblemSpec custom_spec(const json& cfg, const Mesh& mesh) {
  ProblemSpec spec;
  spec.name = "custom";
  if (!cfg.contains("material"))
    throw ConfigError("custom problem config needs a material");
  spec.mat = material_from_json(cfg.at("material"));

  if (cfg.contains("body")) {
    const auto b = cfg.at("body");
    if (!b.is_array() || b.size() != 2)
      throw ConfigError("body must be a [bx, by] pair");
    const double bx = b[0].get<double>(), by = b[1].get<double>();
    spec.body = [=](Point2) { return Point2{bx, by}; };
  }

  for (const auto& d : cfg.value("dirichlet", json::array())) {
    DirichletRule rule;
    rule.where = side_predicate(d.at("side").get<std::string>(), mesh);
    rule.fix_u = d.contains("u");
    rule.fix_v = d.contains("v");
    if (!rule.fix_u && !rule.fix_v)
      throw ConfigError("dirichlet rule fixes neither u nor v");
    const double uval = d.value("u", 0.0), vval = d.value("v", 0.0);
    rule.value = [=](Point2) { return Point2{uval, vval}; };
    spec.bc.dirichlet.push_back(rule);
  }
  for (const auto& nrule : cfg.value("neumann", json::array())) {
    NeumannRule rule;
    rule.where = side_predicate(nrule.at("side").get<std::string>(), mesh);
    const auto t = nrule.at("t");
    if (!t.is_array() || t.size() != 2)
      throw ConfigError("neumann traction must be a [tx, ty] pair");
    const double tx = t[0].get<double>(), ty = t[1].get<double>();
    rule.traction = [=](Point2, Point2) { return Point2{tx, ty}; };
    spec.bc.neumann.push_back(rule);
  }
  for (const auto& pin : cfg.value("pins", json::array())) {
    PointPin pp;
    const auto at = pin.at("at");
    if (!at.is_array() || at.size() != 2)
      throw ConfigError("pin location must be an [x, y] pair");
    pp.at = {at[0].get<double>(), at[1].get<double>()};
    pp.fix_u = pin.contains("u");
    pp.fix_v = pin.contains("v");
    if (!pp.fix_u && !pp.fix_v)
      throw ConfigError("pin fixes neither u nor v");
    pp.value = {pin.value("u", 0.0), pin.value("v", 0.0)};
    spec.bc.pins.push_back(pp);
  }
  return spec;
}

}  // namespace

SolveRunResult run_solve(const SolveRunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh mesh = load_mesh(opt.mesh_file);

  std::ifstream f(opt.problem_file);
  if (!f) throw ConfigError("cannot open problem file: " + opt.problem_file);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("invalid problem file " + opt.problem_file + ": " +
                      e.what());
  }

  ProblemSpec spec;
  if (cfg.contains("problem")) {
    if (cfg.contains("material"))
      throw ConfigError(
          "named problems fix their material; drop the material override");
    spec = named_problem(cfg.at("problem").get<std::string>());
  } else {
    spec = custom_spec(cfg, mesh);
  }
  const int k = cfg.value("k", 1);
  const double tau = cfg.value("tau", 0.5);
  SolveOptions so;
  const std::string method = cfg.value("solver", "direct");
  if (method == "cg") {
    so.method = SolveOptions::Method::cg;
  } else if (method != "direct") {
    throw ConfigError("unknown solver: " + method + " (expected direct or cg)");
  }

  SolveOutcome sol = solve_on_mesh(mesh, spec, k, tau, so);
  const Problem& p = sol.problem;

  SolveRunResult res;
  res.ndofs = p.dofs.n_dofs;
  res.report = sol.report;
  if (spec.monitor) {
    const int v = nearest_vertex(p.mesh, *spec.monitor);
    res.monitor_displacement = displacement_at_vertex(p, v, sol.u);
  }
  if (spec.exact) res.d1 = error_D1(p, sol.u, spec.exact->strain);

  ensure_dir(opt.out_dir);
  write_vtk(p, sol.u, opt.out_dir + "/solution.vtk");
  std::vector<std::vector<double>> rows;
  rows.reserve(p.mesh.n_vertices());
  for (int v = 0; v < p.mesh.n_vertices(); ++v) {
    const Point2 uv = displacement_at_vertex(p, v, sol.u);
    rows.push_back({static_cast<double>(v), p.mesh.vertices[v].x,
                    p.mesh.vertices[v].y, uv.x, uv.y});
  }
  write_csv(opt.out_dir + "/displacement.csv", "vertex,x,y,u,v", rows);
  std::ostringstream os;
  os << "solve " << spec.name << " k=" << k << " ndofs=" << res.ndofs
     << " rel_residual=" << res.report.rel_residual << " ["
     << seconds_since(t0) << " s]";
  log_line(opt.out_dir, os.str());
  return res;
}

}  // namespace vem
