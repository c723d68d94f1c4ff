#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "vem/errors.hpp"
#include "vem/runner.hpp"

namespace {

void print_patch(const vem::PatchOptions& opt, const vem::PatchResult& res) {
  std::printf("patch %s  k=%d  ndofs=%d\n", opt.test.c_str(), opt.k, res.ndofs);
  std::printf("max relative stress deviation:       %.6e\n",
              res.max_rel_stress_dev);
  std::printf("max relative vertex displacement err: %.6e\n",
              res.max_rel_disp_err);
}

void print_convergence(const vem::ConvergenceResult& res) {
  std::printf("%-6s %-12s %-8s %-14s %-14s\n", "level", "h", "ndofs", "d1",
              "d2");
  for (const auto& r : res.rows)
    std::printf("%-6d %-12.5e %-8d %-14.6e %-14.6e\n", r.level, r.h, r.ndofs,
                r.d1, r.d2);
  std::printf("slope d1: %.3f   slope d2: %.3f\n", res.slope_d1, res.slope_d2);
}

void print_stabsweep(const vem::StabSweepResult& res) {
  std::printf("%-12s %-14s\n", "alpha0", "d1");
  for (const auto& r : res.rows)
    std::printf("%-12.4g %-14.6e\n", r.alpha0, r.d1);
  std::printf("spread (max/min): %.4g\n", res.spread);
}

void print_cook(const vem::CookResult& res) {
  std::printf("%-6s %-12s %-8s %-14s\n", "level", "h", "ndofs", "v_monitor");
  for (const auto& r : res.rows)
    std::printf("%-6d %-12.5e %-8d %-14.8f\n", r.level, r.h, r.ndofs,
                r.v_monitor);
  if (res.richardson_ok)
    std::printf("extrapolated limit: %.8f  (observed rate %.2f)\n", res.limit,
                res.rate);
  else
    std::printf("extrapolation unavailable; finest value: %.8f\n", res.limit);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Virtual element solver for 2D plane-strain elasticity on polygonal "
      "meshes"};
  app.require_subcommand(1);

  vem::PatchOptions popt;
  popt.out_dir = "out";
  auto* patch =
      app.add_subcommand("patch", "Uniform-stress patch tests on a five-cell "
                                  "polygonal mesh of the unit square");
  patch->add_option("--test", popt.test, "1a (tension) or 1b (shear)")
      ->required();
  patch->add_option("--k", popt.k, "polynomial order")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  patch->add_option("--tau", popt.tau, "stabilization constant")
      ->capture_default_str();
  patch->add_option("--grid", popt.grid_n, "stress sampling grid resolution")
      ->capture_default_str();
  patch->add_option("--out", popt.out_dir, "output directory")
      ->capture_default_str();
  patch->add_flag("--vtk", popt.write_vtk, "write a VTK solution file");

  vem::ConvergenceOptions copt;
  copt.out_dir = "out";
  std::string c_family = "squares";
  auto* conv = app.add_subcommand(
      "converge", "Convergence study against a manufactured solution");
  conv->add_option("--test", copt.test, "2a (cubic) or 2b (trigonometric)")
      ->required();
  conv->add_option("--mesh", c_family,
                   "mesh family: squares|concave|trapezoids|quads|triangles|"
                   "hexagons|voronoi|voronoi-random")
      ->capture_default_str();
  conv->add_option("--k", copt.k, "polynomial order")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  conv->add_option("--levels", copt.levels, "number of refinement levels")
      ->check(CLI::Range(1, 8))
      ->capture_default_str();
  conv->add_option("--seed", copt.seed, "random seed for jittered families")
      ->capture_default_str();
  conv->add_option("--tau", copt.tau, "stabilization constant")
      ->capture_default_str();
  conv->add_option("--out", copt.out_dir, "output directory")
      ->capture_default_str();
  conv->add_flag("--vtk", copt.write_vtk, "write a VTK file per level");

  vem::StabSweepOptions sopt;
  sopt.out_dir = "out";
  std::string s_family = "squares";
  auto* sweep = app.add_subcommand(
      "stabsweep", "Sensitivity of the error to the stabilization scale");
  sweep->add_option("--test", sopt.test, "2a (cubic) or 2b (trigonometric)")
      ->capture_default_str();
  sweep->add_option("--mesh", s_family, "mesh family")->capture_default_str();
  sweep->add_option("--k", sopt.k, "polynomial order")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  sweep->add_option("--level", sopt.level, "refinement level of the one mesh")
      ->check(CLI::Range(0, 7))
      ->capture_default_str();
  sweep->add_option("--alpha0", sopt.alpha0,
                    "multipliers of the default stabilization constant")
      ->expected(-1);
  sweep->add_option("--seed", sopt.seed, "random seed")->capture_default_str();
  sweep->add_option("--out", sopt.out_dir, "output directory")
      ->capture_default_str();

  vem::CookOptions kopt;
  kopt.out_dir = "out";
  auto* cook = app.add_subcommand(
      "cook", "Cook's membrane bending benchmark with mesh refinement");
  cook->add_option("--mesh", kopt.mesh, "quads or voronoi")
      ->capture_default_str();
  cook->add_option("--k", kopt.k, "polynomial order")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  cook->add_option("--levels", kopt.levels, "number of refinement levels")
      ->check(CLI::Range(1, 7))
      ->capture_default_str();
  cook->add_option("--seed", kopt.seed, "random seed for voronoi meshes")
      ->capture_default_str();
  cook->add_option("--tau", kopt.tau, "stabilization constant")
      ->capture_default_str();
  cook->add_option("--out", kopt.out_dir, "output directory")
      ->capture_default_str();
  cook->add_flag("--vtk", kopt.write_vtk, "write a VTK file per level");

  std::string m_family = "squares", m_out = "mesh.json";
  int m_n = 8;
  unsigned m_seed = 1234;
  auto* meshcmd =
      app.add_subcommand("mesh", "Generate a mesh file for use with solve");
  meshcmd->add_option("--family", m_family, "mesh family")
      ->capture_default_str();
  meshcmd
      ->add_option("--n", m_n,
                   "subdivisions per side (grid families) or seed count "
                   "(voronoi families)")
      ->capture_default_str();
  meshcmd->add_option("--seed", m_seed, "random seed")->capture_default_str();
  meshcmd->add_option("--out", m_out, "output mesh file")
      ->capture_default_str();

  vem::SolveRunOptions vopt;
  auto* solve = app.add_subcommand(
      "solve", "Solve one problem from a mesh file and a problem config");
  solve->add_option("--mesh", vopt.mesh_file, "mesh JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--problem", vopt.problem_file, "problem config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--out", vopt.out_dir, "output directory")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*patch) {
      print_patch(popt, vem::run_patch(popt));
    } else if (*conv) {
      copt.family = vem::parse_family(c_family);
      print_convergence(vem::run_convergence(copt));
    } else if (*sweep) {
      sopt.family = vem::parse_family(s_family);
      print_stabsweep(vem::run_stabsweep(sopt));
    } else if (*cook) {
      print_cook(vem::run_cook(kopt));
    } else if (*meshcmd) {
      const vem::Mesh mesh =
          vem::family_mesh_n(vem::parse_family(m_family), m_n, m_seed);
      vem::save_mesh(mesh, m_out);
      std::printf("wrote %s: %d vertices, %d cells\n", m_out.c_str(),
                  mesh.n_vertices(), mesh.n_cells());
    } else if (*solve) {
      const vem::SolveRunResult res = vem::run_solve(vopt);
      std::printf("ndofs=%d  free=%d  rel_residual=%.3e\n", res.ndofs,
                  res.report.n_free, res.report.rel_residual);
      if (res.monitor_displacement)
        std::printf("monitor displacement: u=%.8e  v=%.8e\n",
                    res.monitor_displacement->x, res.monitor_displacement->y);
      if (res.d1)
        std::printf("energy-seminorm error vs exact: %.6e\n", *res.d1);
      std::printf("wrote %s/solution.vtk and %s/displacement.csv\n",
                  vopt.out_dir.c_str(), vopt.out_dir.c_str());
    }
  } catch (const vem::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
