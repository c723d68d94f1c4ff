#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vem/postproc.hpp"
#include "vem/problems.hpp"

namespace vem {

// Mesh families used by the benchmark drivers.  All are defined on the unit
// square except the Cook panel variants produced by run_cook.
enum class MeshFamily {
  squares,     // uniform axis-aligned squares
  concave,     // distorted quads, every interior cell non-convex
  trapezoids,  // sawtooth rows with a short 0.05/n edge
  quads,       // smoothly graded convex quads
  triangles,   // jittered Delaunay triangles
  hexagons,    // clipped honeycomb
  voronoi,     // Lloyd-relaxed Voronoi cells
  voronoi_random,  // unrelaxed Voronoi cells
};

MeshFamily parse_family(const std::string& token);
std::string family_name(MeshFamily f);

// Mesh with an explicit size parameter: subdivisions per side for the grid
// families, seed-point count for the Voronoi families.
Mesh family_mesh_n(MeshFamily f, int n, unsigned seed = 1234);

// Mesh for refinement level `level` (0-based).  Grid-like families use
// n = 8 * 2^level subdivisions; Voronoi families use 64 * 4^level seeds, so
// the mean spacing halves per level in both cases.
Mesh family_mesh(MeshFamily f, int level, unsigned seed = 1234);

// Representative mesh size: the largest cell diameter.
double mesh_size(const Mesh& mesh);

// One assemble-and-solve pass of a problem on a mesh.
struct SolveOutcome {
  Problem problem;
  Eigen::VectorXd u;
  SolveReport report;
};

SolveOutcome solve_on_mesh(Mesh mesh, const ProblemSpec& spec, int k,
                           double tau = 0.5, const SolveOptions& so = {});

// ---- patch tests -----------------------------------------------------------

struct PatchOptions {
  std::string test = "1a";  // 1a: tension, 1b: shear
  int k = 1;
  double tau = 0.5;
  int grid_n = 100;          // stress sampled on grid_n^2 half-offset points
  std::string out_dir;       // empty: write nothing
  bool write_vtk = false;
};

struct PatchResult {
  int ndofs = 0;
  double max_rel_stress_dev = 0.0;  // max-norm, over all sample points
  double max_rel_disp_err = 0.0;    // at mesh vertices
};

PatchResult run_patch(const PatchOptions& opt);

// ---- convergence studies ---------------------------------------------------

struct ConvergenceOptions {
  std::string test = "2a";  // 2a: cubic solution, 2b: trigonometric solution
  MeshFamily family = MeshFamily::squares;
  int k = 1;
  int levels = 4;
  unsigned seed = 1234;
  double tau = 0.5;
  std::string out_dir;
  bool write_vtk = false;
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int ndofs = 0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double slope_d1 = 0.0;  // least-squares slope of log(err) vs log(h)
  double slope_d2 = 0.0;
};

ConvergenceResult run_convergence(const ConvergenceOptions& opt);

// ---- stabilization sweep ---------------------------------------------------

struct StabSweepOptions {
  std::string test = "2a";
  MeshFamily family = MeshFamily::squares;
  int k = 1;
  int level = 1;  // single mesh level
  std::vector<double> alpha0 = {1e-2, 1e-1, 1.0, 1e1, 1e2};
  unsigned seed = 1234;
  std::string out_dir;
};

struct StabSweepRow {
  double alpha0 = 1.0;  // multiplies the default stabilization constant
  double d1 = 0.0;
};

struct StabSweepResult {
  std::vector<StabSweepRow> rows;
  double spread = 0.0;  // max(d1) / min(d1)
};

StabSweepResult run_stabsweep(const StabSweepOptions& opt);

// ---- Cook's membrane -------------------------------------------------------

struct CookOptions {
  std::string mesh = "quads";  // quads | voronoi
  int k = 2;
  int levels = 4;
  int base_n = 4;        // quads: n = base_n * 2^level (must stay even)
  int base_seeds = 16;   // voronoi: seeds = base_seeds * 4^level
  unsigned seed = 1234;
  double tau = 0.5;
  std::string out_dir;
  bool write_vtk = false;
};

struct CookRow {
  int level = 0;
  double h = 0.0;
  int ndofs = 0;
  double v_monitor = 0.0;  // vertical displacement at the monitor point
};

struct CookResult {
  std::vector<CookRow> rows;
  double limit = 0.0;  // Richardson extrapolation from the last three rows
  double rate = 0.0;   // observed order
  bool richardson_ok = false;
};

CookResult run_cook(const CookOptions& opt);

// Richardson extrapolation from three values on meshes refined by a constant
// factor (coarse, medium, fine).  Falls back to `fine` when the sequence is
// not monotonically converging.
struct Richardson {
  double limit = 0.0;
  double rate = 0.0;
  bool ok = false;
};
Richardson richardson_limit(double coarse, double medium, double fine);

// ---- single solve from files -----------------------------------------------

struct SolveRunOptions {
  std::string mesh_file;
  std::string problem_file;
  std::string out_dir = "out";
};

struct SolveRunResult {
  int ndofs = 0;
  SolveReport report;
  std::optional<Point2> monitor_displacement;
  std::optional<double> d1;  // set when the problem has an exact solution
};

// Problem configuration file: JSON with either a named problem
//   {"problem": "cook", "k": 2}
// or an inline description with side-based boundary conditions
//   {"material": {"E": 1, "nu": 0.3}, "k": 1,
//    "body": [0, -1],
//    "dirichlet": [{"side": "left", "u": 0, "v": 0}],
//    "neumann": [{"side": "right", "t": [1, 0]}],
//    "pins": [{"at": [0, 0], "u": 0, "v": 0}]}
// Sides are named by the mesh bounding box: left/right/bottom/top/all.
SolveRunResult run_solve(const SolveRunOptions& opt);

}  // namespace vem
