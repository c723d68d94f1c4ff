#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "vem/errors.hpp"
#include "vem/meshgen.hpp"
#include "vem/postproc.hpp"
#include "vem/problems.hpp"
#include "vem/runner.hpp"

using namespace vem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("projected strain evaluation is exact for reproduced fields") {
  const ProblemSpec spec = cubic_solution(1.0, 1.0);
  const Mesh mesh = distorted_concave_quads(3);
  const SolveOutcome sol = solve_on_mesh(mesh, spec, 3);
  std::mt19937_64 rng(73);
  for (int c = 0; c < sol.problem.mesh.n_cells(); ++c) {
    const Eigen::VectorXd coeffs =
        projected_strain_coeffs(sol.problem, c, sol.u);
    const CellGeometry& g = sol.problem.elements[c].geom;
    for (int t = 0; t < 3; ++t) {
      // random point inside the cell's bounding box, then keep it in-cell
      const Point2 x{testutil::uniform(rng, g.centroid.x - 0.05,
                                       g.centroid.x + 0.05),
                     testutil::uniform(rng, g.centroid.y - 0.05,
                                       g.centroid.y + 0.05)};
      const Eigen::Vector3d sh = strain_at(sol.problem, c, coeffs, x);
      const Eigen::Vector3d se = spec.exact->strain(x);
      CHECK((sh - se).lpNorm<Eigen::Infinity>() < 1e-8);
    }
  }
}

TEST_CASE("error seminorms vanish on reproduced polynomials") {
  const ProblemSpec spec = cubic_solution(2.0, 1.5);
  const Mesh mesh = voronoi_mesh(15, 5, 7);
  const SolveOutcome sol = solve_on_mesh(mesh, spec, 3);
  CHECK(error_D1(sol.problem, sol.u, spec.exact->strain) < 1e-8);
  CHECK(error_D2(sol.problem, sol.u, spec.exact->gradient) < 1e-8);
  // sanity: a non-representable field leaves a nonzero error
  const SolveOutcome lo = solve_on_mesh(mesh, spec, 1);
  CHECK(error_D1(lo.problem, lo.u, spec.exact->strain) > 1e-3);
}

TEST_CASE("energy seminorm is insensitive to the quadrature degree") {
  const ProblemSpec spec = trig_solution(1.0, 1.0);
  const Mesh mesh = unit_square_quads(8);
  const SolveOutcome sol = solve_on_mesh(mesh, spec, 2);
  const double base = error_D1(sol.problem, sol.u, spec.exact->strain);
  const double refined = error_D1(sol.problem, sol.u, spec.exact->strain,
                                  2 * sol.problem.k + 6);
  // The integrand is non-polynomial, so the two rules cannot agree exactly;
  // the default degree is high enough that the gap is far below the error.
  CHECK(std::abs(base - refined) < 1e-6 * base);
}

TEST_CASE("average stress of a uniform state") {
  const ProblemSpec spec = patch_tension();
  const SolveOutcome sol = solve_on_mesh(patch_mesh_tension(), spec, 2);
  for (int c = 0; c < sol.problem.mesh.n_cells(); ++c) {
    const Eigen::Vector3d sig = average_stress(sol.problem, c, sol.u);
    CHECK(sig(0) == doctest::Approx(2000.0).epsilon(1e-10));
    CHECK(sig(1) == doctest::Approx(0.0).epsilon(1e-9).scale(2000.0));
  }
}

TEST_CASE("vertex displacement accessors") {
  const Mesh mesh = unit_square_quads(2);
  const Problem p = make_problem(mesh, 1, Material::from_lame(1.0, 1.0));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p.dofs.n_dofs);
  u(p.dofs.vertex_dof(4, 0)) = 3.5;  // center vertex (0.5, 0.5)
  u(p.dofs.vertex_dof(4, 1)) = -1.25;
  CHECK(nearest_vertex(mesh, {0.51, 0.49}) == 4);
  const Point2 d = displacement_at_vertex(p, 4, u);
  CHECK(d.x == 3.5);
  CHECK(d.y == -1.25);
}

TEST_CASE("cell location handles concavity and outside points") {
  const Mesh mesh = build_mesh(
      {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}, {2, 2}},
      {{0, 1, 2, 3, 4, 5}, {3, 2, 6, 4}});
  CHECK(locate_cell(mesh, {1.5, 0.5}) == 0);
  CHECK(locate_cell(mesh, {0.5, 1.5}) == 0);
  CHECK(locate_cell(mesh, {1.5, 1.5}) == 1);  // inside the notch quad
  CHECK(locate_cell(mesh, {2.5, 0.5}) == -1);
  CHECK(locate_cell(mesh, {-0.1, 0.1}) == -1);
  CHECK(locate_cell(mesh, {1.0, 0.5}) >= 0);  // on an interior line
}

TEST_CASE("VTK output layout for a rigid translation") {
  const Mesh mesh =
      build_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
  const Problem p = make_problem(mesh, 1, Material::from_lame(1.0, 1.0));
  Eigen::VectorXd u(p.dofs.n_dofs);
  for (int v = 0; v < 4; ++v) {
    u(p.dofs.vertex_dof(v, 0)) = 0.5;
    u(p.dofs.vertex_dof(v, 1)) = 0.25;
  }
  const std::string path = "golden.vtk";
  write_vtk(p, u, path);
  const std::string text = read_file(path);
  const std::string head =
      "# vtk DataFile Version 3.0\n"
      "polygonal mesh solution\n"
      "ASCII\n"
      "DATASET POLYDATA\n"
      "POINTS 4 double\n"
      "0 0 0\n"
      "1 0 0\n"
      "1 1 0\n"
      "0 1 0\n"
      "POLYGONS 1 5\n"
      "4 0 1 2 3\n"
      "POINT_DATA 4\n"
      "VECTORS displacement double\n"
      "0.5 0.25 0\n"
      "0.5 0.25 0\n"
      "0.5 0.25 0\n"
      "0.5 0.25 0\n"
      "CELL_DATA 1\n";
  REQUIRE(text.size() >= head.size());
  CHECK(text.substr(0, head.size()) == head);
  // The projected stresses of a translation vanish only up to roundoff and
  // the exact digits vary by toolchain, so parse them instead of pinning.
  std::istringstream rest(text.substr(head.size()));
  for (const char* name : {"stress_xx", "stress_yy", "stress_xy"}) {
    std::string l1, l2, l3;
    REQUIRE(std::getline(rest, l1));
    REQUIRE(std::getline(rest, l2));
    REQUIRE(std::getline(rest, l3));
    CHECK(l1 == std::string("SCALARS ") + name + " double 1");
    CHECK(l2 == "LOOKUP_TABLE default");
    CHECK(std::abs(std::stod(l3)) < 1e-12);
  }
  std::string trailing;
  CHECK_FALSE(std::getline(rest, trailing));
  std::remove(path.c_str());
}

TEST_CASE("CSV output format and arity checking") {
  const std::string path = "golden.csv";
  write_csv(path, "a,b,c", {{1.0, 0.125, -3.0}, {0.0, 1e-9, 2.5}});
  CHECK(read_file(path) == "a,b,c\n1,0.125,-3\n0,1.0000000000000001e-09,2.5\n");
  CHECK_THROWS_AS(write_csv(path, "a,b", {{1.0, 2.0, 3.0}}), Error);
  std::remove(path.c_str());
}
