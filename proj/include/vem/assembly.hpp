#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

#include "vem/element.hpp"
#include "vem/mesh.hpp"

namespace vem {

// Global numbering: vertex dofs, then edge-node dofs (internal Lobatto
// nodes ordered from the lower to the higher vertex id), then per-cell
// moment dofs.  u before v at every slot.
struct GlobalDofMap {
  int k = 1;
  int nv = 0, ne = 0, nc = 0;
  int n_dofs = 0;
  std::vector<std::vector<int>> cell_dofs;  // local dof -> global dof

  int vertex_dof(int v, int comp) const { return 2 * v + comp; }
  int edge_dof(int e, int j, int comp) const {
    return 2 * nv + e * 2 * (k - 1) + 2 * j + comp;
  }
  int moment_dof(int c, int j, int comp) const {
    return 2 * nv + 2 * (k - 1) * ne + c * k * (k - 1) + 2 * j + comp;
  }
};

GlobalDofMap number_dofs(const Mesh& mesh, int k);

struct DirichletRule {
  std::function<bool(Point2)> where;  // tested at edge midpoints / dof points
  bool fix_u = true;
  bool fix_v = true;
  std::function<Point2(Point2)> value;
};

struct NeumannRule {
  std::function<bool(Point2)> where;                     // at edge midpoints
  std::function<Point2(Point2, Point2)> traction;        // (point, normal)
};

struct PointPin {
  Point2 at;
  bool fix_u = false;
  bool fix_v = false;
  Point2 value{0.0, 0.0};
};

struct BoundaryConditions {
  std::vector<DirichletRule> dirichlet;
  std::vector<NeumannRule> neumann;
  std::vector<PointPin> pins;
};

using BodyLoad = std::function<Point2(Point2)>;

// Discretization context: mesh plus per-cell element data, built once and
// shared by assembly and postprocessing.
struct Problem {
  Mesh mesh;
  int k = 1;
  Material mat;
  double tau = 0.5;
  GlobalDofMap dofs;
  std::vector<Element> elements;
};

Problem make_problem(Mesh mesh, int k, const Material& mat, double tau = 0.5);

struct AssembledSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd rhs;
};

AssembledSystem assemble(const Problem& p, const BodyLoad& body,
                         const BoundaryConditions& bc);

// Dof-level Dirichlet data extracted from the rules (edge classification at
// midpoints, pins snapped to the nearest vertex).
struct Constraints {
  std::vector<int> dof;
  std::vector<double> value;
};

Constraints dirichlet_constraints(const Problem& p, const BoundaryConditions& bc);

struct SolveOptions {
  enum class Method { direct, cg };
  Method method = Method::direct;
  double cg_tol = 1e-11;
  int cg_max_iter = 50000;
};

struct SolveReport {
  int n_free = 0;
  int iterations = 0;       // 0 for the direct solver
  double rel_residual = 0.0;
};

// Symmetric elimination of the constrained dofs, then a direct (sparse
// LDL^T) or conjugate-gradient solve.  Returns the full dof vector.
Eigen::VectorXd solve_constrained(const AssembledSystem& sys,
                                  const Constraints& constraints,
                                  const SolveOptions& opts = {},
                                  SolveReport* report = nullptr);

// Local dof vector of one cell extracted from the global solution.
Eigen::VectorXd element_dofs(const Problem& p, int cell,
                             const Eigen::VectorXd& u);

}  // namespace vem
