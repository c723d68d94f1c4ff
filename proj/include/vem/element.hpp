#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vem/mesh.hpp"
#include "vem/polybasis.hpp"

namespace vem {

// Plane-strain isotropic material.
struct Material {
  double lambda = 0.0;
  double mu = 0.0;
  static Material from_lame(double lambda, double mu);
  static Material from_youngs(double E, double nu);
  Eigen::Matrix3d C() const;  // Voigt (xx, yy, xy with engineering shear)
};

// Local dof bookkeeping for order k on an m-gon.  Point dofs come first
// (m vertices, then k-1 internal Gauss-Lobatto nodes per side in traversal
// order), then r = dim P_{k-2} moment pairs.  Dof 2i is the u component at
// slot i, dof 2i+1 the v component.
struct DofLayout {
  int k = 1;
  int m = 0;
  int r = 0;         // moment pairs
  int n_points = 0;  // m*k point slots
  int n = 0;         // 2*m*k + k*(k-1) dofs

  static DofLayout make(int k, int m);
  int vertex_slot(int v) const { return v; }
  int edge_slot(int e, int j) const { return m + e * (k - 1) + j; }  // j in [0,k-2]
  int moment_slot(int j) const { return n_points + j; }
  int u_dof(int slot) const { return 2 * slot; }
  int v_dof(int slot) const { return 2 * slot + 1; }
};

// Physical positions of the point dofs (vertices + edge Gauss-Lobatto
// nodes), indexed by slot.
std::vector<Point2> dof_points(const CellGeometry& g, const DofLayout& d);

// Dof matrix D (n x (k+1)(k+2)): column pair (2j, 2j+1) holds the local
// dofs of the displacement fields (q_j, 0) and (0, q_j) for the scaled
// monomials q_j up to degree k.
Eigen::MatrixXd matrix_D(const CellGeometry& g, const DofLayout& d,
                         const MomentTable& mom);

// Gram matrix G = integral of (N^P)^T N^P (l x l, symmetric positive definite).
Eigen::MatrixXd matrix_G(const DofLayout& d, const MomentTable& mom);

// Projection right-hand side B (l x n): boundary term via edge Gauss-Lobatto
// quadrature plus the volumetric divergence correction, which touches only
// the moment dofs.
Eigen::MatrixXd matrix_B(const CellGeometry& g, const DofLayout& d,
                         const MomentTable& mom);

// Strain projector Pi^m = G^{-1} B (l x n).
Eigen::MatrixXd strain_projector(const Eigen::MatrixXd& G,
                                 const Eigen::MatrixXd& B);

// H = integral of (N^P)^T C N^P; constant-C fast path and a variable-C
// version integrated with a fan rule of the given degree.
Eigen::MatrixXd matrix_H(const DofLayout& d, const MomentTable& mom,
                         const Eigen::Matrix3d& C);
Eigen::MatrixXd matrix_H(const CellGeometry& g, const DofLayout& d,
                         const std::function<Eigen::Matrix3d(Point2)>& C,
                         int quad_deg);

Eigen::MatrixXd consistency_stiffness(const Eigen::MatrixXd& Pm,
                                      const Eigen::MatrixXd& H);

// K_S = tau * tr(K_c) * (I - P) with P the orthogonal projector onto the
// columns of D (the dof vectors of displacement polynomials up to degree k).
Eigen::MatrixXd stability_stiffness(const Eigen::MatrixXd& D, double trace_Kc,
                                    double tau);

// Body load, lowest order: each vertex dof receives the cell average of the
// matching load component ( integral of b / m ).  Requires k == 1.
Eigen::VectorXd load_vertex_average(const CellGeometry& g, const DofLayout& d,
                                    const std::function<Point2(Point2)>& b,
                                    int quad_deg);

// Body load for k >= 2: L2-project b onto P_{k-2}; the load lands on the
// moment dofs only.
Eigen::VectorXd load_moment_projection(const CellGeometry& g, const DofLayout& d,
                                       const MomentTable& mom,
                                       const std::function<Point2(Point2)>& b,
                                       int quad_deg);

// Consistent traction load on one edge of the cell: (k+1)-point
// Gauss-Lobatto along the edge; returns the n-vector of contributions.
// traction(point, outward unit normal).
Eigen::VectorXd neumann_edge_load(
    const CellGeometry& g, const DofLayout& d, int edge,
    const std::function<Point2(Point2, Point2)>& traction);

// Everything the assembly and postprocessing need from one cell.
struct Element {
  CellGeometry geom;
  DofLayout layout;
  MomentTable moments;      // to degree 2k
  Eigen::MatrixXd D, G, B;
  Eigen::MatrixXd Pm;       // strain projector
  Eigen::MatrixXd K;        // Kc + Ks
  double trace_Kc = 0.0;
};

Element build_element(const CellGeometry& geom, int k, const Material& mat,
                      double tau, int cell_id = -1);

}  // namespace vem
