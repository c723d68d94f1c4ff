#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "vem/assembly.hpp"

namespace vem {

// Exact fields used by the error norms.
using StrainField = std::function<Eigen::Vector3d(Point2)>;       // Voigt
using GradientField = std::function<Eigen::Matrix2d(Point2)>;     // rows: grad u, grad v

// Coefficients of the projected strain of one cell: strain(x) =
// N^P(scaled x) * coeffs.
Eigen::VectorXd projected_strain_coeffs(const Problem& p, int cell,
                                        const Eigen::VectorXd& u);

Eigen::Vector3d strain_at(const Problem& p, int cell,
                          const Eigen::VectorXd& strain_coeffs, Point2 x);

// Cell average of the projected stress (Voigt).
Eigen::Vector3d average_stress(const Problem& p, int cell,
                               const Eigen::VectorXd& u);

// Broken energy-type seminorm: sqrt(sum_E int_E |e_exact - e_h|^2) with the
// Voigt 3-vector Euclidean norm and the projected discrete strain.
double error_D1(const Problem& p, const Eigen::VectorXd& u,
                const StrainField& exact_strain, int quad_deg = -1);

// Edge-tangential seminorm: sqrt(sum_f h_f int_f |d/dt (v_ex - v_h)|^2)
// over all mesh edges, 8-point Gauss per edge; v_h on an edge is the
// degree-k polynomial determined by the edge dofs.
double error_D2(const Problem& p, const Eigen::VectorXd& u,
                const GradientField& exact_gradient);

// Displacement at a mesh vertex (vertex dofs are nodal values).
Point2 displacement_at_vertex(const Problem& p, int vertex,
                              const Eigen::VectorXd& u);
int nearest_vertex(const Mesh& mesh, Point2 x);

// Index of a cell containing x (points on a shared edge may land in either
// neighbour), or -1 if x lies outside the mesh.  Linear scan; handles
// non-convex cells.
int locate_cell(const Mesh& mesh, Point2 x);

// Legacy-format VTK with polygon cells, point-data displacement vectors and
// cell-data average stress components.
void write_vtk(const Problem& p, const Eigen::VectorXd& u,
               const std::string& path);

// CSV with a fixed header; every row must match the header's arity.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace vem
