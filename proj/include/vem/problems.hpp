#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "vem/assembly.hpp"

namespace vem {

// Closed-form reference solution used for error measurement and for
// manufactured boundary data.
struct ExactSolution {
  std::function<Point2(Point2)> displacement;
  std::function<Eigen::Matrix2d(Point2)> gradient;  // rows: grad u, grad v
  std::function<Eigen::Vector3d(Point2)> strain;    // Voigt (e_xx, e_yy, g_xy)
  std::function<Eigen::Vector3d(Point2)> stress;
};

// A fully specified boundary value problem: material, load, boundary
// conditions, and (when available) the exact solution.
struct ProblemSpec {
  std::string name;
  Material mat;
  BodyLoad body;  // null means zero body force
  BoundaryConditions bc;
  std::optional<ExactSolution> exact;
  std::optional<Point2> monitor;  // point whose displacement is reported
};

// Uniaxial tension of the unit square: uniform stress (q, 0, 0).  Rollers on
// the left edge, a single pin against vertical translation, traction q on the
// right edge, free top and bottom.
ProblemSpec patch_tension(double E = 7000.0, double nu = 0.3, double q = 2000.0);

// Pure shear of the unit square: uniform stress (0, 0, t) applied as boundary
// tractions on all four sides, with three point constraints removing the
// rigid modes.
ProblemSpec patch_shear(double E = 7000.0, double nu = 0.3, double t = 400.0);

// Cubic displacement field u = x^3 - 3xy^2, v = y^3 - 3x^2y on the unit
// square; divergence-free and harmonic, so the body force vanishes for every
// material.  Dirichlet data on the whole boundary.
ProblemSpec cubic_solution(double lambda = 1.0, double mu = 1.0);

// Trigonometric field u = v = sin(pi x) sin(pi y) on the unit square with the
// matching body force; homogeneous Dirichlet data on the whole boundary.
ProblemSpec trig_solution(double lambda = 1.0, double mu = 1.0);

// Cook's membrane: tapered panel clamped at x = 0 with a uniform upward shear
// traction on x = 48.  No closed-form solution; the monitored quantity is the
// vertical displacement near the midpoint of the loaded edge.
ProblemSpec cook_membrane(double E = 70.0, double nu = 1.0 / 3.0,
                          double q = 6.25);

// Look up one of the named problems above ("patch-tension", "patch-shear",
// "cubic", "trig", "cook").  Throws ConfigError for unknown names.
ProblemSpec named_problem(const std::string& name);

}  // namespace vem
