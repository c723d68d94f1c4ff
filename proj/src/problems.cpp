#include "vem/problems.hpp"

#include <cmath>

#include "vem/errors.hpp"

namespace vem {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Geometric tolerance for classifying boundary edges of the unit square.
constexpr double kTol = 1e-9;

std::function<bool(Point2)> near_x(double x0, double tol = kTol) {
  return [=](Point2 p) { return std::abs(p.x - x0) < tol; };
}

}  // namespace

ProblemSpec patch_tension(double E, double nu, double q) {
  ProblemSpec spec;
  spec.name = "patch-tension";
  spec.mat = Material::from_youngs(E, nu);
  const double lam = spec.mat.lambda, mu = spec.mat.mu;
  // Invert C for the uniform stress state (q, 0, 0).
  const double exx = q * (lam + 2.0 * mu) / (4.0 * mu * (lam + mu));
  const double eyy = -q * lam / (4.0 * mu * (lam + mu));

  spec.body = nullptr;

  DirichletRule rollers;
  rollers.where = near_x(0.0);
  rollers.fix_u = true;
  rollers.fix_v = false;
  rollers.value = [](Point2) { return Point2{0.0, 0.0}; };
  spec.bc.dirichlet.push_back(rollers);

  NeumannRule pull;
  pull.where = near_x(1.0);
  pull.traction = [q](Point2, Point2) { return Point2{q, 0.0}; };
  spec.bc.neumann.push_back(pull);

  PointPin pin;
  pin.at = {0.0, 0.0};
  pin.fix_v = true;
  spec.bc.pins.push_back(pin);

  ExactSolution ex;
  ex.displacement = [=](Point2 p) { return Point2{exx * p.x, eyy * p.y}; };
  ex.gradient = [=](Point2) {
    Eigen::Matrix2d g;
    g << exx, 0.0, 0.0, eyy;
    return g;
  };
  ex.strain = [=](Point2) { return Eigen::Vector3d(exx, eyy, 0.0); };
  ex.stress = [=](Point2) { return Eigen::Vector3d(q, 0.0, 0.0); };
  spec.exact = ex;
  return spec;
}

ProblemSpec patch_shear(double E, double nu, double t) {
  ProblemSpec spec;
  spec.name = "patch-shear";
  spec.mat = Material::from_youngs(E, nu);
  const double mu = spec.mat.mu;
  const double gxy = t / mu;

  spec.body = nullptr;

  // Traction sigma . n with sigma = (0, 0, t) on the whole boundary.
  NeumannRule shear;
  shear.where = [](Point2) { return true; };
  shear.traction = [t](Point2, Point2 n) { return Point2{t * n.y, t * n.x}; };
  spec.bc.neumann.push_back(shear);

  PointPin origin;
  origin.at = {0.0, 0.0};
  origin.fix_u = true;
  origin.fix_v = true;
  spec.bc.pins.push_back(origin);
  PointPin right;
  right.at = {1.0, 0.0};
  right.fix_v = true;
  spec.bc.pins.push_back(right);

  // With this gauge the displacement is u = (t/mu) y, v = 0.
  ExactSolution ex;
  ex.displacement = [=](Point2 p) { return Point2{gxy * p.y, 0.0}; };
  ex.gradient = [=](Point2) {
    Eigen::Matrix2d g;
    g << 0.0, gxy, 0.0, 0.0;
    return g;
  };
  ex.strain = [=](Point2) { return Eigen::Vector3d(0.0, 0.0, gxy); };
  ex.stress = [=](Point2) { return Eigen::Vector3d(0.0, 0.0, t); };
  spec.exact = ex;
  return spec;
}

ProblemSpec cubic_solution(double lambda, double mu) {
  ProblemSpec spec;
  spec.name = "cubic";
  spec.mat = Material::from_lame(lambda, mu);

  // u and v are harmonic and the displacement is divergence-free, so the
  // Navier operator vanishes identically.
  spec.body = nullptr;

  ExactSolution ex;
  ex.displacement = [](Point2 p) {
    return Point2{p.x * p.x * p.x - 3.0 * p.x * p.y * p.y,
                  p.y * p.y * p.y - 3.0 * p.x * p.x * p.y};
  };
  ex.gradient = [](Point2 p) {
    Eigen::Matrix2d g;
    g << 3.0 * p.x * p.x - 3.0 * p.y * p.y, -6.0 * p.x * p.y,
        -6.0 * p.x * p.y, 3.0 * p.y * p.y - 3.0 * p.x * p.x;
    return g;
  };
  ex.strain = [](Point2 p) {
    const double exx = 3.0 * p.x * p.x - 3.0 * p.y * p.y;
    return Eigen::Vector3d(exx, -exx, -12.0 * p.x * p.y);
  };
  ex.stress = [=](Point2 p) {
    const double exx = 3.0 * p.x * p.x - 3.0 * p.y * p.y;
    return Eigen::Vector3d(2.0 * mu * exx, -2.0 * mu * exx,
                           -12.0 * mu * p.x * p.y);
  };
  spec.exact = ex;

  DirichletRule clamp;
  clamp.where = [](Point2) { return true; };
  clamp.value = ex.displacement;
  spec.bc.dirichlet.push_back(clamp);
  return spec;
}

ProblemSpec trig_solution(double lambda, double mu) {
  ProblemSpec spec;
  spec.name = "trig";
  spec.mat = Material::from_lame(lambda, mu);

  const double lam = lambda;
  spec.body = [=](Point2 p) {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    const double b =
        kPi * kPi * ((lam + 3.0 * mu) * sx * sy - (lam + mu) * cx * cy);
    return Point2{b, b};
  };

  ExactSolution ex;
  ex.displacement = [](Point2 p) {
    const double s = std::sin(kPi * p.x) * std::sin(kPi * p.y);
    return Point2{s, s};
  };
  ex.gradient = [](Point2 p) {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    Eigen::Matrix2d g;
    g << kPi * cx * sy, kPi * sx * cy, kPi * cx * sy, kPi * sx * cy;
    return g;
  };
  ex.strain = [](Point2 p) {
    const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
    const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
    return Eigen::Vector3d(kPi * cx * sy, kPi * sx * cy,
                           kPi * (sx * cy + cx * sy));
  };
  ex.stress = [=](Point2 p) {
    const Eigen::Vector3d e = ex.strain(p);
    const double l2m = lam + 2.0 * mu;
    return Eigen::Vector3d(l2m * e(0) + lam * e(1), lam * e(0) + l2m * e(1),
                           mu * e(2));
  };
  spec.exact = ex;

  DirichletRule clamp;
  clamp.where = [](Point2) { return true; };
  clamp.value = ex.displacement;
  spec.bc.dirichlet.push_back(clamp);
  return spec;
}

ProblemSpec cook_membrane(double E, double nu, double q) {
  ProblemSpec spec;
  spec.name = "cook";
  spec.mat = Material::from_youngs(E, nu);
  spec.body = nullptr;

  DirichletRule clamp;
  clamp.where = near_x(0.0, 1e-6);
  clamp.value = [](Point2) { return Point2{0.0, 0.0}; };
  spec.bc.dirichlet.push_back(clamp);

  NeumannRule shear;
  shear.where = near_x(48.0, 1e-6);
  shear.traction = [q](Point2, Point2) { return Point2{0.0, q}; };
  spec.bc.neumann.push_back(shear);

  spec.monitor = Point2{48.0, 52.0};
  return spec;
}

ProblemSpec named_problem(const std::string& name) {
  if (name == "patch-tension") return patch_tension();
  if (name == "patch-shear") return patch_shear();
  if (name == "cubic") return cubic_solution();
  if (name == "trig") return trig_solution();
  if (name == "cook") return cook_membrane();
  throw ConfigError("unknown problem name: " + name);
}

}  // namespace vem
