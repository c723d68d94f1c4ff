#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

// Exponent pair of a scaled monomial xi^a * eta^b, where xi = (x - xc)/h
// and eta = (y - yc)/h for the cell's centroid and diameter.
struct Exponent {
  int a = 0;
  int b = 0;
  int degree() const { return a + b; }
};

inline bool operator==(Exponent p, Exponent q) { return p.a == q.a && p.b == q.b; }

// Monomials ordered by total degree, descending xi power within a degree:
// 1; xi, eta; xi^2, xi*eta, eta^2; ...
std::vector<Exponent> monomial_exponents(int max_deg);
int monomial_count(int max_deg);            // (d+1)(d+2)/2, 0 for d < 0
int monomial_index(Exponent e);             // position in the ordering above

double eval_monomial(Exponent e, double xi, double eta);

// Strain-space basis N^P for order k, evaluated at a scaled point: a 3 x l
// matrix with l = 3 * dim P_{k-1}; columns come in triples (q_j, 0, 0),
// (0, q_j, 0), (0, 0, q_j) per monomial, Voigt components (xx, yy, xy).
Eigen::MatrixXd strain_basis(int k, double xi, double eta);
int strain_basis_size(int k);  // l

// Integrals of scaled monomials over a (possibly concave) polygon with the
// physical measure: m(a,b) = integral over E of xi^a eta^b dx.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(int max_deg, std::vector<double> values);
  int max_deg() const { return max_deg_; }
  double at(Exponent e) const { return values_[monomial_index(e)]; }
  double at(int a, int b) const { return at(Exponent{a, b}); }
  double product(Exponent p, Exponent q) const {  // integral of q_p * q_q
    return at(Exponent{p.a + q.a, p.b + q.b});
  }

 private:
  int max_deg_ = -1;
  std::vector<double> values_;
};

MomentTable polygon_moments(const std::vector<Point2>& poly, Point2 center,
                            double hd, int max_deg);

// Constant 2 x l matrices M^j such that the Voigt divergence of N^P equals
// sum_j M^j q_j with q_j running over P_{k-2}.  The 1/h chain-rule factor
// of the scaled coordinates is folded in, so the expansion is exact in
// physical derivatives.  Empty for k = 1.
std::vector<Eigen::MatrixXd> divergence_decomposition(int k, double hd);

}  // namespace vem
