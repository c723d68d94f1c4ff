#include "vem/polybasis.hpp"

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

std::vector<Exponent> monomial_exponents(int max_deg) {
  std::vector<Exponent> out;
  out.reserve(monomial_count(max_deg));
  for (int d = 0; d <= max_deg; ++d)
    for (int b = 0; b <= d; ++b) out.push_back({d - b, b});
  return out;
}

int monomial_count(int max_deg) {
  return max_deg < 0 ? 0 : (max_deg + 1) * (max_deg + 2) / 2;
}

int monomial_index(Exponent e) {
  const int d = e.degree();
  return d * (d + 1) / 2 + e.b;
}

double eval_monomial(Exponent e, double xi, double eta) {
  double v = 1.0;
  for (int i = 0; i < e.a; ++i) v *= xi;
  for (int i = 0; i < e.b; ++i) v *= eta;
  return v;
}

int strain_basis_size(int k) { return 3 * monomial_count(k - 1); }

Eigen::MatrixXd strain_basis(int k, double xi, double eta) {
  const auto exps = monomial_exponents(k - 1);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(3, 3 * exps.size());
  for (std::size_t j = 0; j < exps.size(); ++j) {
    const double q = eval_monomial(exps[j], xi, eta);
    N(0, 3 * j + 0) = q;
    N(1, 3 * j + 1) = q;
    N(2, 3 * j + 2) = q;
  }
  return N;
}

MomentTable::MomentTable(int max_deg, std::vector<double> values)
    : max_deg_(max_deg), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != monomial_count(max_deg))
    throw Error("MomentTable: value count does not match degree");
}

MomentTable polygon_moments(const std::vector<Point2>& poly, Point2 center,
                            double hd, int max_deg) {
  if (poly.size() < 3) throw InvalidCellError("polygon_moments: fewer than 3 vertices");
  if (hd <= 0.0) throw InvalidCellError("polygon_moments: nonpositive diameter");
  const auto exps = monomial_exponents(max_deg);
  // Accumulate in extended precision: the signed triangle fan cancels on
  // concave cells, and the table feeds Gram matrices whose conditioning
  // amplifies any entry error.
  std::vector<long double> acc(exps.size(), 0.0L);
  std::vector<long double> px(max_deg + 1, 1.0L), py(max_deg + 1, 1.0L);
  polygon_quadrature(poly, max_deg, [&](Point2 p, double w) {
    const long double xi = (static_cast<long double>(p.x) - center.x) / hd;
    const long double eta = (static_cast<long double>(p.y) - center.y) / hd;
    for (int i = 1; i <= max_deg; ++i) {
      px[i] = px[i - 1] * xi;
      py[i] = py[i - 1] * eta;
    }
    for (std::size_t j = 0; j < exps.size(); ++j)
      acc[j] += w * px[exps[j].a] * py[exps[j].b];
  });
  std::vector<double> m(acc.begin(), acc.end());
  return MomentTable(max_deg, std::move(m));
}

std::vector<Eigen::MatrixXd> divergence_decomposition(int k, double hd) {
  const auto strain_exps = monomial_exponents(k - 1);
  const auto div_exps = monomial_exponents(k - 2);
  const int l = 3 * static_cast<int>(strain_exps.size());
  std::vector<Eigen::MatrixXd> M(div_exps.size(),
                                 Eigen::MatrixXd::Zero(2, l));
  // Voigt divergence rows: (d/dx, 0, d/dy) and (0, d/dy, d/dx); the
  // derivative of xi^a eta^b drops one degree and carries a factor a/h or b/h.
  for (std::size_t j = 0; j < strain_exps.size(); ++j) {
    const Exponent e = strain_exps[j];
    if (e.a > 0) {
      const int t = monomial_index({e.a - 1, e.b});
      const double c = e.a / hd;
      M[t](0, 3 * j + 0) += c;  // d/dx of the xx slot
      M[t](1, 3 * j + 2) += c;  // d/dx of the xy slot
    }
    if (e.b > 0) {
      const int t = monomial_index({e.a, e.b - 1});
      const double c = e.b / hd;
      M[t](1, 3 * j + 1) += c;  // d/dy of the yy slot
      M[t](0, 3 * j + 2) += c;  // d/dy of the xy slot
    }
  }
  return M;
}

}  // namespace vem
