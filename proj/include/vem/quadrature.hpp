#pragma once

#include <cstddef>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

struct Rule1D {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre with p points, exact for degree <= 2p-1.
Rule1D gauss_legendre(int p);

// Gauss-Lobatto with p >= 2 points (both endpoints included), exact for
// degree <= 2p-3.  p <= 6 is tabulated in closed form, larger p computed
// by Newton iteration on the Legendre derivative.
Rule1D gauss_lobatto(int p);

// Point on the reference triangle {u, v >= 0, u+v <= 1} with a mean-value
// weight: integral over a triangle T = area(T) * sum_q w_q f(x_q), so the
// weights of a rule sum to 1.
struct TrianglePoint {
  double u, v, w;
};

// Rule exact for total degree <= deg.  Low degrees use symmetric tables,
// higher degrees a collapsed tensor Gauss rule.
const std::vector<TrianglePoint>& triangle_rule(int deg);

// Quadrature over a simple polygon via the signed triangle fan rooted at
// vertex 0 (valid for concave polygons).  Calls f(point, weight); weights
// sum to the polygon area.
template <class F>
void polygon_quadrature(const std::vector<Point2>& poly, int deg, F&& f) {
  const auto& rule = triangle_rule(deg);
  const Point2 a = poly[0];
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Point2 ab = poly[i] - a;
    const Point2 ac = poly[i + 1] - a;
    const double signed_area = 0.5 * cross(ab, ac);
    if (signed_area == 0.0) continue;
    for (const auto& q : rule)
      f(a + q.u * ab + q.v * ac, signed_area * q.w);
  }
}

}  // namespace vem
