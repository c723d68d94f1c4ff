#include "vem/quadrature.hpp"

#include <cmath>
#include <map>

#include "vem/errors.hpp"

namespace vem {
namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  if (std::abs(x) == 1.0)
    dp = (x > 0 ? 1.0 : ((n % 2) ? 1.0 : -1.0)) * 0.5 * n * (n + 1);
  else
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

Rule1D lobatto_table(int p) {
  const double s7 = std::sqrt(7.0);
  switch (p) {
    case 2:
      return {{-1.0, 1.0}, {1.0, 1.0}};
    case 3:
      return {{-1.0, 0.0, 1.0}, {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0}};
    case 4: {
      const double a = 1.0 / std::sqrt(5.0);
      return {{-1.0, -a, a, 1.0}, {1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0}};
    }
    case 5: {
      const double a = std::sqrt(3.0 / 7.0);
      return {{-1.0, -a, 0.0, a, 1.0},
              {0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1}};
    }
    case 6: {
      const double ao = std::sqrt((7.0 + 2.0 * s7) / 21.0);  // outer pair
      const double ai = std::sqrt((7.0 - 2.0 * s7) / 21.0);  // inner pair
      const double wo = (14.0 - s7) / 30.0;
      const double wi = (14.0 + s7) / 30.0;
      return {{-1.0, -ao, -ai, ai, ao, 1.0},
              {1.0 / 15.0, wo, wi, wi, wo, 1.0 / 15.0}};
    }
    default:
      throw ConfigError("lobatto_table: unsupported point count");
  }
}

// Interior Lobatto nodes are the roots of P'_{p-1}; Newton on that
// derivative, second derivative from the Legendre ODE.
Rule1D lobatto_newton(int p) {
  const int n = p - 1;
  Rule1D r;
  r.nodes.resize(p);
  r.weights.resize(p);
  r.nodes[0] = -1.0;
  r.nodes[p - 1] = 1.0;
  r.weights[0] = r.weights[p - 1] = 2.0 / (p * (p - 1));
  for (int j = 1; j <= p - 2; ++j) {
    double x = std::cos(M_PI * j / (p - 1));  // descending initial guesses
    for (int it = 0; it < 100; ++it) {
      double pn, dpn;
      legendre(n, x, pn, dpn);
      const double d2 = (2.0 * x * dpn - n * (n + 1) * pn) / (1.0 - x * x);
      const double dx = dpn / d2;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double pn, dpn;
    legendre(n, x, pn, dpn);
    r.nodes[p - 1 - j] = x;
    r.weights[p - 1 - j] = 2.0 / (p * (p - 1) * pn * pn);
  }
  return r;
}

std::vector<TrianglePoint> symmetric_rule(int deg) {
  std::vector<TrianglePoint> pts;
  auto corner3 = [&pts](double a, double w) {
    // barycentric (1-2a, a, a) and permutations
    pts.push_back({a, a, w});
    pts.push_back({1.0 - 2.0 * a, a, w});
    pts.push_back({a, 1.0 - 2.0 * a, w});
  };
  switch (deg) {
    case 0:
    case 1:
      pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0});
      break;
    case 2:
      corner3(1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:
      pts.push_back({1.0 / 3.0, 1.0 / 3.0, -27.0 / 48.0});
      corner3(0.2, 25.0 / 48.0);
      break;
    case 4:
      corner3(0.445948490915965, 0.223381589678011);
      corner3(0.091576213509771, 0.109951743655322);
      break;
    case 5:
      pts.push_back({1.0 / 3.0, 1.0 / 3.0, 0.225});
      corner3(0.470142064105115, 0.132394152788506);
      corner3(0.101286507323456, 0.125939180544827);
      break;
    default:
      throw ConfigError("symmetric_rule: unsupported degree");
  }
  return pts;
}

// Collapsed tensor rule: map [0,1]^2 -> triangle via (a, b) -> (a, b(1-a)),
// Jacobian (1-a).  Exact for total degree <= deg with ceil((deg+2)/2)
// Gauss points per direction.
std::vector<TrianglePoint> collapsed_rule(int deg) {
  const int n = (deg + 3) / 2;
  const Rule1D g = gauss_legendre(n);
  std::vector<TrianglePoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double a = 0.5 * (g.nodes[i] + 1.0);
    const double wa = 0.5 * g.weights[i];
    for (int j = 0; j < n; ++j) {
      const double b = 0.5 * (g.nodes[j] + 1.0);
      const double wb = 0.5 * g.weights[j];
      pts.push_back({a, b * (1.0 - a), 2.0 * wa * wb * (1.0 - a)});
    }
  }
  return pts;
}

}  // namespace

Rule1D gauss_legendre(int p) {
  if (p < 1) throw ConfigError("gauss_legendre: need at least one point");
  Rule1D r;
  r.nodes.resize(p);
  r.weights.resize(p);
  for (int i = 0; i < (p + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (p + 0.5));
    double pn = 0.0, dpn = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(p, x, pn, dpn);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(p, x, pn, dpn);
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    r.nodes[p - 1 - i] = x;
    r.weights[p - 1 - i] = w;
    r.nodes[i] = -x;
    r.weights[i] = w;
  }
  if (p % 2) {
    r.nodes[p / 2] = 0.0;
    double pn, dpn;
    legendre(p, 0.0, pn, dpn);
    r.weights[p / 2] = 2.0 / (dpn * dpn);
  }
  return r;
}

Rule1D gauss_lobatto(int p) {
  if (p < 2) throw ConfigError("gauss_lobatto: need at least two points");
  return p <= 6 ? lobatto_table(p) : lobatto_newton(p);
}

const std::vector<TrianglePoint>& triangle_rule(int deg) {
  if (deg < 0) throw ConfigError("triangle_rule: negative degree");
  static std::map<int, std::vector<TrianglePoint>> cache;
  auto it = cache.find(deg);
  if (it == cache.end())
    it = cache.emplace(deg, deg <= 5 ? symmetric_rule(deg) : collapsed_rule(deg))
             .first;
  return it->second;
}

}  // namespace vem
