#include "vem/element.hpp"

#include <Eigen/QR>
#include <cmath>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {
namespace {

// Extended-precision element pipeline.  The Gram solve behind the strain
// projector amplifies entry rounding by the conditioning of the scaled
// monomial basis, which grows on distorted cells and with k.  Building and
// combining the element matrices in long double (and only rounding the final
// projector and stiffness) keeps that amplification below double rounding.
// The matrices involved are tiny, so the extra cost is negligible.
using LD = long double;
using MatL = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;

void legendre_ld(int n, LD x, LD& p, LD& dp) {
  LD p0 = 1.0L, p1 = x;
  if (n == 0) {
    p = 1.0L;
    dp = 0.0L;
    return;
  }
  for (int j = 2; j <= n; ++j) {
    const LD p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  if (x == 1.0L || x == -1.0L)
    dp = (x > 0 ? 1.0L : ((n % 2) ? 1.0L : -1.0L)) * 0.5L * n * (n + 1);
  else
    dp = n * (x * p1 - p0) / (x * x - 1.0L);
}

void gauss_legendre_ld(int p, std::vector<LD>& xs, std::vector<LD>& ws) {
  xs.assign(p, 0.0L);
  ws.assign(p, 0.0L);
  for (int i = 0; i < (p + 1) / 2; ++i) {
    LD x = std::cos(M_PI * (i + 0.75) / (p + 0.5));
    LD pn = 0.0L, dpn = 1.0L;
    for (int it = 0; it < 200; ++it) {
      legendre_ld(p, x, pn, dpn);
      const LD dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-18L) break;
    }
    legendre_ld(p, x, pn, dpn);
    const LD w = 2.0L / ((1.0L - x * x) * dpn * dpn);
    xs[p - 1 - i] = x;
    ws[p - 1 - i] = w;
    xs[i] = -x;
    ws[i] = w;
  }
  if (p % 2) {
    xs[p / 2] = 0.0L;
    LD pn, dpn;
    legendre_ld(p, 0.0L, pn, dpn);
    ws[p / 2] = 2.0L / (dpn * dpn);
  }
}

void gauss_lobatto_ld(int p, std::vector<LD>& xs, std::vector<LD>& ws) {
  const int n = p - 1;
  xs.assign(p, 0.0L);
  ws.assign(p, 0.0L);
  xs[0] = -1.0L;
  xs[p - 1] = 1.0L;
  ws[0] = ws[p - 1] = 2.0L / (static_cast<LD>(p) * n);
  for (int j = 1; j <= p - 2; ++j) {
    LD x = std::cos(M_PI * j / n);
    for (int it = 0; it < 200; ++it) {
      LD pn, dpn;
      legendre_ld(n, x, pn, dpn);
      const LD d2 = (2.0L * x * dpn - n * (n + 1) * pn) / (1.0L - x * x);
      const LD dx = dpn / d2;
      x -= dx;
      if (std::abs(dx) < 1e-18L) break;
    }
    LD pn, dpn;
    legendre_ld(n, x, pn, dpn);
    xs[p - 1 - j] = x;
    ws[p - 1 - j] = 2.0L / (static_cast<LD>(p) * n * pn * pn);
  }
}

// Moments of the scaled monomials up to max_deg, via the same signed
// triangle fan as polygon_quadrature but with the mapping, rule, and
// accumulation all in long double.
std::vector<LD> moments_ld(const std::vector<Point2>& pts, Point2 c, double hd,
                           int max_deg) {
  const auto exps = monomial_exponents(max_deg);
  std::vector<LD> mom(exps.size(), 0.0L);
  const int n1 = (max_deg + 3) / 2;
  std::vector<LD> gx, gw;
  gauss_legendre_ld(n1, gx, gw);
  std::vector<LD> px(max_deg + 1, 1.0L), py(max_deg + 1, 1.0L);
  const LD ax = pts[0].x, ay = pts[0].y;
  for (std::size_t t = 1; t + 1 < pts.size(); ++t) {
    const LD abx = static_cast<LD>(pts[t].x) - ax;
    const LD aby = static_cast<LD>(pts[t].y) - ay;
    const LD acx = static_cast<LD>(pts[t + 1].x) - ax;
    const LD acy = static_cast<LD>(pts[t + 1].y) - ay;
    const LD area2 = abx * acy - aby * acx;
    if (area2 == 0.0L) continue;
    for (int i = 0; i < n1; ++i) {
      const LD u = 0.5L * (gx[i] + 1.0L);
      for (int j = 0; j < n1; ++j) {
        const LD v = 0.5L * (gx[j] + 1.0L) * (1.0L - u);
        const LD w = 0.25L * gw[i] * gw[j] * (1.0L - u) * area2;
        const LD xi = (ax + u * abx + v * acx - c.x) / hd;
        const LD eta = (ay + u * aby + v * acy - c.y) / hd;
        for (int d = 1; d <= max_deg; ++d) {
          px[d] = px[d - 1] * xi;
          py[d] = py[d - 1] * eta;
        }
        for (std::size_t e = 0; e < exps.size(); ++e)
          mom[e] += w * px[exps[e].a] * py[exps[e].b];
      }
    }
  }
  return mom;
}

MatL matrix_G_ld(const DofLayout& d, const std::vector<LD>& mom) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  MatL G = MatL::Zero(3 * nq, 3 * nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      const LD mij =
          mom[monomial_index({exps[i].a + exps[j].a, exps[i].b + exps[j].b})];
      for (int t = 0; t < 3; ++t) G(3 * i + t, 3 * j + t) = mij;
    }
  return G;
}

// Long-double matrix_B.  Edge tangents, lengths, and normals are recomputed
// here from the vertices so the boundary term stays consistent with the
// interior moments; the stored area is reused unchanged because it also
// normalizes the moment dofs in D and must cancel exactly.
MatL matrix_B_ld(const CellGeometry& g, const DofLayout& d) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  MatL B = MatL::Zero(3 * nq, d.n);
  std::vector<LD> lx, lw;
  gauss_lobatto_ld(d.k + 1, lx, lw);
  std::vector<LD> px(d.k, 1.0L), py(d.k, 1.0L);
  for (int e = 0; e < d.m; ++e) {
    const Point2 a = g.pts[e];
    const Point2 b = g.pts[(e + 1) % d.m];
    const LD tx = static_cast<LD>(b.x) - a.x;
    const LD ty = static_cast<LD>(b.y) - a.y;
    const LD len = std::sqrt(tx * tx + ty * ty);
    const LD nx = ty / len, ny = -tx / len;
    for (int gq = 0; gq <= d.k; ++gq) {
      int slot;
      if (gq == 0)
        slot = d.vertex_slot(e);
      else if (gq == d.k)
        slot = d.vertex_slot((e + 1) % d.m);
      else
        slot = d.edge_slot(e, gq - 1);
      const LD s = 0.5L * (lx[gq] + 1.0L);
      const LD xi = (static_cast<LD>(a.x) + s * tx - g.centroid.x) / g.diameter;
      const LD eta = (static_cast<LD>(a.y) + s * ty - g.centroid.y) / g.diameter;
      for (int dd = 1; dd <= d.k - 1; ++dd) {
        px[dd] = px[dd - 1] * xi;
        py[dd] = py[dd - 1] * eta;
      }
      const LD cw = 0.5L * len * lw[gq];
      for (int j = 0; j < nq; ++j) {
        const LD q = cw * px[exps[j].a] * py[exps[j].b];
        B(3 * j + 0, d.u_dof(slot)) += q * nx;
        B(3 * j + 2, d.u_dof(slot)) += q * ny;
        B(3 * j + 1, d.v_dof(slot)) += q * ny;
        B(3 * j + 2, d.v_dof(slot)) += q * nx;
      }
    }
  }
  if (d.k > 1) {
    const auto strain_exps = monomial_exponents(d.k - 1);
    for (std::size_t j = 0; j < strain_exps.size(); ++j) {
      const Exponent ee = strain_exps[j];
      const int row = 3 * static_cast<int>(j);
      if (ee.a > 0) {
        const int t = monomial_index({ee.a - 1, ee.b});
        const LD cf = static_cast<LD>(g.area) * ee.a / g.diameter;
        B(row + 0, d.u_dof(d.moment_slot(t))) -= cf;
        B(row + 2, d.v_dof(d.moment_slot(t))) -= cf;
      }
      if (ee.b > 0) {
        const int t = monomial_index({ee.a, ee.b - 1});
        const LD cf = static_cast<LD>(g.area) * ee.b / g.diameter;
        B(row + 1, d.v_dof(d.moment_slot(t))) -= cf;
        B(row + 2, d.u_dof(d.moment_slot(t))) -= cf;
      }
    }
  }
  return B;
}

MatL matrix_H_ld(const DofLayout& d, const std::vector<LD>& mom,
                 const Eigen::Matrix3d& C) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  const Eigen::Matrix<LD, 3, 3> Cl = C.cast<LD>();
  MatL H(3 * nq, 3 * nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j)
      H.block<3, 3>(3 * i, 3 * j) =
          mom[monomial_index({exps[i].a + exps[j].a, exps[i].b + exps[j].b})] *
          Cl;
  return H;
}

MatL strain_projector_ld(const MatL& G, const MatL& B) {
  Eigen::LDLT<MatL> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw ConditioningError("strain projector: Gram matrix factorization failed");
  const auto dvec = ldlt.vectorD();
  if (dvec.minCoeff() <= 0.0L ||
      dvec.minCoeff() < 1e-14L * dvec.maxCoeff())
    throw ConditioningError("strain projector: Gram matrix nearly singular");
  return ldlt.solve(B);
}

MatL stability_ld(const Eigen::MatrixXd& D, LD trace_Kc, double tau) {
  if (tau <= 0.0) throw ConfigError("stabilization factor tau must be > 0");
  const int n = static_cast<int>(D.rows());
  const int c = static_cast<int>(D.cols());
  Eigen::ColPivHouseholderQR<MatL> qr(D.cast<LD>().eval());
  if (qr.rank() < c)
    throw ConditioningError("degenerate element: dof matrix is rank-deficient");
  const MatL Q1 = qr.householderQ() * MatL::Identity(n, c);
  MatL S = -Q1 * Q1.transpose();
  S.diagonal().array() += 1.0L;
  return (static_cast<LD>(tau) * trace_Kc) * S;
}

}  // namespace

Material Material::from_lame(double lambda, double mu) {
  if (mu <= 0.0 || lambda + mu <= 0.0)
    throw ConfigError("material is not positive definite");
  return {lambda, mu};
}

Material Material::from_youngs(double E, double nu) {
  if (E <= 0.0 || nu <= -1.0 || nu >= 0.5)
    throw ConfigError("need E > 0 and -1 < nu < 1/2");
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = E / (2.0 * (1.0 + nu));
  return from_lame(lambda, mu);
}

Eigen::Matrix3d Material::C() const {
  Eigen::Matrix3d C;
  C << lambda + 2.0 * mu, lambda, 0.0,
       lambda, lambda + 2.0 * mu, 0.0,
       0.0, 0.0, mu;
  return C;
}

DofLayout DofLayout::make(int k, int m) {
  if (k < 1) throw ConfigError("order k must be >= 1");
  if (m < 3) throw InvalidCellError("cell with fewer than 3 sides");
  DofLayout d;
  d.k = k;
  d.m = m;
  d.r = monomial_count(k - 2);
  d.n_points = m * k;
  d.n = 2 * m * k + k * (k - 1);
  return d;
}

std::vector<Point2> dof_points(const CellGeometry& g, const DofLayout& d) {
  std::vector<Point2> pts(d.n_points);
  for (int v = 0; v < d.m; ++v) pts[d.vertex_slot(v)] = g.pts[v];
  if (d.k > 1) {
    const Rule1D gl = gauss_lobatto(d.k + 1);
    for (int e = 0; e < d.m; ++e) {
      const Point2 a = g.pts[e];
      const Point2 b = g.pts[(e + 1) % d.m];
      for (int j = 0; j < d.k - 1; ++j) {
        const double t = gl.nodes[j + 1];
        pts[d.edge_slot(e, j)] = a + (0.5 * (t + 1.0)) * (b - a);
      }
    }
  }
  return pts;
}

Eigen::MatrixXd matrix_D(const CellGeometry& g, const DofLayout& d,
                         const MomentTable& mom) {
  const auto exps = monomial_exponents(d.k);
  const int cols = 2 * static_cast<int>(exps.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d.n, cols);
  const auto pts = dof_points(g, d);
  for (int i = 0; i < d.n_points; ++i) {
    const Point2 s = scaled_coords(g, pts[i]);
    for (std::size_t j = 0; j < exps.size(); ++j) {
      const double q = eval_monomial(exps[j], s.x, s.y);
      D(d.u_dof(i), 2 * j) = q;
      D(d.v_dof(i), 2 * j + 1) = q;
    }
  }
  const auto mexps = monomial_exponents(d.k - 2);
  for (int i = 0; i < d.r; ++i) {
    const int slot = d.moment_slot(i);
    for (std::size_t j = 0; j < exps.size(); ++j) {
      const double q = mom.product(mexps[i], exps[j]) / g.area;
      D(d.u_dof(slot), 2 * j) = q;
      D(d.v_dof(slot), 2 * j + 1) = q;
    }
  }
  return D;
}

Eigen::MatrixXd matrix_G(const DofLayout& d, const MomentTable& mom) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3 * nq, 3 * nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      const double mij = mom.product(exps[i], exps[j]);
      for (int t = 0; t < 3; ++t) G(3 * i + t, 3 * j + t) = mij;
    }
  return G;
}

Eigen::MatrixXd matrix_B(const CellGeometry& g, const DofLayout& d,
                         const MomentTable& mom) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * nq, d.n);

  // Boundary term: traces of the virtual basis are polynomials of degree k
  // on each side, and N^P entries have degree k-1, so the (k+1)-point
  // Lobatto rule (exact to 2k-1) integrates the product exactly.  The
  // quadrature nodes are the point dofs of the side.
  const Rule1D gl = gauss_lobatto(d.k + 1);
  for (int e = 0; e < d.m; ++e) {
    const Point2 a = g.pts[e];
    const Point2 b = g.pts[(e + 1) % d.m];
    const Point2 nrm = g.edge_normal[e];
    const double half_len = 0.5 * g.edge_len[e];
    for (int gq = 0; gq <= d.k; ++gq) {
      int slot;
      if (gq == 0)
        slot = d.vertex_slot(e);
      else if (gq == d.k)
        slot = d.vertex_slot((e + 1) % d.m);
      else
        slot = d.edge_slot(e, gq - 1);
      const Point2 p = a + (0.5 * (gl.nodes[gq] + 1.0)) * (b - a);
      const Point2 s = scaled_coords(g, p);
      const double c = half_len * gl.weights[gq];
      for (int j = 0; j < nq; ++j) {
        const double q = c * eval_monomial(exps[j], s.x, s.y);
        B(3 * j + 0, d.u_dof(slot)) += q * nrm.x;
        B(3 * j + 2, d.u_dof(slot)) += q * nrm.y;
        B(3 * j + 1, d.v_dof(slot)) += q * nrm.y;
        B(3 * j + 2, d.v_dof(slot)) += q * nrm.x;
      }
    }
  }

  // Volume term: - integral of (div N^P)^T N^V.  Expanding the divergence
  // over P_{k-2} reduces it to the moment dofs, whose pairing with the
  // virtual basis is |E| by definition.
  if (d.k > 1) {
    const auto M = divergence_decomposition(d.k, g.diameter);
    for (int j = 0; j < d.r; ++j) {
      const int slot = d.moment_slot(j);
      B.col(d.u_dof(slot)) -= g.area * M[j].row(0).transpose();
      B.col(d.v_dof(slot)) -= g.area * M[j].row(1).transpose();
    }
  }
  return B;
}

Eigen::MatrixXd strain_projector(const Eigen::MatrixXd& G,
                                 const Eigen::MatrixXd& B) {
  // The scaled-monomial Gram matrix is moderately ill-conditioned on
  // distorted cells at higher k; the matrix is tiny, so factoring in
  // extended precision keeps the projector near machine accuracy.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::LDLT<MatL> ldlt(G.cast<long double>().eval());
  if (ldlt.info() != Eigen::Success)
    throw ConditioningError("strain projector: Gram matrix factorization failed");
  const auto dvec = ldlt.vectorD();
  if (dvec.minCoeff() <= 0.0L ||
      dvec.minCoeff() < 1e-14L * dvec.maxCoeff())
    throw ConditioningError("strain projector: Gram matrix nearly singular");
  return ldlt.solve(B.cast<long double>().eval()).cast<double>();
}

Eigen::MatrixXd matrix_H(const DofLayout& d, const MomentTable& mom,
                         const Eigen::Matrix3d& C) {
  const auto exps = monomial_exponents(d.k - 1);
  const int nq = static_cast<int>(exps.size());
  Eigen::MatrixXd H(3 * nq, 3 * nq);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j)
      H.block<3, 3>(3 * i, 3 * j) = mom.product(exps[i], exps[j]) * C;
  return H;
}

Eigen::MatrixXd matrix_H(const CellGeometry& g, const DofLayout& d,
                         const std::function<Eigen::Matrix3d(Point2)>& C,
                         int quad_deg) {
  const int l = strain_basis_size(d.k);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(l, l);
  polygon_quadrature(g.pts, quad_deg, [&](Point2 p, double w) {
    const Point2 s = scaled_coords(g, p);
    const Eigen::MatrixXd N = strain_basis(d.k, s.x, s.y);
    H.noalias() += w * N.transpose() * C(p) * N;
  });
  return H;
}

Eigen::MatrixXd consistency_stiffness(const Eigen::MatrixXd& Pm,
                                      const Eigen::MatrixXd& H) {
  return Pm.transpose() * H * Pm;
}

Eigen::MatrixXd stability_stiffness(const Eigen::MatrixXd& D, double trace_Kc,
                                    double tau) {
  if (tau <= 0.0) throw ConfigError("stabilization factor tau must be > 0");
  const int n = static_cast<int>(D.rows());
  const int c = static_cast<int>(D.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  if (qr.rank() < c)
    throw ConditioningError("degenerate element: dof matrix is rank-deficient");
  const Eigen::MatrixXd Q1 =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, c);
  Eigen::MatrixXd S = -Q1 * Q1.transpose();
  S.diagonal().array() += 1.0;
  return (tau * trace_Kc) * S;
}

Eigen::VectorXd load_vertex_average(const CellGeometry& g, const DofLayout& d,
                                    const std::function<Point2(Point2)>& b,
                                    int quad_deg) {
  if (d.k != 1)
    throw ConfigError("load_vertex_average is the k = 1 rule");
  Point2 bbar{0.0, 0.0};
  polygon_quadrature(g.pts, quad_deg, [&](Point2 p, double w) {
    bbar = bbar + w * b(p);
  });
  Eigen::VectorXd f = Eigen::VectorXd::Zero(d.n);
  for (int v = 0; v < d.m; ++v) {
    f(d.u_dof(v)) = bbar.x / d.m;
    f(d.v_dof(v)) = bbar.y / d.m;
  }
  return f;
}

Eigen::VectorXd load_moment_projection(const CellGeometry& g, const DofLayout& d,
                                       const MomentTable& mom,
                                       const std::function<Point2(Point2)>& b,
                                       int quad_deg) {
  if (d.k < 2)
    throw ConfigError("load_moment_projection requires k >= 2");
  const auto exps = monomial_exponents(d.k - 2);
  Eigen::MatrixXd Q(d.r, d.r);
  for (int i = 0; i < d.r; ++i)
    for (int j = 0; j < d.r; ++j) Q(i, j) = mom.product(exps[i], exps[j]);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d.r, 2);
  polygon_quadrature(g.pts, quad_deg, [&](Point2 p, double w) {
    const Point2 s = scaled_coords(g, p);
    const Point2 bv = b(p);
    for (int i = 0; i < d.r; ++i) {
      const double q = w * eval_monomial(exps[i], s.x, s.y);
      rhs(i, 0) += q * bv.x;
      rhs(i, 1) += q * bv.y;
    }
  });
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Q);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw ConditioningError("load projection: moment Gram matrix singular");
  const Eigen::MatrixXd coef = ldlt.solve(rhs);
  // Pairing of b_h with the virtual basis reduces to the moment dofs,
  // scaled by |E|.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(d.n);
  for (int j = 0; j < d.r; ++j) {
    const int slot = d.moment_slot(j);
    f(d.u_dof(slot)) = g.area * coef(j, 0);
    f(d.v_dof(slot)) = g.area * coef(j, 1);
  }
  return f;
}

Eigen::VectorXd neumann_edge_load(
    const CellGeometry& g, const DofLayout& d, int edge,
    const std::function<Point2(Point2, Point2)>& traction) {
  const Point2 a = g.pts[edge];
  const Point2 b = g.pts[(edge + 1) % d.m];
  const Point2 nrm = g.edge_normal[edge];
  const double half_len = 0.5 * g.edge_len[edge];
  const Rule1D gl = gauss_lobatto(d.k + 1);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(d.n);
  for (int gq = 0; gq <= d.k; ++gq) {
    int slot;
    if (gq == 0)
      slot = d.vertex_slot(edge);
    else if (gq == d.k)
      slot = d.vertex_slot((edge + 1) % d.m);
    else
      slot = d.edge_slot(edge, gq - 1);
    const Point2 p = a + (0.5 * (gl.nodes[gq] + 1.0)) * (b - a);
    const Point2 t = traction(p, nrm);
    const double c = half_len * gl.weights[gq];
    f(d.u_dof(slot)) += c * t.x;
    f(d.v_dof(slot)) += c * t.y;
  }
  return f;
}

Element build_element(const CellGeometry& geom, int k, const Material& mat,
                      double tau, int cell_id) {
  Element el;
  el.geom = geom;
  el.layout = DofLayout::make(k, static_cast<int>(geom.pts.size()));
  try {
    el.moments = polygon_moments(geom.pts, geom.centroid, geom.diameter, 2 * k);
    el.D = matrix_D(geom, el.layout, el.moments);
    el.G = matrix_G(el.layout, el.moments);
    el.B = matrix_B(geom, el.layout, el.moments);
    // Projector and stiffness run through the extended-precision pipeline;
    // only the final results are rounded to double.
    const std::vector<LD> mom =
        moments_ld(geom.pts, geom.centroid, geom.diameter, 2 * k);
    const MatL Gl = matrix_G_ld(el.layout, mom);
    const MatL Bl = matrix_B_ld(geom, el.layout);
    const MatL Pml = strain_projector_ld(Gl, Bl);
    const MatL Hl = matrix_H_ld(el.layout, mom, mat.C());
    const MatL Kcl = Pml.transpose() * Hl * Pml;
    const LD tr = Kcl.trace();
    const MatL Kl = Kcl + stability_ld(el.D, tr, tau);
    el.Pm = Pml.cast<double>();
    el.trace_Kc = static_cast<double>(tr);
    el.K = Kl.cast<double>();
  } catch (const ConditioningError& e) {
    if (cell_id < 0) throw;
    throw ConditioningError("cell " + std::to_string(cell_id) + ": " + e.what());
  }
  return el;
}

}  // namespace vem
