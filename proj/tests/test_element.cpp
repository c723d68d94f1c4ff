#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "test_util.hpp"
#include "vem/element.hpp"
#include "vem/errors.hpp"

using namespace vem;

namespace {

const std::vector<Point2> kUnitSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Element square_element(int k) {
  return build_element(polygon_geometry(kUnitSquare), k,
                       Material::from_lame(1.0, 1.0), 0.5);
}

// Local dof vector of a polynomial displacement field given by coefficient
// vector over the 2*dimP_k columns of D.
Eigen::VectorXd poly_dofs(const Element& el, const Eigen::VectorXd& coef) {
  return el.D * coef;
}

Eigen::VectorXd random_coef(std::mt19937_64& rng, int k) {
  Eigen::VectorXd c(2 * monomial_count(k));
  for (int i = 0; i < c.size(); ++i) c(i) = testutil::uniform(rng, -1.0, 1.0);
  return c;
}

}  // namespace

TEST_CASE("material parameter conversion and validation") {
  const Material m = Material::from_youngs(70.0, 1.0 / 3.0);
  // plane strain Lame parameters
  CHECK(m.mu == doctest::Approx(70.0 / (2.0 * (4.0 / 3.0))).epsilon(1e-15));
  CHECK(m.lambda ==
        doctest::Approx(70.0 / 3.0 / ((4.0 / 3.0) * (1.0 / 3.0))).epsilon(1e-15));
  const Eigen::Matrix3d C = m.C();
  CHECK(C(0, 0) == doctest::Approx(m.lambda + 2.0 * m.mu));
  CHECK(C(0, 1) == doctest::Approx(m.lambda));
  CHECK(C(2, 2) == doctest::Approx(m.mu));
  CHECK(C(0, 2) == 0.0);
  CHECK_THROWS_AS(Material::from_youngs(-1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(Material::from_youngs(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(Material::from_lame(0.0, 0.0), ConfigError);
}

TEST_CASE("dof layout counts") {
  const DofLayout d2 = DofLayout::make(2, 4);
  CHECK(d2.n_points == 8);
  CHECK(d2.r == 1);
  CHECK(d2.n == 18);
  const DofLayout d3 = DofLayout::make(3, 5);
  CHECK(d3.n_points == 15);
  CHECK(d3.r == 3);
  CHECK(d3.n == 36);
  CHECK(d3.edge_slot(0, 0) == 5);
  CHECK(d3.edge_slot(2, 1) == 10);
  CHECK(d3.moment_slot(0) == 15);
  CHECK(d3.u_dof(3) == 6);
  CHECK(d3.v_dof(3) == 7);
}

TEST_CASE("dof points include edge Gauss-Lobatto nodes") {
  const CellGeometry g = polygon_geometry(kUnitSquare);
  const DofLayout d = DofLayout::make(3, 4);
  const auto pts = dof_points(g, d);
  REQUIRE(static_cast<int>(pts.size()) == d.n_points);
  for (int v = 0; v < 4; ++v) {
    CHECK(pts[v].x == kUnitSquare[v].x);
    CHECK(pts[v].y == kUnitSquare[v].y);
  }
  // bottom edge internal nodes of the 4-point Lobatto rule
  const double off = 0.5 / std::sqrt(5.0);
  CHECK(pts[d.edge_slot(0, 0)].x == doctest::Approx(0.5 - off).epsilon(1e-15));
  CHECK(pts[d.edge_slot(0, 0)].y == doctest::Approx(0.0));
  CHECK(pts[d.edge_slot(0, 1)].x == doctest::Approx(0.5 + off).epsilon(1e-15));
  // right edge runs upward
  CHECK(pts[d.edge_slot(1, 0)].x == doctest::Approx(1.0));
  CHECK(pts[d.edge_slot(1, 0)].y == doctest::Approx(0.5 - off).epsilon(1e-15));
}

TEST_CASE("frozen D matrix entries on the unit square") {
  const Element el = square_element(1);
  REQUIRE(el.D.rows() == 8);
  REQUIRE(el.D.cols() == 6);
  const double s = 0.5 / std::sqrt(2.0);  // |scaled coordinate| of a corner
  // vertex (0,0): q = (1, -s, -s); u dofs sit in even columns
  CHECK(el.D(0, 0) == doctest::Approx(1.0));
  CHECK(el.D(0, 2) == doctest::Approx(-s).epsilon(1e-15));
  CHECK(el.D(0, 4) == doctest::Approx(-s).epsilon(1e-15));
  CHECK(el.D(0, 1) == 0.0);
  CHECK(el.D(0, 3) == 0.0);
  // v row of vertex (1,1)
  CHECK(el.D(5, 1) == doctest::Approx(1.0));
  CHECK(el.D(5, 3) == doctest::Approx(s).epsilon(1e-15));
  CHECK(el.D(5, 5) == doctest::Approx(s).epsilon(1e-15));
  CHECK(el.D(5, 0) == 0.0);

  // k=2: moment dof rows hold cell-average moments
  const Element e2 = square_element(2);
  REQUIRE(e2.D.rows() == 18);
  REQUIRE(e2.D.cols() == 12);
  CHECK(e2.D(16, 0) == doctest::Approx(1.0).epsilon(1e-14));       // avg of 1
  CHECK(e2.D(16, 2) == doctest::Approx(0.0).epsilon(1e-14));       // avg of xi
  CHECK(e2.D(16, 6) == doctest::Approx(1.0 / 24.0).epsilon(1e-13)); // avg of xi^2
  CHECK(e2.D(17, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("frozen B matrix for k=1 on the unit square") {
  const Element el = square_element(1);
  REQUIRE(el.B.rows() == 3);
  REQUIRE(el.B.cols() == 8);
  Eigen::MatrixXd expect(3, 8);
  // columns ordered u0,v0,u1,v1,u2,v2,u3,v3 for vertices
  // (0,0),(1,0),(1,1),(0,1)
  expect << -0.5, 0, 0.5, 0, 0.5, 0, -0.5, 0,  //
      0, -0.5, 0, -0.5, 0, 0.5, 0, 0.5,        //
      -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 0.5, -0.5;
  CHECK((el.B - expect).lpNorm<Eigen::Infinity>() ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("G is symmetric positive definite and matches quadrature") {
  std::mt19937_64 rng(31);
  for (int k = 1; k <= 3; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 6);
    const CellGeometry g = polygon_geometry(poly);
    const Element el = build_element(g, k, Material::from_lame(2.0, 1.0), 0.5);
    CHECK((el.G - el.G.transpose()).lpNorm<Eigen::Infinity>() <
          1e-14 * el.G.lpNorm<Eigen::Infinity>());
    Eigen::MatrixXd Gq = Eigen::MatrixXd::Zero(el.G.rows(), el.G.cols());
    polygon_quadrature(poly, 2 * k, [&](Point2 x, double w) {
      const Point2 s = scaled_coords(g, x);
      const Eigen::MatrixXd N = strain_basis(k, s.x, s.y);
      Gq += w * N.transpose() * N;
    });
    CHECK((el.G - Gq).lpNorm<Eigen::Infinity>() <
          1e-12 * el.G.lpNorm<Eigen::Infinity>());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(el.G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("projector reproduces polynomial strains exactly") {
  std::mt19937_64 rng(37);
  for (int k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto poly = (trial % 2)
                            ? testutil::random_star_polygon(rng, 3 + 2 * trial)
                            : testutil::random_convex_polygon(rng, 4 + trial);
      const CellGeometry g = polygon_geometry(poly);
      const Element el = build_element(g, k, Material::from_lame(1.0, 1.0), 0.5);
      const Eigen::MatrixXd E = testutil::exact_strain_map(k, g.diameter);
      const double scale = E.lpNorm<Eigen::Infinity>();
      CHECK((el.Pm * el.D - E).lpNorm<Eigen::Infinity>() < 1e-11 * scale);
    }
  }
}

TEST_CASE("projection of an interpolated linear field") {
  const Element el = square_element(1);
  // u = x: dofs are the vertex x coordinates
  Eigen::VectorXd d = Eigen::VectorXd::Zero(8);
  for (int v = 0; v < 4; ++v) d(2 * v) = kUnitSquare[v].x;
  const Eigen::Vector3d s = el.Pm * d;
  CHECK(s(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s(2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("B annihilates rigid body modes") {
  std::mt19937_64 rng(41);
  for (int k = 1; k <= 3; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 7);
    const CellGeometry g = polygon_geometry(poly);
    const Element el = build_element(g, k, Material::from_lame(1.0, 1.0), 0.5);
    const int np = monomial_count(k);
    // translations and the rotation (-(y-yc), x-xc) = hd * (-eta, xi)
    std::vector<Eigen::VectorXd> rigid;
    Eigen::VectorXd tx = Eigen::VectorXd::Zero(2 * np), ty = tx, rot = tx;
    tx(0) = 1.0;
    ty(1) = 1.0;
    rot(2 * monomial_index({0, 1})) = -g.diameter;
    rot(2 * monomial_index({1, 0}) + 1) = g.diameter;
    const double bscale = el.B.lpNorm<Eigen::Infinity>();
    for (const auto& c : {tx, ty, rot})
      CHECK((el.B * (el.D * c)).lpNorm<Eigen::Infinity>() < 1e-13 * bscale);
  }
}

TEST_CASE("consistency stiffness matches the quadrature energy oracle") {
  std::mt19937_64 rng(43);
  const Material mat = Material::from_youngs(70.0, 0.3);
  for (int k = 1; k <= 3; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 5 + k);
    const CellGeometry g = polygon_geometry(poly);
    const Element el = build_element(g, k, mat, 0.5);
    const Eigen::MatrixXd H = matrix_H(DofLayout::make(k, (int)poly.size()),
                                       el.moments, mat.C());
    const Eigen::MatrixXd Kc = consistency_stiffness(el.Pm, H);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd p = random_coef(rng, k);
      const Eigen::VectorXd q = random_coef(rng, k);
      const double discrete = (el.D * p).dot(Kc * (el.D * q));
      const double oracle = testutil::energy_oracle(g, k, mat.C(), p, q);
      CHECK(discrete ==
            doctest::Approx(oracle).epsilon(1e-10).scale(std::abs(oracle) + 1.0));
    }
  }
}

TEST_CASE("stability term is a scaled projector complement") {
  std::mt19937_64 rng(47);
  for (int k = 1; k <= 3; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 6);
    const CellGeometry g = polygon_geometry(poly);
    const double tau = 0.5;
    const Element el = build_element(g, k, Material::from_lame(3.0, 2.0), tau);
    const Eigen::MatrixXd Ks = el.K - consistency_stiffness(
        el.Pm, matrix_H(DofLayout::make(k, (int)poly.size()), el.moments,
                        Material::from_lame(3.0, 2.0).C()));
    const int n = static_cast<int>(el.D.rows());
    const int ncols = static_cast<int>(el.D.cols());
    // symmetry and positive semidefiniteness
    CHECK((Ks - Ks.transpose()).lpNorm<Eigen::Infinity>() <
          1e-13 * el.trace_Kc);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks);
    CHECK(es.eigenvalues().minCoeff() > -1e-12 * el.trace_Kc);
    // vanishes on polynomial dof vectors
    CHECK((Ks * el.D).lpNorm<Eigen::Infinity>() <
          1e-12 * el.trace_Kc * el.D.lpNorm<Eigen::Infinity>());
    // trace identity: tau * tr(Kc) * (n - rank(D))
    CHECK(Ks.trace() == doctest::Approx(tau * el.trace_Kc * (n - ncols))
                            .epsilon(1e-12));
  }
}

TEST_CASE("element stiffness has exactly the rigid-body kernel") {
  std::mt19937_64 rng(53);
  for (int k = 1; k <= 3; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 4 + k);
    const CellGeometry g = polygon_geometry(poly);
    const Element el = build_element(g, k, Material::from_youngs(10.0, 0.2), 0.5);
    CHECK((el.K - el.K.transpose()).lpNorm<Eigen::Infinity>() <
          1e-13 * el.K.trace());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(el.K);
    int null = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) < 1e-10 * el.K.trace()) ++null;
    CHECK(null == 3);
  }
}

TEST_CASE("degenerate configurations raise errors") {
  const CellGeometry g = polygon_geometry(kUnitSquare);
  CHECK_THROWS_AS(build_element(g, 1, Material::from_lame(1.0, 1.0), 0.0),
                  ConfigError);
  CHECK_THROWS_AS(build_element(g, 1, Material::from_lame(1.0, 1.0), -2.0),
                  ConfigError);
  // rank-deficient dof matrix trips the conditioning guard
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(8, 6);
  D.leftCols(3).setRandom();
  CHECK_THROWS_AS(stability_stiffness(D, 1.0, 0.5), ConditioningError);
}

TEST_CASE("vertex-average load is exact for constant body force") {
  std::mt19937_64 rng(59);
  const auto poly = testutil::random_star_polygon(rng, 7);
  const CellGeometry g = polygon_geometry(poly);
  const DofLayout d = DofLayout::make(1, 7);
  const Point2 b{3.0, -2.0};
  const Eigen::VectorXd f =
      load_vertex_average(g, d, [&](Point2) { return b; }, 2);
  REQUIRE(f.size() == 14);
  for (int v = 0; v < 7; ++v) {
    CHECK(f(2 * v) == doctest::Approx(g.area * b.x / 7.0).epsilon(1e-13));
    CHECK(f(2 * v + 1) == doctest::Approx(g.area * b.y / 7.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(load_vertex_average(g, DofLayout::make(2, 7),
                                      [&](Point2) { return b; }, 2),
                  ConfigError);
}

TEST_CASE("moment load integrates polynomial work exactly") {
  // For b in P_{k-2}, the load vector applied to the dofs of any
  // polynomial displacement v of degree <= k gives the exact work
  // integral of b . v.
  std::mt19937_64 rng(61);
  for (int k = 2; k <= 4; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 6);
    const CellGeometry g = polygon_geometry(poly);
    const DofLayout d = DofLayout::make(k, 6);
    const MomentTable mom = polygon_moments(poly, g.centroid, g.diameter, 2 * k);
    const Element el = build_element(g, k, Material::from_lame(1.0, 1.0), 0.5);

    // b: random polynomial of degree k-2 in scaled coordinates
    const auto bexps = monomial_exponents(k - 2);
    Eigen::VectorXd bcoef(2 * bexps.size());
    for (int i = 0; i < bcoef.size(); ++i)
      bcoef(i) = testutil::uniform(rng, -1.0, 1.0);
    auto body = [&](Point2 x) {
      const Point2 s = scaled_coords(g, x);
      Point2 val{0.0, 0.0};
      for (std::size_t j = 0; j < bexps.size(); ++j) {
        const double q = eval_monomial(bexps[j], s.x, s.y);
        val.x += bcoef(2 * j) * q;
        val.y += bcoef(2 * j + 1) * q;
      }
      return val;
    };

    const Eigen::VectorXd f = load_moment_projection(g, d, mom, body, 2 * k);
    // load touches only moment dofs
    CHECK(f.head(2 * d.n_points).lpNorm<Eigen::Infinity>() == 0.0);

    const Eigen::VectorXd vcoef = random_coef(rng, k);
    const double discrete = f.dot(el.D * vcoef);
    double oracle = 0.0;
    polygon_quadrature(poly, 2 * k + 2, [&](Point2 x, double w) {
      const Point2 s = scaled_coords(g, x);
      const Point2 bv = body(x);
      Point2 vv{0.0, 0.0};
      const auto vexps = monomial_exponents(k);
      for (std::size_t j = 0; j < vexps.size(); ++j) {
        const double q = eval_monomial(vexps[j], s.x, s.y);
        vv.x += vcoef(2 * j) * q;
        vv.y += vcoef(2 * j + 1) * q;
      }
      oracle += w * (bv.x * vv.x + bv.y * vv.y);
    });
    CHECK(discrete ==
          doctest::Approx(oracle).epsilon(1e-12).scale(1.0 + std::abs(oracle)));
  }
}

TEST_CASE("edge traction loads have frozen values") {
  const CellGeometry g = polygon_geometry(kUnitSquare);
  const double q = 7.0;
  auto traction = [&](Point2, Point2) { return Point2{q, 0.0}; };

  const DofLayout d1 = DofLayout::make(1, 4);
  const Eigen::VectorXd f1 = neumann_edge_load(g, d1, 0, traction);
  CHECK(f1(0) == doctest::Approx(q / 2.0).epsilon(1e-15));  // u of vertex 0
  CHECK(f1(2) == doctest::Approx(q / 2.0).epsilon(1e-15));  // u of vertex 1
  CHECK(f1(1) == 0.0);
  CHECK(f1.tail(4).lpNorm<Eigen::Infinity>() == 0.0);

  const DofLayout d2 = DofLayout::make(2, 4);
  const Eigen::VectorXd f2 = neumann_edge_load(g, d2, 0, traction);
  CHECK(f2(0) == doctest::Approx(q / 6.0).epsilon(1e-15));
  CHECK(f2(2) == doctest::Approx(q / 6.0).epsilon(1e-15));
  CHECK(f2(2 * d2.edge_slot(0, 0)) ==
        doctest::Approx(4.0 * q / 6.0).epsilon(1e-15));
}

TEST_CASE("variable-coefficient H matches the constant fast path") {
  std::mt19937_64 rng(67);
  const auto poly = testutil::random_convex_polygon(rng, 5);
  const CellGeometry g = polygon_geometry(poly);
  const Eigen::Matrix3d C = Material::from_lame(2.0, 3.0).C();
  for (int k = 1; k <= 3; ++k) {
    const DofLayout d = DofLayout::make(k, 5);
    const MomentTable mom = polygon_moments(poly, g.centroid, g.diameter, 2 * k);
    const Eigen::MatrixXd Hc = matrix_H(d, mom, C);
    const Eigen::MatrixXd Hv =
        matrix_H(g, d, [&](Point2) { return C; }, 2 * k);
    CHECK((Hc - Hv).lpNorm<Eigen::Infinity>() <
          1e-12 * Hc.lpNorm<Eigen::Infinity>());
  }
}
