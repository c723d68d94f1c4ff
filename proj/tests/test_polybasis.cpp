#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vem/polybasis.hpp"

using namespace vem;

TEST_CASE("monomial ordering is degree-major with descending xi power") {
  const auto exps = monomial_exponents(3);
  REQUIRE(exps.size() == 10);
  const int expect[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                             {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  for (int i = 0; i < 10; ++i) {
    CHECK(exps[i].a == expect[i][0]);
    CHECK(exps[i].b == expect[i][1]);
    CHECK(monomial_index(exps[i]) == i);
  }
  CHECK(monomial_count(-1) == 0);
  CHECK(monomial_count(0) == 1);
  CHECK(monomial_count(2) == 6);
  CHECK(monomial_count(4) == 15);
}

TEST_CASE("strain basis has triple-column structure") {
  CHECK(strain_basis_size(1) == 3);
  CHECK(strain_basis_size(3) == 18);
  const Eigen::MatrixXd n1 = strain_basis(1, 0.3, -0.2);
  CHECK((n1 - Eigen::Matrix3d::Identity()).norm() == doctest::Approx(0.0));

  const double xi = 0.37, eta = -0.61;
  const Eigen::MatrixXd n3 = strain_basis(3, xi, eta);
  REQUIRE(n3.rows() == 3);
  REQUIRE(n3.cols() == 18);
  const auto exps = monomial_exponents(2);
  for (int j = 0; j < 6; ++j) {
    const double q = eval_monomial(exps[j], xi, eta);
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r)
        CHECK(n3(r, 3 * j + c) == doctest::Approx(r == c ? q : 0.0));
  }
}

TEST_CASE("polygon moments match the boundary-integral oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto poly = (trial % 2) ? testutil::random_star_polygon(rng, 3 + trial % 8)
                                  : testutil::random_convex_polygon(rng, 3 + trial % 8);
    const CellGeometry g = polygon_geometry(poly);
    const MomentTable mom = polygon_moments(poly, g.centroid, g.diameter, 6);
    CHECK(mom.at(0, 0) == doctest::Approx(g.area).epsilon(1e-13));
    // centered first moments vanish
    CHECK(mom.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mom.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    for (int a = 0; a <= 6; ++a) {
      for (int b = 0; a + b <= 6; ++b) {
        const double oracle =
            testutil::green_moment(poly, g.centroid, g.diameter, a, b);
        CHECK(mom.at(a, b) ==
              doctest::Approx(oracle).epsilon(1e-12).scale(g.area));
      }
    }
  }
}

TEST_CASE("moment table product accessor adds exponents") {
  const std::vector<Point2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const CellGeometry g = polygon_geometry(sq);
  const MomentTable mom = polygon_moments(sq, g.centroid, g.diameter, 4);
  CHECK(mom.product({1, 0}, {1, 0}) == doctest::Approx(mom.at(2, 0)));
  CHECK(mom.product({2, 1}, {0, 1}) == doctest::Approx(mom.at(2, 2)));
  // xi^2 over the unit square with h = sqrt(2): (1/2) * 1/12
  CHECK(mom.at(2, 0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("divergence decomposition has the frozen k=2 pattern") {
  const double hd = 0.5;
  const auto M = divergence_decomposition(2, hd);
  REQUIRE(M.size() == 1);  // dim P_0
  REQUIRE(M[0].rows() == 2);
  REQUIRE(M[0].cols() == 9);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 9);
  // strain monomials for k=2 are (0,0), (1,0), (0,1); physical derivatives
  // contribute 1/hd = 2.
  expect(0, 3 * 1 + 0) = 2.0;  // d/dx of the xx column of xi
  expect(1, 3 * 1 + 2) = 2.0;  // d/dx of the xy column of xi
  expect(1, 3 * 2 + 1) = 2.0;  // d/dy of the yy column of eta
  expect(0, 3 * 2 + 2) = 2.0;  // d/dy of the xy column of eta
  CHECK((M[0] - expect).norm() == doctest::Approx(0.0));
  CHECK(divergence_decomposition(1, hd).empty());
}

TEST_CASE("divergence decomposition reconstructs the divergence integral") {
  // Divergence theorem: integral of div(N^P s) over E equals the boundary
  // integral of (N^P s) n.  The left side uses the decomposition and the
  // moment table, the right side independent Gauss quadrature per edge.
  std::mt19937_64 rng(23);
  for (int k = 1; k <= 4; ++k) {
    const auto poly = testutil::random_star_polygon(rng, 4 + k);
    const CellGeometry g = polygon_geometry(poly);
    const MomentTable mom = polygon_moments(poly, g.centroid, g.diameter, 2 * k);
    const auto M = divergence_decomposition(k, g.diameter);
    const auto pexps = monomial_exponents(k - 2);
    const int l = strain_basis_size(k);
    Eigen::VectorXd s(l);
    for (int i = 0; i < l; ++i) s(i) = testutil::uniform(rng, -1.0, 1.0);

    Eigen::Vector2d lhs = Eigen::Vector2d::Zero();
    for (std::size_t j = 0; j < M.size(); ++j)
      lhs += mom.at(pexps[j]) * (M[j] * s);

    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    const Rule1D rule = gauss_legendre(k + 2);
    const int m = static_cast<int>(poly.size());
    for (int e = 0; e < m; ++e) {
      const Point2 p0 = poly[e], p1 = poly[(e + 1) % m];
      const double len = g.edge_len[e];
      const Point2 nrm = g.edge_normal[e];
      for (int q = 0; q < rule.size(); ++q) {
        const double t = 0.5 * (rule.nodes[q] + 1.0);
        const Point2 x{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
        const Eigen::Vector3d sig =
            strain_basis(k, (x.x - g.centroid.x) / g.diameter,
                         (x.y - g.centroid.y) / g.diameter) *
            s;
        rhs(0) += 0.5 * len * rule.weights[q] * (sig(0) * nrm.x + sig(2) * nrm.y);
        rhs(1) += 0.5 * len * rule.weights[q] * (sig(2) * nrm.x + sig(1) * nrm.y);
      }
    }
    CHECK((lhs - rhs).norm() ==
          doctest::Approx(0.0).scale(1.0 + rhs.norm()).epsilon(1e-13));
  }
}
