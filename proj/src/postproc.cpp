#include "vem/postproc.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {
namespace {

std::string fmt_double(double v) {
  if (v == 0.0) return "0";  // normalize negative zero
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// d/dx of the Lagrange polynomial through (nodes, values) at x.
double lagrange_derivative(const std::vector<double>& nodes,
                           const Eigen::VectorXd& values, double x) {
  const int n = static_cast<int>(nodes.size());
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    double denom = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != i) denom *= nodes[i] - nodes[m];
    double num = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double prod = 1.0;
      for (int m = 0; m < n; ++m)
        if (m != i && m != j) prod *= x - nodes[m];
      num += prod;
    }
    out += values(i) * num / denom;
  }
  return out;
}

}  // namespace

Eigen::VectorXd projected_strain_coeffs(const Problem& p, int cell,
                                        const Eigen::VectorXd& u) {
  return p.elements[cell].Pm * element_dofs(p, cell, u);
}

Eigen::Vector3d strain_at(const Problem& p, int cell,
                          const Eigen::VectorXd& strain_coeffs, Point2 x) {
  const Element& el = p.elements[cell];
  const Point2 s = scaled_coords(el.geom, x);
  const auto exps = monomial_exponents(p.k - 1);
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  for (std::size_t j = 0; j < exps.size(); ++j) {
    const double q = eval_monomial(exps[j], s.x, s.y);
    e(0) += q * strain_coeffs(3 * j + 0);
    e(1) += q * strain_coeffs(3 * j + 1);
    e(2) += q * strain_coeffs(3 * j + 2);
  }
  return e;
}

Eigen::Vector3d average_stress(const Problem& p, int cell,
                               const Eigen::VectorXd& u) {
  const Element& el = p.elements[cell];
  const Eigen::VectorXd s = projected_strain_coeffs(p, cell, u);
  const auto exps = monomial_exponents(p.k - 1);
  Eigen::Vector3d avg = Eigen::Vector3d::Zero();
  for (std::size_t j = 0; j < exps.size(); ++j) {
    const double mj = el.moments.at(exps[j]) / el.geom.area;
    for (int t = 0; t < 3; ++t) avg(t) += mj * s(3 * j + t);
  }
  return p.mat.C() * avg;
}

double error_D1(const Problem& p, const Eigen::VectorXd& u,
                const StrainField& exact_strain, int quad_deg) {
  if (quad_deg < 0) quad_deg = 2 * p.k + 2;
  double acc = 0.0;
  for (int c = 0; c < p.mesh.n_cells(); ++c) {
    const Eigen::VectorXd s = projected_strain_coeffs(p, c, u);
    polygon_quadrature(p.elements[c].geom.pts, quad_deg,
                       [&](Point2 x, double w) {
                         const Eigen::Vector3d d =
                             exact_strain(x) - strain_at(p, c, s, x);
                         acc += w * d.squaredNorm();
                       });
  }
  return std::sqrt(acc);
}

double error_D2(const Problem& p, const Eigen::VectorXd& u,
                const GradientField& exact_gradient) {
  const Rule1D gauss = gauss_legendre(8);
  const Rule1D gl = gauss_lobatto(p.k + 1);
  double acc = 0.0;
  for (int e = 0; e < p.mesh.n_edges(); ++e) {
    const Mesh::Edge& edge = p.mesh.edges[e];
    const Point2 a = p.mesh.vertices[edge.a];
    const Point2 b = p.mesh.vertices[edge.b];
    const double len = dist(a, b);
    const Point2 tangent = (1.0 / len) * (b - a);
    Eigen::VectorXd uu(p.k + 1), vv(p.k + 1);
    uu(0) = u(p.dofs.vertex_dof(edge.a, 0));
    vv(0) = u(p.dofs.vertex_dof(edge.a, 1));
    uu(p.k) = u(p.dofs.vertex_dof(edge.b, 0));
    vv(p.k) = u(p.dofs.vertex_dof(edge.b, 1));
    for (int j = 0; j < p.k - 1; ++j) {
      uu(j + 1) = u(p.dofs.edge_dof(e, j, 0));
      vv(j + 1) = u(p.dofs.edge_dof(e, j, 1));
    }
    double edge_acc = 0.0;
    for (int g = 0; g < gauss.size(); ++g) {
      const double t = gauss.nodes[g];
      const Point2 x = a + (0.5 * (t + 1.0)) * (b - a);
      const Eigen::Matrix2d grad = exact_gradient(x);
      const double du_ex = grad(0, 0) * tangent.x + grad(0, 1) * tangent.y;
      const double dv_ex = grad(1, 0) * tangent.x + grad(1, 1) * tangent.y;
      const double du_h = lagrange_derivative(gl.nodes, uu, t) * 2.0 / len;
      const double dv_h = lagrange_derivative(gl.nodes, vv, t) * 2.0 / len;
      const double du = du_ex - du_h;
      const double dv = dv_ex - dv_h;
      edge_acc += 0.5 * len * gauss.weights[g] * (du * du + dv * dv);
    }
    acc += len * edge_acc;  // h_f weighting
  }
  return std::sqrt(acc);
}

Point2 displacement_at_vertex(const Problem& p, int vertex,
                              const Eigen::VectorXd& u) {
  return {u(p.dofs.vertex_dof(vertex, 0)), u(p.dofs.vertex_dof(vertex, 1))};
}

int nearest_vertex(const Mesh& mesh, Point2 x) {
  int best = 0;
  double best_d = dist(mesh.vertices[0], x);
  for (int v = 1; v < mesh.n_vertices(); ++v) {
    const double d = dist(mesh.vertices[v], x);
    if (d < best_d) {
      best = v;
      best_d = d;
    }
  }
  return best;
}

namespace {

bool point_in_polygon(const std::vector<Point2>& poly, Point2 x) {
  // Crossing-number test with an edge-inclusion tolerance, so that sample
  // points sitting on a cell boundary are claimed by at least one cell.
  double scale = 0.0;
  bool inside = false;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % m];
    scale = std::max(scale, std::max(std::abs(a.x - x.x), std::abs(a.y - x.y)));
    if ((a.y > x.y) != (b.y > x.y)) {
      const double xc = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (x.x < xc) inside = !inside;
    }
  }
  if (inside) return true;
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (int i = 0; i < m; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % m];
    const Point2 t{b.x - a.x, b.y - a.y};
    const double len2 = t.x * t.x + t.y * t.y;
    const double s = std::clamp(((x.x - a.x) * t.x + (x.y - a.y) * t.y) / len2,
                                0.0, 1.0);
    const Point2 c{a.x + s * t.x, a.y + s * t.y};
    if (dist(c, x) <= tol) return true;
  }
  return false;
}

}  // namespace

int locate_cell(const Mesh& mesh, Point2 x) {
  for (int c = 0; c < mesh.n_cells(); ++c) {
    std::vector<Point2> poly;
    poly.reserve(mesh.cells[c].size());
    for (int v : mesh.cells[c]) poly.push_back(mesh.vertices[v]);
    if (point_in_polygon(poly, x)) return c;
  }
  return -1;
}

void write_vtk(const Problem& p, const Eigen::VectorXd& u,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write VTK file: " + path);
  const Mesh& mesh = p.mesh;
  out << "# vtk DataFile Version 3.0\n";
  out << "polygonal mesh solution\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Point2& v : mesh.vertices)
    out << fmt_double(v.x) << ' ' << fmt_double(v.y) << " 0\n";
  int list_size = 0;
  for (const auto& c : mesh.cells) list_size += 1 + static_cast<int>(c.size());
  out << "POLYGONS " << mesh.n_cells() << ' ' << list_size << '\n';
  for (const auto& c : mesh.cells) {
    out << c.size();
    for (int v : c) out << ' ' << v;
    out << '\n';
  }
  out << "POINT_DATA " << mesh.n_vertices() << '\n';
  out << "VECTORS displacement double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v)
    out << fmt_double(u(p.dofs.vertex_dof(v, 0))) << ' '
        << fmt_double(u(p.dofs.vertex_dof(v, 1))) << " 0\n";
  out << "CELL_DATA " << mesh.n_cells() << '\n';
  const char* names[3] = {"stress_xx", "stress_yy", "stress_xy"};
  std::vector<Eigen::Vector3d> stress(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) stress[c] = average_stress(p, c, u);
  for (int t = 0; t < 3; ++t) {
    out << "SCALARS " << names[t] << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int c = 0; c < mesh.n_cells(); ++c) out << fmt_double(stress[c](t)) << '\n';
  }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file: " + path);
  out << header << '\n';
  const std::size_t arity =
      1 + std::count(header.begin(), header.end(), ',');
  for (const auto& row : rows) {
    if (row.size() != arity)
      throw Error("CSV row arity does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt_double(row[i]);
    out << '\n';
  }
}

}  // namespace vem
