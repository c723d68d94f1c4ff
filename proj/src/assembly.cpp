#include "vem/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

GlobalDofMap number_dofs(const Mesh& mesh, int k) {
  if (k < 1) throw ConfigError("order k must be >= 1");
  GlobalDofMap map;
  map.k = k;
  map.nv = mesh.n_vertices();
  map.ne = mesh.n_edges();
  map.nc = mesh.n_cells();
  map.n_dofs = 2 * map.nv + 2 * (k - 1) * map.ne + k * (k - 1) * map.nc;
  map.cell_dofs.resize(map.nc);
  for (int c = 0; c < map.nc; ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    const DofLayout d = DofLayout::make(k, m);
    auto& gd = map.cell_dofs[c];
    gd.resize(d.n);
    for (int v = 0; v < m; ++v) {
      gd[d.u_dof(d.vertex_slot(v))] = map.vertex_dof(cell[v], 0);
      gd[d.v_dof(d.vertex_slot(v))] = map.vertex_dof(cell[v], 1);
    }
    for (int e = 0; e < m && k > 1; ++e) {
      const int va = cell[e], vb = cell[(e + 1) % m];
      const int eid = mesh.cell_edges[c][e];
      for (int j = 0; j < k - 1; ++j) {
        // global edge nodes run from the lower to the higher vertex id;
        // Lobatto nodes are symmetric, so reversal is an index flip
        const int jp = (va < vb) ? j : (k - 2 - j);
        gd[d.u_dof(d.edge_slot(e, j))] = map.edge_dof(eid, jp, 0);
        gd[d.v_dof(d.edge_slot(e, j))] = map.edge_dof(eid, jp, 1);
      }
    }
    for (int j = 0; j < d.r; ++j) {
      gd[d.u_dof(d.moment_slot(j))] = map.moment_dof(c, j, 0);
      gd[d.v_dof(d.moment_slot(j))] = map.moment_dof(c, j, 1);
    }
  }
  return map;
}

Problem make_problem(Mesh mesh, int k, const Material& mat, double tau) {
  if (k < 1) throw ConfigError("polynomial order k must be >= 1");
  if (tau <= 0.0) throw ConfigError("stabilization factor tau must be > 0");
  Problem p;
  p.mesh = std::move(mesh);
  p.k = k;
  p.mat = mat;
  p.tau = tau;
  p.dofs = number_dofs(p.mesh, k);
  p.elements.reserve(p.mesh.n_cells());
  for (int c = 0; c < p.mesh.n_cells(); ++c)
    p.elements.push_back(
        build_element(cell_geometry(p.mesh, c), k, mat, tau, c));
  return p;
}

namespace {

Point2 edge_midpoint(const Mesh& mesh, const Mesh::Edge& e) {
  return 0.5 * (mesh.vertices[e.a] + mesh.vertices[e.b]);
}

}  // namespace

AssembledSystem assemble(const Problem& p, const BodyLoad& body,
                         const BoundaryConditions& bc) {
  const int n = p.dofs.n_dofs;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const int quad_deg = 2 * p.k + 2;

  for (int c = 0; c < p.mesh.n_cells(); ++c) {
    const Element& el = p.elements[c];
    const auto& gd = p.dofs.cell_dofs[c];
    for (int i = 0; i < el.layout.n; ++i)
      for (int j = 0; j < el.layout.n; ++j)
        trips.emplace_back(gd[i], gd[j], el.K(i, j));
    if (body) {
      const Eigen::VectorXd f =
          p.k == 1 ? load_vertex_average(el.geom, el.layout, body, quad_deg)
                   : load_moment_projection(el.geom, el.layout, el.moments,
                                            body, quad_deg);
      for (int i = 0; i < el.layout.n; ++i) rhs(gd[i]) += f(i);
    }
  }

  if (!bc.neumann.empty()) {
    for (int e = 0; e < p.mesh.n_edges(); ++e) {
      if (!p.mesh.boundary_edge(e)) continue;
      const Point2 mid = edge_midpoint(p.mesh, p.mesh.edges[e]);
      const NeumannRule* rule = nullptr;
      for (const auto& r : bc.neumann)
        if (r.where(mid)) {
          rule = &r;
          break;
        }
      if (!rule) continue;
      const int c = p.mesh.edges[e].c0;
      const auto& ce = p.mesh.cell_edges[c];
      const int side = static_cast<int>(
          std::find(ce.begin(), ce.end(), e) - ce.begin());
      const Element& el = p.elements[c];
      const Eigen::VectorXd f =
          neumann_edge_load(el.geom, el.layout, side, rule->traction);
      const auto& gd = p.dofs.cell_dofs[c];
      for (int i = 0; i < el.layout.n; ++i)
        if (f(i) != 0.0) rhs(gd[i]) += f(i);
    }
  }

  AssembledSystem sys;
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trips.begin(), trips.end());
  sys.rhs = std::move(rhs);
  return sys;
}

Constraints dirichlet_constraints(const Problem& p,
                                  const BoundaryConditions& bc) {
  const int n = p.dofs.n_dofs;
  std::vector<char> have(n, 0);
  std::vector<double> val(n, 0.0);
  auto set = [&](int dof, double v) {
    if (!have[dof]) {
      have[dof] = 1;
      val[dof] = v;
    }
  };

  // Rules are applied in declaration order: an earlier rule claims an edge
  // (and at corners, a dof) before later rules are considered, so corner
  // behaviour does not depend on the mesh's edge enumeration.
  const Rule1D gl = gauss_lobatto(p.k + 1);
  std::vector<char> claimed(p.mesh.n_edges(), 0);
  for (const auto& rule : bc.dirichlet) {
    for (int e = 0; e < p.mesh.n_edges(); ++e) {
      if (!p.mesh.boundary_edge(e) || claimed[e]) continue;
      const Mesh::Edge& edge = p.mesh.edges[e];
      if (!rule.where(edge_midpoint(p.mesh, edge))) continue;
      claimed[e] = 1;
      const Point2 pa = p.mesh.vertices[edge.a];
      const Point2 pb = p.mesh.vertices[edge.b];
      auto fix_point = [&](Point2 pt, int udof, int vdof) {
        const Point2 g = rule.value ? rule.value(pt) : Point2{0.0, 0.0};
        if (rule.fix_u) set(udof, g.x);
        if (rule.fix_v) set(vdof, g.y);
      };
      fix_point(pa, p.dofs.vertex_dof(edge.a, 0), p.dofs.vertex_dof(edge.a, 1));
      fix_point(pb, p.dofs.vertex_dof(edge.b, 0), p.dofs.vertex_dof(edge.b, 1));
      for (int j = 0; j < p.k - 1; ++j) {
        const Point2 pt = pa + (0.5 * (gl.nodes[j + 1] + 1.0)) * (pb - pa);
        fix_point(pt, p.dofs.edge_dof(e, j, 0), p.dofs.edge_dof(e, j, 1));
      }
    }
  }

  if (!bc.pins.empty()) {
    double diag = 0.0;
    for (const Point2& q : p.mesh.vertices)
      diag = std::max({diag, std::abs(q.x), std::abs(q.y)});
    const double tol = 1e-9 * std::max(1.0, diag);
    for (const auto& pin : bc.pins) {
      int best = -1;
      double best_d = tol;
      for (int v = 0; v < p.mesh.n_vertices(); ++v) {
        const double dv = dist(p.mesh.vertices[v], pin.at);
        if (dv <= best_d) {
          best = v;
          best_d = dv;
        }
      }
      if (best < 0)
        throw ConfigError("pin location does not match any mesh vertex");
      if (pin.fix_u) set(p.dofs.vertex_dof(best, 0), pin.value.x);
      if (pin.fix_v) set(p.dofs.vertex_dof(best, 1), pin.value.y);
    }
  }

  Constraints c;
  for (int i = 0; i < n; ++i)
    if (have[i]) {
      c.dof.push_back(i);
      c.value.push_back(val[i]);
    }
  return c;
}

Eigen::VectorXd solve_constrained(const AssembledSystem& sys,
                                  const Constraints& constraints,
                                  const SolveOptions& opts,
                                  SolveReport* report) {
  const int n = static_cast<int>(sys.K.rows());
  std::vector<int> free_id(n, -1);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  std::vector<char> fixed(n, 0);
  for (std::size_t i = 0; i < constraints.dof.size(); ++i) {
    fixed[constraints.dof[i]] = 1;
    full(constraints.dof[i]) = constraints.value[i];
  }
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) free_id[i] = nf++;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs_f(nf);
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) rhs_f(free_id[i]) = sys.rhs(i);
  for (int outer = 0; outer < sys.K.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, outer); it;
         ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (fixed[i]) continue;
      if (fixed[j])
        rhs_f(free_id[i]) -= it.value() * full(j);
      else
        trips.emplace_back(free_id[i], free_id[j], it.value());
    }
  }
  Eigen::SparseMatrix<double> Kff(nf, nf);
  Kff.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd uf;
  int iterations = 0;
  if (opts.method == SolveOptions::Method::direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Kff);
    if (solver.info() != Eigen::Success)
      throw SolveError("direct factorization failed (singular system?)");
    uf = solver.solve(rhs_f);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(Kff);
    cg.setTolerance(opts.cg_tol);
    cg.setMaxIterations(opts.cg_max_iter);
    uf = cg.solve(rhs_f);
    iterations = static_cast<int>(cg.iterations());
    if (cg.info() != Eigen::Success)
      throw SolveError("conjugate gradient did not converge");
  }

  const double rhs_norm = std::max(1e-300, rhs_f.norm());
  const double rel_res = (Kff * uf - rhs_f).norm() / rhs_norm;
  if (!std::isfinite(rel_res) || rel_res > 1e-8)
    throw SolveError(
        "solution residual too large (singular system? missing Dirichlet "
        "data?): rel_res = " +
        std::to_string(rel_res));
  if (report) {
    report->n_free = nf;
    report->iterations = iterations;
    report->rel_residual = rel_res;
  }
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) full(i) = uf(free_id[i]);
  return full;
}

Eigen::VectorXd element_dofs(const Problem& p, int cell,
                             const Eigen::VectorXd& u) {
  const auto& gd = p.dofs.cell_dofs[cell];
  Eigen::VectorXd local(gd.size());
  for (std::size_t i = 0; i < gd.size(); ++i) local(i) = u(gd[i]);
  return local;
}

}  // namespace vem
