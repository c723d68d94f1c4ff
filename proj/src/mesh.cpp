#include "vem/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "vem/errors.hpp"

namespace vem {
namespace {

double signed_area2(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2& a = p[i];
    const Point2& b = p[(i + 1) % p.size()];
    s += cross(a, b);
  }
  return s;
}

bool on_segment(Point2 a, Point2 b, Point2 q) {
  return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
}

// Any shared point counts as an intersection (used for non-adjacent sides).
bool segments_touch(Point2 p1, Point2 p2, Point2 p3, Point2 p4) {
  const double d1 = cross(p4 - p3, p1 - p3);
  const double d2 = cross(p4 - p3, p2 - p3);
  const double d3 = cross(p2 - p1, p3 - p1);
  const double d4 = cross(p2 - p1, p4 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(p3, p4, p1)) return true;
  if (d2 == 0 && on_segment(p3, p4, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, p3)) return true;
  if (d4 == 0 && on_segment(p1, p2, p4)) return true;
  return false;
}

void validate_cell(const std::vector<Point2>& pts, int cell_id) {
  const int m = static_cast<int>(pts.size());
  const std::string tag = "cell " + std::to_string(cell_id) + ": ";
  for (int i = 0; i < m; ++i) {
    const Point2 e0 = pts[(i + 1) % m] - pts[i];
    if (e0.x == 0.0 && e0.y == 0.0)
      throw InvalidCellError(tag + "zero-length side");
    const Point2 e1 = pts[(i + 2) % m] - pts[(i + 1) % m];
    // angle of exactly pi (hanging node) is fine; folding back is not
    if (cross(e0, e1) == 0.0 && dot(e0, e1) < 0.0)
      throw InvalidCellError(tag + "side folds back on itself");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // adjacent around the loop
      if (segments_touch(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]))
        throw InvalidCellError(tag + "self-intersecting boundary");
    }
  }
}

}  // namespace

Mesh build_mesh(std::vector<Point2> vertices,
                std::vector<std::vector<int>> cells) {
  Mesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  const int nv = mesh.n_vertices();

  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto& cell = mesh.cells[c];
    const std::string tag = "cell " + std::to_string(c) + ": ";
    if (cell.size() < 3)
      throw InvalidCellError(tag + "fewer than 3 vertices");
    std::vector<int> sorted = cell;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= nv)
      throw InvalidMeshError(tag + "vertex index out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidCellError(tag + "repeated vertex");

    std::vector<Point2> pts(cell.size());
    for (std::size_t i = 0; i < cell.size(); ++i) pts[i] = mesh.vertices[cell[i]];
    const double a2 = signed_area2(pts);
    if (a2 == 0.0) throw InvalidCellError(tag + "zero area");
    if (a2 < 0.0) {  // normalize to CCW
      std::reverse(cell.begin(), cell.end());
      std::reverse(pts.begin(), pts.end());
    }
    validate_cell(pts, c);
  }

  std::unordered_map<std::uint64_t, int> edge_of;
  mesh.cell_edges.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    mesh.cell_edges[c].resize(m);
    for (int i = 0; i < m; ++i) {
      const int va = cell[i], vb = cell[(i + 1) % m];
      const std::uint64_t key =
          (static_cast<std::uint64_t>(std::min(va, vb)) << 32) |
          static_cast<std::uint64_t>(std::max(va, vb));
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Mesh::Edge e;
        e.a = std::min(va, vb);
        e.b = std::max(va, vb);
        e.c0 = c;
        mesh.edges.push_back(e);
        it = edge_of.emplace(key, mesh.n_edges() - 1).first;
      } else {
        Mesh::Edge& e = mesh.edges[it->second];
        if (e.c1 >= 0)
          throw InvalidMeshError("edge (" + std::to_string(e.a) + "," +
                                 std::to_string(e.b) +
                                 ") shared by more than two cells");
        e.c1 = c;
      }
      mesh.cell_edges[c][i] = it->second;
    }
  }
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("mesh file " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("cells"))
    throw ParseError("mesh file " + path +
                     ": expected object with \"vertices\" and \"cells\"");
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;
  try {
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2)
        throw ParseError("mesh file " + path + ": vertex is not an [x, y] pair");
      vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    for (const auto& c : j.at("cells"))
      cells.push_back(c.get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("mesh file " + path + ": " + e.what());
  }
  return build_mesh(std::move(vertices), std::move(cells));
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  nlohmann::json j;
  auto& jv = j["vertices"] = nlohmann::json::array();
  for (const Point2& p : mesh.vertices) jv.push_back({p.x, p.y});
  j["cells"] = mesh.cells;
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file: " + path);
  out << j.dump() << '\n';
}

CellGeometry polygon_geometry(std::vector<Point2> pts) {
  CellGeometry g;
  g.pts = std::move(pts);
  const int m = static_cast<int>(g.pts.size());
  if (m < 3) throw InvalidCellError("polygon with fewer than 3 vertices");
  const double a2 = signed_area2(g.pts);
  if (a2 <= 0.0) throw InvalidCellError("polygon area is not positive");
  g.area = 0.5 * a2;
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < m; ++i) {
    const Point2& a = g.pts[i];
    const Point2& b = g.pts[(i + 1) % m];
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  g.centroid = {cx / (3.0 * a2), cy / (3.0 * a2)};
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      g.diameter = std::max(g.diameter, dist(g.pts[i], g.pts[j]));
  g.edge_len.resize(m);
  g.edge_normal.resize(m);
  for (int i = 0; i < m; ++i) {
    const Point2 t = g.pts[(i + 1) % m] - g.pts[i];
    g.edge_len[i] = norm(t);
    g.edge_normal[i] = (1.0 / g.edge_len[i]) * Point2{t.y, -t.x};
  }
  return g;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  std::vector<Point2> pts(mesh.cells[cell].size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = mesh.vertices[mesh.cells[cell][i]];
  return polygon_geometry(std::move(pts));
}

std::vector<int> boundary_vertices(const Mesh& mesh) {
  std::vector<int> out;
  for (const auto& e : mesh.edges)
    if (e.c1 < 0) {
      out.push_back(e.a);
      out.push_back(e.b);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_concave(const std::vector<Point2>& pts) {
  const int m = static_cast<int>(pts.size());
  for (int i = 0; i < m; ++i) {
    const Point2 e0 = pts[i] - pts[(i + m - 1) % m];
    const Point2 e1 = pts[(i + 1) % m] - pts[i];
    if (cross(e0, e1) < -1e-14 * norm(e0) * norm(e1)) return true;
  }
  return false;
}

}  // namespace vem
