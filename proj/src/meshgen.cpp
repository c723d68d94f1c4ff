#include "vem/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "vem/errors.hpp"

namespace vem {
namespace {

// Portable uniform double in [0, 1) from the raw generator bits.
double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

struct GridMesh {
  int n;
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;
  GridMesh(int n_, const std::vector<Point2>& verts) : n(n_), vertices(verts) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }
  int id(int i, int j) const { return j * (n + 1) + i; }
};

std::vector<Point2> grid_vertices(int n) {
  std::vector<Point2> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      v.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  return v;
}

void check_n(int n, int min_n = 1) {
  if (n < min_n)
    throw ConfigError("mesh resolution must be >= " + std::to_string(min_n));
}

// Keep the f(p) = dot(nrm, p) - c <= 0 side.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 nrm,
                                   double c) {
  std::vector<Point2> out;
  const int m = static_cast<int>(poly.size());
  out.reserve(m + 1);
  for (int i = 0; i < m; ++i) {
    const Point2 cur = poly[i];
    const Point2 nxt = poly[(i + 1) % m];
    const double fc = dot(nrm, cur) - c;
    const double fn = dot(nrm, nxt) - c;
    if (fc <= 0.0) out.push_back(cur);
    if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
      const double t = fc / (fc - fn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

void drop_short_sides(std::vector<Point2>& poly, double tol) {
  std::vector<Point2> out;
  for (const Point2& p : poly)
    if (out.empty() || dist(out.back(), p) > tol) out.push_back(p);
  while (out.size() > 1 && dist(out.front(), out.back()) <= tol) out.pop_back();
  poly = std::move(out);
}

double poly_area(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

Point2 poly_centroid(const std::vector<Point2>& p) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point2& u = p[i];
    const Point2& v = p[(i + 1) % p.size()];
    const double w = cross(u, v);
    a2 += w;
    cx += (u.x + v.x) * w;
    cy += (u.y + v.y) * w;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

// Merges coordinates that agree within tol into shared vertex ids.
class VertexMerger {
 public:
  explicit VertexMerger(double tol) : tol_(tol), bin_(4.0 * tol) {}

  int add(Point2 p) {
    const long long bx = static_cast<long long>(std::floor(p.x / bin_));
    const long long by = static_cast<long long>(std::floor(p.y / bin_));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = bins_.find(key(bx + dx, by + dy));
        if (it == bins_.end()) continue;
        for (int id : it->second)
          if (dist(pts_[id], p) <= tol_) return id;
      }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    bins_[key(bx, by)].push_back(id);
    return id;
  }

  const std::vector<Point2>& points() const { return pts_; }

 private:
  static std::uint64_t key(long long x, long long y) {
    return (static_cast<std::uint64_t>(x + (1LL << 31)) << 32) ^
           static_cast<std::uint64_t>(y + (1LL << 31));
  }
  double tol_, bin_;
  std::vector<Point2> pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> bins_;
};

Mesh mesh_from_polygons(const std::vector<std::vector<Point2>>& polys,
                        double merge_tol) {
  VertexMerger merger(merge_tol);
  std::vector<std::vector<int>> cells;
  cells.reserve(polys.size());
  for (const auto& poly : polys) {
    std::vector<int> cell;
    cell.reserve(poly.size());
    for (const Point2& p : poly) {
      const int id = merger.add(p);
      if (cell.empty() || cell.back() != id) cell.push_back(id);
    }
    while (cell.size() > 1 && cell.front() == cell.back()) cell.pop_back();
    if (cell.size() < 3) throw InvalidCellError("generated cell collapsed");
    cells.push_back(std::move(cell));
  }
  return build_mesh(merger.points(), std::move(cells));
}

bool point_in_convex(const std::vector<Point2>& poly, Point2 p) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

}  // namespace

Mesh unit_square_quads(int n) {
  check_n(n);
  GridMesh g(n, grid_vertices(n));
  return build_mesh(std::move(g.vertices), std::move(g.cells));
}

Mesh distorted_concave_quads(int n) {
  check_n(n);
  auto v = grid_vertices(n);
  const double amp = 0.3 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double s = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      Point2& p = v[j * (n + 1) + i];
      const bool xin = i > 0 && i < n;
      const bool yin = j > 0 && j < n;
      if (xin && yin) {
        p.x += s * amp;
        p.y += s * amp;
      } else if (xin) {
        p.x += s * amp;  // slide along the top/bottom boundary
      } else if (yin) {
        p.y += s * amp;  // slide along the left/right boundary
      }
    }
  GridMesh g(n, v);
  return build_mesh(std::move(g.vertices), std::move(g.cells));
}

Mesh trapezoid_quads(int n) {
  check_n(n);
  auto v = grid_vertices(n);
  const double eps = 0.05 / n;
  for (int j = 1; j < n; j += 2)
    for (int i = 0; i <= n; ++i)
      v[j * (n + 1) + i].y =
          (i % 2 == 0) ? (static_cast<double>(j - 1) / n + eps)
                       : (static_cast<double>(j + 1) / n - eps);
  GridMesh g(n, v);
  return build_mesh(std::move(g.vertices), std::move(g.cells));
}

Mesh jittered_triangles(int n, std::uint64_t seed) {
  check_n(n);
  std::mt19937_64 rng(seed);
  auto pts = grid_vertices(n);
  const double amp = 0.2 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double dx = amp * (2.0 * uniform01(rng) - 1.0);
      const double dy = amp * (2.0 * uniform01(rng) - 1.0);
      Point2& p = pts[j * (n + 1) + i];
      if (i > 0 && i < n) p.x += dx;
      if (j > 0 && j < n) p.y += dy;
    }

  // Bowyer-Watson with a large enclosing triangle.
  struct Tri {
    int a, b, c;
    Point2 cc;     // circumcenter
    double rr;     // squared circumradius
    bool alive = true;
  };
  std::vector<Point2> all = pts;
  const int s0 = static_cast<int>(all.size());
  all.push_back({-3.0, -3.0});
  all.push_back({7.0, -3.0});
  all.push_back({-3.0, 7.0});
  std::vector<Tri> tris;
  auto make_tri = [&](int a, int b, int c) {
    if (cross(all[b] - all[a], all[c] - all[a]) < 0.0) std::swap(b, c);
    Tri t{a, b, c, {}, 0.0, true};
    const Point2 A = all[a], B = all[b], C = all[c];
    const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
    const double a2 = dot(A, A), b2 = dot(B, B), c2 = dot(C, C);
    t.cc = {(a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d,
            (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d};
    t.rr = dot(A - t.cc, A - t.cc);
    tris.push_back(t);
  };
  make_tri(s0, s0 + 1, s0 + 2);
  for (int p = 0; p < s0; ++p) {
    const Point2 q = all[p];
    std::vector<std::pair<int, int>> boundary;  // directed cavity edges
    auto toggle = [&boundary](int a, int b) {
      for (auto it = boundary.begin(); it != boundary.end(); ++it)
        if (it->first == b && it->second == a) {
          boundary.erase(it);
          return;
        }
      boundary.emplace_back(a, b);
    };
    for (auto& t : tris) {
      if (!t.alive) continue;
      if (dot(q - t.cc, q - t.cc) <= t.rr * (1.0 + 1e-12)) {
        t.alive = false;
        toggle(t.a, t.b);
        toggle(t.b, t.c);
        toggle(t.c, t.a);
      }
    }
    std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    for (auto [a, b] : boundary) make_tri(a, b, p);
  }

  std::vector<std::vector<int>> cells;
  for (const auto& t : tris)
    if (t.a < s0 && t.b < s0 && t.c < s0) cells.push_back({t.a, t.b, t.c});
  return build_mesh(std::move(pts), std::move(cells));
}

Mesh hexagon_mesh(int n) {
  check_n(n);
  const double R = std::sqrt(2.0 / (3.0 * std::sqrt(3.0))) / n;  // unit mean area / n^2
  const double w = std::sqrt(3.0) * R;
  const double x0 = 0.1371 * R;
  const double y0 = 0.2133 * R;
  std::vector<std::vector<Point2>> cells;
  const int jmax = static_cast<int>(std::ceil(1.0 / (1.5 * R))) + 2;
  const int imax = static_cast<int>(std::ceil(1.0 / w)) + 2;
  for (int j = -2; j <= jmax; ++j) {
    for (int i = -2; i <= imax; ++i) {
      const Point2 c{x0 + i * w + (j & 1 ? 0.5 * w : 0.0), y0 + j * 1.5 * R};
      std::vector<Point2> hex;
      for (int l = 0; l < 6; ++l) {
        const double ang = M_PI / 6.0 + l * M_PI / 3.0;
        hex.push_back({c.x + R * std::cos(ang), c.y + R * std::sin(ang)});
      }
      hex = clip_halfplane(hex, {-1.0, 0.0}, 0.0);
      if (!hex.empty()) hex = clip_halfplane(hex, {1.0, 0.0}, 1.0);
      if (!hex.empty()) hex = clip_halfplane(hex, {0.0, -1.0}, 0.0);
      if (!hex.empty()) hex = clip_halfplane(hex, {0.0, 1.0}, 1.0);
      drop_short_sides(hex, 1e-12);
      if (hex.size() >= 3 && poly_area(hex) > 1e-12) cells.push_back(hex);
    }
  }
  return mesh_from_polygons(cells, 1e-9);
}

Mesh graded_quads(int n) {
  check_n(n);
  auto v = grid_vertices(n);
  for (Point2& p : v) {
    const double d =
        0.1 * std::sin(2.0 * M_PI * p.x) * std::sin(2.0 * M_PI * p.y);
    p.x += d;
    p.y += d;
  }
  GridMesh g(n, v);
  return build_mesh(std::move(g.vertices), std::move(g.cells));
}

VoronoiDiagram voronoi_cells(const std::vector<Point2>& domain, int n_seeds,
                             int lloyd_iters, std::uint64_t seed) {
  if (n_seeds < 1) throw ConfigError("voronoi: need at least one seed");
  if (lloyd_iters < 0) throw ConfigError("voronoi: negative iteration count");
  double xmin = domain[0].x, xmax = xmin, ymin = domain[0].y, ymax = ymin;
  for (const Point2& p : domain) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double diam = std::hypot(xmax - xmin, ymax - ymin);

  std::mt19937_64 rng(seed);
  std::vector<Point2> seeds;
  seeds.reserve(n_seeds);
  while (static_cast<int>(seeds.size()) < n_seeds) {
    Point2 p{xmin + (xmax - xmin) * uniform01(rng),
             ymin + (ymax - ymin) * uniform01(rng)};
    if (!point_in_convex(domain, p)) continue;
    bool dup = false;
    for (const Point2& s : seeds)
      if (dist(s, p) < 1e-9 * diam) dup = true;  // re-drawn deterministically
    if (!dup) seeds.push_back(p);
  }

  VoronoiDiagram out;
  const int nb = std::max(1, static_cast<int>(std::sqrt(double(n_seeds))));
  const double bx = (xmax - xmin) / nb, by = (ymax - ymin) / nb;
  for (int iter = 0; iter <= lloyd_iters; ++iter) {
    // bin the seeds for distance-ordered candidate scans
    std::vector<std::vector<int>> bins(nb * nb);
    auto bin_of = [&](Point2 p) {
      const int i = std::min(nb - 1, std::max(0, int((p.x - xmin) / bx)));
      const int j = std::min(nb - 1, std::max(0, int((p.y - ymin) / by)));
      return j * nb + i;
    };
    for (int s = 0; s < n_seeds; ++s) bins[bin_of(seeds[s])].push_back(s);

    std::vector<std::vector<Point2>> cells(n_seeds);
    std::vector<std::pair<double, int>> cand;
    for (int s = 0; s < n_seeds; ++s) {
      const Point2 si = seeds[s];
      std::vector<Point2> cell = domain;
      // gather candidates ring by ring; a neighbor at distance d can only
      // cut the cell while d <= 2 * max vertex distance
      const int ci = std::min(nb - 1, std::max(0, int((si.x - xmin) / bx)));
      const int cj = std::min(nb - 1, std::max(0, int((si.y - ymin) / by)));
      cand.clear();
      int ring = 0;
      double covered = 0.0;  // candidate search is complete within this radius
      std::size_t processed = 0;
      while (true) {
        if (ring <= std::max(std::max(ci, nb - 1 - ci),
                             std::max(cj, nb - 1 - cj))) {
          for (int j = cj - ring; j <= cj + ring; ++j) {
            for (int i = ci - ring; i <= ci + ring; ++i) {
              if (i < 0 || j < 0 || i >= nb || j >= nb) continue;
              if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
              for (int t : bins[j * nb + i])
                if (t != s) cand.emplace_back(dist(seeds[t], si), t);
            }
          }
          // everything within (ring-1) bin widths is now guaranteed gathered
          covered = std::max(0, ring - 1) * std::min(bx, by);
          std::sort(cand.begin() + processed, cand.end());
          std::inplace_merge(cand.begin(), cand.begin() + processed, cand.end());
        } else {
          covered = 2.0 * diam + 1.0;
        }
        double rmax = 0.0;
        for (const Point2& p : cell) rmax = std::max(rmax, dist(p, si));
        while (processed < cand.size()) {
          const auto [d, t] = cand[processed];
          if (d > 2.0 * rmax) break;
          if (d > covered) break;
          const Point2 dir = seeds[t] - si;
          const Point2 mid = 0.5 * (si + seeds[t]);
          cell = clip_halfplane(cell, dir, dot(dir, mid));
          ++processed;
          rmax = 0.0;
          for (const Point2& p : cell) rmax = std::max(rmax, dist(p, si));
        }
        const bool done =
            (processed == cand.size() ||
             cand[processed].first > 2.0 * rmax) &&
            (covered >= 2.0 * rmax || covered > 2.0 * diam);
        if (done) break;
        ++ring;
      }
      drop_short_sides(cell, 1e-12 * diam);
      if (cell.size() < 3)
        throw InvalidCellError("voronoi: cell collapsed during clipping");
      cells[s] = std::move(cell);
    }
    if (iter == lloyd_iters) {
      out.seeds = seeds;
      out.cells = std::move(cells);
      break;
    }
    for (int s = 0; s < n_seeds; ++s) seeds[s] = poly_centroid(cells[s]);
  }
  return out;
}

Mesh voronoi_mesh_in(const std::vector<Point2>& domain, int n_seeds,
                     int lloyd_iters, std::uint64_t seed) {
  const VoronoiDiagram vd = voronoi_cells(domain, n_seeds, lloyd_iters, seed);
  double diam = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i)
    for (std::size_t j = i + 1; j < domain.size(); ++j)
      diam = std::max(diam, dist(domain[i], domain[j]));
  return mesh_from_polygons(vd.cells, 1e-9 * diam);
}

Mesh voronoi_mesh(int n_seeds, int lloyd_iters, std::uint64_t seed) {
  return voronoi_mesh_in({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}},
                         n_seeds, lloyd_iters, seed);
}

namespace {

// Interior square of side 1/3, rotated by pi/3, centered in the unit square.
std::vector<Point2> rotated_inner_square() {
  const Point2 c{0.5, 0.5};
  const double rho = std::sqrt(2.0) / 6.0;
  std::vector<Point2> v;
  for (int l = 0; l < 4; ++l) {
    const double ang = M_PI / 4.0 + M_PI / 3.0 + l * M_PI / 2.0;
    v.push_back({c.x + rho * std::cos(ang), c.y + rho * std::sin(ang)});
  }
  return v;  // at polar angles 105, 195, 285, 15 degrees
}

}  // namespace

Mesh patch_mesh_tension() {
  std::vector<Point2> v = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  const auto inner = rotated_inner_square();
  v.insert(v.end(), inner.begin(), inner.end());  // ids 4..7
  std::vector<std::vector<int>> cells = {
      {4, 5, 6, 7},     // interior square
      {0, 1, 7, 6},     // bottom
      {1, 2, 4, 7},     // right
      {2, 3, 5, 4},     // top
      {3, 0, 6, 5},     // left
  };
  return build_mesh(std::move(v), std::move(cells));
}

Mesh patch_mesh_shear() {
  std::vector<Point2> v = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  const auto inner = rotated_inner_square();
  v.insert(v.end(), inner.begin(), inner.end());  // ids 4..7
  const Point2 c{0.5, 0.5};
  // side midpoints dented towards the center by a quarter of the side
  // length, which is half-way to the center of the 1/3-side square
  for (int l = 0; l < 4; ++l) {
    const Point2 m = 0.5 * (inner[l] + inner[(l + 1) % 4]);
    v.push_back(0.5 * (m + c));  // ids 8..11
  }
  std::vector<std::vector<int>> cells = {
      {4, 8, 5, 9, 6, 10, 7, 11},  // star octagon
      {0, 1, 7, 10, 6},            // bottom
      {1, 2, 4, 11, 7},            // right
      {2, 3, 5, 8, 4},             // top
      {3, 0, 6, 9, 5},             // left
  };
  return build_mesh(std::move(v), std::move(cells));
}

std::vector<Point2> cook_domain() {
  return {{0.0, 0.0}, {48.0, 44.0}, {48.0, 60.0}, {0.0, 44.0}};
}

Mesh cook_quads(int n) {
  check_n(n, 2);
  if (n % 2)
    throw ConfigError("cook_quads: n must be even so a vertex lands on the "
                      "monitored point");
  const auto dom = cook_domain();
  std::vector<Point2> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      const double t = static_cast<double>(j) / n;
      v.push_back((1.0 - s) * (1.0 - t) * dom[0] + s * (1.0 - t) * dom[1] +
                  s * t * dom[2] + (1.0 - s) * t * dom[3]);
    }
  GridMesh g(n, v);
  return build_mesh(std::move(g.vertices), std::move(g.cells));
}

Mesh cook_voronoi(int n_seeds, std::uint64_t seed) {
  return voronoi_mesh_in(cook_domain(), n_seeds, 20, seed);
}

}  // namespace vem
