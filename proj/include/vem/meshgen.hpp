#pragma once

#include <cstdint>
#include <vector>

#include "vem/mesh.hpp"

namespace vem {

// All generators are deterministic; the seeded ones use an explicit
// 64-bit generator so the same seed reproduces the mesh bit-exactly.

Mesh unit_square_quads(int n);

// n x n grid with a checkerboard-signed displacement of amplitude 0.3/n
// along (1,1); interior cells become concave darts (guaranteed for n >= 3).
Mesh distorted_concave_quads(int n);

// Alternate interior grid lines collapse into sawtooth form so every cell
// in the affected rows is a right trapezoid with one vertical side of
// length exactly 0.05/n.
Mesh trapezoid_quads(int n);

// Delaunay triangulation of a jittered (n+1)x(n+1) grid.
Mesh jittered_triangles(int n, std::uint64_t seed);

// Honeycomb of ~n^2 regular hexagons clipped to the unit square.
Mesh hexagon_mesh(int n);

// Smoothly graded tensor grid: both coordinates displaced by
// 0.1 sin(2 pi x) sin(2 pi y).
Mesh graded_quads(int n);

struct VoronoiDiagram {
  std::vector<Point2> seeds;
  std::vector<std::vector<Point2>> cells;  // CCW, clipped to the domain
};

// Voronoi diagram of n_seeds random points in a convex CCW domain,
// optionally relaxed by Lloyd iterations (seed -> cell centroid).
VoronoiDiagram voronoi_cells(const std::vector<Point2>& domain, int n_seeds,
                             int lloyd_iters, std::uint64_t seed);

Mesh voronoi_mesh_in(const std::vector<Point2>& domain, int n_seeds,
                     int lloyd_iters, std::uint64_t seed);
Mesh voronoi_mesh(int n_seeds, int lloyd_iters, std::uint64_t seed);  // unit square

// Five-cell patch meshes on the unit square: a rotated interior square
// (side 1/3, rotated pi/3) surrounded by four concave quads; the second
// variant dents each interior-square side midpoint towards the center by a
// quarter side length, giving a star octagon and four concave pentagons.
Mesh patch_mesh_tension();
Mesh patch_mesh_shear();

// Tapered panel: corners (0,0), (48,44), (48,60), (0,44).
std::vector<Point2> cook_domain();
Mesh cook_quads(int n);  // bilinear n x n grid, n even
Mesh cook_voronoi(int n_seeds, std::uint64_t seed);

}  // namespace vem
