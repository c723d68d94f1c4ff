#pragma once

#include <string>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

// Polygonal mesh.  Cells are CCW vertex loops; hanging nodes are real
// vertices (a cell whose side passes through another cell's vertex must
// list that vertex, with an interior angle of exactly pi).
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;

  struct Edge {
    int a = -1, b = -1;    // endpoint vertex ids, a < b
    int c0 = -1, c1 = -1;  // incident cells; c1 < 0 on the boundary
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> cell_edges;  // edge id of side (v_i, v_i+1)

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  bool boundary_edge(int e) const { return edges[e].c1 < 0; }
};

// Validates (index bounds, simple cells, positive area, at most two cells
// per edge), normalizes orientation to CCW, and builds the edge table.
Mesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<int>> cells);

// JSON file format: {"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}
// with 0-based indices.  Loading normalizes orientation; saving writes
// round-trip-exact doubles.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

struct CellGeometry {
  std::vector<Point2> pts;  // vertex coordinates, CCW
  double area = 0.0;
  double diameter = 0.0;
  Point2 centroid;
  std::vector<double> edge_len;
  std::vector<Point2> edge_normal;  // outward unit normals
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);
CellGeometry polygon_geometry(std::vector<Point2> pts);  // standalone cell

// Local frame: ((x - xc)/h, (y - yc)/h).
inline Point2 scaled_coords(const CellGeometry& g, Point2 p) {
  return {(p.x - g.centroid.x) / g.diameter, (p.y - g.centroid.y) / g.diameter};
}

std::vector<int> boundary_vertices(const Mesh& mesh);  // sorted ids

// True if the CCW polygon has a reflex interior angle.
bool is_concave(const std::vector<Point2>& pts);

}  // namespace vem
