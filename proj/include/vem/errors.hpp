#pragma once

#include <stdexcept>
#include <string>

namespace vem {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (mesh JSON, problem config).
struct ParseError : Error {
  using Error::Error;
};

// Mesh-level structural problem (bad indices, non-manifold edge).
struct InvalidMeshError : Error {
  using Error::Error;
};

// A single cell is unusable (self-intersecting, zero area, ...).
struct InvalidCellError : Error {
  using Error::Error;
};

// A local linear-algebra step lost too much precision (near-singular G,
// rank-deficient D).
struct ConditioningError : Error {
  using Error::Error;
};

// Global solve failed (singular system, iterative solver stalled).
struct SolveError : Error {
  using Error::Error;
};

// Bad run configuration (tau <= 0, unknown mesh family, ...).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace vem
