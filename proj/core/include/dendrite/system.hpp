#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dendrite/geometry.hpp"

namespace dendrite {

struct DepthTooLarge : Error {
  using Error::Error;
};

/// A polyhedron P together with a finite system of contraction similarities
/// sending P into itself. Map letters are 1-based (I = {1..m}) to match the
/// index convention used in every report and file format.
struct PolyhedralSystem {
  std::string name;
  Polyhedron base;
  std::vector<Similarity> maps;
  double tolerance = kDefaultTolerance;
  std::size_t pieceBudget = 1000000;

  int dim() const { return base.dim(); }
  int mapCount() const { return static_cast<int>(maps.size()); }
  const Similarity& map(int letter) const { return maps[static_cast<std::size_t>(letter - 1)]; }

  /// Absolute tolerance: relative tolerance scaled by diam(P).
  double absTol() const { return tolerance * base.diameter(); }

  /// Level-1 piece P_i = S_i(P).
  Polyhedron piece(int letter) const { return base.image(map(letter)); }

  double maxRatio() const {
    double r = 0.0;
    for (const Similarity& s : maps) r = std::max(r, s.ratio());
    return r;
  }
};

}  // namespace dendrite
