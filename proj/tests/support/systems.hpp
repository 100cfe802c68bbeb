#pragma once

// Programmatic copies of the bundled example systems, so unit tests do not
// depend on the JSON fixtures.

#include "dendrite/system.hpp"

namespace dendrite::testing {

inline PolyhedralSystem makeInterval() {
  PolyhedralSystem sys;
  sys.name = "interval";
  sys.base = Polyhedron::interval(Vec{0.0}, Vec{1.0});
  Mat id = Mat::identity(1);
  sys.maps = {Similarity(0.5, id, Vec{0.0}), Similarity(0.5, id, Vec{0.5})};
  return sys;
}

inline PolyhedralSystem makeVicsek() {
  PolyhedralSystem sys;
  sys.name = "vicsek";
  sys.base = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  Mat id = Mat::identity(2);
  const double r = 1.0 / 3.0;
  sys.maps = {Similarity(r, id, Vec{0.0, 0.0}),
              Similarity(r, id, Vec{2.0 / 3.0, 0.0}),
              Similarity(r, id, Vec{2.0 / 3.0, 2.0 / 3.0}),
              Similarity(r, id, Vec{0.0, 2.0 / 3.0}),
              Similarity(r, id, Vec{1.0 / 3.0, 1.0 / 3.0})};
  return sys;
}

inline PolyhedralSystem makeGasket() {
  PolyhedralSystem sys;
  sys.name = "gasket";
  const double h = 0.8660254037844386;  // sqrt(3)/2
  sys.base = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}});
  Mat id = Mat::identity(2);
  sys.maps = {Similarity(0.5, id, Vec{0.0, 0.0}),
              Similarity(0.5, id, Vec{0.5, 0.0}),
              Similarity(0.5, id, Vec{0.25, h / 2.0})};
  return sys;
}

// Vicsek-like square system whose enlarged center piece overlaps all four
// corner pieces: D1, D3, D3a, D4 and connectivity hold, D2 alone fails.
inline PolyhedralSystem makeOverlap() {
  PolyhedralSystem sys;
  sys.name = "overlap";
  sys.base = Polyhedron::polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  Mat id = Mat::identity(2);
  const double r = 1.0 / 3.0;
  sys.maps = {Similarity(r, id, Vec{0.0, 0.0}),
              Similarity(r, id, Vec{2.0 / 3.0, 0.0}),
              Similarity(r, id, Vec{2.0 / 3.0, 2.0 / 3.0}),
              Similarity(r, id, Vec{0.0, 2.0 / 3.0}),
              Similarity(0.4, id, Vec{0.3, 0.3})};
  return sys;
}

}  // namespace dendrite::testing
