#pragma once

#include <vector>

#include "tfz/point_process.hpp"

namespace tfz {

struct Triangle {
  int a = 0, b = 0, c = 0;  // vertex indices, CCW order
  PlanarPoint circumcenter;
  double circumradius = 0.0;
  double max_edge = 0.0;
};

// Empty-circumcircle property holds with exact-predicate semantics: no
// input point lies strictly inside any triangle's circumcircle.
struct Triangulation {
  std::vector<PlanarPoint> points;
  std::vector<Triangle> triangles;
};

// Sign of the orientation determinant (b-a) x (c-a): +1 CCW, -1 CW,
// 0 collinear. Adaptive: double filter, exact rational fallback.
int orient2d_sign(PlanarPoint a, PlanarPoint b, PlanarPoint c);

// For CCW (a,b,c): +1 iff p strictly inside the circumcircle, 0 on it,
// -1 outside. Exact in the same sense as orient2d_sign.
int incircle_sign(PlanarPoint a, PlanarPoint b, PlanarPoint c, PlanarPoint p);

// Bowyer-Watson with lexicographic insertion order; cocircular degeneracies
// resolved by that order (strict in-circle cavities). Throws on fewer than
// 3 distinct points or an all-collinear input.
Triangulation delaunay(const std::vector<PlanarPoint>& pts);
Triangulation delaunay(const PlanarPointSet& pts);

}  // namespace tfz
