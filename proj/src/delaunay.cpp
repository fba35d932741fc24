#include "tfz/delaunay.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <stdexcept>

namespace tfz {
namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = 0x1.0p-52;
// Shewchuk's static filter constants for the A-stage estimates.
const double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
const double kIncBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const Rational& r) { return r.sign(); }

int orient2d_exact(PlanarPoint a, PlanarPoint b, PlanarPoint c) {
  Rational ax(a.u), ay(a.v), bx(b.u), by(b.v), cx(c.u), cy(c.v);
  Rational det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sign_of(det);
}

int incircle_exact(PlanarPoint a, PlanarPoint b, PlanarPoint c, PlanarPoint p) {
  Rational ax = Rational(a.u) - Rational(p.u), ay = Rational(a.v) - Rational(p.v);
  Rational bx = Rational(b.u) - Rational(p.u), by = Rational(b.v) - Rational(p.v);
  Rational cx = Rational(c.u) - Rational(p.u), cy = Rational(c.v) - Rational(p.v);
  Rational det = (ax * ax + ay * ay) * (bx * cy - by * cx) +
                 (bx * bx + by * by) * (cx * ay - cy * ax) +
                 (cx * cx + cy * cy) * (ax * by - ay * bx);
  return sign_of(det);
}

}  // namespace

int orient2d_sign(PlanarPoint a, PlanarPoint b, PlanarPoint c) {
  double detleft = (b.u - a.u) * (c.v - a.v);
  double detright = (b.v - a.v) * (c.u - a.u);
  double det = detleft - detright;
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  }
  if (std::abs(det) >= kCcwBound * detsum) return det > 0.0 ? 1 : -1;
  return orient2d_exact(a, b, c);
}

int incircle_sign(PlanarPoint a, PlanarPoint b, PlanarPoint c, PlanarPoint p) {
  double adx = a.u - p.u, ady = a.v - p.v;
  double bdx = b.u - p.u, bdy = b.v - p.v;
  double cdx = c.u - p.u, cdy = c.v - p.v;
  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double alift = adx * adx + ady * ady;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double blift = bdx * bdx + bdy * bdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double clift = cdx * cdx + cdy * cdy;
  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                     (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) >= kIncBound * permanent) return det > 0.0 ? 1 : -1;
  return incircle_exact(a, b, c, p);
}

namespace {

struct Tri {
  int a, b, c;  // CCW
};

void finish_triangle(const std::vector<PlanarPoint>& pts, Triangle& t) {
  PlanarPoint A = pts[static_cast<size_t>(t.a)];
  PlanarPoint B = pts[static_cast<size_t>(t.b)];
  PlanarPoint C = pts[static_cast<size_t>(t.c)];
  double d = 2.0 * (A.u * (B.v - C.v) + B.u * (C.v - A.v) + C.u * (A.v - B.v));
  double a2 = A.u * A.u + A.v * A.v;
  double b2 = B.u * B.u + B.v * B.v;
  double c2 = C.u * C.u + C.v * C.v;
  t.circumcenter.u = (a2 * (B.v - C.v) + b2 * (C.v - A.v) + c2 * (A.v - B.v)) / d;
  t.circumcenter.v = (a2 * (C.u - B.u) + b2 * (A.u - C.u) + c2 * (B.u - A.u)) / d;
  double ru = A.u - t.circumcenter.u;
  double rv = A.v - t.circumcenter.v;
  t.circumradius = std::hypot(ru, rv);
  auto edge = [](PlanarPoint p, PlanarPoint q) { return std::hypot(p.u - q.u, p.v - q.v); };
  t.max_edge = std::max({edge(A, B), edge(B, C), edge(C, A)});
}

}  // namespace

Triangulation delaunay(const std::vector<PlanarPoint>& pts) {
  int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");
  const auto at = [&](int i) { return pts[static_cast<size_t>(i)]; };

  // Lexicographic insertion order makes cocircular tie resolution
  // reproducible across runs and platforms. Exact duplicates collapse.
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (at(i).u != at(j).u) return at(i).u < at(j).u;
    if (at(i).v != at(j).v) return at(i).v < at(j).v;
    return i < j;
  });
  std::vector<int> seq;
  seq.reserve(order.size());
  for (int idx : order)
    if (seq.empty() || at(idx).u != at(seq.back()).u || at(idx).v != at(seq.back()).v)
      seq.push_back(idx);
  if (seq.size() < 3) throw std::invalid_argument("delaunay: need at least 3 distinct points");

  // First point breaking collinearity with seq[0]-seq[1] seeds the initial
  // triangle; it is promoted ahead of any collinear prefix.
  int k_nc = -1;
  for (size_t i = 2; i < seq.size(); ++i)
    if (orient2d_sign(at(seq[0]), at(seq[1]), at(seq[i])) != 0) {
      k_nc = static_cast<int>(i);
      break;
    }
  if (k_nc < 0) throw std::invalid_argument("delaunay: degenerate input (collinear points)");

  // Hull edges carry ghost triangles (c == kGhost) listing the reversed
  // hull edge, so the outer halfplane sits to the left of a -> b. A ghost's
  // "circumdisk" is that open halfplane plus the open edge segment; with
  // exact predicates this stays correct for arbitrarily thin inputs, where
  // any finite bounding triangle would land inside real circumcircles.
  constexpr int kGhost = -1;
  int i0 = seq[0], i1 = seq[1], i2 = seq[static_cast<size_t>(k_nc)];
  if (orient2d_sign(at(i0), at(i1), at(i2)) < 0) std::swap(i1, i2);
  std::vector<Tri> tris = {{i0, i1, i2}, {i1, i0, kGhost}, {i2, i1, kGhost}, {i0, i2, kGhost}};

  auto on_open_segment = [](PlanarPoint x, PlanarPoint y, PlanarPoint p) {
    // Pre: p collinear with x, y. Strict betweenness on the spanning axis.
    if (x.u != y.u) return (x.u < p.u && p.u < y.u) || (y.u < p.u && p.u < x.u);
    return (x.v < p.v && p.v < y.v) || (y.v < p.v && p.v < x.v);
  };
  auto in_disk = [&](const Tri& t, PlanarPoint p) {
    if (t.c != kGhost) return incircle_sign(at(t.a), at(t.b), at(t.c), p) > 0;
    int s = orient2d_sign(at(t.a), at(t.b), p);
    if (s != 0) return s > 0;
    return on_open_segment(at(t.a), at(t.b), p);
  };

  std::vector<Tri> kept, removed;
  for (size_t si = 2; si < seq.size(); ++si) {
    if (static_cast<int>(si) == k_nc) continue;
    int pi = seq[si];
    PlanarPoint p = at(pi);

    // Cavity: strictly conflicting triangles. Its directed boundary edges
    // (reverse not removed) see p on their left, so every fan triangle
    // (x, y, p) is CCW; chords rule out p collinear with a boundary edge.
    kept.clear();
    removed.clear();
    for (const auto& t : tris) (in_disk(t, p) ? removed : kept).push_back(t);
    std::vector<std::pair<int, int>> dir_edges;
    for (const auto& t : removed) {
      dir_edges.emplace_back(t.a, t.b);
      dir_edges.emplace_back(t.b, t.c);
      dir_edges.emplace_back(t.c, t.a);
    }
    std::sort(dir_edges.begin(), dir_edges.end());
    auto removed_has = [&](int x, int y) {
      return std::binary_search(dir_edges.begin(), dir_edges.end(), std::pair<int, int>{x, y});
    };
    tris.swap(kept);
    for (auto [x, y] : dir_edges) {
      if (removed_has(y, x)) continue;  // interior to the cavity
      if (x == kGhost)
        tris.push_back({y, pi, kGhost});
      else if (y == kGhost)
        tris.push_back({pi, x, kGhost});
      else
        tris.push_back({x, y, pi});
    }
  }

  Triangulation out;
  out.points = pts;
  for (const auto& t : tris) {
    if (t.c == kGhost) continue;
    Triangle tri;
    tri.a = t.a;
    tri.b = t.b;
    tri.c = t.c;
    finish_triangle(out.points, tri);
    out.triangles.push_back(tri);
  }
  return out;
}

Triangulation delaunay(const PlanarPointSet& pts) { return delaunay(pts.points); }

}  // namespace tfz
