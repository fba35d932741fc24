#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tfz/delaunay.hpp"
#include "tfz/rng.hpp"

namespace {

using tfz::PlanarPoint;

std::vector<PlanarPoint> random_points(int n, uint64_t seed, double y_scale = 1.0) {
  tfz::CounterRng rng(seed);
  std::vector<PlanarPoint> pts(n);
  for (auto& p : pts) {
    p.u = 10.0 * rng.next_unit();
    p.v = 10.0 * y_scale * rng.next_unit();
  }
  return pts;
}

// Every triangle's open circumdisk is empty of input points; checked with
// the same exact predicate the builder uses, so equality is not approximate.
void check_empty_circumcircles(const tfz::Triangulation& tri) {
  for (const auto& t : tri.triangles) {
    REQUIRE(tfz::orient2d_sign(tri.points[t.a], tri.points[t.b], tri.points[t.c]) == 1);
    for (int p = 0; p < static_cast<int>(tri.points.size()); ++p) {
      if (p == t.a || p == t.b || p == t.c) continue;
      CHECK(tfz::incircle_sign(tri.points[t.a], tri.points[t.b], tri.points[t.c],
                               tri.points[p]) <= 0);
    }
  }
}

double dist(PlanarPoint a, PlanarPoint b) { return std::hypot(a.u - b.u, a.v - b.v); }

double tri_area(PlanarPoint a, PlanarPoint b, PlanarPoint c) {
  return 0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u));
}

// Hull boundary point count and area via a monotone chain on exact
// orientations; collinear boundary points are counted.
struct HullInfo {
  int boundary_points = 0;
  double area = 0.0;
};

HullInfo hull_info(std::vector<PlanarPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](PlanarPoint a, PlanarPoint b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  int n = static_cast<int>(pts.size());
  std::vector<PlanarPoint> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain, keeps collinear points
    while (k >= 2 && tfz::orient2d_sign(hull[k - 2], hull[k - 1], pts[i]) < 0) --k;
    hull[k++] = pts[i];
  }
  int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && tfz::orient2d_sign(hull[k - 2], hull[k - 1], pts[i]) < 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  HullInfo info;
  info.boundary_points = static_cast<int>(hull.size());
  for (size_t i = 0; i < hull.size(); ++i) {
    auto a = hull[i], b = hull[(i + 1) % hull.size()];
    info.area += 0.5 * (a.u * b.v - b.u * a.v);
  }
  info.area = std::abs(info.area);
  return info;
}

void check_structure(const tfz::Triangulation& tri) {
  HullInfo h = hull_info(tri.points);
  int n = static_cast<int>(tri.points.size());
  // Euler count for a full triangulation of the hull using all n points.
  CHECK(static_cast<int>(tri.triangles.size()) == 2 * n - 2 - h.boundary_points);
  double area = 0.0;
  for (const auto& t : tri.triangles)
    area += tri_area(tri.points[t.a], tri.points[t.b], tri.points[t.c]);
  CHECK(area == doctest::Approx(h.area).epsilon(1e-9));
}

void check_metadata(const tfz::Triangulation& tri) {
  for (const auto& t : tri.triangles) {
    PlanarPoint a = tri.points[t.a], b = tri.points[t.b], c = tri.points[t.c];
    CHECK(dist(t.circumcenter, a) == doctest::Approx(t.circumradius).epsilon(1e-9));
    CHECK(dist(t.circumcenter, b) == doctest::Approx(t.circumradius).epsilon(1e-9));
    CHECK(dist(t.circumcenter, c) == doctest::Approx(t.circumradius).epsilon(1e-9));
    double want = std::max({dist(a, b), dist(b, c), dist(c, a)});
    CHECK(t.max_edge == doctest::Approx(want).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("delaunay of three points is that triangle") {
  std::vector<PlanarPoint> pts = {{0.0, 0.0}, {4.0, 0.0}, {1.0, 3.0}};
  tfz::Triangulation tri = tfz::delaunay(pts);
  REQUIRE(tri.triangles.size() == 1);
  const auto& t = tri.triangles[0];
  std::vector<int> ids = {t.a, t.b, t.c};
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<int>{0, 1, 2});
  CHECK(t.max_edge == doctest::Approx(std::sqrt(18.0)));
  check_metadata(tri);
}

TEST_CASE("delaunay of cocircular unit square splits along one diagonal") {
  std::vector<PlanarPoint> pts = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
  tfz::Triangulation tri = tfz::delaunay(pts);
  REQUIRE(tri.triangles.size() == 2);
  check_empty_circumcircles(tri);
  check_structure(tri);
  check_metadata(tri);
  // The shared edge is a diagonal: its endpoints differ in both coordinates.
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : tri.triangles) {
    edges.emplace_back(std::min(t.a, t.b), std::max(t.a, t.b));
    edges.emplace_back(std::min(t.b, t.c), std::max(t.b, t.c));
    edges.emplace_back(std::min(t.c, t.a), std::max(t.c, t.a));
  }
  std::sort(edges.begin(), edges.end());
  int shared = -1;
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i] == edges[i + 1]) shared = static_cast<int>(i);
  REQUIRE(shared >= 0);
  auto [i, j] = edges[shared];
  CHECK(pts[i].u != pts[j].u);
  CHECK(pts[i].v != pts[j].v);
}

TEST_CASE("delaunay random sets satisfy the empty-circumcircle property") {
  for (uint64_t seed : {101u, 102u, 103u, 104u, 105u}) {
    for (int n : {8, 25, 50}) {
      auto pts = random_points(n, seed * 7 + n);
      tfz::Triangulation tri = tfz::delaunay(pts);
      check_empty_circumcircles(tri);
      check_structure(tri);
      check_metadata(tri);
    }
  }
}

TEST_CASE("delaunay handles nearly collinear input exactly") {
  // All y-coordinates within 1e-12 of zero: the double filter is useless
  // here, so this exercises the exact fallback path.
  auto pts = random_points(14, 303, 1e-13);
  tfz::Triangulation tri = tfz::delaunay(pts);
  check_empty_circumcircles(tri);
  check_structure(tri);
}

TEST_CASE("delaunay of an integer lattice resolves cocircular ties") {
  std::vector<PlanarPoint> pts;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) pts.push_back({double(r), double(c)});
  tfz::Triangulation tri = tfz::delaunay(pts);
  CHECK(tri.triangles.size() == 18);  // 2n - 2 - b with n = 16, b = 12
  check_empty_circumcircles(tri);
  double area = 0.0;
  for (const auto& t : tri.triangles)
    area += tri_area(tri.points[t.a], tri.points[t.b], tri.points[t.c]);
  CHECK(area == 9.0);  // halves of small integers: exact
}

TEST_CASE("delaunay is deterministic") {
  auto pts = random_points(30, 404);
  tfz::Triangulation t1 = tfz::delaunay(pts);
  tfz::Triangulation t2 = tfz::delaunay(pts);
  REQUIRE(t1.triangles.size() == t2.triangles.size());
  for (size_t i = 0; i < t1.triangles.size(); ++i) {
    CHECK(t1.triangles[i].a == t2.triangles[i].a);
    CHECK(t1.triangles[i].b == t2.triangles[i].b);
    CHECK(t1.triangles[i].c == t2.triangles[i].c);
  }
}

TEST_CASE("delaunay rejects degenerate input") {
  CHECK_THROWS_AS(tfz::delaunay(std::vector<PlanarPoint>{{0, 0}, {1, 1}}),
                  std::invalid_argument);
  std::vector<PlanarPoint> line;
  for (int i = 0; i < 6; ++i) line.push_back({double(i), 2.0 * i});
  CHECK_THROWS_AS(tfz::delaunay(line), std::invalid_argument);
  std::vector<PlanarPoint> dup = {{0, 0}, {0, 0}, {1, 1}};
  CHECK_THROWS_AS(tfz::delaunay(dup), std::invalid_argument);
}

TEST_CASE("orient2d and incircle signs on hand values") {
  CHECK(tfz::orient2d_sign({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(tfz::orient2d_sign({0, 0}, {0, 1}, {1, 0}) == -1);
  CHECK(tfz::orient2d_sign({0, 0}, {1, 1}, {2, 2}) == 0);
  // Unit circle through (1,0), (0,1), (-1,0).
  PlanarPoint a{1, 0}, b{0, 1}, c{-1, 0};
  CHECK(tfz::incircle_sign(a, b, c, {0.0, 0.0}) == 1);
  CHECK(tfz::incircle_sign(a, b, c, {0.0, -1.0}) == 0);
  CHECK(tfz::incircle_sign(a, b, c, {2.0, 0.0}) == -1);
  // Perturbations far below double noise still classify exactly when the
  // inputs are representable.
  CHECK(tfz::incircle_sign(a, b, c, {0.0, -0.9999999999999999}) == 1);
}

TEST_CASE("delaunay accepts a PlanarPointSet") {
  tfz::PlanarPointSet set;
  set.points = {{0.0, 0.0}, {2.0, 0.5}, {1.0, 2.0}, {3.0, 2.5}};
  tfz::Triangulation tri = tfz::delaunay(set);
  CHECK(tri.points.size() == 4);
  check_empty_circumcircles(tri);
}
