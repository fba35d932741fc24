#pragma once

#include <vector>

#include "tfz/tf_core.hpp"

namespace tfz {

struct PlanarPoint {
  double u = 0.0;
  double v = 0.0;
};

// Closed axis-aligned observation window.
struct PlanarWindow {
  double u_min = 0.0, u_max = 0.0;
  double v_min = 0.0, v_max = 0.0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  double area() const { return width() * height(); }
  bool contains(PlanarPoint p) const {
    return p.u >= u_min && p.u <= u_max && p.v >= v_min && p.v <= v_max;
  }
  // Distance from an interior point to the window boundary.
  double border_distance(PlanarPoint p) const;
};

struct PlanarPointSet {
  std::vector<PlanarPoint> points;
  PlanarWindow window;
};

struct RadiusGrid {
  std::vector<double> radii;  // strictly increasing, radii[0] >= 0

  static RadiusGrid linspace(double lo, double hi, int count);
  // 100 equispaced radii on [0, 2].
  static RadiusGrid default_grid();
};

enum class CurveKind { F, FTilde };

// Values aligned with a RadiusGrid; NaN marks radii where the estimator is
// undefined (no eligible reference points).
struct SummaryCurve {
  RadiusGrid radii;
  std::vector<double> values;
  CurveKind kind = CurveKind::F;
};

// Maps grid zeros into the unit-density plane: (n, k) -> (n/T, k T/K).
// The window is the margin-trimmed grid rectangle under the same map.
PlanarPointSet scale_zeros(const GridZeroSet& zeros, int N, int K, double T);

// Border-corrected (reduced-sample) empty space function estimate over a
// centered reference lattice with `ref_density` points per unit area:
//   F(r) = #{refs: d_border >= r and d_nn <= r} / #{refs: d_border >= r}.
SummaryCurve empty_space_estimate(const PlanarPointSet& zeros, const RadiusGrid& radii,
                                  double ref_density = 4.0);

// F~ = arcsin(sqrt(F)), approximately variance-stabilizing for binomial
// proportions. NaN propagates.
SummaryCurve variance_stabilize(const SummaryCurve& curve);

// Distance from query to the nearest point of the set; +inf if empty.
double nearest_distance(const PlanarPointSet& set, PlanarPoint query);

// Bucket-grid nearest neighbor index used by the estimators.
class PointIndex {
 public:
  explicit PointIndex(const std::vector<PlanarPoint>& pts);
  double nearest(PlanarPoint q) const;
  // Squared distance, computed as (p.u-q.u)^2 + (p.v-q.v)^2 with no
  // intermediate rounding differences vs. a brute-force double loop.
  double nearest_sq(PlanarPoint q) const;

 private:
  std::vector<PlanarPoint> pts_;
  std::vector<std::vector<int>> cells_;
  int nx_ = 0, ny_ = 0;
  double u0_ = 0.0, v0_ = 0.0, cell_ = 1.0;
};

}  // namespace tfz
