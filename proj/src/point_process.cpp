#include "tfz/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfz {

double PlanarWindow::border_distance(PlanarPoint p) const {
  return std::min(std::min(p.u - u_min, u_max - p.u),
                  std::min(p.v - v_min, v_max - p.v));
}

RadiusGrid RadiusGrid::linspace(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo) || lo < 0.0)
    throw std::invalid_argument("RadiusGrid::linspace: bad arguments");
  RadiusGrid g;
  g.radii.resize(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    g.radii[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return g;
}

RadiusGrid RadiusGrid::default_grid() { return linspace(0.0, 2.0, 100); }

PlanarPointSet scale_zeros(const GridZeroSet& zeros, int N, int K, double T) {
  if (zeros.rows != N)
    throw std::invalid_argument("scale_zeros: N does not match the searched grid");
  if (!(T > 0.0) || K < 1) throw std::invalid_argument("scale_zeros: bad K or T");
  PlanarPointSet s;
  double du = 1.0 / T;
  double dv = T / K;
  s.window.u_min = zeros.margin * du;
  s.window.u_max = (zeros.rows - 1 - zeros.margin) * du;
  s.window.v_min = zeros.margin * dv;
  s.window.v_max = (zeros.cols - 1 - zeros.margin) * dv;
  s.points.reserve(zeros.points.size());
  for (auto [n, k] : zeros.points)
    s.points.push_back({n * du, k * dv});
  return s;
}

PointIndex::PointIndex(const std::vector<PlanarPoint>& pts) : pts_(pts) {
  if (pts_.empty()) return;
  double u_min = pts_[0].u, u_max = pts_[0].u, v_min = pts_[0].v, v_max = pts_[0].v;
  for (const auto& p : pts_) {
    u_min = std::min(u_min, p.u);
    u_max = std::max(u_max, p.u);
    v_min = std::min(v_min, p.v);
    v_max = std::max(v_max, p.v);
  }
  double area = std::max((u_max - u_min) * (v_max - v_min), 1e-12);
  cell_ = std::max(std::sqrt(area / static_cast<double>(pts_.size())), 1e-6);
  u0_ = u_min;
  v0_ = v_min;
  nx_ = static_cast<int>((u_max - u_min) / cell_) + 1;
  ny_ = static_cast<int>((v_max - v_min) / cell_) + 1;
  cells_.resize(static_cast<size_t>(nx_) * ny_);
  for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
    int cx = std::min(static_cast<int>((pts_[static_cast<size_t>(i)].u - u0_) / cell_), nx_ - 1);
    int cy = std::min(static_cast<int>((pts_[static_cast<size_t>(i)].v - v0_) / cell_), ny_ - 1);
    cells_[static_cast<size_t>(cx) * ny_ + cy].push_back(i);
  }
}

double PointIndex::nearest(PlanarPoint q) const { return std::sqrt(nearest_sq(q)); }

double PointIndex::nearest_sq(PlanarPoint q) const {
  if (pts_.empty()) return std::numeric_limits<double>::infinity();
  int cx = std::clamp(static_cast<int>(std::floor((q.u - u0_) / cell_)), 0, nx_ - 1);
  int cy = std::clamp(static_cast<int>(std::floor((q.v - v0_) / cell_)), 0, ny_ - 1);
  double best_sq = std::numeric_limits<double>::infinity();
  // Expanding square rings. Any point in a cell at Chebyshev ring offset d
  // is at least (d-1)*cell_ away, so the scan stops once that lower bound
  // beats the best squared distance found so far.
  int max_d = std::max(nx_, ny_);
  for (int d = 0; d <= max_d; ++d) {
    if (d > 0) {
      double bound = (d - 1) * cell_;
      if (bound * bound > best_sq) break;
    }
    for (int x = cx - d; x <= cx + d; ++x) {
      if (x < 0 || x >= nx_) continue;
      for (int y = cy - d; y <= cy + d; ++y) {
        if (y < 0 || y >= ny_) continue;
        if (std::max(std::abs(x - cx), std::abs(y - cy)) != d) continue;
        for (int i : cells_[static_cast<size_t>(x) * ny_ + y]) {
          double du = pts_[static_cast<size_t>(i)].u - q.u;
          double dv = pts_[static_cast<size_t>(i)].v - q.v;
          best_sq = std::min(best_sq, du * du + dv * dv);
        }
      }
    }
  }
  return best_sq;
}

double nearest_distance(const PlanarPointSet& set, PlanarPoint query) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : set.points) {
    double du = p.u - query.u;
    double dv = p.v - query.v;
    best = std::min(best, du * du + dv * dv);
  }
  return std::sqrt(best);
}

SummaryCurve empty_space_estimate(const PlanarPointSet& zeros, const RadiusGrid& radii,
                                  double ref_density) {
  if (!(ref_density > 0.0))
    throw std::invalid_argument("empty_space_estimate: ref_density must be > 0");
  const auto& r = radii.radii;
  int R = static_cast<int>(r.size());
  if (R == 0) throw std::invalid_argument("empty_space_estimate: empty radius grid");
  const PlanarWindow& w = zeros.window;
  if (!(w.width() > 0.0) || !(w.height() > 0.0))
    throw std::invalid_argument("empty_space_estimate: degenerate window");

  double h = 1.0 / std::sqrt(ref_density);
  int nu = static_cast<int>(std::floor(w.width() / h));
  int nv = static_cast<int>(std::floor(w.height() / h));

  PointIndex index(zeros.points);

  // Per-radius tallies via difference arrays: each reference point is
  // eligible for radius indices [0, ib) and covered-and-eligible on
  // [ia, ib), where ib = first radius beyond its border distance and
  // ia = first radius at or beyond its nearest-zero distance.
  std::vector<int> den_diff(static_cast<size_t>(R) + 1, 0);
  std::vector<int> num_diff(static_cast<size_t>(R) + 1, 0);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      PlanarPoint q{w.u_min + (i + 0.5) * h, w.v_min + (j + 0.5) * h};
      double d_border = w.border_distance(q);
      double d_nn = index.nearest(q);
      int ib = static_cast<int>(std::upper_bound(r.begin(), r.end(), d_border) - r.begin());
      if (ib == 0) continue;
      den_diff[0] += 1;
      den_diff[static_cast<size_t>(ib)] -= 1;
      int ia = static_cast<int>(std::lower_bound(r.begin(), r.end(), d_nn) - r.begin());
      if (ia < ib) {
        num_diff[static_cast<size_t>(ia)] += 1;
        num_diff[static_cast<size_t>(ib)] -= 1;
      }
    }
  }

  SummaryCurve curve;
  curve.radii = radii;
  curve.kind = CurveKind::F;
  curve.values.resize(static_cast<size_t>(R));
  int den = 0, num = 0;
  for (int idx = 0; idx < R; ++idx) {
    den += den_diff[static_cast<size_t>(idx)];
    num += num_diff[static_cast<size_t>(idx)];
    curve.values[static_cast<size_t>(idx)] =
        den > 0 ? static_cast<double>(num) / den : std::numeric_limits<double>::quiet_NaN();
  }
  return curve;
}

SummaryCurve variance_stabilize(const SummaryCurve& curve) {
  if (curve.kind != CurveKind::F)
    throw std::invalid_argument("variance_stabilize: expected an F curve");
  SummaryCurve out = curve;
  out.kind = CurveKind::FTilde;
  for (double& v : out.values)
    if (!std::isnan(v)) v = std::asin(std::sqrt(std::clamp(v, 0.0, 1.0)));
  return out;
}

}  // namespace tfz
