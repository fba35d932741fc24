#include "tfz/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tfz/edt.hpp"

namespace tfz {

double estimate_noise_std(const StftGrid& grid) {
  if (grid.values.empty()) throw std::invalid_argument("estimate_noise_std: empty grid");
  std::vector<double> mags;
  mags.reserve(grid.values.data().size());
  for (const cd& v : grid.values.data()) mags.push_back(std::abs(v.real()));
  size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
  double med = mags[mid];
  if (mags.size() % 2 == 0) {
    // Median of an even count averages the two central order statistics.
    double lower = *std::max_element(mags.begin(), mags.begin() + mid);
    med = 0.5 * (med + lower);
  }
  return std::sqrt(2.0) / 0.6745 * med;
}

namespace {

template <class Fn>
StftGrid apply_threshold(const StftGrid& grid, double c, Fn&& shrink) {
  if (!(c > 0.0)) throw std::invalid_argument("threshold: c must be > 0");
  double lambda = c * estimate_noise_std(grid);
  StftGrid out = grid;
  for (cd& v : out.values.data()) v = shrink(v, lambda);
  return out;
}

}  // namespace

StftGrid hard_threshold(const StftGrid& grid, double c) {
  return apply_threshold(grid, c, [](cd v, double lambda) {
    return std::abs(v) > lambda ? v : cd{0.0, 0.0};
  });
}

StftGrid garrote_threshold(const StftGrid& grid, double c) {
  return apply_threshold(grid, c, [](cd v, double lambda) {
    double mag = std::abs(v);
    if (!(mag > lambda)) return cd{0.0, 0.0};
    return v * (1.0 - (lambda * lambda) / (mag * mag));
  });
}

TFMask magnitude_mask(const StftGrid& grid, double lambda) {
  TFMask m;
  m.values = BGrid(grid.values.rows(), grid.values.cols(), 0);
  for (int n = 0; n < grid.values.rows(); ++n) {
    const cd* v = grid.values.row(n);
    std::uint8_t* out = m.values.row(n);
    for (int k = 0; k < grid.values.cols(); ++k) out[k] = std::abs(v[k]) > lambda;
  }
  return m;
}

TFMask empty_space_mask(const PlanarPointSet& zeros, double r0, int rows, int cols,
                        double du, double dv) {
  if (!(r0 > 0.0)) throw std::invalid_argument("empty_space_mask: r0 must be > 0");
  double r0_sq = r0 * r0;
  // Stage 1: cells farther than r0 from every zero form the center set.
  PointIndex index(zeros.points);
  BGrid centers(rows, cols, 0);
  for (int n = 0; n < rows; ++n) {
    for (int k = 0; k < cols; ++k) {
      double d_sq = index.nearest_sq({n * du, k * dv});
      centers(n, k) = d_sq > r0_sq;
    }
  }
  // Stage 2: cells within r0 of some center.
  RGrid d2 = squared_distance_transform(centers, du, dv);
  TFMask mask;
  mask.values = BGrid(rows, cols, 0);
  for (int n = 0; n < rows; ++n)
    for (int k = 0; k < cols; ++k) mask.values(n, k) = d2(n, k) <= r0_sq;
  return mask;
}

TFMask dt_mask(const Triangulation& tri, double l_max, int rows, int cols, double du,
               double dv) {
  if (!(l_max > 0.0)) throw std::invalid_argument("dt_mask: l_max must be > 0");
  TFMask mask;
  mask.values = BGrid(rows, cols, 0);
  for (const Triangle& t : tri.triangles) {
    if (!(t.max_edge > l_max)) continue;
    PlanarPoint A = tri.points[static_cast<size_t>(t.a)];
    PlanarPoint B = tri.points[static_cast<size_t>(t.b)];
    PlanarPoint C = tri.points[static_cast<size_t>(t.c)];
    double u_lo = std::min({A.u, B.u, C.u}), u_hi = std::max({A.u, B.u, C.u});
    double v_lo = std::min({A.v, B.v, C.v}), v_hi = std::max({A.v, B.v, C.v});
    int n_lo = std::max(0, static_cast<int>(std::ceil(u_lo / du - 1e-12)));
    int n_hi = std::min(rows - 1, static_cast<int>(std::floor(u_hi / du + 1e-12)));
    int k_lo = std::max(0, static_cast<int>(std::ceil(v_lo / dv - 1e-12)));
    int k_hi = std::min(cols - 1, static_cast<int>(std::floor(v_hi / dv + 1e-12)));
    for (int n = n_lo; n <= n_hi; ++n) {
      for (int k = k_lo; k <= k_hi; ++k) {
        if (mask.values(n, k)) continue;
        PlanarPoint p{n * du, k * dv};
        if (orient2d_sign(A, B, p) >= 0 && orient2d_sign(B, C, p) >= 0 &&
            orient2d_sign(C, A, p) >= 0)
          mask.values(n, k) = 1;
      }
    }
  }
  return mask;
}

namespace {

std::vector<double> real_part_reconstruct(const StftGrid& grid, const TFMask& mask) {
  std::vector<cd> z = mask_reconstruct(grid, mask);
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

}  // namespace

DenoiseResult empty_space_denoise(std::span<const double> x, std::optional<double> r0,
                                  int m, std::uint64_t seed, int workers) {
  StftParams p = default_stft_params(static_cast<int>(x.size()));
  ZeroPipeline pipe = run_zero_pipeline(x, p);
  DenoiseResult res;
  res.detected = true;
  double radius;
  if (r0.has_value()) {
    radius = *r0;
  } else {
    R0Estimate est = adaptive_r0(x, m, seed, workers);
    radius = est.r0;
    res.detected = est.detected;
  }
  res.scale_param = radius;
  int half_cols = p.K / 2 + 1;
  TFMask half = empty_space_mask(pipe.plane, radius, static_cast<int>(x.size()),
                                 half_cols, 1.0 / p.T, p.T / p.K);
  res.mask = embed_half_mask(half, p.K);
  res.samples = real_part_reconstruct(pipe.grid, res.mask);
  return res;
}

DenoiseResult dt_denoise(std::span<const double> x, std::optional<double> l_max,
                         int m, std::uint64_t seed, int workers) {
  StftParams p = default_stft_params(static_cast<int>(x.size()));
  ZeroPipeline pipe = run_zero_pipeline(x, p);
  DenoiseResult res;
  res.detected = true;
  double edge_limit;
  if (l_max.has_value()) {
    edge_limit = *l_max;
  } else {
    R0Estimate est = adaptive_r0(x, m, seed, workers);
    edge_limit = 2.0 * est.r0;
    res.detected = est.detected;
  }
  res.scale_param = edge_limit;
  Triangulation tri = delaunay(pipe.plane);
  int half_cols = p.K / 2 + 1;
  TFMask half = dt_mask(tri, edge_limit, static_cast<int>(x.size()), half_cols,
                        1.0 / p.T, p.T / p.K);
  res.mask = embed_half_mask(half, p.K);
  res.samples = real_part_reconstruct(pipe.grid, res.mask);
  return res;
}

DenoiseResult threshold_denoise(std::span<const double> x, ThresholdKind kind,
                                double c) {
  StftParams p = default_stft_params(static_cast<int>(x.size()));
  std::vector<cd> xc(x.begin(), x.end());
  AnalysisWindow w = gaussian_window(p.T, static_cast<int>(x.size()));
  StftGrid grid = stft(xc, w, p.K);
  double lambda = c * estimate_noise_std(grid);
  StftGrid shrunk =
      kind == ThresholdKind::hard ? hard_threshold(grid, c) : garrote_threshold(grid, c);
  DenoiseResult res;
  res.mask = magnitude_mask(grid, lambda);
  res.scale_param = lambda;
  res.detected = true;
  TFMask all_true;
  all_true.values = BGrid(grid.values.rows(), grid.values.cols(), 1);
  res.samples = real_part_reconstruct(shrunk, all_true);
  return res;
}

RidgeSet extract_ridges(const CGrid& sst, int J, double mu, int band_epsilon) {
  if (J < 1) throw std::invalid_argument("extract_ridges: J must be >= 1");
  if (mu < 0.0) throw std::invalid_argument("extract_ridges: mu must be >= 0");
  int N = sst.rows();
  int K = sst.cols();
  if (band_epsilon < 0) band_epsilon = static_cast<int>(std::lround(std::sqrt(K)));

  RGrid energy(N, K);
  double max_e = 0.0;
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) {
      energy(n, k) = std::norm(sst(n, k));
      max_e = std::max(max_e, energy(n, k));
    }
  double floor = 1e-12 * max_e;
  if (floor == 0.0) floor = std::numeric_limits<double>::min();

  RidgeSet out;
  out.J = J;
  RGrid score(N, K);
  RGrid best(N, K);
  Grid<int> parent(N, K, 0);
  std::vector<double> neg(static_cast<size_t>(K));
  std::vector<double> env(static_cast<size_t>(K));
  std::vector<int> arg(static_cast<size_t>(K));

  for (int j = 0; j < J; ++j) {
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) score(n, k) = std::log(energy(n, k) + floor);

    for (int k = 0; k < K; ++k) best(0, k) = score(0, k);
    for (int n = 1; n < N; ++n) {
      if (mu > 0.0) {
        // max_q best[n-1][q] - mu (k-q)^2 is a lower envelope of parabolas
        // over the negated values.
        for (int k = 0; k < K; ++k) neg[static_cast<size_t>(k)] = -best(n - 1, k);
        parabola_envelope_arg(neg.data(), K, mu, env.data(), arg.data());
        for (int k = 0; k < K; ++k) {
          best(n, k) = score(n, k) - env[static_cast<size_t>(k)];
          parent(n, k) = arg[static_cast<size_t>(k)];
        }
      } else {
        int q_best = 0;
        for (int q = 1; q < K; ++q)
          if (best(n - 1, q) > best(n - 1, q_best)) q_best = q;
        for (int k = 0; k < K; ++k) {
          best(n, k) = score(n, k) + best(n - 1, q_best);
          parent(n, k) = q_best;
        }
      }
    }

    int k_end = 0;
    for (int k = 1; k < K; ++k)
      if (best(N - 1, k) > best(N - 1, k_end)) k_end = k;
    std::vector<int> ridge(static_cast<size_t>(N));
    ridge[static_cast<size_t>(N) - 1] = k_end;
    for (int n = N - 1; n > 0; --n)
      ridge[static_cast<size_t>(n) - 1] = parent(n, ridge[static_cast<size_t>(n)]);
    // Suppress the extracted band before the next pass.
    for (int n = 0; n < N; ++n) {
      int lo = std::max(0, ridge[static_cast<size_t>(n)] - band_epsilon);
      int hi = std::min(K - 1, ridge[static_cast<size_t>(n)] + band_epsilon);
      for (int k = lo; k <= hi; ++k) energy(n, k) = 0.0;
    }
    out.ridges.push_back(std::move(ridge));
  }
  return out;
}

SstDenoiseResult sst_rd_denoise(std::span<const double> x, int J, int epsilon,
                                double mu) {
  if (J < 1) throw std::invalid_argument("sst_rd_denoise: J must be >= 1");
  int N = static_cast<int>(x.size());
  StftParams p = default_stft_params(N);
  if (epsilon < 0) epsilon = static_cast<int>(std::lround(p.K / p.T));

  std::vector<cd> xa = analytic_signal(x);
  AnalysisWindow w = gaussian_window(p.T, N);
  StftGrid grid = stft(xa, w, p.K);
  ReassignmentOperators ops = reassignment_operators(xa, w, p.K);
  CGrid sst = synchrosqueeze(grid, ops);

  RidgeSet ridges = extract_ridges(sst, J, mu, epsilon);

  SstDenoiseResult res;
  res.ridges = ridges;
  res.samples.assign(static_cast<size_t>(N), 0.0);
  double scale = 1.0 / (p.K * w.center_tap());
  int half = epsilon / 2;
  for (const auto& ridge : ridges.ridges) {
    std::vector<double> comp(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
      cd acc{0.0, 0.0};
      int lo = std::max(0, ridge[static_cast<size_t>(n)] - half);
      int hi = std::min(p.K - 1, ridge[static_cast<size_t>(n)] + half);
      for (int q = lo; q <= hi; ++q) acc += sst(n, q);
      comp[static_cast<size_t>(n)] = (acc * scale).real();
    }
    for (int n = 0; n < N; ++n) res.samples[static_cast<size_t>(n)] += comp[static_cast<size_t>(n)];
    res.components.push_back(std::move(comp));
  }
  return res;
}

int isolated_region_count(const TFMask& mask) {
  int rows = mask.values.rows();
  int cols = mask.values.cols();
  BGrid seen(rows, cols, 0);
  std::vector<std::pair<int, int>> stack;
  int count = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask.values(r, c) || seen(r, c)) continue;
      ++count;
      seen(r, c) = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        auto [cr, cc] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            int nr = cr + dr, nc = cc + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (!mask.values(nr, nc) || seen(nr, nc)) continue;
            seen(nr, nc) = 1;
            stack.push_back({nr, nc});
          }
        }
      }
    }
  }
  return count;
}

}  // namespace tfz
