#include "tfz/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tfz/parallel.hpp"
#include "tfz/rng.hpp"

namespace tfz {

StftParams default_stft_params(int N) {
  StftParams p;
  p.T = std::sqrt(static_cast<double>(N));
  p.K = N;
  p.margin = static_cast<int>(std::ceil(p.T));
  return p;
}

ZeroPipeline run_zero_pipeline(std::span<const double> x, const StftParams& p) {
  ZeroPipeline out;
  std::vector<cd> xa = analytic_signal(x);
  AnalysisWindow w = gaussian_window(p.T, static_cast<int>(x.size()));
  out.grid = stft(xa, w, p.K);
  Spectrogram half = half_band_spectrogram(spectrogram(out.grid));
  out.zeros = find_zeros(half, p.margin);
  out.plane = scale_zeros(out.zeros, static_cast<int>(x.size()), p.K, p.T);
  return out;
}

SummaryCurve observed_curve(std::span<const double> x, const StftParams& p,
                            const RadiusGrid& radii, CurveKind kind) {
  ZeroPipeline pipe = run_zero_pipeline(x, p);
  SummaryCurve c = empty_space_estimate(pipe.plane, radii);
  return kind == CurveKind::FTilde ? variance_stabilize(c) : c;
}

NullEnsemble simulate_null_ensemble(int m, int signal_length, const StftParams& p,
                                    const RadiusGrid& radii, CurveKind kind,
                                    std::uint64_t seed, int workers) {
  if (m < 1) throw std::invalid_argument("simulate_null_ensemble: m must be >= 1");
  NullEnsemble e;
  e.m = m;
  e.seed = seed;
  e.signal_length = signal_length;
  e.params = p;
  e.curves.resize(static_cast<size_t>(m));
  parallel_for(m, workers, [&](int i) {
    std::uint64_t j = static_cast<std::uint64_t>(i) + 1;
    CounterRng rng(seed ^ j);
    std::vector<double> noise(static_cast<size_t>(signal_length));
    rng.fill_gaussian(noise);
    e.curves[static_cast<size_t>(i)] = observed_curve(noise, p, radii, kind);
  });
  return e;
}

namespace {

// Index range of radii inside [lo, hi] where every curve is defined. The
// reference lattice depends only on the window, so all H0 curves share one
// NaN pattern; the observation is checked anyway.
std::vector<int> usable_indices(const SummaryCurve& obs, const NullEnsemble& ens,
                                double lo, double hi) {
  const auto& r = obs.radii.radii;
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(r.size()); ++i) {
    double ri = r[static_cast<size_t>(i)];
    if (ri < lo || ri > hi) continue;
    if (std::isnan(obs.values[static_cast<size_t>(i)])) continue;
    bool ok = true;
    for (const auto& c : ens.curves) {
      if (std::isnan(c.values[static_cast<size_t>(i)])) {
        ok = false;
        break;
      }
    }
    if (ok) idx.push_back(i);
  }
  return idx;
}

void check_alignment(const SummaryCurve& obs, const NullEnsemble& ens) {
  if (ens.curves.empty()) throw std::invalid_argument("test: empty ensemble");
  for (const auto& c : ens.curves) {
    if (c.values.size() != obs.values.size() || c.kind != obs.kind)
      throw std::invalid_argument("test: curve grid or kind mismatch");
  }
}

// Grid spacing for the discrete p-norm; last point inherits its left gap.
double delta_r(const std::vector<double>& r, int i) {
  if (i + 1 < static_cast<int>(r.size()))
    return r[static_cast<size_t>(i) + 1] - r[static_cast<size_t>(i)];
  return r[static_cast<size_t>(i)] - r[static_cast<size_t>(i) - 1];
}

int resolve_k(const TestConfig& cfg, int m) {
  int k = cfg.k_rank;
  if (k == 0) {
    double real_k = cfg.alpha * (m + 1);
    k = static_cast<int>(std::lround(real_k));
    if (std::abs(real_k - k) > 1e-9)
      throw std::invalid_argument("test: alpha*(m+1) is not an integer");
  }
  if (k < 1 || k > m) throw std::invalid_argument("test: k out of range");
  return k;
}

TestOutcome envelope_core(const SummaryCurve& observed, const NullEnsemble& ensemble,
                          const TestConfig& cfg, double p, double r_mc) {
  check_alignment(observed, ensemble);
  std::vector<int> idx = usable_indices(observed, ensemble, cfg.r_min, r_mc);
  if (idx.empty())
    throw std::invalid_argument("envelope_test: no defined radii in the interval");
  int m = ensemble.m;
  int k = resolve_k(cfg, m);

  const auto& r = observed.radii.radii;
  std::vector<double> mean(idx.size(), 0.0);
  for (size_t a = 0; a < idx.size(); ++a) {
    double s = observed.values[static_cast<size_t>(idx[a])];
    for (const auto& c : ensemble.curves) s += c.values[static_cast<size_t>(idx[a])];
    mean[a] = s / (m + 1);
  }

  auto stat = [&](const SummaryCurve& c) {
    if (std::isinf(p)) {
      double mx = 0.0;
      for (size_t a = 0; a < idx.size(); ++a)
        mx = std::max(mx, std::abs(c.values[static_cast<size_t>(idx[a])] - mean[a]));
      return mx;
    }
    double acc = 0.0;
    for (size_t a = 0; a < idx.size(); ++a) {
      double d = std::abs(c.values[static_cast<size_t>(idx[a])] - mean[a]);
      acc += std::pow(d, p) * delta_r(r, idx[a]);
    }
    return std::pow(acc, 1.0 / p);
  };

  TestOutcome out;
  out.t0 = stat(observed);
  std::vector<double> t(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) t[static_cast<size_t>(j)] = stat(ensemble.curves[static_cast<size_t>(j)]);
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double tk = sorted[static_cast<size_t>(k) - 1];
  out.reject = out.t0 >= tk;
  int ge = 0;
  for (double tj : t) ge += tj >= out.t0;
  out.p_minus = out.p_plus = static_cast<double>(1 + ge) / (m + 1);
  out.rank0 = 1 + ge;
  return out;
}

}  // namespace

TestOutcome envelope_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                          const TestConfig& cfg) {
  return envelope_core(observed, ensemble, cfg, cfg.p_norm, cfg.r_mc);
}

TestOutcome mad_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                     const TestConfig& cfg) {
  double r_max = observed.radii.radii.back();
  return envelope_core(observed, ensemble, cfg, std::numeric_limits<double>::infinity(),
                       r_max);
}

TestOutcome rank_envelope_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                               const TestConfig& cfg) {
  check_alignment(observed, ensemble);
  std::vector<int> idx =
      usable_indices(observed, ensemble, cfg.interval_I.first, cfg.interval_I.second);
  if (idx.empty())
    throw std::invalid_argument("rank_envelope_test: no defined radii in I");
  int m = ensemble.m;
  int total = m + 1;

  // rho_j = min over r of min(#{i: S_i <= S_j}, #{i: S_i >= S_j}), counts
  // over all m+1 curves including j itself; this equals the deepest pair of
  // k-th envelopes containing S_j everywhere on I.
  std::vector<int> rho(static_cast<size_t>(total), total);
  std::vector<double> col(static_cast<size_t>(total));
  for (int a : idx) {
    col[0] = observed.values[static_cast<size_t>(a)];
    for (int j = 1; j < total; ++j)
      col[static_cast<size_t>(j)] = ensemble.curves[static_cast<size_t>(j) - 1].values[static_cast<size_t>(a)];
    std::vector<double> sorted(col);
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < total; ++j) {
      double v = col[static_cast<size_t>(j)];
      int le = static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
      int ge = total - static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
      rho[static_cast<size_t>(j)] = std::min(rho[static_cast<size_t>(j)], std::min(le, ge));
    }
  }

  TestOutcome out;
  out.rank0 = rho[0];
  int strictly_less = 0, less_equal = 0;
  for (int j = 1; j < total; ++j) {
    strictly_less += rho[static_cast<size_t>(j)] < rho[0];
    less_equal += rho[static_cast<size_t>(j)] <= rho[0];
  }
  out.p_minus = static_cast<double>(strictly_less) / total;
  out.p_plus = static_cast<double>(1 + less_equal) / total;
  out.reject = out.p_plus < cfg.alpha;
  out.t0 = static_cast<double>(rho[0]);
  return out;
}

R0Estimate adaptive_r0(std::span<const double> x, int m, std::uint64_t seed,
                       int workers) {
  StftParams p = default_stft_params(static_cast<int>(x.size()));
  RadiusGrid radii = RadiusGrid::default_grid();
  SummaryCurve obs = observed_curve(x, p, radii, CurveKind::FTilde);
  NullEnsemble ens = simulate_null_ensemble(m, static_cast<int>(x.size()), p, radii,
                                            CurveKind::FTilde, seed, workers);
  TestConfig cfg;
  cfg.statistic_kind = CurveKind::FTilde;
  cfg.alpha = 0.05;
  cfg.interval_I = {0.65, 1.05};
  TestOutcome t = rank_envelope_test(obs, ens, cfg);

  R0Estimate est;
  est.detected = t.reject;
  if (!t.reject) {
    est.r0 = 0.8;
    return est;
  }
  std::vector<int> idx =
      usable_indices(obs, ens, cfg.interval_I.first, cfg.interval_I.second);
  double best = -1.0;
  double best_r = 0.8;
  for (int a : idx) {
    double low = obs.values[static_cast<size_t>(a)];
    for (const auto& c : ens.curves)
      low = std::min(low, c.values[static_cast<size_t>(a)]);
    double dev = std::abs(low - obs.values[static_cast<size_t>(a)]);
    if (dev > best) {  // strict: ties keep the smallest radius
      best = dev;
      best_r = obs.radii.radii[static_cast<size_t>(a)];
    }
  }
  est.r0 = best_r;
  return est;
}

bool detect_signal(std::span<const double> x, TestKind kind, const TestConfig& cfg,
                   int m, std::uint64_t seed, int workers) {
  StftParams p = default_stft_params(static_cast<int>(x.size()));
  RadiusGrid radii = RadiusGrid::default_grid();
  SummaryCurve obs = observed_curve(x, p, radii, cfg.statistic_kind);
  NullEnsemble ens = simulate_null_ensemble(m, static_cast<int>(x.size()), p, radii,
                                            cfg.statistic_kind, seed, workers);
  TestOutcome t;
  switch (kind) {
    case TestKind::envelope:
      t = envelope_test(obs, ens, cfg);
      break;
    case TestKind::mad:
      t = mad_test(obs, ens, cfg);
      break;
    case TestKind::rank:
      t = rank_envelope_test(obs, ens, cfg);
      break;
  }
  return t.reject;
}

}  // namespace tfz
