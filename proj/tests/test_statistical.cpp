#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "tfz/bench.hpp"
#include "tfz/denoise.hpp"
#include "tfz/detection.hpp"
#include "tfz/point_process.hpp"
#include "tfz/rng.hpp"
#include "tfz/signal_bank.hpp"

// Monte Carlo checks of distributional behavior. Tolerances are wide enough
// that a correct implementation fails any single check with probability well
// below 1e-3, yet gross errors (wrong normalization, wrong level, broken
// scale map) land far outside them.

namespace {

std::vector<double> white(int N, std::uint64_t seed) {
  std::vector<double> x(static_cast<size_t>(N));
  tfz::CounterRng rng(seed);
  for (double& v : x) v = rng.next_gaussian();
  return x;
}

std::vector<double> noisy_real(const tfz::Signal& s, double snr_db, std::uint64_t seed) {
  tfz::NoisySignal ns = tfz::add_noise_at_snr(s, snr_db, seed);
  std::vector<double> out(ns.samples.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = ns.samples[i].real();
  return out;
}

double mean_nn_distance(const tfz::PlanarPointSet& s) {
  double acc = 0.0;
  for (const auto& p : s.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : s.points) {
      double d2 = (p.u - q.u) * (p.u - q.u) + (p.v - q.v) * (p.v - q.v);
      if (d2 > 0.0 && d2 < best) best = d2;
    }
    acc += std::sqrt(best);
  }
  return acc / static_cast<double>(s.points.size());
}

}  // namespace

TEST_CASE("statistical: white-noise zero count matches the frozen reference") {
  // Independent 40-seed calibration at N=K=512, T=sqrt(N): mean 191.9,
  // sd 2.6. A 10-seed mean within 10 percent is a 7-sigma-wide gate.
  int N = 512;
  tfz::StftParams p = tfz::default_stft_params(N);
  double acc = 0.0;
  int reps = 10;
  for (int s = 0; s < reps; ++s) {
    auto pipe = tfz::run_zero_pipeline(white(N, 600 + static_cast<std::uint64_t>(s)), p);
    acc += static_cast<double>(pipe.zeros.points.size());
  }
  double mean = acc / reps;
  CHECK(mean > 191.9 * 0.9);
  CHECK(mean < 191.9 * 1.1);
}

TEST_CASE("statistical: zero-pattern geometry is window-scale invariant") {
  // The (n, k) -> (n/T, kT/K) map normalizes the zero pattern to unit
  // density, so mean nearest-neighbor spacing must not move with T.
  int N = 512;
  double ref = 0.0, wide = 0.0;
  int reps = 10;
  for (int s = 0; s < reps; ++s) {
    auto x = white(N, 300 + static_cast<std::uint64_t>(s));
    tfz::StftParams p = tfz::default_stft_params(N);
    ref += mean_nn_distance(tfz::run_zero_pipeline(x, p).plane);
    p.T = 1.5 * std::sqrt(static_cast<double>(N));
    p.margin = static_cast<int>(std::ceil(p.T));
    wide += mean_nn_distance(tfz::run_zero_pipeline(x, p).plane);
  }
  ref /= reps;
  wide /= reps;
  CHECK(std::abs(ref - wide) / ref < 0.05);
  // Calibrated absolute location of the mean spacing at unit density.
  CHECK(ref > 0.6);
  CHECK(ref < 0.8);
}

TEST_CASE("statistical: empty-space estimate is reproducible across seed batches") {
  int N = 256;
  tfz::StftParams p = tfz::default_stft_params(N);
  tfz::RadiusGrid radii = tfz::RadiusGrid::default_grid();
  auto batch_mean = [&](std::uint64_t seed) {
    tfz::NullEnsemble ens =
        tfz::simulate_null_ensemble(30, N, p, radii, tfz::CurveKind::F, seed, 1);
    std::vector<double> mean(radii.radii.size(), 0.0);
    std::vector<int> cnt(radii.radii.size(), 0);
    for (const auto& c : ens.curves)
      for (size_t i = 0; i < c.values.size(); ++i)
        if (std::isfinite(c.values[i])) {
          mean[i] += c.values[i];
          cnt[i] += 1;
        }
    for (size_t i = 0; i < mean.size(); ++i)
      mean[i] = cnt[i] > 0 ? mean[i] / cnt[i] : std::numeric_limits<double>::quiet_NaN();
    return mean;
  };
  auto a = batch_mean(7000);
  auto b = batch_mean(7131);

  auto at = [&](const std::vector<double>& m, double r) {
    size_t best = 0;
    for (size_t i = 0; i < radii.radii.size(); ++i)
      if (std::abs(radii.radii[i] - r) < std::abs(radii.radii[best] - r)) best = i;
    return m[best];
  };
  // Disjoint-seed batches agree pointwise.
  for (double r : {0.3, 0.5, 0.8}) {
    CAPTURE(r);
    CHECK(std::abs(at(a, r) - at(b, r)) < 0.015);
  }
  // Frozen anchors of the null empty-space curve at unit density.
  CHECK(at(a, 0.3) > 0.22);
  CHECK(at(a, 0.3) < 0.31);
  CHECK(at(a, 0.5) > 0.67);
  CHECK(at(a, 0.5) < 0.75);
  CHECK(at(a, 0.8) > 0.97);
  CHECK(at(a, 1.2) > 0.9999);
  // The mean curve rises from ~0 to 1 (pointwise noise allowance 0.02).
  CHECK(at(a, 0.05) < 0.02);
  for (size_t i = 0; i + 1 < a.size(); ++i)
    if (std::isfinite(a[i]) && std::isfinite(a[i + 1]))
      CHECK(a[i + 1] >= a[i] - 0.02);
}

TEST_CASE("statistical: envelope test holds its nominal level under H0") {
  // alpha = k/(m+1) = 10/200; over 150 trials the rejection count must land
  // in [1, 18] (each bound misses with probability < 5e-4 at the true level).
  int N = 256, m = 199, trials = 150;
  tfz::TestConfig cfg;
  cfg.alpha = 0.05;
  cfg.k_rank = 10;
  int rej = 0;
  for (int t = 0; t < trials; ++t)
    rej += tfz::detect_signal(white(N, 81000 + static_cast<std::uint64_t>(t)),
                              tfz::TestKind::envelope, cfg, m,
                              82000 + static_cast<std::uint64_t>(t))
               ? 1
               : 0;
  CHECK(rej >= 1);
  CHECK(rej <= 18);
}

TEST_CASE("statistical: envelope test detects a chirp at moderate SNR") {
  // Calibrated power at 5 dB, N=128, m=59 is ~1; demand >= 26/30.
  int N = 128, m = 59, trials = 30;
  tfz::TestConfig cfg;
  cfg.alpha = 0.05;
  tfz::Signal sig = tfz::make_signal("LinearChirp", N);
  int det = 0;
  for (int t = 0; t < trials; ++t)
    det += tfz::detect_signal(noisy_real(sig, 5.0, 42000 + static_cast<std::uint64_t>(t)),
                              tfz::TestKind::envelope, cfg, m,
                              43000 + static_cast<std::uint64_t>(t))
               ? 1
               : 0;
  CHECK(det >= 26);
}

TEST_CASE("statistical: synchrosqueezed ridge reconstruction tracks the clean chirp") {
  // Calibrated mean correlation at 10 dB is 0.99; demand > 0.9.
  int N = 256, reps = 20;
  tfz::Signal sig = tfz::make_signal("LinearChirp", N);
  std::vector<double> ref(sig.samples.size());
  for (size_t i = 0; i < ref.size(); ++i) ref[i] = sig.samples[i].real();
  double acc = 0.0;
  for (int t = 0; t < reps; ++t) {
    auto x = noisy_real(sig, 10.0, 600 + static_cast<std::uint64_t>(t));
    tfz::SstDenoiseResult out = tfz::sst_rd_denoise(x, 1, -1, 0.5);
    acc += tfz::corr_coeff(std::span<const double>(ref),
                           std::span<const double>(out.samples));
  }
  CHECK(acc / reps > 0.9);
}
