#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "tfz/point_process.hpp"

namespace tfz {

struct StftParams {
  double T = 0.0;
  int K = 0;
  int margin = 0;
};

// Pipeline convention: T = sqrt(N), K = N, margin = ceil(T).
StftParams default_stft_params(int N);

// Shared front end of every zero-based method: analytic conversion, STFT,
// spectrogram restricted to the live half-band k in [0, K/2], strict local
// minima, isotropic rescaling.
struct ZeroPipeline {
  StftGrid grid;  // full K bins, analytic input
  GridZeroSet zeros;
  PlanarPointSet plane;
};

ZeroPipeline run_zero_pipeline(std::span<const double> x, const StftParams& p);

SummaryCurve observed_curve(std::span<const double> x, const StftParams& p,
                            const RadiusGrid& radii, CurveKind kind);

struct NullEnsemble {
  std::vector<SummaryCurve> curves;  // curves[j-1] is realization j
  int m = 0;
  std::uint64_t seed = 0;
  int signal_length = 0;
  StftParams params;
};

// Realization j draws white Gaussian noise from stream seed xor j.
NullEnsemble simulate_null_ensemble(int m, int signal_length, const StftParams& p,
                                    const RadiusGrid& radii, CurveKind kind,
                                    std::uint64_t seed, int workers = 1);

struct TestConfig {
  CurveKind statistic_kind = CurveKind::FTilde;
  double r_min = 0.0;
  double r_mc = 2.0;  // envelope test only
  double p_norm = 2.0;  // may be infinity
  double alpha = 0.05;
  int k_rank = 0;  // envelope/MAD rank; 0 derives k from alpha*(m+1)
  std::pair<double, double> interval_I{0.65, 1.05};  // rank test
};

struct TestOutcome {
  bool reject = false;
  double t0 = 0.0;   // envelope/MAD statistic of the observation
  int rank0 = 0;     // rank-test depth of the observation
  double p_minus = 0.0;
  double p_plus = 0.0;
};

// t_j = (sum_{r in [r_min, r_mc]} |S_j(r) - mean(r)|^p dr)^{1/p}, mean over
// the observation plus all ensemble curves; reject iff t_0 >= t_(k), the
// k-th largest of t_1..t_m.
TestOutcome envelope_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                          const TestConfig& cfg);

// Envelope test at p = infinity, r_mc = r_max.
TestOutcome mad_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                     const TestConfig& cfg);

// Global rank envelope test on interval_I. rank0 is the deepest envelope
// containing the observation; conservative decision (p_plus < alpha) is
// reported in `reject`, both p-values returned.
TestOutcome rank_envelope_test(const SummaryCurve& observed, const NullEnsemble& ensemble,
                               const TestConfig& cfg);

struct R0Estimate {
  double r0 = 0.8;
  bool detected = false;
};

// Rank test on F~ curves over I = [0.65, 1.05]; if it rejects, r0 is the
// radius maximizing |lowest envelope - observed| (ties to the smallest r),
// else the 0.8 fallback.
R0Estimate adaptive_r0(std::span<const double> x, int m, std::uint64_t seed,
                       int workers = 1);

enum class TestKind { envelope, mad, rank };

bool detect_signal(std::span<const double> x, TestKind kind, const TestConfig& cfg,
                   int m, std::uint64_t seed, int workers = 1);

}  // namespace tfz
