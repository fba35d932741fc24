#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tfz/delaunay.hpp"
#include "tfz/detection.hpp"

namespace tfz {

// sigma_hat = (sqrt(2)/0.6745) * median(|Re V|): Re V of real white noise
// under a unit-energy window is N(0, sigma^2/2), and 0.6745 is the median
// of |N(0,1)|.
double estimate_noise_std(const StftGrid& grid);

// lambda = c * estimate_noise_std(grid); keep V where |V| > lambda, else 0.
StftGrid hard_threshold(const StftGrid& grid, double c = 3.0);

// Garrote shrinkage: V -> (1 - lambda^2/|V|^2) V where |V| > lambda, else 0.
StftGrid garrote_threshold(const StftGrid& grid, double c = 2.0);

// Survivor mask |V| > lambda at the grid's own scale; feeds the
// musical-noise proxy.
TFMask magnitude_mask(const StftGrid& grid, double lambda);

// Union of all zero-free r0-balls, evaluated on a rows x cols grid whose
// cell (n,k) sits at plane point (n*du, k*dv). Stage 1 measures exact
// distances from cells to the (continuous) zeros; stage 2 is an exact
// Euclidean distance transform from the center set.
TFMask empty_space_mask(const PlanarPointSet& zeros, double r0, int rows, int cols,
                        double du, double dv);

// Cells covered by closed triangles with max_edge > l_max.
TFMask dt_mask(const Triangulation& tri, double l_max, int rows, int cols, double du,
               double dv);

struct DenoiseResult {
  std::vector<double> samples;
  TFMask mask;          // on the full N x K analysis grid
  double scale_param = 0.0;  // the r0 / l_max actually used
  bool detected = false;     // auto-mode rank-test outcome; true for fixed scales
};

// T = sqrt(K) pipeline: analytic STFT, zeros, empty_space_mask, masked
// inversion, real part. r0 = nullopt switches to the adaptive estimate.
DenoiseResult empty_space_denoise(std::span<const double> x, std::optional<double> r0,
                                  int m = 199, std::uint64_t seed = 1, int workers = 1);

// Same pipeline with Delaunay triangle selection; auto l_max = 2 * adaptive r0.
DenoiseResult dt_denoise(std::span<const double> x, std::optional<double> l_max,
                         int m = 199, std::uint64_t seed = 1, int workers = 1);

enum class ThresholdKind { hard, garrote };

// Thresholding operates on the raw real-signal STFT (the sigma_hat
// calibration assumes it); reconstruction takes the real part.
DenoiseResult threshold_denoise(std::span<const double> x, ThresholdKind kind,
                                double c);

struct RidgeSet {
  std::vector<std::vector<int>> ridges;  // ridges[j][n] = frequency bin
  int J = 0;
};

// Sequential DP ridge extraction on |sst|^2: each ridge maximizes
// sum_n log(|T[n,w(n)]|^2 + eps_floor) - mu * sum (w(n+1)-w(n))^2, then a
// band of +-band_epsilon bins is zeroed before the next pass.
// band_epsilon < 0 selects round(sqrt(K)).
RidgeSet extract_ridges(const CGrid& sst, int J, double mu = 0.5, int band_epsilon = -1);

struct SstDenoiseResult {
  std::vector<double> samples;
  std::vector<std::vector<double>> components;
  RidgeSet ridges;
};

// Synchrosqueeze, extract J ridges, reconstruct each mode from the
// +-epsilon/2 bin strip, sum. epsilon < 0 selects round(K/T).
SstDenoiseResult sst_rd_denoise(std::span<const double> x, int J, int epsilon = -1,
                                double mu = 0.5);

// Number of 8-connected true components.
int isolated_region_count(const TFMask& mask);

}  // namespace tfz
