#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tfz/grid.hpp"

namespace tfz {

// Unit-energy discrete Gaussian analysis window
//   g[n] = 2^{1/4} / sqrt(T) * exp(-pi (n/T)^2),  |n| <= support_half_len,
// truncated where the tail drops below 1e-16 of the peak and renormalized
// to exact unit l2 energy.
struct AnalysisWindow {
  double width_T = 0.0;
  int support_half_len = 0;
  std::vector<double> samples;  // samples[i] = g[i - support_half_len]

  double at(int n) const {
    int i = n + support_half_len;
    if (i < 0 || i >= static_cast<int>(samples.size())) return 0.0;
    return samples[static_cast<size_t>(i)];
  }
  double center_tap() const { return samples[static_cast<size_t>(support_half_len)]; }
};

// N >= 1 is the length of the signals this window will analyze; the window
// is periodized over N inside stft, so support may exceed N.
AnalysisWindow gaussian_window(double T, int N);

// V[n,k] = sum_{l=0}^{N-1} x[l] g_per[l-n] e^{-i 2 pi l k / K}, with g_per
// the N-periodization of g. Rows index n (time), columns k (frequency).
struct StftGrid {
  CGrid values;
  int K = 0;
  AnalysisWindow window;

  int time_len() const { return values.rows(); }
  int num_bins() const { return values.cols(); }
};

StftGrid stft(std::span<const cd> x, const AnalysisWindow& window, int K);

struct Spectrogram {
  RGrid values;  // |V[n,k]|^2
};

Spectrogram spectrogram(const StftGrid& grid);

// Strict local minima of the spectrogram over the 8-neighborhood, searched
// at least `margin` cells away from every grid edge.
struct GridZeroSet {
  std::vector<std::pair<int, int>> points;  // (n, k), sorted lexicographically
  int margin = 0;
  int rows = 0;  // shape of the searched grid
  int cols = 0;
};

GridZeroSet find_zeros(const Spectrogram& spec, int margin);

// Boolean time-frequency mask with the shape of the StftGrid it applies to.
struct TFMask {
  BGrid values;

  int count_true() const {
    int c = 0;
    for (auto v : values.data()) c += v != 0;
    return c;
  }
};

// s~[n] = 1/(K g[0]) sum_k V[n,k] mask[n,k] e^{+i 2 pi n k / K}.
// With an all-true mask and K >= N this inverts stft exactly.
std::vector<cd> mask_reconstruct(const StftGrid& grid, const TFMask& mask);

// Reassignment operators on the stft grid:
//   tau[n,k] = n + Re{ V_ng / V_g },   nu[n,k] = k - K/(2 pi) Im{ V_dg / V_g },
// where V_ng, V_dg use window taps n g[n] and g'[n] = -(2 pi n / T^2) g[n].
// Cells with |V|^2 < 1e-14 max|V|^2 are flagged invalid.
struct ReassignmentOperators {
  RGrid tau_hat;
  RGrid nu_hat;
  BGrid valid;
};

ReassignmentOperators reassignment_operators(std::span<const cd> x,
                                             const AnalysisWindow& window, int K);

// T[n,k] = sum_{q : round(nu[n,q]) == k, 0 <= k < K} V[n,q] e^{+i 2 pi q n / K}.
// Invalid cells of nu contribute nothing.
CGrid synchrosqueeze(const StftGrid& grid, const ReassignmentOperators& ops);

// Analytic signal of a real sequence: zero the negative-frequency bins,
// double the positive ones, keep DC and (even N) Nyquist.
std::vector<cd> analytic_signal(std::span<const double> x);

// Columns [0, K/2] of an analytic-signal spectrogram; the discarded half
// holds only roundoff and would pollute zero statistics.
Spectrogram half_band_spectrogram(const Spectrogram& spec);

// Embeds a mask computed on the half-band grid into the full K columns,
// dead half false.
TFMask embed_half_mask(const TFMask& half, int K);

}  // namespace tfz
