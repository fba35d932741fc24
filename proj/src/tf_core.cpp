#include "tfz/tf_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfz/fft.hpp"

namespace tfz {

using std::numbers::pi;

AnalysisWindow gaussian_window(double T, int N) {
  if (!(T > 0.0)) throw std::invalid_argument("gaussian_window: T must be > 0");
  if (N < 1) throw std::invalid_argument("gaussian_window: N must be >= 1");
  // Smallest L with exp(-pi (L/T)^2) <= 1e-16.
  int L = static_cast<int>(std::ceil(T * std::sqrt(std::log(1e16) / pi)));
  AnalysisWindow w;
  w.width_T = T;
  w.support_half_len = L;
  w.samples.resize(static_cast<size_t>(2 * L + 1));
  double amp = std::pow(2.0, 0.25) / std::sqrt(T);
  double energy = 0.0;
  for (int n = -L; n <= L; ++n) {
    double v = amp * std::exp(-pi * (n / T) * (n / T));
    w.samples[static_cast<size_t>(n + L)] = v;
    energy += v * v;
  }
  double inv = 1.0 / std::sqrt(energy);
  for (double& v : w.samples) v *= inv;
  return w;
}

namespace {

// N-periodization of a tap vector taps[i] = h[i - L]. Returns p[m] for
// m in [0, N): p[m] = sum_j h[m + jN].
std::vector<double> periodize(const std::vector<double>& taps, int L, int N) {
  std::vector<double> p(static_cast<size_t>(N), 0.0);
  for (int i = 0; i < static_cast<int>(taps.size()); ++i) {
    int n = i - L;
    int m = ((n % N) + N) % N;
    p[static_cast<size_t>(m)] += taps[static_cast<size_t>(i)];
  }
  return p;
}

// Core transform shared by stft and the auxiliary-window transforms of
// reassignment_operators. For each n, the windowed frame
// y_n[l] = x[l] g_per[l-n] (length N, zero-padded to K) is sent through a
// K-point DFT.
CGrid stft_with_taps(std::span<const cd> x, const std::vector<double>& taps, int L,
                     int K) {
  int N = static_cast<int>(x.size());
  if (N < 1) throw std::invalid_argument("stft: empty signal");
  if (K < N) throw std::invalid_argument("stft: K must be >= N");
  std::vector<double> gper = periodize(taps, L, N);
  CGrid out(N, K);
  std::vector<cd> frame(static_cast<size_t>(K));
  std::vector<cd> spec(static_cast<size_t>(K));
  for (int n = 0; n < N; ++n) {
    for (int l = 0; l < N; ++l) {
      int m = l - n;
      frame[static_cast<size_t>(l)] = x[static_cast<size_t>(l)] * gper[static_cast<size_t>(((m % N) + N) % N)];
    }
    std::fill(frame.begin() + N, frame.end(), cd{0.0, 0.0});
    fft::forward(frame, spec);
    std::copy(spec.begin(), spec.end(), out.row(n));
  }
  return out;
}

}  // namespace

StftGrid stft(std::span<const cd> x, const AnalysisWindow& window, int K) {
  StftGrid g;
  g.values = stft_with_taps(x, window.samples, window.support_half_len, K);
  g.K = K;
  g.window = window;
  return g;
}

Spectrogram spectrogram(const StftGrid& grid) {
  Spectrogram s;
  s.values = RGrid(grid.values.rows(), grid.values.cols());
  for (int n = 0; n < grid.values.rows(); ++n) {
    const cd* in = grid.values.row(n);
    double* out = s.values.row(n);
    for (int k = 0; k < grid.values.cols(); ++k) out[k] = std::norm(in[k]);
  }
  return s;
}

GridZeroSet find_zeros(const Spectrogram& spec, int margin) {
  if (margin < 1) throw std::invalid_argument("find_zeros: margin must be >= 1");
  const RGrid& s = spec.values;
  GridZeroSet z;
  z.margin = margin;
  z.rows = s.rows();
  z.cols = s.cols();
  for (int n = margin; n < s.rows() - margin; ++n) {
    for (int k = margin; k < s.cols() - margin; ++k) {
      double c = s(n, k);
      bool strict_min = true;
      for (int dn = -1; dn <= 1 && strict_min; ++dn)
        for (int dk = -1; dk <= 1; ++dk) {
          if (dn == 0 && dk == 0) continue;
          if (!(c < s(n + dn, k + dk))) {
            strict_min = false;
            break;
          }
        }
      if (strict_min) z.points.emplace_back(n, k);
    }
  }
  return z;
}

std::vector<cd> mask_reconstruct(const StftGrid& grid, const TFMask& mask) {
  if (!mask.values.same_shape(grid.values))
    throw std::invalid_argument("mask_reconstruct: mask shape mismatch");
  int N = grid.time_len();
  int K = grid.K;
  double g0 = grid.window.center_tap();
  std::vector<cd> masked(static_cast<size_t>(K));
  std::vector<cd> zrow(static_cast<size_t>(K));
  std::vector<cd> out(static_cast<size_t>(N));
  double scale = 1.0 / (static_cast<double>(K) * g0);
  for (int n = 0; n < N; ++n) {
    const cd* v = grid.values.row(n);
    const std::uint8_t* m = mask.values.row(n);
    for (int k = 0; k < K; ++k) masked[static_cast<size_t>(k)] = m[k] ? v[k] : cd{0.0, 0.0};
    // Only sample n of the inverse transform is needed, but the backward
    // FFT is cheaper than a K-term direct sum once K > ~64; take row n.
    fft::backward(masked, zrow);
    out[static_cast<size_t>(n)] = zrow[static_cast<size_t>(n)] * scale;
  }
  return out;
}

ReassignmentOperators reassignment_operators(std::span<const cd> x,
                                             const AnalysisWindow& window, int K) {
  int L = window.support_half_len;
  double T = window.width_T;
  std::vector<double> ng(window.samples.size());
  std::vector<double> dg(window.samples.size());
  for (int i = 0; i < static_cast<int>(window.samples.size()); ++i) {
    double n = i - L;
    ng[static_cast<size_t>(i)] = n * window.samples[static_cast<size_t>(i)];
    dg[static_cast<size_t>(i)] = -(2.0 * pi * n / (T * T)) * window.samples[static_cast<size_t>(i)];
  }
  CGrid vg = stft_with_taps(x, window.samples, L, K);
  CGrid vng = stft_with_taps(x, ng, L, K);
  CGrid vdg = stft_with_taps(x, dg, L, K);

  int N = vg.rows();
  double max_energy = 0.0;
  for (const cd& v : vg.data()) max_energy = std::max(max_energy, std::norm(v));
  double floor = 1e-14 * max_energy;

  ReassignmentOperators ops;
  ops.tau_hat = RGrid(N, K);
  ops.nu_hat = RGrid(N, K);
  ops.valid = BGrid(N, K, 0);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      cd v = vg(n, k);
      if (std::norm(v) < floor || std::norm(v) == 0.0) {
        ops.tau_hat(n, k) = static_cast<double>(n);
        ops.nu_hat(n, k) = static_cast<double>(k);
        continue;
      }
      ops.tau_hat(n, k) = n + (vng(n, k) / v).real();
      ops.nu_hat(n, k) = k - (static_cast<double>(K) / (2.0 * pi)) * (vdg(n, k) / v).imag();
      ops.valid(n, k) = 1;
    }
  }
  return ops;
}

CGrid synchrosqueeze(const StftGrid& grid, const ReassignmentOperators& ops) {
  int N = grid.time_len();
  int K = grid.K;
  if (!ops.nu_hat.same_shape(grid.values))
    throw std::invalid_argument("synchrosqueeze: operator shape mismatch");
  CGrid out(N, K, cd{0.0, 0.0});
  for (int n = 0; n < N; ++n) {
    const cd* v = grid.values.row(n);
    const double* nu = ops.nu_hat.row(n);
    const std::uint8_t* ok = ops.valid.row(n);
    for (int q = 0; q < K; ++q) {
      if (!ok[q]) continue;
      int k = static_cast<int>(std::floor(nu[q] + 0.5));
      if (k < 0 || k >= K) continue;
      double phase = 2.0 * pi * static_cast<double>(q) * static_cast<double>(n) / K;
      out(n, k) += v[q] * cd{std::cos(phase), std::sin(phase)};
    }
  }
  return out;
}

std::vector<cd> analytic_signal(std::span<const double> x) {
  int N = static_cast<int>(x.size());
  if (N < 1) throw std::invalid_argument("analytic_signal: empty signal");
  std::vector<cd> in(x.begin(), x.end());
  std::vector<cd> spec(static_cast<size_t>(N));
  fft::forward(in, spec);
  // Keep DC and (even N) Nyquist, double strictly positive frequencies,
  // zero strictly negative ones.
  for (int k = 1; k < N; ++k) {
    if (2 * k < N)
      spec[static_cast<size_t>(k)] *= 2.0;
    else if (2 * k > N)
      spec[static_cast<size_t>(k)] = cd{0.0, 0.0};
  }
  std::vector<cd> out(static_cast<size_t>(N));
  fft::backward(spec, out);
  double inv = 1.0 / N;
  for (cd& v : out) v *= inv;
  return out;
}

Spectrogram half_band_spectrogram(const Spectrogram& spec) {
  int K = spec.values.cols();
  int half_cols = K / 2 + 1;
  Spectrogram h;
  h.values = RGrid(spec.values.rows(), half_cols);
  for (int n = 0; n < spec.values.rows(); ++n) {
    const double* in = spec.values.row(n);
    std::copy(in, in + half_cols, h.values.row(n));
  }
  return h;
}

TFMask embed_half_mask(const TFMask& half, int K) {
  TFMask full;
  full.values = BGrid(half.values.rows(), K, 0);
  for (int n = 0; n < half.values.rows(); ++n) {
    const std::uint8_t* in = half.values.row(n);
    std::uint8_t* out = full.values.row(n);
    std::copy(in, in + half.values.cols(), out);
  }
  return full;
}

}  // namespace tfz
