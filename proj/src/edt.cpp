#include "tfz/edt.hpp"

#include <limits>
#include <vector>

namespace tfz {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void parabola_envelope_arg(const double* f, int n, double w, double* out, int* arg) {
  // Felzenszwalb-Huttenlocher lower envelope. Parabolas with infinite
  // offset are skipped entirely; intersection arithmetic with +inf would
  // produce NaN.
  std::vector<int> v(static_cast<size_t>(n));
  std::vector<double> z(static_cast<size_t>(n) + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    double fq = f[q] + w * q * q;
    while (k >= 0) {
      int p = v[static_cast<size_t>(k)];
      double s = (fq - (f[p] + w * p * p)) / (2.0 * w * (q - p));
      if (s <= z[static_cast<size_t>(k)]) {
        --k;
      } else {
        ++k;
        v[static_cast<size_t>(k)] = q;
        z[static_cast<size_t>(k)] = s;
        z[static_cast<size_t>(k) + 1] = kInf;
        break;
      }
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
    }
  }
  if (k < 0) {
    for (int x = 0; x < n; ++x) {
      out[x] = kInf;
      if (arg) arg[x] = -1;
    }
    return;
  }
  int j = 0;
  for (int x = 0; x < n; ++x) {
    while (z[static_cast<size_t>(j) + 1] < x) ++j;
    int p = v[static_cast<size_t>(j)];
    out[x] = w * (x - p) * (x - p) + f[p];
    if (arg) arg[x] = p;
  }
}

void parabola_envelope(const double* f, int n, double w, double* out) {
  parabola_envelope_arg(f, n, w, out, nullptr);
}

RGrid squared_distance_transform(const BGrid& seeds, double du, double dv) {
  int rows = seeds.rows();
  int cols = seeds.cols();
  RGrid d(rows, cols, kInf);
  // Pass 1: along time (rows) within each column.
  std::vector<double> f(static_cast<size_t>(rows));
  std::vector<double> g(static_cast<size_t>(rows));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f[static_cast<size_t>(r)] = seeds(r, c) ? 0.0 : kInf;
    parabola_envelope(f.data(), rows, du * du, g.data());
    for (int r = 0; r < rows; ++r) d(r, c) = g[static_cast<size_t>(r)];
  }
  // Pass 2: along frequency (columns) within each row.
  std::vector<double> h(static_cast<size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    parabola_envelope(d.row(r), cols, dv * dv, h.data());
    double* out = d.row(r);
    for (int c = 0; c < cols; ++c) out[c] = h[static_cast<size_t>(c)];
  }
  return d;
}

}  // namespace tfz
