#include "tfz/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace tfz::fft {
namespace {

// One cached plan per (size, sign). FFTW_ESTIMATE keeps planning
// deterministic (no runtime measurement); FFTW_UNALIGNED lets the
// thread-safe new-array execute run on ordinary heap buffers.
fftw_plan get_plan(int n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, sign});
  if (it != cache.end()) return it->second;
  std::vector<cd> a(n), b(n);
  fftw_plan p = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(b.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fftw plan creation failed");
  cache.emplace(std::make_pair(n, sign), p);
  return p;
}

void run(std::span<const cd> in, std::span<cd> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
  if (in.empty()) return;
  if (in.data() == out.data()) throw std::invalid_argument("fft: in-place not supported");
  fftw_plan p = get_plan(static_cast<int>(in.size()), sign);
  fftw_execute_dft(p,
                   reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_FORWARD); }
void backward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace tfz::fft
