#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfz/grid.hpp"

namespace tfz {

// inst_freq uses NaN as the inactive sentinel; components_per_time counts
// the active entries per column.
struct Signal {
  std::vector<cd> samples;
  int component_count = 0;  // J
  std::vector<int> components_per_time;
  RGrid inst_freq;  // J x N, normalized frequency (cycles/sample)
  std::string name;

  double energy() const;
};

struct NoisySignal {
  std::vector<cd> samples;  // clean + noise
  Signal clean;
  std::vector<double> noise;
  double target_snr_db = 0.0;
  std::uint64_t seed = 0;
};

struct SignalInfo {
  std::string name;
  int component_count;
  std::string description;
  std::string default_params;  // JSON text
};

const std::vector<SignalInfo>& signal_catalog();

// Bank signals are real-valued (imaginary parts zero); N >= 64. Unknown
// names raise an error that lists the catalog.
Signal make_signal(const std::string& name, int N, const nlohmann::json& params);
Signal make_signal(const std::string& name, int N);

// Real white Gaussian noise with per-sample sigma = |s|_2 / (sqrt(N) 10^{snr/20});
// +infinity snr means zero noise.
NoisySignal add_noise_at_snr(const Signal& s, double snr_db, std::uint64_t seed);

// Mono PCM16 or IEEE float32 WAV; output normalized to unit energy, J and
// inst_freq unknown (zero components, empty matrix).
Signal load_wav(const std::string& path);

// Writer used by the CLI and the round-trip tests. format: 16 or 32.
void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate = 8000, int bits = 32);

}  // namespace tfz
