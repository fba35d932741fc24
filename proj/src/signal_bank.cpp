#include "tfz/signal_bank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "tfz/rng.hpp"

namespace tfz {

using json = nlohmann::json;
using std::numbers::pi;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 10% raised-cosine taper at both ends of a full-duration component.
double taper(int n, int N) {
  int L = static_cast<int>(std::lround(0.1 * N));
  if (L < 1) return 1.0;
  if (n < L) return 0.5 * (1.0 - std::cos(pi * n / L));
  if (n >= N - L) return 0.5 * (1.0 - std::cos(pi * (N - 1 - n) / L));
  return 1.0;
}

struct Component {
  std::vector<double> phase;      // cycles, phase[n]; cos(2 pi phase) carrier
  std::vector<double> inst_freq;  // cycles/sample, NaN when the component
                                  // has no meaningful IF (Hermite, atoms)
  std::vector<double> envelope;   // amplitude, 0 where inactive
  bool if_active = true;          // counts toward components_per_time
};

// Full-duration AM-FM component from a closed-form IF; phase integrates the
// IF by the trapezoid rule so phase'(n) matches inst_freq to O(h^2).
template <class FreqFn>
Component chirp_component(int N, FreqFn&& f) {
  Component c;
  c.phase.resize(static_cast<size_t>(N));
  c.inst_freq.resize(static_cast<size_t>(N));
  c.envelope.resize(static_cast<size_t>(N));
  double acc = 0.0;
  for (int n = 0; n < N; ++n) {
    double fn = f(n);
    c.inst_freq[static_cast<size_t>(n)] = fn;
    if (n > 0) acc += 0.5 * (f(n - 1) + fn);
    c.phase[static_cast<size_t>(n)] = acc;
    c.envelope[static_cast<size_t>(n)] = taper(n, N);
  }
  return c;
}

Signal assemble(const std::string& name, int N, const std::vector<Component>& comps) {
  Signal s;
  s.name = name;
  s.component_count = static_cast<int>(comps.size());
  s.samples.assign(static_cast<size_t>(N), cd{0.0, 0.0});
  s.components_per_time.assign(static_cast<size_t>(N), 0);
  s.inst_freq = RGrid(s.component_count, N, kNaN);
  for (int j = 0; j < s.component_count; ++j) {
    const Component& c = comps[static_cast<size_t>(j)];
    for (int n = 0; n < N; ++n) {
      double e = c.envelope[static_cast<size_t>(n)];
      if (e != 0.0)
        s.samples[static_cast<size_t>(n)] +=
            e * std::cos(2.0 * pi * c.phase[static_cast<size_t>(n)]);
      // Metadata covers the whole nominal duration; the taper pinching the
      // envelope to zero at the exact endpoints does not deactivate the
      // component there.
      if (c.if_active) {
        s.inst_freq(j, n) = c.inst_freq[static_cast<size_t>(n)];
        s.components_per_time[static_cast<size_t>(n)] += 1;
      }
    }
  }
  return s;
}

void normalize_energy(Signal& s) {
  double e = s.energy();
  if (e <= 0.0) throw std::logic_error("signal bank produced a zero signal");
  double inv = 1.0 / std::sqrt(e);
  for (cd& v : s.samples) v *= inv;
}

// Hermite function psi_k(t), unit L2 norm on the real line, three-term
// recurrence: psi_k = sqrt(2/k) t psi_{k-1} - sqrt((k-1)/k) psi_{k-2}.
double hermite_psi(int order, double t) {
  double p0 = std::pow(pi, -0.25) * std::exp(-0.5 * t * t);
  if (order == 0) return p0;
  double p1 = std::sqrt(2.0) * t * p0;
  for (int k = 2; k <= order; ++k) {
    double p2 = std::sqrt(2.0 / k) * t * p1 - std::sqrt((k - 1.0) / k) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double get_num(const json& params, const char* key, double dflt) {
  if (!params.contains(key)) return dflt;
  return params.at(key).get<double>();
}

int get_int(const json& params, const char* key, int dflt) {
  if (!params.contains(key)) return dflt;
  return params.at(key).get<int>();
}

}  // namespace

double Signal::energy() const {
  double e = 0.0;
  for (const cd& v : samples) e += std::norm(v);
  return e;
}

const std::vector<SignalInfo>& signal_catalog() {
  static const std::vector<SignalInfo> catalog = {
      {"LinearChirp", 1, "single linear chirp f0 -> f1", R"({"f0":0.1,"f1":0.4})"},
      {"CosChirp", 1, "sinusoidal FM around fc",
       R"({"fc":0.25,"depth":0.1,"cycles":2.0})"},
      {"McMultiLinear", 3, "three parallel linear chirps, tunable spacing",
       R"({"f0":0.1,"slope":0.1,"spacing":0.1})"},
      {"McTripleCosChirp", 3,
       "three cosine chirps converging toward the left edge, tunable spacing",
       R"({"fc":0.25,"depth":0.02,"cycles":1.5,"spacing":0.12})"},
      {"McImpulsesAndTone", 3, "tone plus two short Gabor atoms",
       R"({"f_tone":0.35,"f_atom":0.2,"sigma_t":2.0})"},
      {"HermiteFunction", 1, "Hermite function of given order at a carrier",
       R"({"order":15,"carrier":0.25})"},
      {"McCrossingChirps", 2, "two linear chirps crossing mid-signal",
       R"({"f_lo":0.1,"f_hi":0.4})"},
      {"McDoubleLinear", 2, "two well-separated parallel linear chirps",
       R"({"f0_a":0.1,"f0_b":0.32,"slope":0.08})"},
      {"McSyntheticMixture", 4, "two tones, a linear chirp and a cosine chirp",
       R"({})"},
  };
  return catalog;
}

Signal make_signal(const std::string& name, int N) {
  return make_signal(name, N, json::object());
}

Signal make_signal(const std::string& name, int N, const json& params) {
  if (N < 64) throw std::invalid_argument("make_signal: N must be >= 64");
  double Nm1 = N - 1;

  if (name == "LinearChirp") {
    double f0 = get_num(params, "f0", 0.1);
    double f1 = get_num(params, "f1", 0.4);
    Signal s = assemble(name, N, {chirp_component(N, [&](int n) {
                          return f0 + (f1 - f0) * n / Nm1;
                        })});
    normalize_energy(s);
    return s;
  }

  if (name == "CosChirp") {
    double fc = get_num(params, "fc", 0.25);
    double depth = get_num(params, "depth", 0.1);
    double cycles = get_num(params, "cycles", 2.0);
    Signal s = assemble(name, N, {chirp_component(N, [&](int n) {
                          return fc + depth * std::cos(2.0 * pi * cycles * n / N);
                        })});
    normalize_energy(s);
    return s;
  }

  if (name == "McMultiLinear") {
    double f0 = get_num(params, "f0", 0.1);
    double slope = get_num(params, "slope", 0.1);
    double spacing = get_num(params, "spacing", 0.1);
    std::vector<Component> comps;
    for (int j = 0; j < 3; ++j)
      comps.push_back(chirp_component(
          N, [&, j](int n) { return f0 + j * spacing + slope * n / Nm1; }));
    Signal s = assemble(name, N, comps);
    normalize_energy(s);
    return s;
  }

  if (name == "McTripleCosChirp") {
    double fc = get_num(params, "fc", 0.25);
    double depth = get_num(params, "depth", 0.02);
    double cycles = get_num(params, "cycles", 1.5);
    double spacing = get_num(params, "spacing", 0.12);
    std::vector<Component> comps;
    // Separation ramps from 0.3*spacing at the left edge to spacing at the
    // right, so the three components converge toward the start of the signal.
    for (int j = -1; j <= 1; ++j)
      comps.push_back(chirp_component(N, [&, j](int n) {
        double sep = spacing * (0.3 + 0.7 * n / Nm1);
        return fc + j * sep + depth * std::cos(2.0 * pi * cycles * n / N);
      }));
    Signal s = assemble(name, N, comps);
    normalize_energy(s);
    return s;
  }

  if (name == "McImpulsesAndTone") {
    double f_tone = get_num(params, "f_tone", 0.35);
    double f_atom = get_num(params, "f_atom", 0.2);
    double sigma_t = get_num(params, "sigma_t", 2.0);
    std::vector<Component> comps;
    comps.push_back(chirp_component(N, [&](int) { return f_tone; }));
    for (double frac : {0.3, 0.7}) {
      Component atom;
      atom.if_active = false;
      atom.phase.resize(static_cast<size_t>(N));
      atom.inst_freq.assign(static_cast<size_t>(N), kNaN);
      atom.envelope.resize(static_cast<size_t>(N));
      double n0 = frac * Nm1;
      for (int n = 0; n < N; ++n) {
        double dt = n - n0;
        atom.envelope[static_cast<size_t>(n)] =
            3.0 * std::exp(-dt * dt / (2.0 * sigma_t * sigma_t));
        atom.phase[static_cast<size_t>(n)] = f_atom * dt;
      }
      comps.push_back(std::move(atom));
    }
    Signal s = assemble(name, N, comps);
    normalize_energy(s);
    return s;
  }

  if (name == "HermiteFunction") {
    int order = get_int(params, "order", 15);
    double carrier = get_num(params, "carrier", 0.25);
    if (order < 0) throw std::invalid_argument("HermiteFunction: order must be >= 0");
    Signal s;
    s.name = name;
    s.component_count = 1;
    s.samples.resize(static_cast<size_t>(N));
    s.components_per_time.assign(static_cast<size_t>(N), 0);
    s.inst_freq = RGrid(1, N, kNaN);
    // Scale sqrt(2 pi)/T makes the TF pattern isotropic in plane units
    // under the pipeline's T = sqrt(N) window.
    double T = std::sqrt(static_cast<double>(N));
    double scale = std::sqrt(2.0 * pi) / T;
    double c = 0.5 * Nm1;
    for (int n = 0; n < N; ++n) {
      double t = (n - c) * scale;
      double v = hermite_psi(order, t) * std::cos(2.0 * pi * carrier * (n - c));
      s.samples[static_cast<size_t>(n)] = v * taper(n, N);
    }
    normalize_energy(s);
    return s;
  }

  if (name == "McCrossingChirps") {
    double f_lo = get_num(params, "f_lo", 0.1);
    double f_hi = get_num(params, "f_hi", 0.4);
    Signal s = assemble(
        name, N,
        {chirp_component(N, [&](int n) { return f_lo + (f_hi - f_lo) * n / Nm1; }),
         chirp_component(N, [&](int n) { return f_hi - (f_hi - f_lo) * n / Nm1; })});
    normalize_energy(s);
    return s;
  }

  if (name == "McDoubleLinear") {
    double f0_a = get_num(params, "f0_a", 0.1);
    double f0_b = get_num(params, "f0_b", 0.32);
    double slope = get_num(params, "slope", 0.08);
    Signal s = assemble(
        name, N,
        {chirp_component(N, [&](int n) { return f0_a + slope * n / Nm1; }),
         chirp_component(N, [&](int n) { return f0_b + slope * n / Nm1; })});
    normalize_energy(s);
    return s;
  }

  if (name == "McSyntheticMixture") {
    std::vector<Component> comps;
    comps.push_back(chirp_component(N, [&](int) { return 0.08; }));
    comps.push_back(chirp_component(N, [&](int n) { return 0.15 + 0.13 * n / Nm1; }));
    comps.push_back(chirp_component(N, [&](int n) {
      return 0.35 + 0.04 * std::cos(2.0 * pi * 2.0 * n / N);
    }));
    comps.push_back(chirp_component(N, [&](int) { return 0.45; }));
    Signal s = assemble(name, N, comps);
    normalize_energy(s);
    return s;
  }

  std::string msg = "make_signal: unknown signal '" + name + "'; available:";
  for (const auto& info : signal_catalog()) msg += " " + info.name;
  throw std::invalid_argument(msg);
}

NoisySignal add_noise_at_snr(const Signal& s, double snr_db, std::uint64_t seed) {
  double energy = s.energy();
  if (!(energy > 0.0))
    throw std::invalid_argument("add_noise_at_snr: zero-energy signal");
  size_t N = s.samples.size();
  NoisySignal out;
  out.clean = s;
  out.target_snr_db = snr_db;
  out.seed = seed;
  out.noise.assign(N, 0.0);
  if (!std::isinf(snr_db)) {
    double sigma = std::sqrt(energy) /
                   (std::sqrt(static_cast<double>(N)) * std::pow(10.0, snr_db / 20.0));
    CounterRng rng(seed);
    for (double& v : out.noise) v = sigma * rng.next_gaussian();
  }
  out.samples.resize(N);
  for (size_t n = 0; n < N; ++n) out.samples[n] = s.samples[n] + out.noise[n];
  return out;
}

}  // namespace tfz
