#include "tfz/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "tfz/denoise.hpp"
#include "tfz/detection.hpp"
#include "tfz/parallel.hpp"
#include "tfz/rng.hpp"
#include "tfz/stats.hpp"

namespace tfz {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm_sq(std::span<const cd> v) {
  double s = 0.0;
  for (const cd& x : v) s += std::norm(x);
  return s;
}

template <class S>
double qrf_impl(std::span<const S> clean, std::span<const S> estimate) {
  if (clean.size() != estimate.size())
    throw std::invalid_argument("qrf: length mismatch");
  double num = norm_sq(clean);
  if (!(num > 0.0)) throw std::invalid_argument("qrf: zero-energy reference");
  double err = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if constexpr (std::is_same_v<S, cd>)
      err += std::norm(clean[i] - estimate[i]);
    else {
      double d = clean[i] - estimate[i];
      err += d * d;
    }
  }
  if (err == 0.0) return 300.0;
  return std::min(300.0, 10.0 * std::log10(num / err));
}

template <class S>
double cc_impl(std::span<const S> clean, std::span<const S> estimate) {
  if (clean.size() != estimate.size())
    throw std::invalid_argument("corr_coeff: length mismatch");
  double nc = std::sqrt(norm_sq(clean));
  if (!(nc > 0.0)) throw std::invalid_argument("corr_coeff: zero-energy reference");
  double ne = std::sqrt(norm_sq(estimate));
  if (!(ne > 0.0)) return 0.0;  // zero-norm estimate convention
  double dot = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if constexpr (std::is_same_v<S, cd>)
      dot += (clean[i] * std::conj(estimate[i])).real();
    else
      dot += clean[i] * estimate[i];
  }
  return dot / (nc * ne);
}

std::vector<double> real_part(const std::vector<cd>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

bool has_value(const nlohmann::json& p, const char* key) {
  return p.is_object() && p.contains(key) && !p.at(key).is_null();
}

double get_or(const nlohmann::json& p, const char* key, double dflt) {
  return has_value(p, key) ? p.at(key).get<double>() : dflt;
}

int get_or_int(const nlohmann::json& p, const char* key, int dflt) {
  return has_value(p, key) ? p.at(key).get<int>() : dflt;
}

// "auto", null, or absence selects the adaptive scale.
std::optional<double> get_scale(const nlohmann::json& p, const char* key) {
  if (!has_value(p, key)) return std::nullopt;
  const auto& v = p.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    throw std::invalid_argument(std::string("bad value for ") + key);
  }
  return v.get<double>();
}

TestConfig detection_config(const nlohmann::json& p) {
  TestConfig cfg;
  cfg.alpha = get_or(p, "alpha", 0.05);
  cfg.k_rank = get_or_int(p, "k", 0);
  cfg.r_mc = get_or(p, "r_mc", 1.2);
  cfg.p_norm = get_or(p, "p", 2.0);
  cfg.interval_I.first = get_or(p, "r_lo", 0.65);
  cfg.interval_I.second = get_or(p, "r_hi", 1.05);
  bool stabilized = true;
  if (has_value(p, "stabilized")) stabilized = p.at("stabilized").get<bool>();
  cfg.statistic_kind = stabilized ? CurveKind::FTilde : CurveKind::F;
  return cfg;
}

}  // namespace

double qrf(std::span<const double> clean, std::span<const double> estimate) {
  return qrf_impl(clean, estimate);
}
double qrf(std::span<const cd> clean, std::span<const cd> estimate) {
  return qrf_impl(clean, estimate);
}
double corr_coeff(std::span<const double> clean, std::span<const double> estimate) {
  return cc_impl(clean, estimate);
}
double corr_coeff(std::span<const cd> clean, std::span<const cd> estimate) {
  return cc_impl(clean, estimate);
}

double detection_power(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("detection_power: empty");
  std::size_t hits = 0;
  for (bool b : outcomes) hits += b ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

std::pair<double, double> clopper_pearson(int successes, int trials,
                                          double confidence) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::invalid_argument("clopper_pearson: invalid counts");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence out of (0,1)");
  double a = 1.0 - confidence;
  double lo = 0.0, hi = 1.0;
  if (successes > 0)
    lo = inv_reg_inc_beta(successes, trials - successes + 1, a / 2.0);
  if (successes < trials)
    hi = inv_reg_inc_beta(successes + 1, trials - successes, 1.0 - a / 2.0);
  return {lo, hi};
}

double bonferroni_adjust(double confidence, int num_comparisons) {
  if (num_comparisons < 1)
    throw std::invalid_argument("bonferroni_adjust: num_comparisons < 1");
  return 1.0 - (1.0 - confidence) / num_comparisons;
}

ResultsTable run_benchmark(const BenchmarkConfig& cfg,
                           const std::vector<MethodAdapter>& methods,
                           const std::vector<Metric>& metrics) {
  if (methods.empty() || metrics.empty())
    throw std::invalid_argument("run_benchmark: need at least one method and metric");
  if (cfg.repetitions < 1) throw std::invalid_argument("run_benchmark: repetitions < 1");
  if (cfg.snr_db_list.empty()) throw std::invalid_argument("run_benchmark: empty snr list");
  if (cfg.signal_names.empty()) throw std::invalid_argument("run_benchmark: no signals");

  std::vector<Signal> signals;
  signals.reserve(cfg.signal_names.size());
  for (const auto& name : cfg.signal_names) signals.push_back(make_signal(name, cfg.N));

  struct Call {
    const MethodAdapter* method;
    const ParamSet* params;
    std::size_t param_idx;
  };
  std::vector<Call> calls;
  for (const auto& m : methods) {
    if (m.param_sets.empty())
      throw std::invalid_argument("run_benchmark: method without parameter sets: " + m.name);
    for (std::size_t pi = 0; pi < m.param_sets.size(); ++pi)
      calls.push_back({&m, &m.param_sets[pi], pi});
  }

  const std::size_t S = signals.size();
  const std::size_t V = cfg.snr_db_list.size();
  const std::size_t R = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t ncells = S * V * R;
  const std::size_t rows_per_cell = calls.size() * metrics.size();

  // One mutex per adapter so serial-only methods never overlap themselves;
  // runtime is measured after acquisition.
  std::vector<std::unique_ptr<std::mutex>> serial_gates(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i].serial_only) serial_gates[i] = std::make_unique<std::mutex>();
  auto gate_of = [&](const MethodAdapter* m) -> std::mutex* {
    for (std::size_t i = 0; i < methods.size(); ++i)
      if (&methods[i] == m) return serial_gates[i].get();
    return nullptr;
  };

  std::vector<std::vector<ResultRow>> cell_rows(ncells);
  std::vector<std::vector<BenchError>> cell_errors(ncells);

  int workers = cfg.workers > 0 ? cfg.workers : 1;
  if (const char* env = std::getenv("TFZ_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) workers = w;
  }

  parallel_for(ncells, workers, [&](std::size_t cell) {
    const std::size_t si = cell / (V * R);
    const std::size_t vi = (cell / R) % V;
    const std::size_t rep = cell % R;
    const Signal& clean = signals[si];
    const double snr = cfg.snr_db_list[vi];
    const std::uint64_t cell_seed = derive_seed(cfg.base_seed, si, vi, rep);
    NoisySignal noisy = add_noise_at_snr(clean, snr, cell_seed);
    std::vector<double> noisy_real = real_part(noisy.samples);

    auto& rows = cell_rows[cell];
    rows.reserve(rows_per_cell);
    for (const Call& call : calls) {
      const std::uint64_t call_seed =
          derive_seed(cell_seed, fnv1a(call.method->name), call.param_idx, 0x5eedULL);
      MethodOutput out;
      double elapsed = kNaN;
      std::string error;
      {
        std::mutex* gate = gate_of(call.method);
        std::unique_lock<std::mutex> lock;
        if (gate) lock = std::unique_lock<std::mutex>(*gate);
        auto t0 = std::chrono::steady_clock::now();
        try {
          out = call.method->fn(noisy_real, clean, call.params->params, call_seed);
          if (call.method->task == BenchTask::denoising &&
              out.denoised.size() != noisy_real.size())
            throw std::runtime_error("adapter output length mismatch");
        } catch (const std::exception& e) {
          error = e.what();
        } catch (...) {
          error = "unknown adapter error";
        }
        auto t1 = std::chrono::steady_clock::now();
        elapsed = std::chrono::duration<double>(t1 - t0).count();
      }
      if (!error.empty())
        cell_errors[cell].push_back({call.method->name, call.params->id, clean.name,
                                     snr, static_cast<int>(rep), error});
      for (const Metric& metric : metrics) {
        double value = kNaN;
        if (error.empty()) {
          try {
            value = metric.fn(clean, out, noisy.noise);
          } catch (const std::exception& e) {
            cell_errors[cell].push_back({call.method->name, call.params->id,
                                         clean.name, snr, static_cast<int>(rep),
                                         std::string("metric ") + metric.name + ": " +
                                             e.what()});
          }
        }
        rows.push_back({call.method->name, call.params->id, clean.name, snr,
                        static_cast<int>(rep), metric.name, value, elapsed});
      }
    }
  });

  ResultsTable table;
  table.rows.reserve(ncells * rows_per_cell);
  for (auto& rs : cell_rows)
    table.rows.insert(table.rows.end(), rs.begin(), rs.end());
  for (auto& es : cell_errors)
    table.errors.insert(table.errors.end(), es.begin(), es.end());

  auto key = [](const ResultRow& r) {
    return std::tie(r.method, r.param_set_id, r.signal, r.snr_db, r.repetition,
                    r.metric);
  };
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
  return table;
}

std::vector<MethodAdapter> builtin_methods(BenchTask task) {
  std::vector<MethodAdapter> out;
  auto add = [&](const std::string& name, MethodFn fn, nlohmann::json dflt) {
    MethodAdapter m;
    m.name = name;
    m.task = task;
    m.fn = std::move(fn);
    m.param_sets.push_back({"p0", std::move(dflt)});
    out.push_back(std::move(m));
  };
  if (task == BenchTask::denoising) {
    add("t-hard",
        [](std::span<const double> x, const Signal&, const nlohmann::json& p,
           std::uint64_t) {
          MethodOutput o;
          o.denoised =
              threshold_denoise(x, ThresholdKind::hard, get_or(p, "c", 3.0)).samples;
          return o;
        },
        {{"c", 3.0}});
    add("t-soft",
        [](std::span<const double> x, const Signal&, const nlohmann::json& p,
           std::uint64_t) {
          MethodOutput o;
          o.denoised =
              threshold_denoise(x, ThresholdKind::garrote, get_or(p, "c", 2.0)).samples;
          return o;
        },
        {{"c", 2.0}});
    add("es",
        [](std::span<const double> x, const Signal&, const nlohmann::json& p,
           std::uint64_t seed) {
          MethodOutput o;
          o.denoised = empty_space_denoise(x, get_scale(p, "r0"),
                                           get_or_int(p, "m", 199), seed)
                           .samples;
          return o;
        },
        {{"r0", "auto"}, {"m", 199}});
    add("dt",
        [](std::span<const double> x, const Signal&, const nlohmann::json& p,
           std::uint64_t seed) {
          MethodOutput o;
          o.denoised = dt_denoise(x, get_scale(p, "l_max"), get_or_int(p, "m", 199),
                                  seed)
                           .samples;
          return o;
        },
        {{"l_max", "auto"}, {"m", 199}});
    add("sst-rd",
        [](std::span<const double> x, const Signal& clean, const nlohmann::json& p,
           std::uint64_t) {
          MethodOutput o;
          int J = get_or_int(p, "J", clean.component_count > 0 ? clean.component_count : 1);
          o.denoised = sst_rd_denoise(x, J, get_or_int(p, "epsilon", -1),
                                      get_or(p, "mu", 0.5))
                           .samples;
          return o;
        },
        {{"J", nullptr}, {"epsilon", nullptr}, {"mu", 0.5}});
  } else {
    auto detect_with = [](TestKind kind) {
      return [kind](std::span<const double> x, const Signal&, const nlohmann::json& p,
                    std::uint64_t seed) {
        MethodOutput o;
        o.detected = detect_signal(x, kind, detection_config(p),
                                   get_or_int(p, "m", 199), seed);
        return o;
      };
    };
    add("envelope", detect_with(TestKind::envelope),
        {{"m", 199}, {"k", 10}, {"r_mc", 1.2}, {"p", 2.0}});
    add("mad", detect_with(TestKind::mad), {{"m", 199}, {"k", 10}});
    add("rank", detect_with(TestKind::rank),
        {{"m", 199}, {"alpha", 0.05}, {"r_lo", 0.65}, {"r_hi", 1.05}});
  }
  return out;
}

std::vector<Metric> default_metrics(BenchTask task) {
  std::vector<Metric> out;
  if (task == BenchTask::denoising) {
    out.push_back({"qrf", [](const Signal& clean, const MethodOutput& o,
                             std::span<const double>) {
                     std::vector<double> ref = real_part(clean.samples);
                     return qrf(std::span<const double>(ref),
                                std::span<const double>(o.denoised));
                   }});
    out.push_back({"cc", [](const Signal& clean, const MethodOutput& o,
                            std::span<const double>) {
                     std::vector<double> ref = real_part(clean.samples);
                     return corr_coeff(std::span<const double>(ref),
                                       std::span<const double>(o.denoised));
                   }});
  } else {
    out.push_back({"detected", [](const Signal&, const MethodOutput& o,
                                  std::span<const double>) {
                     return o.detected ? 1.0 : 0.0;
                   }});
  }
  return out;
}

std::vector<MethodAdapter> select_methods(const BenchmarkConfig& cfg) {
  std::vector<MethodAdapter> registry = builtin_methods(cfg.task);
  if (!cfg.method_params.is_object() || cfg.method_params.empty())
    throw std::invalid_argument("config: method_params must name at least one method");
  std::vector<MethodAdapter> out;
  for (const auto& [name, raw] : cfg.method_params.items()) {
    auto it = std::find_if(registry.begin(), registry.end(),
                           [&](const MethodAdapter& m) { return m.name == name; });
    if (it == registry.end())
      throw std::invalid_argument("config: unknown method: " + name);
    MethodAdapter m = *it;
    m.param_sets.clear();
    nlohmann::json list = raw.is_array() ? raw : nlohmann::json::array({raw});
    if (list.empty()) list.push_back(nlohmann::json::object());
    for (std::size_t i = 0; i < list.size(); ++i)
      m.param_sets.push_back({"p" + std::to_string(i), list[i]});
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(),
            [](const MethodAdapter& a, const MethodAdapter& b) { return a.name < b.name; });
  return out;
}

BenchmarkConfig parse_config(const nlohmann::json& j) {
  BenchmarkConfig cfg;
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  std::string task = j.value("task", std::string("denoising"));
  if (task == "denoising")
    cfg.task = BenchTask::denoising;
  else if (task == "detection")
    cfg.task = BenchTask::detection;
  else
    throw std::invalid_argument("config: task must be denoising or detection");
  if (!j.contains("signal_names"))
    throw std::invalid_argument("config: missing signal_names");
  cfg.signal_names = j.at("signal_names").get<std::vector<std::string>>();
  cfg.N = j.value("N", 512);
  if (!j.contains("snr_db_list"))
    throw std::invalid_argument("config: missing snr_db_list");
  cfg.snr_db_list = j.at("snr_db_list").get<std::vector<double>>();
  cfg.repetitions = j.value("repetitions", 1);
  cfg.base_seed = j.value("base_seed", std::uint64_t{1});
  cfg.workers = j.value("workers", 1);
  cfg.method_params = j.value("method_params", nlohmann::json::object());
  return cfg;
}

}  // namespace tfz
