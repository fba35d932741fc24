#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tfz/signal_bank.hpp"

namespace tfz {

enum class BenchTask { denoising, detection };

struct ParamSet {
  std::string id;  // stable per-method index, "p0", "p1", ...
  nlohmann::json params;
};

// Either field is meaningful depending on the adapter's task.
struct MethodOutput {
  std::vector<double> denoised;
  bool detected = false;
};

using MethodFn = std::function<MethodOutput(
    std::span<const double> noisy, const Signal& clean, const nlohmann::json& params,
    std::uint64_t seed)>;

struct MethodAdapter {
  std::string name;
  BenchTask task = BenchTask::denoising;
  MethodFn fn;
  std::vector<ParamSet> param_sets;
  bool serial_only = false;  // scheduler never overlaps calls to this adapter
};

struct BenchmarkConfig {
  BenchTask task = BenchTask::denoising;
  std::vector<std::string> signal_names;
  int N = 512;
  std::vector<double> snr_db_list;
  int repetitions = 1;
  std::uint64_t base_seed = 1;
  int workers = 1;
  // method name -> list of parameter objects; selects and parametrizes
  // adapters from the registry.
  nlohmann::json method_params;
};

struct Metric {
  std::string name;
  std::function<double(const Signal& clean, const MethodOutput& out,
                       std::span<const double> noise)>
      fn;
};

struct ResultRow {
  std::string method;
  std::string param_set_id;
  std::string signal;
  double snr_db = 0.0;
  int repetition = 0;
  std::string metric;
  double value = 0.0;
  double runtime_s = 0.0;
};

struct BenchError {
  std::string method, param_set_id, signal;
  double snr_db;
  int repetition;
  std::string message;
};

struct ResultsTable {
  std::vector<ResultRow> rows;     // sorted by composite key
  std::vector<BenchError> errors;  // annotations for NaN rows
};

// Noise stream for cell (signal si, snr vi, repetition rep) is
// derive_seed(base_seed, si, vi, rep); every method sees the same noisy
// vector. A failing adapter yields NaN rows plus an error note; the run
// continues.
ResultsTable run_benchmark(const BenchmarkConfig& cfg,
                           const std::vector<MethodAdapter>& methods,
                           const std::vector<Metric>& metrics);

double qrf(std::span<const double> clean, std::span<const double> estimate);
double qrf(std::span<const cd> clean, std::span<const cd> estimate);
double corr_coeff(std::span<const double> clean, std::span<const double> estimate);
double corr_coeff(std::span<const cd> clean, std::span<const cd> estimate);
double detection_power(const std::vector<bool>& outcomes);
std::pair<double, double> clopper_pearson(int successes, int trials, double confidence);
double bonferroni_adjust(double confidence, int num_comparisons);

// Built-in adapters: t-hard, t-soft, es, dt, sst-rd (denoising);
// envelope, mad, rank (detection).
std::vector<MethodAdapter> builtin_methods(BenchTask task);
std::vector<Metric> default_metrics(BenchTask task);

// Resolves cfg.method_params against the registry.
std::vector<MethodAdapter> select_methods(const BenchmarkConfig& cfg);

BenchmarkConfig parse_config(const nlohmann::json& j);

}  // namespace tfz
