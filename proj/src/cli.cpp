#include "tfz/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfz/bench.hpp"
#include "tfz/report.hpp"
#include "tfz/signal_bank.hpp"

namespace tfz {
namespace {

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw CLI::ValidationError("file not found: " + path);
}

int cmd_run(const std::string& config_path, const std::string& out_path, int workers) {
  std::ifstream in(config_path);
  nlohmann::json j = nlohmann::json::parse(in);
  BenchmarkConfig cfg = parse_config(j);
  if (workers > 0) cfg.workers = workers;
  auto methods = select_methods(cfg);
  auto metrics = default_metrics(cfg.task);
  ResultsTable table = run_benchmark(cfg, methods, metrics);
  write_csv(table, out_path);
  std::cout << "wrote " << out_path << " (" << table.rows.size() << " rows, "
            << table.errors.size() << " adapter errors)\n";
  for (const BenchError& e : table.errors)
    std::cerr << "error: " << e.method << "[" << e.param_set_id << "] " << e.signal
              << " snr=" << e.snr_db << " rep=" << e.repetition << ": " << e.message
              << "\n";
  return 0;
}

int cmd_report(const std::string& csv_path, const std::string& format,
               const std::string& out_dir) {
  ResultsTable table = read_csv(csv_path);
  ReportSpec spec;
  std::set<std::pair<std::string, std::string>> method_ids;
  for (const ResultRow& r : table.rows) method_ids.insert({r.method, r.param_set_id});
  spec.bonferroni_comparisons = std::max<int>(1, static_cast<int>(method_ids.size()));
  auto summary = summarize(table, spec);
  ReportFormat fmt = ReportFormat::both;
  if (format == "markdown") fmt = ReportFormat::markdown;
  else if (format == "svg") fmt = ReportFormat::svg_bars;
  else if (format != "both")
    throw CLI::ValidationError("unknown --format: " + format);
  for (const std::string& p : render_report(summary, fmt, out_dir))
    std::cout << "wrote " << p << "\n";
  return 0;
}

int cmd_list_signals() {
  for (const SignalInfo& s : signal_catalog()) {
    std::cout << s.name << "\tJ=" << s.component_count << "\t" << s.default_params
              << "\n\t" << s.description << "\n";
  }
  return 0;
}

int cmd_list_methods() {
  auto dump = [](BenchTask task, const char* label) {
    std::cout << "# " << label << "\n";
    for (const MethodAdapter& m : builtin_methods(task)) {
      std::cout << m.name << "\t" << m.param_sets.front().params.dump();
      if (m.serial_only) std::cout << "\t(serial-only)";
      std::cout << "\n";
    }
  };
  dump(BenchTask::denoising, "denoising");
  dump(BenchTask::detection, "detection");
  return 0;
}

MethodAdapter find_method(BenchTask task, const std::string& name) {
  for (MethodAdapter& m : builtin_methods(task))
    if (m.name == name) return m;
  throw CLI::ValidationError("unknown method: " + name +
                             " (see `tfz list-methods`)");
}

int cmd_denoise(const std::string& wav_path, const std::string& method,
                const std::string& params_text, const std::string& out_path,
                std::uint64_t seed) {
  Signal s = load_wav(wav_path);
  MethodAdapter m = find_method(BenchTask::denoising, method);
  nlohmann::json params = params_text.empty()
                              ? nlohmann::json::object()
                              : nlohmann::json::parse(params_text);
  std::vector<double> x(s.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.samples[i].real();
  MethodOutput out = m.fn(x, s, params, seed);
  write_wav(out_path, out.denoised);
  std::cout << "wrote " << out_path << " (" << out.denoised.size() << " samples)\n";
  return 0;
}

int cmd_detect(const std::string& wav_path, const std::string& test,
               const std::string& params_text, std::uint64_t seed) {
  Signal s = load_wav(wav_path);
  MethodAdapter m = find_method(BenchTask::detection, test);
  nlohmann::json params = params_text.empty()
                              ? nlohmann::json::object()
                              : nlohmann::json::parse(params_text);
  std::vector<double> x(s.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.samples[i].real();
  MethodOutput out = m.fn(x, s, params, seed);
  std::cout << "detected: " << (out.detected ? "true" : "false") << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Time-frequency detection and denoising via spectrogram zeros"};
  app.require_subcommand(1);

  std::string config_path, out_path = "results.csv";
  int workers = 0;
  auto* run = app.add_subcommand("run", "execute a benchmark config, write CSV");
  run->add_option("config", config_path, "JSON benchmark config")->required();
  run->add_option("--out", out_path, "output CSV path");
  run->add_option("--workers", workers, "worker threads (TFZ_WORKERS overrides)");

  std::string csv_path, format = "both", out_dir = "report";
  auto* report = app.add_subcommand("report", "summarize a results CSV");
  report->add_option("csv", csv_path, "results CSV from `run`")->required();
  report->add_option("--format", format, "markdown | svg | both");
  report->add_option("--out-dir", out_dir, "report output directory");

  app.add_subcommand("list-signals", "print the signal catalog");
  app.add_subcommand("list-methods", "print the built-in method registry");

  std::string den_wav, den_method, den_params, den_out = "denoised.wav";
  std::uint64_t den_seed = 1;
  auto* den = app.add_subcommand("denoise", "denoise a mono WAV file");
  den->add_option("wav", den_wav, "input WAV (PCM16 or float32, mono)")->required();
  den->add_option("--method", den_method, "denoising method name")->required();
  den->add_option("--params", den_params, "JSON parameter object");
  den->add_option("--out", den_out, "output WAV path");
  den->add_option("--seed", den_seed, "RNG seed for auto-scale methods");

  std::string det_wav, det_test, det_params;
  std::uint64_t det_seed = 1;
  auto* det = app.add_subcommand("detect", "signal detection test on a WAV file");
  det->add_option("wav", det_wav, "input WAV")->required();
  det->add_option("--test", det_test, "envelope | mad | rank")->required();
  det->add_option("--params", det_params, "JSON parameter object");
  det->add_option("--seed", det_seed, "RNG seed for the null ensemble");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    if (run->parsed()) {
      require_file(config_path);
      return cmd_run(config_path, out_path, workers);
    }
    if (report->parsed()) {
      require_file(csv_path);
      return cmd_report(csv_path, format, out_dir);
    }
    if (app.get_subcommand("list-signals")->parsed()) return cmd_list_signals();
    if (app.get_subcommand("list-methods")->parsed()) return cmd_list_methods();
    if (den->parsed()) {
      require_file(den_wav);
      return cmd_denoise(den_wav, den_method, den_params, den_out, den_seed);
    }
    if (det->parsed()) {
      require_file(det_wav);
      return cmd_detect(det_wav, det_test, det_params, det_seed);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace tfz
