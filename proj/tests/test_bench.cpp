#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tfz/bench.hpp"
#include "tfz/rng.hpp"
#include "tfz/signal_bank.hpp"

namespace {

using tfz::cd;
using json = nlohmann::json;

tfz::MethodAdapter echo_adapter(const std::string& name) {
  tfz::MethodAdapter m;
  m.name = name;
  m.task = tfz::BenchTask::denoising;
  m.fn = [](std::span<const double> x, const tfz::Signal&, const json&, std::uint64_t) {
    tfz::MethodOutput o;
    o.denoised.assign(x.begin(), x.end());
    return o;
  };
  m.param_sets.push_back({"p0", json::object()});
  return m;
}

bool same_rows_ignoring_runtime(const std::vector<tfz::ResultRow>& a,
                                const std::vector<tfz::ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.method != y.method || x.param_set_id != y.param_set_id ||
        x.signal != y.signal || x.snr_db != y.snr_db || x.repetition != y.repetition ||
        x.metric != y.metric)
      return false;
    if (std::isnan(x.value) != std::isnan(y.value)) return false;
    if (!std::isnan(x.value) && x.value != y.value) return false;
  }
  return true;
}

bool rows_sorted(const std::vector<tfz::ResultRow>& rows) {
  auto key = [](const tfz::ResultRow& r) {
    return std::tie(r.method, r.param_set_id, r.signal, r.snr_db, r.repetition, r.metric);
  };
  for (size_t i = 1; i < rows.size(); ++i)
    if (key(rows[i]) < key(rows[i - 1])) return false;
  return true;
}

std::vector<tfz::MethodAdapter> pick(std::vector<tfz::MethodAdapter> registry,
                                     std::initializer_list<const char*> names) {
  std::vector<tfz::MethodAdapter> out;
  for (const char* n : names)
    for (auto& m : registry)
      if (m.name == n) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("bench: qrf pinned values and error paths") {
  std::vector<double> clean = {10.0, 0.0, 0.0, 0.0};
  CHECK(tfz::qrf(clean, clean) == 300.0);
  std::vector<double> off_by_one = {9.0, 0.0, 0.0, 0.0};
  CHECK(tfz::qrf(clean, off_by_one) == 20.0);  // 10 log10(100 / 1)
  std::vector<double> zeros(4, 0.0);
  CHECK(tfz::qrf(clean, zeros) == 0.0);

  // Near-exact reconstruction (one ulp off) saturates at the +300 dB cap.
  std::vector<double> nearly = {10.0 + 1e-15, 0.0, 0.0, 0.0};
  CHECK(tfz::qrf(clean, nearly) == 300.0);

  std::vector<cd> cclean = {{3.0, 4.0}};
  std::vector<cd> czero = {{0.0, 0.0}};
  CHECK(tfz::qrf(cclean, cclean) == 300.0);
  CHECK(tfz::qrf(cclean, czero) == 0.0);

  std::vector<double> shorter = {1.0};
  CHECK_THROWS_AS(tfz::qrf(clean, shorter), std::invalid_argument);
  CHECK_THROWS_AS(tfz::qrf(zeros, clean), std::invalid_argument);
}

TEST_CASE("bench: correlation coefficient conventions") {
  std::vector<double> x = {1.0, -2.0, 3.0, 0.5};
  CHECK(tfz::corr_coeff(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> x3 = {3.0, -6.0, 9.0, 1.5};
  CHECK(tfz::corr_coeff(x, x3) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> neg = {-1.0, 2.0, -3.0, -0.5};
  CHECK(tfz::corr_coeff(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));

  std::vector<double> e1 = {1.0, 0.0};
  std::vector<double> e2 = {0.0, 1.0};
  CHECK(tfz::corr_coeff(e1, e2) == 0.0);
  std::vector<double> zeros(4, 0.0);
  CHECK(tfz::corr_coeff(x, zeros) == 0.0);  // zero-norm estimate convention
  CHECK_THROWS_AS(tfz::corr_coeff(zeros, x), std::invalid_argument);
  CHECK_THROWS_AS(tfz::corr_coeff(e1, x), std::invalid_argument);

  tfz::CounterRng rng(31);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(16), b(16);
    for (int i = 0; i < 16; ++i) {
      a[static_cast<size_t>(i)] = rng.next_gaussian();
      b[static_cast<size_t>(i)] = rng.next_gaussian();
    }
    double c = tfz::corr_coeff(a, b);
    CHECK(c >= -1.0 - 1e-12);
    CHECK(c <= 1.0 + 1e-12);
  }

  std::vector<cd> ca = {{1.0, 1.0}, {0.0, -2.0}};
  CHECK(tfz::corr_coeff(ca, ca) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bench: detection power is the hit fraction") {
  std::vector<bool> outcomes(20, false);
  for (int i = 0; i < 17; ++i) outcomes[static_cast<size_t>(i)] = true;
  CHECK(tfz::detection_power(outcomes) == 0.85);
  CHECK(tfz::detection_power({false, false}) == 0.0);
  CHECK(tfz::detection_power({true}) == 1.0);
  CHECK_THROWS_AS(tfz::detection_power({}), std::invalid_argument);
}

TEST_CASE("bench: run is deterministic and worker-count invariant") {
  unsetenv("TFZ_WORKERS");
  tfz::BenchmarkConfig cfg;
  cfg.task = tfz::BenchTask::denoising;
  cfg.signal_names = {"LinearChirp"};
  cfg.N = 128;
  cfg.snr_db_list = {10.0, 20.0};
  cfg.repetitions = 2;
  cfg.base_seed = 7;
  cfg.workers = 1;
  auto methods = pick(tfz::builtin_methods(cfg.task), {"t-hard", "t-soft"});
  methods.push_back(echo_adapter("echo"));
  auto metrics = tfz::default_metrics(cfg.task);

  tfz::ResultsTable a = tfz::run_benchmark(cfg, methods, metrics);
  // methods x param_sets x signals x snrs x reps x metrics
  CHECK(a.rows.size() == 3u * 1u * 1u * 2u * 2u * 2u);
  CHECK(a.errors.empty());
  CHECK(rows_sorted(a.rows));
  for (const auto& r : a.rows) {
    CHECK(std::isfinite(r.value));
    CHECK(r.runtime_s >= 0.0);
  }

  tfz::ResultsTable b = tfz::run_benchmark(cfg, methods, metrics);
  CHECK(same_rows_ignoring_runtime(a.rows, b.rows));

  cfg.workers = 4;
  tfz::ResultsTable c = tfz::run_benchmark(cfg, methods, metrics);
  CHECK(same_rows_ignoring_runtime(a.rows, c.rows));

  // The echo adapter returns the noisy input, so qrf(clean, noisy) at
  // 20 dB must beat the same row at 10 dB.
  auto value_of = [&](const tfz::ResultsTable& t, double snr) {
    for (const auto& r : t.rows)
      if (r.method == "echo" && r.metric == "qrf" && r.snr_db == snr &&
          r.repetition == 0)
        return r.value;
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK(value_of(a, 20.0) > value_of(a, 10.0));
}

TEST_CASE("bench: every method sees the same seeded noise per cell") {
  unsetenv("TFZ_WORKERS");
  struct Record {
    std::map<std::tuple<std::string, double, int>, std::vector<double>> inputs;
    std::map<std::tuple<std::string, double, int>, std::uint64_t> seeds;
    int tag_mismatches = 0;
  };
  auto rec_a = std::make_shared<Record>();
  auto rec_b = std::make_shared<Record>();

  tfz::BenchmarkConfig cfg;
  cfg.task = tfz::BenchTask::denoising;
  cfg.signal_names = {"LinearChirp", "McDoubleLinear"};
  cfg.N = 96;
  cfg.snr_db_list = {5.0, 15.0};
  cfg.repetitions = 2;
  cfg.base_seed = 42;
  cfg.workers = 1;

  auto make_rec = [&](const std::string& name, std::shared_ptr<Record> rec) {
    tfz::MethodAdapter m;
    m.name = name;
    m.fn = [rec](std::span<const double> x, const tfz::Signal& clean, const json& p,
                 std::uint64_t seed) {
      if (p.value("tag", 0) != 42) rec->tag_mismatches += 1;
      // Repetition index is recoverable by insertion count per (signal,snr);
      // the noisy vector itself is unique per cell, so key on its bytes via
      // the first call order: store under (signal, snr=0, running index).
      int idx = 0;
      while (rec->inputs.count({clean.name, 0.0, idx})) ++idx;
      rec->inputs[{clean.name, 0.0, idx}] = std::vector<double>(x.begin(), x.end());
      rec->seeds[{clean.name, 0.0, idx}] = seed;
      tfz::MethodOutput o;
      o.denoised.assign(x.begin(), x.end());
      return o;
    };
    m.param_sets.push_back({"p0", json{{"tag", 42}}});
    return m;
  };

  std::vector<tfz::MethodAdapter> methods = {make_rec("reca", rec_a),
                                             make_rec("recb", rec_b)};
  auto metrics = tfz::default_metrics(cfg.task);
  tfz::ResultsTable t = tfz::run_benchmark(cfg, methods, metrics);
  CHECK(t.errors.empty());
  CHECK(rec_a->tag_mismatches == 0);
  CHECK(rec_b->tag_mismatches == 0);

  // Paired design: both adapters saw byte-identical noisy vectors.
  REQUIRE(rec_a->inputs.size() == 8);  // 2 signals x 2 snrs x 2 reps
  REQUIRE(rec_b->inputs.size() == 8);
  for (const auto& [key, va] : rec_a->inputs) {
    REQUIRE(rec_b->inputs.count(key) == 1);
    CHECK(va == rec_b->inputs.at(key));
    // Per-call seeds differ between methods (independent internal streams).
    CHECK(rec_a->seeds.at(key) != rec_b->seeds.at(key));
  }

  // The noise stream for cell (si, vi, rep) is pinned to
  // derive_seed(base_seed, si, vi, rep) added to the clean signal.
  std::vector<std::vector<double>> expected;
  for (size_t si = 0; si < cfg.signal_names.size(); ++si) {
    tfz::Signal clean = tfz::make_signal(cfg.signal_names[si], cfg.N);
    for (size_t vi = 0; vi < cfg.snr_db_list.size(); ++vi)
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        tfz::NoisySignal ns = tfz::add_noise_at_snr(
            clean, cfg.snr_db_list[vi],
            tfz::derive_seed(cfg.base_seed, si, vi, static_cast<std::uint64_t>(rep)));
        std::vector<double> re(ns.samples.size());
        for (size_t i = 0; i < re.size(); ++i) re[i] = ns.samples[i].real();
        expected.push_back(std::move(re));
      }
  }
  std::vector<std::vector<double>> seen;
  for (const auto& [key, v] : rec_a->inputs) seen.push_back(v);
  // Both lists cover the same 8 cells; compare as multisets.
  std::sort(expected.begin(), expected.end());
  std::sort(seen.begin(), seen.end());
  CHECK(expected == seen);
}

TEST_CASE("bench: a failing adapter yields NaN rows and the run continues") {
  unsetenv("TFZ_WORKERS");
  tfz::BenchmarkConfig cfg;
  cfg.task = tfz::BenchTask::denoising;
  cfg.signal_names = {"LinearChirp"};
  cfg.N = 96;
  cfg.snr_db_list = {10.0};
  cfg.repetitions = 2;
  cfg.base_seed = 3;
  cfg.workers = 1;

  // Fails on every second call; with one worker that is exactly one of the
  // two repetitions.
  auto boom_calls = std::make_shared<std::atomic<int>>(0);
  tfz::MethodAdapter boom;
  boom.name = "boom";
  boom.fn = [boom_calls](std::span<const double> x, const tfz::Signal&, const json&,
                         std::uint64_t) {
    if (boom_calls->fetch_add(1) % 2 == 1) throw std::runtime_error("kaboom");
    tfz::MethodOutput o;
    o.denoised.assign(x.begin(), x.end());
    return o;
  };
  boom.param_sets.push_back({"p0", json::object()});

  tfz::MethodAdapter bad_len;
  bad_len.name = "badlen";
  bad_len.fn = [](std::span<const double>, const tfz::Signal&, const json&,
                  std::uint64_t) {
    tfz::MethodOutput o;
    o.denoised.assign(3, 0.0);  // wrong length
    return o;
  };
  bad_len.param_sets.push_back({"p0", json::object()});

  std::vector<tfz::MethodAdapter> methods = {boom, bad_len, echo_adapter("ok")};
  auto metrics = tfz::default_metrics(cfg.task);
  tfz::ResultsTable t = tfz::run_benchmark(cfg, methods, metrics);

  // Row count is invariant under failures: 3 methods x 2 reps x 2 metrics.
  CHECK(t.rows.size() == 12);
  CHECK(rows_sorted(t.rows));
  int nan_boom = 0, ok_rows = 0, badlen_nan = 0;
  for (const auto& r : t.rows) {
    if (r.method == "boom" && std::isnan(r.value)) ++nan_boom;
    if (r.method == "badlen") {
      CHECK(std::isnan(r.value));
      ++badlen_nan;
    }
    if (r.method == "ok") {
      CHECK(std::isfinite(r.value));
      ++ok_rows;
    }
  }
  CHECK(nan_boom == 2);  // one failing rep, two metrics
  CHECK(badlen_nan == 4);
  CHECK(ok_rows == 4);

  bool saw_kaboom = false, saw_len = false;
  for (const auto& e : t.errors) {
    if (e.method == "boom" && e.message.find("kaboom") != std::string::npos)
      saw_kaboom = true;
    if (e.method == "badlen" && e.message.find("length mismatch") != std::string::npos)
      saw_len = true;
    CHECK(e.signal == "LinearChirp");
  }
  CHECK(saw_kaboom);
  CHECK(saw_len);
}

TEST_CASE("bench: serial_only adapters never overlap their own calls") {
  unsetenv("TFZ_WORKERS");
  tfz::BenchmarkConfig cfg;
  cfg.task = tfz::BenchTask::denoising;
  cfg.signal_names = {"LinearChirp"};
  cfg.N = 96;
  cfg.snr_db_list = {10.0};
  cfg.repetitions = 8;
  cfg.base_seed = 5;
  cfg.workers = 4;

  auto active = std::make_shared<std::atomic<int>>(0);
  auto overlapped = std::make_shared<std::atomic<bool>>(false);
  tfz::MethodAdapter serial;
  serial.name = "serial";
  serial.serial_only = true;
  serial.fn = [active, overlapped](std::span<const double> x, const tfz::Signal&,
                                   const json&, std::uint64_t) {
    if (active->fetch_add(1) != 0) overlapped->store(true);
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    active->fetch_sub(1);
    tfz::MethodOutput o;
    o.denoised.assign(x.begin(), x.end());
    return o;
  };
  serial.param_sets.push_back({"p0", json::object()});

  std::vector<tfz::MethodAdapter> methods = {serial, echo_adapter("echo")};
  tfz::ResultsTable t = tfz::run_benchmark(cfg, methods, tfz::default_metrics(cfg.task));
  CHECK(t.errors.empty());
  CHECK(t.rows.size() == 2u * 8u * 2u);
  CHECK_FALSE(overlapped->load());
}

TEST_CASE("bench: registry contents and config parsing") {
  auto den = tfz::builtin_methods(tfz::BenchTask::denoising);
  std::vector<std::string> dnames;
  for (const auto& m : den) dnames.push_back(m.name);
  CHECK(dnames == std::vector<std::string>{"t-hard", "t-soft", "es", "dt", "sst-rd"});
  auto det = tfz::builtin_methods(tfz::BenchTask::detection);
  std::vector<std::string> tnames;
  for (const auto& m : det) tnames.push_back(m.name);
  CHECK(tnames == std::vector<std::string>{"envelope", "mad", "rank"});
  for (const auto& m : den) CHECK(m.param_sets.size() == 1);

  json j = {{"task", "detection"},
            {"signal_names", {"LinearChirp", "CosChirp"}},
            {"N", 256},
            {"snr_db_list", {0.0, 10.0}},
            {"repetitions", 5},
            {"base_seed", 99},
            {"workers", 3},
            {"method_params", {{"envelope", {{"m", 99}}}}}};
  tfz::BenchmarkConfig cfg = tfz::parse_config(j);
  CHECK(cfg.task == tfz::BenchTask::detection);
  CHECK(cfg.signal_names.size() == 2);
  CHECK(cfg.N == 256);
  CHECK(cfg.snr_db_list == std::vector<double>{0.0, 10.0});
  CHECK(cfg.repetitions == 5);
  CHECK(cfg.base_seed == 99);
  CHECK(cfg.workers == 3);

  auto selected = tfz::select_methods(cfg);
  REQUIRE(selected.size() == 1);
  CHECK(selected[0].name == "envelope");
  REQUIRE(selected[0].param_sets.size() == 1);
  CHECK(selected[0].param_sets[0].id == "p0");
  CHECK(selected[0].param_sets[0].params.at("m").get<int>() == 99);

  // An array of parameter objects becomes p0, p1, ...; methods sort by name.
  cfg.task = tfz::BenchTask::denoising;
  cfg.method_params = {{"t-hard", json::array({{{"c", 2.0}}, {{"c", 3.0}}})},
                       {"es", {{"r0", 0.8}}}};
  auto multi = tfz::select_methods(cfg);
  REQUIRE(multi.size() == 2);
  CHECK(multi[0].name == "es");
  CHECK(multi[1].name == "t-hard");
  REQUIRE(multi[1].param_sets.size() == 2);
  CHECK(multi[1].param_sets[0].id == "p0");
  CHECK(multi[1].param_sets[1].id == "p1");
  CHECK(multi[1].param_sets[1].params.at("c").get<double>() == 3.0);

  cfg.method_params = {{"no-such-method", json::object()}};
  CHECK_THROWS_AS(tfz::select_methods(cfg), std::invalid_argument);
  cfg.method_params = json::object();
  CHECK_THROWS_AS(tfz::select_methods(cfg), std::invalid_argument);

  json bad_task = j;
  bad_task["task"] = "segmentation";
  CHECK_THROWS_AS(tfz::parse_config(bad_task), std::invalid_argument);
  json no_signals = j;
  no_signals.erase("signal_names");
  CHECK_THROWS_AS(tfz::parse_config(no_signals), std::invalid_argument);
  json minimal = {{"signal_names", {"LinearChirp"}}, {"snr_db_list", {10.0}}};
  tfz::BenchmarkConfig mc = tfz::parse_config(minimal);
  CHECK(mc.task == tfz::BenchTask::denoising);
  CHECK(mc.N == 512);
  CHECK(mc.repetitions == 1);
  CHECK(mc.workers == 1);
  CHECK(mc.base_seed == 1);
}

TEST_CASE("bench: run_benchmark argument validation") {
  tfz::BenchmarkConfig cfg;
  cfg.signal_names = {"LinearChirp"};
  cfg.N = 96;
  cfg.snr_db_list = {10.0};
  cfg.repetitions = 1;
  std::vector<tfz::MethodAdapter> methods = {echo_adapter("echo")};
  auto metrics = tfz::default_metrics(tfz::BenchTask::denoising);

  CHECK_THROWS_AS(tfz::run_benchmark(cfg, {}, metrics), std::invalid_argument);
  CHECK_THROWS_AS(tfz::run_benchmark(cfg, methods, {}), std::invalid_argument);
  tfz::BenchmarkConfig bad = cfg;
  bad.repetitions = 0;
  CHECK_THROWS_AS(tfz::run_benchmark(bad, methods, metrics), std::invalid_argument);
  bad = cfg;
  bad.snr_db_list.clear();
  CHECK_THROWS_AS(tfz::run_benchmark(bad, methods, metrics), std::invalid_argument);
  bad = cfg;
  bad.signal_names.clear();
  CHECK_THROWS_AS(tfz::run_benchmark(bad, methods, metrics), std::invalid_argument);
  tfz::MethodAdapter empty_psets = echo_adapter("nopsets");
  empty_psets.param_sets.clear();
  CHECK_THROWS_AS(tfz::run_benchmark(cfg, {empty_psets}, metrics),
                  std::invalid_argument);
}
