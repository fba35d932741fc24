#pragma once

#include <string>
#include <vector>

#include "tfz/bench.hpp"

namespace tfz {

// Header: method,param_set_id,signal,snr_db,repetition,metric,value,runtime_s
// Doubles print with 17 significant digits, LF line ends, write-to-temp then
// atomic rename.
void write_csv(const ResultsTable& table, const std::string& path);
ResultsTable read_csv(const std::string& path);

enum class IntervalKind { t_mean, clopper_pearson };

struct ReportSpec {
  bool by_method = true;  // grouping keys; at least one must be set
  bool by_signal = true;
  bool by_snr = true;
  double confidence = 0.95;
  int bonferroni_comparisons = 1;
  // t_mean for continuous metrics; the 0/1 "detected" metric always uses
  // Clopper-Pearson regardless of this default.
  IntervalKind interval = IntervalKind::t_mean;
};

struct SummaryRow {
  std::string method;  // empty when not grouped by method
  std::string param_set_id;
  std::string signal;
  double snr_db = 0.0;  // NaN when not grouped by snr
  std::string metric;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;          // rows with finite values
  int nan_count = 0;  // excluded rows
  bool degenerate = false;  // fewer than 2 finite values: no interval
};

// Per metric and group: mean over finite values, interval at the
// Bonferroni-adjusted confidence. NaN rows are excluded and counted.
std::vector<SummaryRow> summarize(const ResultsTable& table, const ReportSpec& spec);

// One table per (signal, metric): methods x SNR, "mean +- half-width" cells.
std::string render_markdown(const std::vector<SummaryRow>& summary);

// Grouped bars (methods within SNR groups) with error bars; one chart.
std::string render_svg_bars(const std::vector<SummaryRow>& summary,
                            const std::string& title);

enum class ReportFormat { markdown, svg_bars, both };

// Writes report.md and/or per-(signal, metric) SVG charts; returns the paths.
std::vector<std::string> render_report(const std::vector<SummaryRow>& summary,
                                       ReportFormat format,
                                       const std::string& out_dir);

}  // namespace tfz
