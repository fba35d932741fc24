#include "tfz/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "tfz/stats.hpp"

namespace tfz {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

std::string method_label(const SummaryRow& r) {
  if (r.method.empty()) return "(all)";
  if (r.param_set_id.empty() || r.param_set_id == "p0") return r.method;
  return r.method + "[" + r.param_set_id + "]";
}

}  // namespace

void write_csv(const ResultsTable& table, const std::string& path) {
  std::string body = "method,param_set_id,signal,snr_db,repetition,metric,value,runtime_s\n";
  for (const ResultRow& r : table.rows) {
    body += r.method;
    body += ',';
    body += r.param_set_id;
    body += ',';
    body += r.signal;
    body += ',';
    body += fmt17(r.snr_db);
    body += ',';
    body += std::to_string(r.repetition);
    body += ',';
    body += r.metric;
    body += ',';
    body += fmt17(r.value);
    body += ',';
    body += fmt17(r.runtime_s);
    body += '\n';
  }
  atomic_write(path, body);
}

ResultsTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  auto header = split_csv_line(line);
  const std::vector<std::string> expect = {"method", "param_set_id", "signal",
                                           "snr_db", "repetition", "metric",
                                           "value",  "runtime_s"};
  if (header != expect) throw std::runtime_error("unexpected CSV header: " + path);
  ResultsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error("bad CSV row: " + line);
    ResultRow r;
    r.method = f[0];
    r.param_set_id = f[1];
    r.signal = f[2];
    r.snr_db = std::strtod(f[3].c_str(), nullptr);
    r.repetition = std::atoi(f[4].c_str());
    r.metric = f[5];
    r.value = std::strtod(f[6].c_str(), nullptr);
    r.runtime_s = std::strtod(f[7].c_str(), nullptr);
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::vector<SummaryRow> summarize(const ResultsTable& table, const ReportSpec& spec) {
  if (!spec.by_method && !spec.by_signal && !spec.by_snr)
    throw std::invalid_argument("summarize: group_by must be nonempty");
  if (spec.bonferroni_comparisons < 1)
    throw std::invalid_argument("summarize: bonferroni_comparisons < 1");

  using Key = std::tuple<std::string, std::string, std::string, double, std::string>;
  std::map<Key, std::pair<std::vector<double>, int>> groups;  // values, nan count
  for (const ResultRow& r : table.rows) {
    Key k{spec.by_method ? r.method : std::string(),
          spec.by_method ? r.param_set_id : std::string(),
          spec.by_signal ? r.signal : std::string(),
          spec.by_snr ? r.snr_db : kNaN, r.metric};
    // NaN keys break map ordering; use a sentinel instead.
    if (!spec.by_snr) std::get<3>(k) = -1e300;
    auto& g = groups[k];
    if (std::isfinite(r.value))
      g.first.push_back(r.value);
    else
      g.second += 1;
  }

  double conf = bonferroni_adjust(spec.confidence, spec.bonferroni_comparisons);
  std::vector<SummaryRow> out;
  for (const auto& [k, g] : groups) {
    SummaryRow row;
    row.method = std::get<0>(k);
    row.param_set_id = std::get<1>(k);
    row.signal = std::get<2>(k);
    row.snr_db = spec.by_snr ? std::get<3>(k) : kNaN;
    row.metric = std::get<4>(k);
    row.n = static_cast<int>(g.first.size());
    row.nan_count = g.second;
    if (g.first.empty()) {
      row.mean = kNaN;
      row.lo = kNaN;
      row.hi = kNaN;
      row.degenerate = true;
    } else if (row.metric == "detected" ||
               spec.interval == IntervalKind::clopper_pearson) {
      double sum = 0.0;
      for (double v : g.first) sum += v;
      int successes = static_cast<int>(std::llround(sum));
      successes = std::clamp(successes, 0, row.n);
      row.mean = sum / row.n;
      auto [lo, hi] = clopper_pearson(successes, row.n, conf);
      row.lo = lo;
      row.hi = hi;
      row.degenerate = false;
    } else {
      auto [mean, hw] = mean_t_interval(g.first, conf);
      row.mean = mean;
      if (g.first.size() < 2) {
        row.degenerate = true;
        row.lo = mean;
        row.hi = mean;
      } else {
        row.degenerate = false;
        row.lo = mean - hw;
        row.hi = mean + hw;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string render_markdown(const std::vector<SummaryRow>& summary) {
  std::string md = "# Benchmark report\n";
  if (summary.empty()) {
    md += "\n_No data: the summary is empty._\n";
    return md;
  }
  // (signal, metric) -> method label -> snr -> row
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::map<double, const SummaryRow*>>>
      tables;
  std::map<std::pair<std::string, std::string>, std::set<double>> snrs;
  for (const SummaryRow& r : summary) {
    auto key = std::make_pair(r.signal, r.metric);
    tables[key][method_label(r)][r.snr_db] = &r;
    snrs[key].insert(r.snr_db);
  }
  for (const auto& [key, methods] : tables) {
    const auto& [signal, metric] = key;
    md += "\n## " + (signal.empty() ? std::string("(all signals)") : signal) +
          " - " + metric + "\n\n";
    const auto& cols = snrs[key];
    md += "| method |";
    for (double s : cols)
      md += std::isnan(s) ? " (all SNRs) |" : " " + fmt4(s) + " dB |";
    md += "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& [label, by_snr] : methods) {
      md += "| " + label + " |";
      for (double s : cols) {
        auto it = by_snr.find(s);
        if (it == by_snr.end()) {
          md += " - |";
          continue;
        }
        const SummaryRow* r = it->second;
        std::string cell = fmt4(r->mean);
        if (r->degenerate)
          cell += " (n=" + std::to_string(r->n) + ")";
        else
          cell += " ± " + fmt4((r->hi - r->lo) / 2.0);
        if (r->nan_count > 0) cell += " [" + std::to_string(r->nan_count) + " NaN]";
        md += " " + cell + " |";
      }
      md += "\n";
    }
  }
  return md;
}

std::string render_svg_bars(const std::vector<SummaryRow>& summary,
                            const std::string& title) {
  const int W = 860, H = 420;
  const int ml = 70, mr = 180, mt = 50, mb = 50;
  const double plot_w = W - ml - mr, plot_h = H - mt - mb;

  std::vector<std::string> methods;
  std::vector<double> snr_list;
  for (const SummaryRow& r : summary) {
    std::string lbl = method_label(r);
    if (std::find(methods.begin(), methods.end(), lbl) == methods.end())
      methods.push_back(lbl);
    if (std::find(snr_list.begin(), snr_list.end(), r.snr_db) == snr_list.end())
      snr_list.push_back(r.snr_db);
  }
  std::sort(snr_list.begin(), snr_list.end(),
            [](double a, double b) { return (std::isnan(a) ? -1e301 : a) <
                                            (std::isnan(b) ? -1e301 : b); });

  double vmin = 0.0, vmax = 0.0;
  bool any = false;
  for (const SummaryRow& r : summary) {
    if (!std::isfinite(r.mean)) continue;
    double lo = std::isfinite(r.lo) ? r.lo : r.mean;
    double hi = std::isfinite(r.hi) ? r.hi : r.mean;
    if (!any) {
      vmin = std::min(0.0, lo);
      vmax = std::max(0.0, hi);
      any = true;
    } else {
      vmin = std::min(vmin, lo);
      vmax = std::max(vmax, hi);
    }
  }
  if (!any) {
    vmin = 0.0;
    vmax = 1.0;
  }
  if (vmax - vmin < 1e-12) vmax = vmin + 1.0;
  auto y_of = [&](double v) { return mt + plot_h * (vmax - v) / (vmax - vmin); };

  static const char* palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                  "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};
  const std::size_t npal = sizeof(palette) / sizeof(palette[0]);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n";

  // Axes and the zero line.
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << y_of(0.0) << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << y_of(0.0) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double v = vmin + (vmax - vmin) * t / 4.0;
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y_of(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt4(v) << "</text>\n";
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << y_of(v) << "\" x2=\"" << ml
        << "\" y2=\"" << y_of(v) << "\" stroke=\"black\"/>\n";
  }

  const std::size_t G = snr_list.size(), M = methods.size();
  double group_w = plot_w / std::max<std::size_t>(G, 1);
  double bar_w = 0.8 * group_w / std::max<std::size_t>(M, 1);
  for (std::size_t gi = 0; gi < G; ++gi) {
    double gx = ml + gi * group_w + 0.1 * group_w;
    std::string lbl = std::isnan(snr_list[gi]) ? "(all)" : fmt4(snr_list[gi]) + " dB";
    svg << "<text x=\"" << ml + gi * group_w + group_w / 2 << "\" y=\"" << H - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(lbl) << "</text>\n";
    for (std::size_t mi = 0; mi < M; ++mi) {
      const SummaryRow* row = nullptr;
      for (const SummaryRow& r : summary) {
        bool same_snr = (std::isnan(r.snr_db) && std::isnan(snr_list[gi])) ||
                        r.snr_db == snr_list[gi];
        if (same_snr && method_label(r) == methods[mi]) {
          row = &r;
          break;
        }
      }
      if (!row || !std::isfinite(row->mean)) continue;
      double x = gx + mi * bar_w;
      double y1 = y_of(std::max(row->mean, 0.0));
      double y2 = y_of(std::min(row->mean, 0.0));
      svg << "<rect x=\"" << x << "\" y=\"" << y1 << "\" width=\"" << bar_w * 0.9
          << "\" height=\"" << std::max(1.0, y2 - y1) << "\" fill=\""
          << palette[mi % npal] << "\"/>\n";
      if (std::isfinite(row->lo) && std::isfinite(row->hi) && !row->degenerate) {
        double cx = x + bar_w * 0.45;
        svg << "<line x1=\"" << cx << "\" y1=\"" << y_of(row->lo) << "\" x2=\"" << cx
            << "\" y2=\"" << y_of(row->hi)
            << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        svg << "<line x1=\"" << cx - 4 << "\" y1=\"" << y_of(row->lo) << "\" x2=\""
            << cx + 4 << "\" y2=\"" << y_of(row->lo) << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << cx - 4 << "\" y1=\"" << y_of(row->hi) << "\" x2=\""
            << cx + 4 << "\" y2=\"" << y_of(row->hi) << "\" stroke=\"black\"/>\n";
      }
    }
  }

  for (std::size_t mi = 0; mi < M; ++mi) {
    double ly = mt + 18.0 * mi;
    svg << "<rect x=\"" << W - mr + 10 << "\" y=\"" << ly << "\" width=\"12\" "
        << "height=\"12\" fill=\"" << palette[mi % npal] << "\"/>\n";
    svg << "<text x=\"" << W - mr + 28 << "\" y=\"" << ly + 10
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(methods[mi])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> render_report(const std::vector<SummaryRow>& summary,
                                       ReportFormat format,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  if (format == ReportFormat::markdown || format == ReportFormat::both) {
    std::string path = (fs::path(out_dir) / "report.md").string();
    atomic_write(path, render_markdown(summary));
    written.push_back(path);
  }
  if (format == ReportFormat::svg_bars || format == ReportFormat::both) {
    std::map<std::pair<std::string, std::string>, std::vector<SummaryRow>> charts;
    for (const SummaryRow& r : summary) charts[{r.signal, r.metric}].push_back(r);
    if (charts.empty()) {
      std::string path = (fs::path(out_dir) / "report_empty.svg").string();
      atomic_write(path, render_svg_bars({}, "no data"));
      written.push_back(path);
    }
    for (const auto& [key, rows] : charts) {
      const auto& [signal, metric] = key;
      std::string title =
          (signal.empty() ? std::string("all signals") : signal) + ": " + metric;
      std::string path =
          (fs::path(out_dir) / ("report_" + slug(signal) + "_" + slug(metric) + ".svg"))
              .string();
      atomic_write(path, render_svg_bars(rows, title));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace tfz
