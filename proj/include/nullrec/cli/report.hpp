#pragma once

// Experiment outputs: metric rows with tolerance rules, auxiliary tables,
// and static SVG line plots.

#include <optional>
#include <string>
#include <vector>

namespace nullrec::cli {

/// info: reported only. max: value <= tolerance. rel: |value - reference| <=
/// tolerance |reference|. abs: |value - reference| <= tolerance.
enum class Rule { info, max, rel, abs };

[[nodiscard]] std::string to_string(Rule rule);

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<double> reference;
  std::optional<double> tolerance;
  Rule rule = Rule::info;
  bool pass = true;
};

[[nodiscard]] Metric make_metric(std::string name, double value, Rule rule,
                                 std::optional<double> tolerance = std::nullopt,
                                 std::optional<double> reference = std::nullopt);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

struct LinePlot {
  std::string name;  // file stem
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

struct ExperimentResult {
  std::vector<Metric> metrics;
  std::vector<Table> tables;
  std::vector<LinePlot> plots;

  [[nodiscard]] bool passed() const;
};

/// %.17g, with "nan"/"inf" spelled out.
[[nodiscard]] std::string format_number(double v);
/// RFC 4180 quoting when needed.
[[nodiscard]] std::string csv_field(const std::string& s);
[[nodiscard]] std::string render_csv(const Table& table);
[[nodiscard]] std::string render_svg(const LinePlot& plot);

/// Downsampled empirical CDF (x sorted, y = i/n) with at most `points` points.
[[nodiscard]] Series ecdf_series(std::string name, std::vector<double> samples,
                                 std::size_t points = 200);

}  // namespace nullrec::cli
