#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace micontrast {

/// Shortest decimal form that parses back to the same double. Locale
/// independent ('.' separator). Non-finite values print as nan / inf / -inf.
std::string format_real(double value);

/// Inverse of format_real. Throws std::invalid_argument on malformed text.
double parse_real(std::string_view text);

/// Header plus rows of already-formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  double real(std::size_t row, std::string_view name) const;
};

/// Cells are written verbatim; they must not contain commas, quotes or newlines.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Standalone SVG line chart: one polyline per series, axes with min/max
/// tick labels and a legend.
std::string render_line_plot(std::string_view title, std::string_view x_label,
                             std::string_view y_label, const std::vector<PlotSeries>& series);

}  // namespace micontrast
