#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlsgs {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

/// Comma-separated table with a mandatory header row.
class CsvWriter
{
public:
  CsvWriter(std::ostream &out, std::vector<std::string> header);
  /// Throws DimensionMismatch when the cell count differs from the header.
  void row(const std::vector<std::string> &cells);
  std::size_t columns() const noexcept { return columns_; }

private:
  std::ostream &out_;
  std::size_t columns_;
};

struct Series
{
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions
{
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
};

/// Self-contained SVG line chart with markers, axes and a legend.
void write_svg_chart(std::ostream &out, const std::vector<Series> &series,
                     const ChartOptions &options);

/// key = value lines; '#' starts a comment; blank lines are ignored.
/// Throws InvalidInput on malformed lines or repeated keys.
std::map<std::string, std::string> parse_key_values(std::istream &in);
std::map<std::string, std::string> load_key_values(const std::string &path);

}  // namespace nlsgs
