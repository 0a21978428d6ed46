#include "nlsgs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nlsgs/errors.hpp"

namespace nlsgs {

namespace {

const char *const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string escape_xml(const std::string &s)
{
  std::string out;
  for (const char c : s)
  {
    switch (c)
    {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream &out, std::vector<std::string> header)
  : out_(out), columns_(header.size())
{
  row(header);
}

void CsvWriter::row(const std::vector<std::string> &cells)
{
  if (cells.size() != columns_)
  {
    throw DimensionMismatch("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    out_ << (i ? "," : "") << cells[i];
  }
  out_ << '\n';
}

void write_svg_chart(std::ostream &out, const std::vector<Series> &series,
                     const ChartOptions &opt)
{
  const double left = 70;
  const double right = 150;
  const double top = 40;
  const double bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };

  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto &s : series)
  {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
    {
      if (!std::isfinite(s.y[i]) || (opt.log_x && !(s.x[i] > 0)))
      {
        continue;
      }
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0))
  {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 <= x0)
  {
    x1 = x0 + 1;
  }
  if (y1 <= y0)
  {
    y1 = y0 + 1;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(opt.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k)
  {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double xv = opt.log_x ? std::pow(10.0, fx) : fx;
    const double gx = left + pw * k / 4.0;
    out << "<line x1=\"" << gx << "\" y1=\"" << top + ph << "\" x2=\"" << gx << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << gx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double gy = py(yv);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << gy << "\" x2=\"" << left << "\" y2=\"" << gy
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 10
      << "\" text-anchor=\"middle\">" << escape_xml(opt.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k)
  {
    const auto &s = series[k];
    const char *color = kPalette[k % std::size(kPalette)];
    std::ostringstream path;
    bool pen = false;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
    {
      if (!std::isfinite(s.y[i]) || (opt.log_x && !(s.x[i] > 0)))
      {
        pen = false;
        continue;
      }
      path << (pen ? " L " : " M ") << px(s.x[i]) << ' ' << py(s.y[i]);
      pen = true;
      out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << escape_xml(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

std::map<std::string, std::string> parse_key_values(std::istream &in)
{
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
    {
      throw InvalidInput("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!out.emplace(key, value).second)
    {
      throw InvalidInput("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidInput("cannot open config file '" + path + "'");
  }
  return parse_key_values(in);
}

}  // namespace nlsgs
