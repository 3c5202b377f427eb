#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cdfmise::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 190.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v, int digits = 2)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double parse_cell(const std::string& s)
{
  if (s.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    return used == s.size() ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Tick step of 1, 2 or 5 times a power of ten giving about five ticks.
double tick_step(double span)
{
  const double raw = span / 5.0;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * p >= raw) {
      return m * p;
    }
  }
  return 10.0 * p;
}

struct Range
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v)
  {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  void pad()
  {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5 * std::max(1e-3, std::abs(lo) * 0.1);
      hi += 0.5 * std::max(1e-3, std::abs(hi) * 0.1);
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

} // namespace

std::string CsvTable::to_string() const
{
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        out += ',';
      }
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) {
    line(r);
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::out_of_range("no CSV column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string format_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable parse_csv(const std::string& text)
{
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
      cells.emplace_back();
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

std::string render_svg(const std::string& csv_text, const PlotSpec& spec)
{
  const CsvTable table = parse_csv(csv_text);
  const std::size_t xc = table.column(spec.x_column);

  auto column_values = [&](const std::string& name) {
    const std::size_t c = table.column(name);
    std::vector<double> v;
    v.reserve(table.rows.size());
    for (const auto& r : table.rows) {
      v.push_back(c < r.size() ? parse_cell(r[c]) : std::numeric_limits<double>::quiet_NaN());
    }
    return v;
  };

  std::vector<double> xs;
  for (const auto& r : table.rows) {
    xs.push_back(xc < r.size() ? parse_cell(r[xc]) : std::numeric_limits<double>::quiet_NaN());
  }
  Range xr;
  Range yr;
  for (double x : xs) {
    xr.add(x);
  }
  std::vector<std::vector<double>> ys;
  for (const auto& s : spec.series) {
    ys.push_back(column_values(s.column));
    for (double y : ys.back()) {
      yr.add(y);
    }
  }
  std::vector<double> refs;
  for (const auto& s : spec.reference_lines) {
    const auto v = column_values(s.column);
    double ref = std::numeric_limits<double>::quiet_NaN();
    for (double y : v) {
      if (std::isfinite(y)) {
        ref = y;
        break;
      }
    }
    refs.push_back(ref);
    yr.add(ref);
  }
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
     << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs_step = tick_step(xr.hi - xr.lo);
  for (double t = std::ceil(xr.lo / xs_step) * xs_step; t <= xr.hi + 1e-12; t += xs_step) {
    const double x = px(t);
    char label[32];
    std::snprintf(label, sizeof label, "%.4g", std::round(t / xs_step) * xs_step);
    os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(x) << "\" y2=\""
       << fixed(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + ph + 18) << "\" text-anchor=\"middle\">" << label
       << "</text>\n";
  }
  const double ys_step = tick_step(yr.hi - yr.lo);
  for (double t = std::ceil(yr.lo / ys_step) * ys_step; t <= yr.hi + 1e-12; t += ys_step) {
    const double y = py(t);
    char label[32];
    std::snprintf(label, sizeof label, "%.4g", std::round(t / ys_step) * ys_step);
    os << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
       << fixed(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">" << label
       << "</text>\n";
  }
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 12)
     << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fixed(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  double legend_y = kTop + 10;
  const double legend_x = kLeft + pw + 15;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!std::isfinite(refs[i])) {
      continue;
    }
    const double y = py(refs[i]);
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft + pw) << "\" y2=\""
       << fixed(y) << "\" stroke=\"gray\" stroke-dasharray=\"" << (spec.reference_lines[i].dashed ? "6,4" : "2,3")
       << "\"/>\n";
    os << "<line x1=\"" << fixed(legend_x) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(legend_x + 24)
       << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    os << "<text x=\"" << fixed(legend_x + 30) << "\" y=\"" << fixed(legend_y + 4) << "\">"
       << escape(spec.reference_lines[i].label) << "</text>\n";
    legend_y += 18;
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    const SeriesSpec& ss = spec.series[s];
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isfinite(xs[i]) && std::isfinite(ys[s][i])) {
        points += fixed(px(xs[i])) + "," + fixed(py(ys[s][i])) + " ";
      }
    }
    if (!points.empty()) {
      points.pop_back();
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (ss.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isfinite(xs[i]) && std::isfinite(ys[s][i])) {
        os << "<circle cx=\"" << fixed(px(xs[i])) << "\" cy=\"" << fixed(py(ys[s][i])) << "\" r=\"3\" stroke=\""
           << color << "\" fill=\"" << (ss.open_markers ? "white" : color) << "\"/>\n";
      }
    }
    os << "<line x1=\"" << fixed(legend_x) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(legend_x + 24)
       << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (ss.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << fixed(legend_x + 30) << "\" y=\"" << fixed(legend_y + 4) << "\">" << escape(ss.label)
       << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace cdfmise::cli
