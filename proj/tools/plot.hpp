#pragma once

#include <string>
#include <vector>

namespace cdfmise::cli {

//! Comma-separated table with a header row.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  //! Header plus rows, '\n' line endings, trailing newline.
  std::string to_string() const;
  //! Index of `name` in the header; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

//! "%.17g" formatting.
std::string format_number(double v);

CsvTable parse_csv(const std::string& text);

struct SeriesSpec
{
  std::string column;
  std::string label;
  bool dashed = false;
  bool open_markers = false;
};

struct PlotSpec
{
  std::string title;
  std::string x_column;
  std::string x_label;
  std::string y_label;
  std::vector<SeriesSpec> series;
  //! Columns holding a constant, drawn as horizontal reference lines.
  std::vector<SeriesSpec> reference_lines;
};

//! Line chart of the named columns against `x_column`. Depends only on the
//! CSV text and the spec.
std::string render_svg(const std::string& csv_text, const PlotSpec& spec);

} // namespace cdfmise::cli
