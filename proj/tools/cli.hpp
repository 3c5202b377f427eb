#pragma once

#include "cdfmise/distributions.hpp"
#include "cdfmise/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdfmise::cli {

enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 1,
  exit_validation = 2
};

//! Bad flags, config file or spec strings; maps to exit code 1.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct HGrid
{
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

//! "min:max:count" with min >= 0, max >= min and count >= 1.
HGrid parse_h_grid(const std::string& text);

//! Comma-separated positive integers; "1e6" style is accepted when exact.
std::vector<std::uint64_t> parse_n_list(const std::string& text);

struct RunConfig
{
  std::string command;
  std::string dist_spec;
  std::string kernel_spec;
  std::vector<std::uint64_t> n_list;
  std::optional<HGrid> h_grid;
  std::uint64_t seed = 20240611;
  int reps = 2000;
  std::string output_dir = ".";
  //! "csv" or "csv+svg"; empty picks the command's default.
  std::string format;
  //! Worker threads for Monte Carlo replications (0 = all cores).
  unsigned threads = 0;

  bool dist_given = false;
  bool kernel_given = false;
  bool n_given = false;
  bool reps_given = false;
};

//! Fifteen log-spaced sample sizes from 10 to 10^7.
std::vector<std::uint64_t> figure_n_grid();

struct McCell
{
  std::string dist_spec;
  std::string kernel_spec;
  double h = 0.0;
  std::uint64_t n = 1;
};

struct McRow
{
  McCell cell;
  double exact = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

//! Four pairs (jdlvp with trapezoidal and sinc, normal with normal and sinc),
//! three bandwidths each, n in {25, 100}.
std::vector<McCell> default_mc_suite();

//! Exact MISE against a Monte Carlo estimate for one cell. The cell's
//! master seed is derived from `seed` and `cell_index`.
McRow run_mc_cell(const McCell& cell, int reps, std::uint64_t seed, std::size_t cell_index, unsigned threads = 0);

int cmd_mise_curve(const RunConfig& cfg, std::ostream& out);
int cmd_optimal_bandwidth(const RunConfig& cfg, std::ostream& out);
int cmd_efficiency_curve(const RunConfig& cfg, std::ostream& out);
int cmd_figure2(const RunConfig& cfg, std::ostream& out);
int cmd_figure3(const RunConfig& cfg, std::ostream& out);
int cmd_mc_validate(const RunConfig& cfg, std::ostream& out);
int cmd_constants(const RunConfig& cfg, std::ostream& out);

//! Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

//! Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cdfmise::cli
