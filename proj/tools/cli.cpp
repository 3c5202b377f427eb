#include "cli.hpp"

#include "plot.hpp"

#include "cdfmise/bandwidth.hpp"
#include "cdfmise/errors.hpp"
#include "cdfmise/estimator.hpp"
#include "cdfmise/mise.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cdfmise::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kFlagZ = 4.0;

std::string fmt(double v)
{
  return format_number(v);
}

std::string fmt(std::uint64_t v)
{
  return std::to_string(v);
}

Distribution parse_dist(const std::string& spec)
{
  try {
    return distribution_from_spec(spec);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
}

Kernel parse_kernel(const std::string& spec)
{
  try {
    return kernel_from_name(spec);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
}

bool wants_svg(const RunConfig& cfg, bool figure)
{
  if (cfg.format.empty()) {
    return figure;
  }
  return cfg.format == "csv+svg";
}

std::string output_path(const RunConfig& cfg, const std::string& file)
{
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / file).string();
}

void emit(const RunConfig& cfg,
          const std::string& stem,
          const CsvTable& table,
          bool svg,
          const PlotSpec& plot,
          std::ostream& out)
{
  const std::string csv = table.to_string();
  const std::string csv_path = output_path(cfg, stem + ".csv");
  write_file_atomic(csv_path, csv);
  out << "wrote " << csv_path << '\n';
  if (svg) {
    const std::string svg_path = output_path(cfg, stem + ".svg");
    write_file_atomic(svg_path, render_svg(csv, plot));
    out << "wrote " << svg_path << '\n';
  }
}

double log10n(std::uint64_t n)
{
  return std::log10(static_cast<double>(n));
}

std::vector<std::uint64_t> n_or(const RunConfig& cfg, std::vector<std::uint64_t> fallback)
{
  return cfg.n_list.empty() ? fallback : cfg.n_list;
}

BandwidthSearch search_for(const RunConfig& cfg, const Distribution& dist)
{
  BandwidthSearch s = default_search(dist);
  if (cfg.h_grid) {
    if (!(cfg.h_grid->max > 0.0)) {
      throw UsageError("--h-grid max must be positive for a bandwidth search");
    }
    s.h_max = cfg.h_grid->max;
    s.grid_size = std::max(64, cfg.h_grid->count);
  }
  return s;
}

void print_table(const CsvTable& t, std::ostream& out)
{
  out << t.to_string();
}

} // namespace

std::vector<double> HGrid::values() const
{
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    v.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
  }
  if (count > 1) {
    v.back() = max;
  }
  return v;
}

HGrid parse_h_grid(const std::string& text)
{
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ':')) {
    parts.push_back(item);
  }
  if (parts.size() != 3) {
    throw UsageError("--h-grid expects min:max:count, got '" + text + "'");
  }
  HGrid g;
  auto num = [&](const std::string& s, double& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw UsageError("--h-grid: malformed number '" + s + "'");
    }
  };
  num(parts[0], g.min);
  num(parts[1], g.max);
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), g.count);
  if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size()) {
    throw UsageError("--h-grid: malformed count '" + parts[2] + "'");
  }
  if (g.count < 1) {
    throw UsageError("--h-grid: the grid is empty (count must be at least 1)");
  }
  if (g.min < 0.0 || g.max < g.min) {
    throw UsageError("--h-grid: need 0 <= min <= max");
  }
  return g;
}

std::vector<std::uint64_t> parse_n_list(const std::string& text)
{
  std::vector<std::uint64_t> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || !(v >= 1.0) || v > 1e15 ||
        v != std::floor(v)) {
      throw UsageError("--n: expected positive integers, got '" + item + "'");
    }
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) {
    throw UsageError("--n: empty list");
  }
  return out;
}

std::vector<std::uint64_t> figure_n_grid()
{
  std::vector<std::uint64_t> n;
  for (int k = 0; k < 15; ++k) {
    n.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, 1.0 + 6.0 * k / 14.0))));
  }
  return n;
}

void write_file_atomic(const std::string& path, const std::string& content)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::runtime_error("cannot open " + tmp + " for writing");
    }
    f << content;
    f.flush();
    if (!f) {
      throw std::runtime_error("write to " + tmp + " failed");
    }
  }
  fs::rename(tmp, path);
}

// --- commands ---------------------------------------------------------------

int cmd_mise_curve(const RunConfig& cfg, std::ostream& out)
{
  const Distribution dist = parse_dist(cfg.dist_spec.empty() ? "jdlvp" : cfg.dist_spec);
  const Kernel kernel = parse_kernel(cfg.kernel_spec.empty() ? "trapezoidal" : cfg.kernel_spec);
  const HGrid grid = cfg.h_grid ? *cfg.h_grid : HGrid{0.0, 1.0, 101};
  const auto hs = grid.values();
  if (hs.empty()) {
    throw UsageError("mise-curve: the h grid is empty");
  }
  for (std::uint64_t n : n_or(cfg, {1000})) {
    CsvTable t;
    t.header = {"h", "iv", "isb", "mise", "method"};
    for (double h : hs) {
      const MiseReport r = mise(dist, kernel, h, n);
      t.rows.push_back({fmt(h), fmt(r.iv), fmt(r.isb), fmt(r.mise), std::string(to_string(r.method))});
    }
    PlotSpec plot;
    plot.title = "MISE(h): " + dist.name() + ", " + std::string(kernel.name()) + " kernel, n = " + fmt(n);
    plot.x_column = "h";
    plot.x_label = "h";
    plot.y_label = "error";
    plot.series = {{"mise", "MISE", false, false}, {"iv", "IV", true, true}, {"isb", "ISB", true, false}};
    emit(cfg, "mise_curve_n" + fmt(n), t, wants_svg(cfg, false), plot, out);
  }
  return exit_ok;
}

int cmd_optimal_bandwidth(const RunConfig& cfg, std::ostream& out)
{
  const Distribution dist = parse_dist(cfg.dist_spec.empty() ? "jdlvp" : cfg.dist_spec);
  const Kernel kernel = parse_kernel(cfg.kernel_spec.empty() ? "trapezoidal" : cfg.kernel_spec);
  const BandwidthSearch search = search_for(cfg, dist);
  CsvTable t;
  t.header = {"n",
              "h_opt",
              "mise_at_opt",
              "mise_at_zero",
              "relative_efficiency",
              "bracket_lo",
              "bracket_hi",
              "grid_points_scanned",
              "refined_tolerance",
              "boundary_flag"};
  std::vector<std::string> warnings;
  for (std::uint64_t n : n_or(cfg, {1000})) {
    const BandwidthResult r = optimal_bandwidth(dist, kernel, n, search);
    const double m0 = dist.psi_f() / static_cast<double>(n);
    t.rows.push_back({fmt(n),
                      fmt(r.h_opt),
                      fmt(r.mise_at_opt),
                      fmt(m0),
                      fmt(r.mise_at_opt / m0),
                      fmt(r.bracket.first),
                      fmt(r.bracket.second),
                      std::to_string(r.grid_points_scanned),
                      fmt(r.refined_tolerance),
                      std::string(to_string(r.boundary_flag))});
    if (!r.warning.empty()) {
      warnings.push_back("n=" + fmt(n) + ": " + r.warning);
    }
  }
  print_table(t, out);
  for (const auto& w : warnings) {
    out << "warning: " << w << '\n';
  }
  PlotSpec plot;
  plot.title = "Optimal bandwidth: " + dist.name() + ", " + std::string(kernel.name());
  plot.x_column = "n";
  plot.x_label = "n";
  plot.y_label = "h_opt";
  plot.series = {{"h_opt", "h_opt", false, false}};
  emit(cfg, "optimal_bandwidth", t, wants_svg(cfg, false), plot, out);
  return exit_ok;
}

int cmd_efficiency_curve(const RunConfig& cfg, std::ostream& out)
{
  const Distribution dist = parse_dist(cfg.dist_spec.empty() ? "jdlvp" : cfg.dist_spec);
  const Kernel kernel = parse_kernel(cfg.kernel_spec.empty() ? "trapezoidal" : cfg.kernel_spec);
  const auto ns = n_or(cfg, figure_n_grid());
  const EfficiencyCurve c = efficiency_curve(dist, kernel, ns, search_for(cfg, dist));
  const double limit = limit_bandwidth(dist, kernel);
  CsvTable t;
  t.header = {"n", "log10_n", "h_opt", "relative_efficiency", "asymptote", "limit_bandwidth"};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    t.rows.push_back({fmt(ns[i]), fmt(log10n(ns[i])), fmt(c.h_opt[i]), fmt(c.rel_eff[i]), fmt(c.asymptote), fmt(limit)});
  }
  PlotSpec plot;
  plot.title = "Relative efficiency: " + dist.name() + ", " + std::string(kernel.name());
  plot.x_column = "log10_n";
  plot.x_label = "log10 n";
  plot.y_label = "MISE(h_opt) / MISE(0)";
  plot.series = {{"relative_efficiency", std::string(kernel.name()), false, false}};
  plot.reference_lines = {{"asymptote", "limit", false, false}};
  emit(cfg, "efficiency_curve", t, wants_svg(cfg, false), plot, out);
  return exit_ok;
}

int cmd_figure2(const RunConfig& cfg, std::ostream& out)
{
  const Distribution dist = parse_dist(cfg.dist_spec.empty() ? "jdlvp" : cfg.dist_spec);
  const Kernel trap = make_trapezoidal_superkernel();
  const Kernel sinc = make_sinc_kernel();
  const auto ns = n_or(cfg, figure_n_grid());
  const BandwidthSearch search = search_for(cfg, dist);
  const EfficiencyCurve ct = efficiency_curve(dist, trap, ns, search);
  const EfficiencyCurve cs = efficiency_curve(dist, sinc, ns, search);
  const double limit = limit_bandwidth(dist, trap);

  CsvTable bw;
  bw.header = {"n", "log10_n", "h_trapezoidal", "h_sinc", "limit"};
  CsvTable eff;
  eff.header = {"n", "log10_n", "eff_trapezoidal", "eff_sinc", "asymptote_trapezoidal", "asymptote_sinc"};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    bw.rows.push_back({fmt(ns[i]), fmt(log10n(ns[i])), fmt(ct.h_opt[i]), fmt(cs.h_opt[i]), fmt(limit)});
    eff.rows.push_back({fmt(ns[i]),
                        fmt(log10n(ns[i])),
                        fmt(ct.rel_eff[i]),
                        fmt(cs.rel_eff[i]),
                        fmt(ct.asymptote),
                        fmt(cs.asymptote)});
  }
  const bool svg = wants_svg(cfg, true);
  PlotSpec p1;
  p1.title = "Optimal bandwidth, " + dist.name();
  p1.x_column = "log10_n";
  p1.x_label = "log10 n";
  p1.y_label = "h_0n";
  p1.series = {{"h_trapezoidal", "trapezoidal", false, false}, {"h_sinc", "sinc", true, true}};
  p1.reference_lines = {{"limit", "S_k/D_f", false, false}};
  emit(cfg, "figure2_bandwidth", bw, svg, p1, out);

  PlotSpec p2;
  p2.title = "Relative efficiency in MISE, " + dist.name();
  p2.x_column = "log10_n";
  p2.x_label = "log10 n";
  p2.y_label = "MISE(h_0n) / MISE(0)";
  p2.series = {{"eff_trapezoidal", "trapezoidal", false, false}, {"eff_sinc", "sinc", true, true}};
  p2.reference_lines = {{"asymptote_trapezoidal", "trapezoidal limit", false, false},
                        {"asymptote_sinc", "sinc limit", true, false}};
  emit(cfg, "figure2_efficiency", eff, svg, p2, out);
  return exit_ok;
}

int cmd_figure3(const RunConfig& cfg, std::ostream& out)
{
  const Distribution dist = parse_dist(cfg.dist_spec.empty() ? "normal:sigma=1" : cfg.dist_spec);
  const auto ns = n_or(cfg, figure_n_grid());
  const BandwidthSearch search = search_for(cfg, dist);
  const EfficiencyCurve cn = efficiency_curve(dist, make_normal_kernel(), ns, search);
  const EfficiencyCurve cs = efficiency_curve(dist, make_sinc_kernel(), ns, search);
  CsvTable eff;
  eff.header = {"n", "log10_n", "eff_normal", "eff_sinc", "h_normal", "h_sinc", "limit"};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    eff.rows.push_back({fmt(ns[i]),
                        fmt(log10n(ns[i])),
                        fmt(cn.rel_eff[i]),
                        fmt(cs.rel_eff[i]),
                        fmt(cn.h_opt[i]),
                        fmt(cs.h_opt[i]),
                        fmt(cn.asymptote)});
  }
  PlotSpec p;
  p.title = "Relative efficiency in MISE, " + dist.name();
  p.x_column = "log10_n";
  p.x_label = "log10 n";
  p.y_label = "MISE(h_0n) / MISE(0)";
  p.series = {{"eff_normal", "normal kernel", false, false}, {"eff_sinc", "sinc", true, true}};
  p.reference_lines = {{"limit", "limit", false, false}};
  emit(cfg, "figure3_efficiency", eff, wants_svg(cfg, true), p, out);
  return exit_ok;
}

std::vector<McCell> default_mc_suite()
{
  std::vector<McCell> cells;
  const std::vector<std::pair<std::string, std::string>> pairs = {
    {"jdlvp", "trapezoidal"}, {"jdlvp", "sinc"}, {"normal:sigma=1", "normal"}, {"normal:sigma=1", "sinc"}};
  for (const auto& [d, k] : pairs) {
    const std::vector<double> hs = d == "jdlvp" ? std::vector<double>{0.25, 0.5, 0.8}
                                                : std::vector<double>{0.2, 0.5, 0.9};
    for (double h : hs) {
      for (std::uint64_t n : {25u, 100u}) {
        cells.push_back({d, k, h, n});
      }
    }
  }
  return cells;
}

McRow run_mc_cell(const McCell& cell, int reps, std::uint64_t seed, std::size_t cell_index, unsigned threads)
{
  const Distribution dist = parse_dist(cell.dist_spec);
  const Kernel kernel = parse_kernel(cell.kernel_spec);
  McRow row;
  row.cell = cell;
  row.exact = mise(dist, kernel, cell.h, cell.n).mise;
  const MonteCarloMise mc = monte_carlo_mise(
    dist, kernel, cell.h, cell.n, reps, replication_seed(seed, cell_index), monte_carlo_quadrature(), threads);
  row.estimate = mc.estimate;
  row.std_error = mc.std_error;
  row.z = (mc.estimate - row.exact) / mc.std_error;
  return row;
}

int cmd_mc_validate(const RunConfig& cfg, std::ostream& out)
{
  if (cfg.reps < 100) {
    throw UsageError("mc-validate needs --reps >= 100");
  }
  std::vector<McCell> cells;
  if (cfg.dist_given || cfg.kernel_given || cfg.n_given || cfg.h_grid) {
    const std::string d = cfg.dist_spec.empty() ? "normal:sigma=1" : cfg.dist_spec;
    const std::string k = cfg.kernel_spec.empty() ? "normal" : cfg.kernel_spec;
    parse_dist(d);
    parse_kernel(k);
    const HGrid grid = cfg.h_grid ? *cfg.h_grid : HGrid{0.5, 0.5, 1};
    for (double h : grid.values()) {
      for (std::uint64_t n : n_or(cfg, {100})) {
        cells.push_back({d, k, h, n});
      }
    }
  } else {
    cells = default_mc_suite();
  }

  CsvTable t;
  t.header = {"distribution", "kernel", "h", "n", "replications", "exact_mise", "mc_estimate", "std_error", "z", "flagged"};
  bool any_flagged = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const McRow r = run_mc_cell(cells[i], cfg.reps, cfg.seed, i, cfg.threads);
    const bool flagged = !(std::abs(r.z) <= kFlagZ);
    any_flagged = any_flagged || flagged;
    t.rows.push_back({parse_dist(r.cell.dist_spec).name(),
                      r.cell.kernel_spec,
                      fmt(r.cell.h),
                      fmt(r.cell.n),
                      std::to_string(cfg.reps),
                      fmt(r.exact),
                      fmt(r.estimate),
                      fmt(r.std_error),
                      fmt(r.z),
                      flagged ? "1" : "0"});
    char line[256];
    std::snprintf(line,
                  sizeof line,
                  "%-18s %-12s h=%-5g n=%-5llu exact=%.6e mc=%.6e se=%.2e z=%+.2f%s\n",
                  parse_dist(r.cell.dist_spec).name().c_str(),
                  r.cell.kernel_spec.c_str(),
                  r.cell.h,
                  static_cast<unsigned long long>(r.cell.n),
                  r.exact,
                  r.estimate,
                  r.std_error,
                  r.z,
                  flagged ? "  FLAGGED" : "");
    out << line << std::flush;
  }
  PlotSpec plot;
  plot.title = "Monte Carlo z-scores";
  plot.x_column = "h";
  plot.x_label = "h";
  plot.y_label = "z";
  plot.series = {{"z", "z", false, false}};
  emit(cfg, "mc_validate", t, wants_svg(cfg, false), plot, out);
  if (any_flagged) {
    out << "validation failed: |z| > " << kFlagZ << " in at least one cell\n";
    return exit_validation;
  }
  return exit_ok;
}

int cmd_constants(const RunConfig& /*cfg*/, std::ostream& out)
{
  const std::vector<Distribution> dists = {make_jdlvp(), make_normal(1.0)};
  const std::vector<Kernel> kernels = {make_normal_kernel(), make_trapezoidal_superkernel(), make_sinc_kernel()};

  CsvTable td;
  td.header = {"distribution", "psi_f", "psi_f_fourier", "psi_f_space", "max_discrepancy", "c_f", "d_f"};
  for (const auto& d : dists) {
    const double pf = psi_f_fourier(d);
    const double ps = psi_f_space(d);
    const double disc = std::max(std::abs(pf - d.psi_f()), std::abs(ps - d.psi_f()));
    td.rows.push_back({d.name(), fmt(d.psi_f()), fmt(pf), fmt(ps), fmt(disc), fmt(d.c_f()), fmt(d.d_f())});
  }
  CsvTable tk;
  tk.header = {"kernel", "psi_k", "psi_k_fourier", "psi_k_space", "max_discrepancy", "s_k", "t_k"};
  for (const auto& k : kernels) {
    const double pf = psi_k(k);
    const double ps = psi_k_space(k);
    const double disc = std::max(std::abs(pf - k.psi_closed()), std::abs(ps - k.psi_closed()));
    tk.rows.push_back({std::string(k.name()), fmt(k.psi_closed()), fmt(pf), fmt(ps), fmt(disc), fmt(k.s_k()), fmt(k.t_k())});
  }
  CsvTable tp;
  tp.header = {"distribution", "kernel", "limit_bandwidth", "asymptotic_efficiency"};
  for (const auto& d : dists) {
    for (const auto& k : kernels) {
      tp.rows.push_back({d.name(),
                         std::string(k.name()),
                         fmt(limit_bandwidth(d, k)),
                         fmt(asymptotic_relative_efficiency(d, k))});
    }
  }
  print_table(td, out);
  out << '\n';
  print_table(tk, out);
  out << '\n';
  print_table(tp, out);
  return exit_ok;
}

// --- entry point -------------------------------------------------------------

namespace {

const std::vector<std::string> kCommands = {
  "mise-curve", "optimal-bandwidth", "efficiency-curve", "figure2", "figure3", "mc-validate", "constants"};

void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& app)
{
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot read config file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw UsageError("config file must hold a JSON object");
  }
  auto given = [&app](const char* flag) { return app.count(flag) > 0; };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") {
        if (cfg.command.empty()) {
          cfg.command = value.get<std::string>();
        }
      } else if (key == "dist") {
        if (!given("--dist")) {
          cfg.dist_spec = value.get<std::string>();
          cfg.dist_given = true;
        }
      } else if (key == "kernel") {
        if (!given("--kernel")) {
          cfg.kernel_spec = value.get<std::string>();
          cfg.kernel_given = true;
        }
      } else if (key == "n") {
        if (!given("--n")) {
          if (value.is_array()) {
            cfg.n_list.clear();
            for (const auto& v : value) {
              cfg.n_list.push_back(parse_n_list(v.is_string() ? v.get<std::string>() : v.dump()).front());
            }
            if (cfg.n_list.empty()) {
              throw UsageError("config: n is empty");
            }
          } else {
            cfg.n_list = parse_n_list(value.is_string() ? value.get<std::string>() : value.dump());
          }
          cfg.n_given = true;
        }
      } else if (key == "h_grid") {
        if (!given("--h-grid")) {
          if (value.is_array()) {
            if (value.size() != 3) {
              throw UsageError("config: h_grid must be [min, max, count]");
            }
            cfg.h_grid = parse_h_grid(value[0].dump() + ":" + value[1].dump() + ":" + value[2].dump());
          } else {
            cfg.h_grid = parse_h_grid(value.get<std::string>());
          }
        }
      } else if (key == "seed") {
        if (!given("--seed")) {
          cfg.seed = value.get<std::uint64_t>();
        }
      } else if (key == "reps") {
        if (!given("--reps")) {
          cfg.reps = value.get<int>();
          cfg.reps_given = true;
        }
      } else if (key == "out") {
        if (!given("--out")) {
          cfg.output_dir = value.get<std::string>();
        }
      } else if (key == "format") {
        if (!given("--format")) {
          cfg.format = value.get<std::string>();
          if (cfg.format != "csv" && cfg.format != "csv+svg") {
            throw UsageError("config: format must be csv or csv+svg");
          }
        }
      } else if (key == "threads") {
        if (!given("--threads")) {
          cfg.threads = value.get<unsigned>();
        }
      } else {
        throw UsageError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: wrong value type: ") + e.what());
  }
}

int dispatch(const RunConfig& cfg, std::ostream& out)
{
  if (cfg.command == "mise-curve") {
    return cmd_mise_curve(cfg, out);
  }
  if (cfg.command == "optimal-bandwidth") {
    return cmd_optimal_bandwidth(cfg, out);
  }
  if (cfg.command == "efficiency-curve") {
    return cmd_efficiency_curve(cfg, out);
  }
  if (cfg.command == "figure2") {
    return cmd_figure2(cfg, out);
  }
  if (cfg.command == "figure3") {
    return cmd_figure3(cfg, out);
  }
  if (cfg.command == "mc-validate") {
    return cmd_mc_validate(cfg, out);
  }
  if (cfg.command == "constants") {
    return cmd_constants(cfg, out);
  }
  throw UsageError("unknown command '" + cfg.command + "'");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Exact and Monte Carlo MISE of kernel distribution function estimators", "cdf-mise"};
  RunConfig cfg;
  std::string n_text;
  std::string h_text;
  std::string config_path;

  std::string command_help = "one of:";
  for (const auto& c : kCommands) {
    command_help += " " + c;
  }
  app.add_option("command", cfg.command, command_help)->check(CLI::IsMember(kCommands));
  app.add_option("--dist", cfg.dist_spec, "jdlvp[:scale=<a>] | normal[:sigma=<v>][,scale=<a>]");
  app.add_option("--kernel", cfg.kernel_spec, "normal | trapezoidal | sinc");
  app.add_option("--n", n_text, "comma-separated sample sizes");
  app.add_option("--h-grid", h_text, "bandwidth grid min:max:count");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--reps", cfg.reps, "Monte Carlo replications");
  app.add_option("--out", cfg.output_dir, "output directory");
  app.add_option("--format", cfg.format, "csv | csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
  app.add_option("--config", config_path, "JSON config file; flags take precedence");
  app.add_option("--threads", cfg.threads, "Monte Carlo worker threads (0 = all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    cfg.dist_given = app.count("--dist") > 0;
    cfg.kernel_given = app.count("--kernel") > 0;
    cfg.n_given = app.count("--n") > 0;
    cfg.reps_given = app.count("--reps") > 0;
    if (cfg.n_given) {
      cfg.n_list = parse_n_list(n_text);
    }
    if (app.count("--h-grid") > 0) {
      cfg.h_grid = parse_h_grid(h_text);
    }
    if (!config_path.empty()) {
      apply_config_file(config_path, cfg, app);
    }
    if (cfg.command.empty()) {
      throw UsageError("no command given; " + command_help);
    }
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
      throw UsageError("unknown command '" + cfg.command + "'; " + command_help);
    }
    return dispatch(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return exit_usage;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

} // namespace cdfmise::cli
