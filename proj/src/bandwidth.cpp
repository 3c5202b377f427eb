#include "cdfmise/bandwidth.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdfmise {

namespace {

// Golden-section ratio (sqrt(5) - 1) / 2.
const double kGolden = 0.5 * (std::sqrt(5.0) - 1.0);

// Lowest log-spaced scan point, as a fraction of h_max.
constexpr double kScanFloor = 1e-5;

struct Point
{
  double h;
  double value;
};

} // namespace

void BandwidthSearch::validate() const
{
  if (!(h_max > 0.0) || !std::isfinite(h_max)) {
    throw DomainError("h_max must be a positive finite number");
  }
  if (grid_size < 64) {
    throw DomainError("grid_size must be at least 64");
  }
  if (!(refine_tol > 0.0)) {
    throw DomainError("refine_tol must be positive");
  }
}

BandwidthSearch default_search(const Distribution& dist)
{
  BandwidthSearch s;
  if (dist.family() == DistributionFamily::normal) {
    s.h_max = 4.0 * dist.scale();
  } else {
    s.h_max = 8.0 * dist.scale();
  }
  return s;
}

std::string_view to_string(BoundaryFlag flag)
{
  switch (flag) {
    case BoundaryFlag::interior:
      return "interior";
    case BoundaryFlag::at_zero:
      return "at_zero";
    case BoundaryFlag::at_upper_bracket:
      return "at_upper_bracket";
  }
  return "unknown";
}

BandwidthResult optimal_bandwidth(const Distribution& dist,
                                  const Kernel& kernel,
                                  std::uint64_t n,
                                  const BandwidthSearch& search,
                                  const QuadratureConfig& cfg)
{
  search.validate();
  auto eval = [&](double h) { return mise(dist, kernel, h, n, cfg).mise; };

  const int g = search.grid_size;
  std::vector<double> hs(static_cast<std::size_t>(g) + 1);
  hs[0] = 0.0;
  const double log_lo = std::log(search.h_max * kScanFloor);
  const double log_hi = std::log(search.h_max);
  for (int i = 1; i <= g; ++i) {
    const double frac = static_cast<double>(i - 1) / static_cast<double>(g - 1);
    hs[i] = std::exp(log_lo + frac * (log_hi - log_lo));
  }
  hs[g] = search.h_max;

  std::vector<double> values(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    values[i] = eval(hs[i]);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (values[i] < values[best] - 1e-14 * std::abs(values[best])) {
      best = i;
    }
  }

  const std::size_t last = hs.size() - 1;
  Point a{hs[best == 0 ? 0 : best - 1], values[best == 0 ? 0 : best - 1]};
  Point b{hs[std::min(best + 1, last)], values[std::min(best + 1, last)]};
  if (best == last) {
    a = {hs[last - 1], values[last - 1]};
    b = {hs[last], values[last]};
  }

  Point x1{b.h - kGolden * (b.h - a.h), 0.0};
  Point x2{a.h + kGolden * (b.h - a.h), 0.0};
  x1.value = eval(x1.h);
  x2.value = eval(x2.h);
  for (int iter = 0; iter < 300 && b.h - a.h > search.refine_tol; ++iter) {
    if (x1.value <= x2.value) {
      b = x2;
      x2 = x1;
      x1 = {b.h - kGolden * (b.h - a.h), 0.0};
      x1.value = eval(x1.h);
    } else {
      a = x1;
      x1 = x2;
      x2 = {a.h + kGolden * (b.h - a.h), 0.0};
      x2.value = eval(x2.h);
    }
  }

  // Smallest value among the final bracket's points; earlier points win ties.
  Point winner = a;
  for (const Point& p : {x1, x2, b}) {
    if (p.value < winner.value - 1e-14 * std::abs(winner.value)) {
      winner = p;
    }
  }
  if (values[best] < winner.value - 1e-14 * std::abs(winner.value)) {
    winner = {hs[best], values[best]};
  }

  BandwidthResult r;
  r.h_opt = winner.h;
  r.mise_at_opt = winner.value;
  r.n = n;
  r.bracket = {std::min(a.h, winner.h), std::max(b.h, winner.h)};
  r.grid_points_scanned = static_cast<int>(hs.size());
  r.refined_tolerance = r.bracket.second - r.bracket.first;
  if (best == last) {
    r.boundary_flag = BoundaryFlag::at_upper_bracket;
    std::ostringstream os;
    os << "MISE minimizer at the upper end of the search range (h_max = " << search.h_max
       << "); widen the bracket";
    r.warning = os.str();
  } else if (r.h_opt == 0.0) {
    r.boundary_flag = BoundaryFlag::at_zero;
  }
  return r;
}

double limit_bandwidth(const Distribution& dist, const Kernel& kernel)
{
  if (dist.c_f() != dist.d_f()) {
    throw UnsupportedError("limit bandwidth needs C_f = D_f");
  }
  if (kernel.s_k() != kernel.t_k()) {
    throw UnsupportedError("limit bandwidth needs S_k = T_k");
  }
  if (!std::isfinite(dist.d_f())) {
    return 0.0;
  }
  return kernel.s_k() / dist.d_f();
}

std::vector<double> sinc_critical_bandwidths(const Distribution& dist,
                                             std::uint64_t n,
                                             std::pair<double, double> bracket,
                                             const QuadratureConfig& /*cfg*/)
{
  const auto [h_lo, h_hi] = bracket;
  if (!(h_lo > 0.0) || !(h_hi > h_lo) || !std::isfinite(h_hi)) {
    throw DomainError("sinc_critical_bandwidths: need 0 < bracket.first < bracket.second < inf");
  }
  if (!dist.square_integrable()) {
    throw PreconditionError("the sinc kernel needs a square-integrable density");
  }
  const double level = 1.0 / (static_cast<double>(n) + 1.0);
  auto q = [&](double s) {
    const double p = dist.cf(s);
    return p * p - level;
  };

  constexpr int grid = 1024;
  const double s_lo = 1.0 / h_hi;
  const double s_hi = 1.0 / h_lo;
  std::vector<double> roots;
  double s_prev = s_lo;
  double q_prev = q(s_prev);
  if (q_prev == 0.0) {
    roots.push_back(s_prev);
  }
  for (int i = 1; i < grid; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / (grid - 1);
    const double qs = q(s);
    if (qs == 0.0) {
      roots.push_back(s);
    } else if ((q_prev < 0.0 && qs > 0.0) || (q_prev > 0.0 && qs < 0.0)) {
      double lo = s_prev;
      double hi = s;
      const bool rising = q_prev < 0.0;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double qm = q(mid);
        if (qm == 0.0) {
          lo = hi = mid;
          break;
        }
        ((qm < 0.0) == rising ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    s_prev = s;
    q_prev = qs;
  }

  std::vector<double> hs;
  hs.reserve(roots.size());
  for (double s : roots) {
    hs.push_back(1.0 / s);
  }
  std::sort(hs.begin(), hs.end());
  return hs;
}

double relative_efficiency(const Distribution& dist,
                           const Kernel& kernel,
                           std::uint64_t n,
                           const BandwidthSearch& search,
                           const QuadratureConfig& cfg)
{
  const BandwidthResult r = optimal_bandwidth(dist, kernel, n, search, cfg);
  return r.mise_at_opt / (dist.psi_f() / static_cast<double>(n));
}

double asymptotic_relative_efficiency(const Distribution& dist, const Kernel& kernel)
{
  const double limit = limit_bandwidth(dist, kernel);
  if (limit == 0.0) {
    return 1.0;
  }
  return 1.0 - kernel.psi_closed() * kernel.s_k() / (dist.psi_f() * dist.d_f());
}

EfficiencyCurve efficiency_curve(const Distribution& dist,
                                 const Kernel& kernel,
                                 const std::vector<std::uint64_t>& n_values,
                                 const BandwidthSearch& search,
                                 const QuadratureConfig& cfg)
{
  EfficiencyCurve curve;
  curve.n_values = n_values;
  curve.asymptote = asymptotic_relative_efficiency(dist, kernel);
  for (std::uint64_t n : n_values) {
    const BandwidthResult r = optimal_bandwidth(dist, kernel, n, search, cfg);
    curve.h_opt.push_back(r.h_opt);
    curve.rel_eff.push_back(r.mise_at_opt / (dist.psi_f() / static_cast<double>(n)));
  }
  return curve;
}

SandwichReport sandwich_check(const Distribution& dist,
                                     const Kernel& kernel,
                                     const std::vector<std::uint64_t>& n_list,
                                     const BandwidthSearch& search,
                                     double limit_window,
                                     const QuadratureConfig& cfg)
{
  if (n_list.empty()) {
    throw PreconditionError("sandwich_check: n_list is empty");
  }
  SandwichReport report;
  const bool band_limited = std::isfinite(dist.d_f());
  report.lower_bound = band_limited ? kernel.s_k() / dist.d_f() : 0.0;

  for (std::uint64_t n : n_list) {
    BandwidthResult r = optimal_bandwidth(dist, kernel, n, search, cfg);
    if (r.h_opt < report.lower_bound - search.refine_tol) {
      std::ostringstream os;
      os.precision(12);
      os << "lower bound S_k/D_f <= h_0n violated at n=" << n << ": h_0n=" << r.h_opt
         << " < " << report.lower_bound;
      report.violations.push_back(os.str());
    }
    report.results.push_back(std::move(r));
  }

  if (kernel.s_k() > 0.0 && band_limited) {
    const BandwidthResult& tail = report.results.back();
    if (std::abs(tail.h_opt - report.lower_bound) > limit_window) {
      std::ostringstream os;
      os.precision(12);
      os << "h_0n at n=" << tail.n << " is " << tail.h_opt << ", outside the window " << limit_window
         << " around the limit " << report.lower_bound;
      report.violations.push_back(os.str());
    }
    const double upper = std::min(kernel.s_k() / dist.c_f(), kernel.t_k() / dist.d_f());
    if (tail.h_opt > upper + limit_window) {
      std::ostringstream os;
      os.precision(12);
      os << "upper bound min{S_k/C_f, T_k/D_f} = " << upper << " exceeded at n=" << tail.n
         << ": h_0n=" << tail.h_opt;
      report.violations.push_back(os.str());
    }
  }
  report.ok = report.violations.empty();
  return report;
}

} // namespace cdfmise
