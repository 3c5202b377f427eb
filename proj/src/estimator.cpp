#include "cdfmise/estimator.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace cdfmise {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi(-40) underflows to 0 and Phi(40) rounds to 1, so normal-kernel terms
// farther than this many bandwidths away are exact constants.
constexpr double kNormalWindow = 40.0;

using cplx = std::complex<double>;

// Far from the data, 1 - K(u) = Re sum_m e^{i m u} a_m(u) / pi for u > 0,
// with m = 1 for sinc and m = 1, 2 for the trapezoid. q = f - i g below.
struct TailTerm
{
  int m;
  cplx a;
  cplx da;
};

cplx aux_derivative(double v, cplx q)
{
  return {q.imag(), 1.0 / v - q.real()};
}

std::vector<TailTerm> tail_terms(KernelKind kind, double u)
{
  const cplx q1 = sine_integral_aux(u);
  const cplx dq1 = aux_derivative(u, q1);
  if (kind == KernelKind::sinc) {
    return {{1, q1, dq1}};
  }
  const cplx q2 = sine_integral_aux(2.0 * u);
  const cplx dq2 = aux_derivative(2.0 * u, q2);
  return {{1, 1.0 / u - q1, -1.0 / (u * u) - dq1}, {2, 2.0 * q2 - 1.0 / u, 4.0 * dq2 + 1.0 / (u * u)}};
}

// Per-frequency amplitudes B_m(x) = sum_j e^{-i m X_j / h} a_m((x - X_j)/h)
// and their x-derivatives, so that F_nh(x) - 1 = -Re sum_m e^{imx/h} B_m / (pi n).
struct Amplitudes
{
  std::array<cplx, 3> b{};
  std::array<cplx, 3> db{};
};

Amplitudes amplitudes(const std::vector<double>& xs, KernelKind kind, double h, double x)
{
  Amplitudes out;
  for (double xj : xs) {
    for (const TailTerm& t : tail_terms(kind, (x - xj) / h)) {
      const double phase = -t.m * xj / h;
      const cplx rot(std::cos(phase), std::sin(phase));
      out.b[t.m] += rot * t.a;
      out.db[t.m] += rot * t.da / h;
    }
  }
  return out;
}

// int_edge^inf (F_nh - F)^2 for a superkernel estimator when every
// (edge - X_j)/h is large. tail(x) = 1 - F(x), dens(x) = F'(x). The smooth
// part is integrated numerically; each oscillating part e^{i nu x/h} G(x)
// contributes e^{i nu edge/h} ((ih/nu) G - (h/nu)^2 G') at the edge.
double superkernel_right_tail(const std::vector<double>& xs,
                              KernelKind kind,
                              double h,
                              double edge,
                              const RealFunction& tail,
                              const RealFunction& dens,
                              const QuadratureConfig& cfg)
{
  const double n = static_cast<double>(xs.size());
  const double c2 = 1.0 / (kPi * kPi * n * n);
  const double c1 = 2.0 / (kPi * n);
  const int top = kind == KernelKind::sinc ? 1 : 2;

  // x = edge + scale * y; |B_m|^2 falls off like (x - X)^-2.
  const double scale = edge - xs[xs.size() / 2];
  auto smooth = [&](double y) {
    const Amplitudes am = amplitudes(xs, kind, h, edge + scale * y);
    double s = 0.0;
    for (int m = 1; m <= top; ++m) {
      s += std::norm(am.b[m]);
    }
    return 0.5 * c2 * scale * s;
  };
  auto tail_sq = [&](double x) {
    const double e = tail(x);
    return e * e;
  };
  double total = require_converged(integrate(smooth, 0.0, kInf, cfg), "ise (tail)");
  total += require_converged(integrate(tail_sq, edge, kInf, cfg), "ise (tail)");

  const Amplitudes am = amplitudes(xs, kind, h, edge);
  const double e = tail(edge);
  const double de = -dens(edge);
  auto add = [&](int nu, cplx g, cplx dg) {
    const double r = nu / h;
    const cplx rot(std::cos(r * edge), std::sin(r * edge));
    total += (rot * (cplx(0.0, 1.0 / r) * g - dg / (r * r))).real();
  };
  for (int m = 1; m <= top; ++m) {
    for (int k = 1; k <= top; ++k) {
      // from (Re S)^2 = |S|^2 / 2 + Re(S^2) / 2
      add(m + k, 0.5 * c2 * am.b[m] * am.b[k], 0.5 * c2 * (am.db[m] * am.b[k] + am.b[m] * am.db[k]));
      if (k > m) {
        add(k - m, c2 * am.b[k] * std::conj(am.b[m]),
            c2 * (am.db[k] * std::conj(am.b[m]) + am.b[k] * std::conj(am.db[m])));
      }
    }
    // cross term 2 (F_nh - 1)(1 - F)
    add(m, -c1 * am.b[m] * e, -c1 * (am.db[m] * e + am.b[m] * de));
  }
  return total;
}

std::vector<double> uniform_grid(double a, double b, int panels)
{
  panels = std::max(1, panels);
  std::vector<double> grid(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) {
    grid[i] = a + (b - a) * i / panels;
  }
  grid.back() = b;
  return grid;
}

} // namespace

Sample draw_sample(const Distribution& dist, std::size_t n, std::uint64_t seed)
{
  Sample s;
  s.values = sample(dist, n, seed);
  s.seed = seed;
  s.source = dist.name();
  return s;
}

Sample make_sample(std::vector<double> values, std::uint64_t seed, std::string source)
{
  if (values.empty()) {
    throw PreconditionError("a sample needs at least one value");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw PreconditionError("sample values must be finite");
    }
  }
  std::sort(values.begin(), values.end());
  return Sample{std::move(values), seed, std::move(source)};
}

double empirical_cdf(const Sample& sample, double x)
{
  const auto& v = sample.values;
  const auto count = std::upper_bound(v.begin(), v.end(), x) - v.begin();
  return static_cast<double>(count) / static_cast<double>(v.size());
}

double estimate_cdf(const Sample& sample, const Kernel& kernel, double h, double x)
{
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw DomainError("estimate_cdf: h must be a nonnegative finite number");
  }
  const auto& v = sample.values;
  if (v.empty()) {
    throw PreconditionError("estimate_cdf: empty sample");
  }
  if (h == 0.0) {
    return empirical_cdf(sample, x);
  }
  const double n = static_cast<double>(v.size());

  if (kernel.kind() == KernelKind::normal) {
    const auto first = std::lower_bound(v.begin(), v.end(), x - kNormalWindow * h);
    const auto last = std::upper_bound(first, v.end(), x + kNormalWindow * h);
    double sum = static_cast<double>(first - v.begin());
    for (auto it = first; it != last; ++it) {
      sum += std_normal_cdf((x - *it) / h);
    }
    return sum / n;
  }

  double sum = 0.0;
  for (double xj : v) {
    sum += kernel.integrated((x - xj) / h);
  }
  return sum / n;
}

double integrated_squared_error(const RealFunction& estimate,
                                const Distribution& dist,
                                std::span<const double> breakpoints,
                                const QuadratureConfig& cfg)
{
  std::vector<double> points;
  points.reserve(breakpoints.size() + 2);
  points.push_back(-kInf);
  points.insert(points.end(), breakpoints.begin(), breakpoints.end());
  points.push_back(kInf);
  if (!std::is_sorted(points.begin(), points.end())) {
    throw PreconditionError("integrated_squared_error: breakpoints must be sorted");
  }
  auto integrand = [&](double x) {
    const double d = estimate(x) - dist.cdf(x);
    return d * d;
  };
  return require_converged(integrate(integrand, points, cfg), "integrated_squared_error");
}

double ise(const Sample& sample,
           const Kernel& kernel,
           double h,
           const Distribution& dist,
           const QuadratureConfig& cfg)
{
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw DomainError("ise: h must be a nonnegative finite number");
  }
  const auto& v = sample.values;
  if (v.empty()) {
    throw PreconditionError("ise: empty sample");
  }
  const double lo = v.front();
  const double hi = v.back();
  const double n = static_cast<double>(v.size());
  auto estimate = [&](double x) { return estimate_cdf(sample, kernel, h, x); };

  if (h == 0.0) {
    return integrated_squared_error(estimate, dist, v, cfg);
  }

  if (kernel.kind() == KernelKind::normal) {
    // Gaussian tails: integrate out to infinity directly.
    const double a = lo - 5.0 * h;
    const double b = hi + 5.0 * h;
    const double panels = std::ceil((b - a) / h);
    if (panels > 2.0 * n + 8.0) {
      return integrated_squared_error(estimate, dist, v, cfg);
    }
    return integrated_squared_error(estimate, dist, uniform_grid(a, b, static_cast<int>(panels)), cfg);
  }

  // Superkernels: quadrature on a window reaching 20h past the 1e-4 tail
  // point of F, then the asymptotic tails on either side.
  const KernelKind kind = kernel.kind();
  const double w = 20.0 * h + dist.tail_bound(1e-4);
  const double a = lo - w;
  const double b = hi + w;
  const double spacing = kind == KernelKind::sinc ? kPi * h : 2.0 * h;
  const int m = std::max(8, static_cast<int>(std::ceil((b - a) / spacing)));
  auto integrand = [&](double x) {
    const double d = estimate(x) - dist.cdf(x);
    return d * d;
  };
  double total = require_converged(integrate(integrand, uniform_grid(a, b, m), cfg), "ise (window)");
  QuadratureConfig tail_cfg = cfg;
  tail_cfg.abs_tol = std::max(cfg.abs_tol, cfg.rel_tol * total);

  std::vector<double> mirrored(v.rbegin(), v.rend());
  for (double& x : mirrored) {
    x = -x;
  }
  total += superkernel_right_tail(
    v, kind, h, b, [&](double x) { return 1.0 - dist.cdf(x); }, [&](double x) { return dist.density(x); }, tail_cfg);
  total += superkernel_right_tail(
    mirrored, kind, h, -a, [&](double x) { return dist.cdf(-x); }, [&](double x) { return dist.density(-x); }, tail_cfg);
  return total;
}

QuadratureConfig monte_carlo_quadrature()
{
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-7;
  cfg.max_subdivisions = 4000;
  return cfg;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index)
{
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

MonteCarloMise monte_carlo_mise(const Distribution& dist,
                                const Kernel& kernel,
                                double h,
                                std::uint64_t n,
                                int replications,
                                std::uint64_t seed,
                                const QuadratureConfig& cfg,
                                unsigned threads)
{
  if (replications < 2) {
    throw PreconditionError("monte_carlo_mise: need at least 2 replications");
  }
  if (n < 1) {
    throw PreconditionError("monte_carlo_mise: n must be at least 1");
  }
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw DomainError("monte_carlo_mise: h must be a nonnegative finite number");
  }
  cfg.validate();

  std::vector<double> values(static_cast<std::size_t>(replications));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (int r = next++; r < replications; r = next++) {
      try {
        const Sample s = draw_sample(dist, n, replication_seed(seed, static_cast<std::uint64_t>(r)));
        values[static_cast<std::size_t>(r)] = ise(s, kernel, h, dist, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = replications;
      }
    }
  };

  unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  count = std::min<unsigned>(count, static_cast<unsigned>(replications));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  // Two-pass mean and variance in index order.
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / replications;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / (replications - 1));

  MonteCarloMise out;
  out.estimate = mean;
  out.std_error = sd / std::sqrt(static_cast<double>(replications));
  out.replications = replications;
  out.h = h;
  out.n = n;
  return out;
}

} // namespace cdfmise
