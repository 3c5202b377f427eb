#include "cdfmise/mise.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace cdfmise {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrtPi = std::sqrt(kPi);

struct Estimate
{
  double value = 0.0;
  double error = 0.0;
};

void check_bandwidth(double h)
{
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw DomainError("bandwidth must be a finite nonnegative number");
  }
}

void check_n(std::uint64_t n)
{
  if (n < 1) {
    throw DomainError("sample size must be at least 1");
  }
}

void check_pair(const Distribution& dist, const Kernel& kernel)
{
  if (!dist.abs_first_moment_finite()) {
    throw PreconditionError("distribution must have a finite mean");
  }
  if (kernel.kind() == KernelKind::sinc && !dist.square_integrable()) {
    throw PreconditionError("the sinc kernel needs a square-integrable density");
  }
}

// Sorted panel boundaries on [lower, upper]: the distribution's knots and the
// kernel's knots mapped through t = knot / h.
std::vector<double> fourier_breakpoints(const Distribution& dist,
                                        const Kernel* kernel,
                                        double h,
                                        double lower,
                                        double upper)
{
  std::vector<double> pts = {lower};
  for (double k : dist.cf_knots()) {
    pts.push_back(k);
  }
  if (kernel != nullptr && h > 0.0) {
    for (double k : kernel->ft_knots()) {
      pts.push_back(k / h);
    }
  }
  std::vector<double> out = {lower};
  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    if (p > out.back() && p < upper) {
      out.push_back(p);
    }
  }
  out.push_back(upper);
  return out;
}

Estimate psi_f_estimate(const Distribution& dist, const QuadratureConfig& cfg)
{
  const auto pts = fourier_breakpoints(dist, nullptr, 0.0, 0.0, kInf);
  const auto r = integrate([&](double t) { return dist.cf_deficit(t); }, pts, cfg);
  require_converged(r, "psi_f (Fourier)");
  return {r.value / kPi, r.error_estimate / kPi};
}

Estimate iv_estimate(const Distribution& dist,
                     const Kernel& kernel,
                     double h,
                     std::uint64_t n,
                     const QuadratureConfig& cfg)
{
  const double nn = static_cast<double>(n);
  if (h == 0.0) {
    const Estimate psi = psi_f_estimate(dist, cfg);
    return {psi.value / nn, psi.error / nn};
  }
  const auto support = kernel.ft_support();
  const double upper = support ? *support / h : kInf;
  const auto pts = fourier_breakpoints(dist, &kernel, h, 0.0, upper);
  const auto r = integrate(
    [&](double t) {
      const double pk = kernel.ft(t * h);
      return pk * pk * dist.cf_deficit(t);
    },
    pts,
    cfg);
  require_converged(r, "IV (Fourier)");
  return {r.value / (kPi * nn), r.error_estimate / (kPi * nn)};
}

Estimate isb_estimate(const Distribution& dist,
                      const Kernel& kernel,
                      double h,
                      const QuadratureConfig& cfg)
{
  if (h == 0.0) {
    return {};
  }
  const double upper = dist.d_f();
  const auto pts = fourier_breakpoints(dist, &kernel, h, 0.0, upper);
  const auto r = integrate(
    [&](double t) {
      const double gap = h * kernel.ft_gap_over_t(t * h);
      const double pf = dist.cf(t);
      return gap * gap * pf * pf;
    },
    pts,
    cfg);
  require_converged(r, "ISB (Fourier)");
  return {r.value / kPi, r.error_estimate / kPi};
}

MiseReport make_report(double h, std::uint64_t n, double iv, double isb, MiseMethod method, double err)
{
  return MiseReport{h, n, iv, isb, iv + isb, method, err};
}

// Cancellation-free pieces of the normal/normal closed form, times sqrt(pi).
double normal_normal_iv_scaled(double sigma, double h)
{
  // sqrt(h^2 + s^2) - h
  return sigma * sigma / (std::hypot(h, sigma) + h);
}

double normal_normal_isb_scaled(double sigma, double h)
{
  // (2h^2 + 4s^2)^{1/2} - (h^2 + s^2)^{1/2} - s, rationalized twice.
  const double r1 = std::sqrt(sigma * sigma + h * h);
  const double r2 = std::sqrt(sigma * sigma + 0.5 * h * h);
  const double h2 = h * h;
  return h2 * (0.5 * h2) / ((r1 + r2) * (r2 + sigma) * (r1 + sigma));
}

// pi * ISB for normal data and the sinc kernel.
double normal_sinc_isb_scaled(double sigma, double h)
{
  const double z = sigma * std::numbers::sqrt2 / h;
  return h * std::exp(-(sigma * sigma) / (h * h)) - 2.0 * sigma * kSqrtPi * std_normal_sf(z);
}

void check_sigma(double sigma)
{
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be a positive finite number");
  }
}

// Panel boundaries no wider than `step` covering [a, b].
std::vector<double> panel_grid(double a, double b, double step)
{
  const int m = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
  std::vector<double> pts(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    pts[i] = a + (b - a) * i / m;
  }
  pts.back() = b;
  return pts;
}

// Half-width of the truncated cube for the space-domain oracles: each tail
// of F beyond it carries less than tail_cutoff_tol.
double oracle_reach(const Distribution& dist, double h, const QuadratureConfig& cfg)
{
  return dist.tail_bound(cfg.tail_cutoff_tol) + 20.0 * h;
}

// One panel per half period of sin^4(x/2) (JdlVP) or per sigma (normal).
double oracle_step(const Distribution& dist)
{
  return dist.family() == DistributionFamily::jdlvp ? kPi * dist.scale() : dist.scale();
}

struct Moments
{
  double first = 0.0;  // int f(u) K((x-u)/h) du
  double second = 0.0; // int f(u) K((x-u)/h)^2 du
};

// u runs over [-2R, 2R]; below it K((x-u)/h) is 1 to within the cutoff and
// above it 0, so the tails contribute F(-2R) to both moments.
Moments kernel_moments(const Distribution& dist,
                       const Kernel& kernel,
                       double h,
                       double x,
                       double reach,
                       bool want_second,
                       const QuadratureConfig& cfg)
{
  const double r = 2.0 * reach;
  std::vector<double> pts = panel_grid(-r, r, oracle_step(dist));
  for (double p : {x - 4.0 * h, x, x + 4.0 * h}) {
    if (p > -r && p < r) {
      pts.push_back(p);
    }
  }
  std::sort(pts.begin(), pts.end());
  QuadratureConfig inner = cfg;
  inner.abs_tol = std::max(cfg.abs_tol, 1e-11);
  inner.rel_tol = std::max(cfg.rel_tol, 1e-9);
  inner.max_subdivisions = std::max(cfg.max_subdivisions, 20 * static_cast<int>(pts.size()));
  const double below = dist.cdf(-r);

  Moments m;
  m.first = below + require_converged(integrate([&](double u) { return dist.density(u) * kernel.integrated((x - u) / h); },
                                                pts,
                                                inner),
                                      "space oracle inner integral");
  if (want_second) {
    m.second = below + require_converged(integrate(
                                           [&](double u) {
                                             const double k = kernel.integrated((x - u) / h);
                                             return dist.density(u) * k * k;
                                           },
                                           pts,
                                           inner),
                                         "space oracle inner integral");
  }
  return m;
}

// x-integral over the truncated range.
double integrate_oracle(const RealFunction& g, const Distribution& dist, double reach, const QuadratureConfig& cfg, const char* what)
{
  const auto pts = panel_grid(-reach, reach, oracle_step(dist));
  QuadratureConfig outer = cfg;
  outer.max_subdivisions = std::max(cfg.max_subdivisions, 20 * static_cast<int>(pts.size()));
  return require_converged(integrate(g, pts, outer), what);
}

QuadratureConfig outer_config(const QuadratureConfig& cfg)
{
  QuadratureConfig outer = cfg;
  outer.abs_tol = std::max(cfg.abs_tol, 1e-10);
  outer.rel_tol = std::max(cfg.rel_tol, 1e-7);
  return outer;
}

} // namespace

std::string_view to_string(MiseMethod method)
{
  switch (method) {
    case MiseMethod::fourier:
      return "fourier";
    case MiseMethod::closed_form_normal_normal:
      return "closed_form_normal_normal";
    case MiseMethod::closed_form_normal_sinc:
      return "closed_form_normal_sinc";
    case MiseMethod::sinc_fourier:
      return "sinc_fourier";
    case MiseMethod::linear_segment:
      return "linear_segment";
    case MiseMethod::space_domain_oracle:
      return "space_domain_oracle";
    case MiseMethod::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

double iv_fourier(const Distribution& dist,
                  const Kernel& kernel,
                  double h,
                  std::uint64_t n,
                  const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  check_n(n);
  check_pair(dist, kernel);
  return iv_estimate(dist, kernel, h, n, cfg).value;
}

double isb_fourier(const Distribution& dist, const Kernel& kernel, double h, const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  check_pair(dist, kernel);
  return isb_estimate(dist, kernel, h, cfg).value;
}

MiseReport mise_fourier(const Distribution& dist,
                        const Kernel& kernel,
                        double h,
                        std::uint64_t n,
                        const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  check_n(n);
  check_pair(dist, kernel);
  const Estimate iv = iv_estimate(dist, kernel, h, n, cfg);
  const Estimate isb = isb_estimate(dist, kernel, h, cfg);
  return make_report(h, n, iv.value, isb.value, MiseMethod::fourier, iv.error + isb.error);
}

MiseReport mise_sinc_fourier(const Distribution& dist, double h, std::uint64_t n, const QuadratureConfig& cfg)
{
  check_n(n);
  const Kernel sinc = make_sinc_kernel();
  check_pair(dist, sinc);
  if (std::isnan(h) || !std::isfinite(h)) {
    throw DomainError("bandwidth must be finite");
  }
  if (h <= 0.0) {
    return mise(dist, sinc, 0.0, n, cfg);
  }
  const double nn = static_cast<double>(n);
  const double cut = 1.0 / h;

  const auto iv_pts = fourier_breakpoints(dist, nullptr, 0.0, 0.0, cut);
  const auto iv_r = integrate([&](double t) { return dist.cf_deficit(t); }, iv_pts, cfg);
  require_converged(iv_r, "sinc IV");

  double isb = 0.0;
  double isb_err = 0.0;
  if (cut < dist.d_f()) {
    const auto isb_pts = fourier_breakpoints(dist, nullptr, 0.0, cut, dist.d_f());
    const auto isb_r = integrate(
      [&](double t) {
        const double pf = dist.cf(t);
        return pf * pf / (t * t);
      },
      isb_pts,
      cfg);
    require_converged(isb_r, "sinc ISB");
    isb = isb_r.value / kPi;
    isb_err = isb_r.error_estimate / kPi;
  }
  return make_report(h,
                     n,
                     iv_r.value / (kPi * nn),
                     isb,
                     MiseMethod::sinc_fourier,
                     iv_r.error_estimate / (kPi * nn) + isb_err);
}

MiseReport mise(const Distribution& dist,
                const Kernel& kernel,
                double h,
                std::uint64_t n,
                const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  check_n(n);
  check_pair(dist, kernel);
  const double nn = static_cast<double>(n);

  if (h == 0.0) {
    return make_report(h, n, dist.psi_f() / nn, 0.0, MiseMethod::fourier, 0.0);
  }

  if (const auto sigma = dist.normal_sigma()) {
    if (kernel.kind() == KernelKind::normal) {
      const double iv = normal_normal_iv_scaled(*sigma, h) / (kSqrtPi * nn);
      const double isb = normal_normal_isb_scaled(*sigma, h) / kSqrtPi;
      return make_report(h, n, iv, isb, MiseMethod::closed_form_normal_normal, 0.0);
    }
    if (kernel.kind() == KernelKind::sinc) {
      const double isb_scaled = normal_sinc_isb_scaled(*sigma, h);
      const double iv = (isb_scaled + *sigma * kSqrtPi - h) / (kPi * nn);
      return make_report(h, n, iv, isb_scaled / kPi, MiseMethod::closed_form_normal_sinc, 0.0);
    }
  }

  // ISB vanishes and IV is affine on [0, S_k / D_f].
  if (kernel.s_k() > 0.0 && std::isfinite(dist.d_f()) && h * dist.d_f() <= kernel.s_k()) {
    const double iv = (dist.psi_f() - kernel.psi_closed() * h) / nn;
    return make_report(h, n, iv, 0.0, MiseMethod::linear_segment, 0.0);
  }

  if (kernel.kind() == KernelKind::sinc) {
    return mise_sinc_fourier(dist, h, n, cfg);
  }
  return mise_fourier(dist, kernel, h, n, cfg);
}

double mise_normal_normal_closed(double sigma, double h, std::uint64_t n)
{
  check_sigma(sigma);
  check_bandwidth(h);
  check_n(n);
  const double iv = normal_normal_iv_scaled(sigma, h) / static_cast<double>(n);
  return (iv + normal_normal_isb_scaled(sigma, h)) / kSqrtPi;
}

double mise_normal_sinc_closed(double sigma, double h, std::uint64_t n)
{
  check_sigma(sigma);
  check_n(n);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("the sinc closed form needs h > 0; use the empirical branch at h = 0");
  }
  const double isb_scaled = normal_sinc_isb_scaled(sigma, h);
  const double iv_scaled = (isb_scaled + sigma * kSqrtPi - h) / static_cast<double>(n);
  return (isb_scaled + iv_scaled) / kPi;
}

double isb_space_oracle(const Distribution& dist, const Kernel& kernel, double h, const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  if (!kernel.integrable()) {
    throw UnsupportedError("space-domain oracle needs an integrable kernel (dK must be a finite measure)");
  }
  if (h == 0.0) {
    return 0.0;
  }
  const double reach = oracle_reach(dist, h, cfg);
  const auto bias_sq = [&](double x) {
    const double b = kernel_moments(dist, kernel, h, x, reach, false, cfg).first - dist.cdf(x);
    return b * b;
  };
  return integrate_oracle(bias_sq, dist, reach, outer_config(cfg), "ISB space oracle");
}

double iv_space_oracle(const Distribution& dist,
                       const Kernel& kernel,
                       double h,
                       std::uint64_t n,
                       const QuadratureConfig& cfg)
{
  check_bandwidth(h);
  check_n(n);
  if (!kernel.integrable()) {
    throw UnsupportedError("space-domain oracle needs an integrable kernel (dK must be a finite measure)");
  }
  const double reach = oracle_reach(dist, h, cfg);
  double total = 0.0;
  if (h == 0.0) {
    total = integrate_oracle(
      [&](double x) { return dist.cdf(x) * dist.cdf(-x); }, dist, reach, outer_config(cfg), "IV space oracle");
  } else {
    total = integrate_oracle(
      [&](double x) {
        const Moments m = kernel_moments(dist, kernel, h, x, reach, true, cfg);
        return m.second - m.first * m.first;
      },
      dist,
      reach,
      outer_config(cfg),
      "IV space oracle");
  }
  return total / static_cast<double>(n);
}

} // namespace cdfmise
