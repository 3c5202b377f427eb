#include "cdfmise/kernels.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace cdfmise {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<double, 2> kTrapezoidKnots = {1.0, 2.0};
constexpr std::array<double, 1> kSincKnots = {1.0};

double trapezoid_integrated_exact(double x)
{
  if (std::abs(x) < 1e-8) {
    return 0.5 + 1.5 * x / kPi;
  }
  // 1/2 + int_0^x k, integrated by parts into sine integrals.
  const double g_over_x = 2.0 * std::sin(1.5 * x) * std::sin(0.5 * x) / x;
  return 0.5 - g_over_x / kPi - sine_integral(x) + 2.0 * sine_integral(2.0 * x);
}

double trapezoid_value(double x)
{
  if (std::abs(x) < 1e-8) {
    return 1.5 / kPi;
  }
  // cos x - cos 2x = 2 sin(3x/2) sin(x/2), free of cancellation near 0.
  return 2.0 * std::sin(1.5 * x) * std::sin(0.5 * x) / (kPi * x * x);
}

double sinc_value(double x)
{
  return x == 0.0 ? 1.0 / kPi : std::sin(x) / (kPi * x);
}

//! Cubic Hermite table of K on [0, kTableEnd] with the exact derivative k at
//! the nodes; K(-x) = 1 - K(x) covers the negative half. Interpolation error
//! is below 1e-11 for both oscillating kernels.
class HermiteTable
{
public:
  static constexpr double kTableEnd = 128.0;
  static constexpr int kPerUnit = 128;

  template <class Exact, class Slope>
  HermiteTable(Exact exact, Slope slope)
  {
    const int nodes = static_cast<int>(kTableEnd) * kPerUnit + 1;
    values_.resize(nodes);
    slopes_.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
      const double x = static_cast<double>(i) / kPerUnit;
      values_[i] = exact(x);
      slopes_[i] = slope(x) / kPerUnit;
    }
  }

  //! Requires |x| < kTableEnd.
  double operator()(double x) const
  {
    const double a = std::abs(x);
    const double u = a * kPerUnit;
    const auto i = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double t = u - static_cast<double>(i);
    const double s = 1.0 - t;
    const double v = s * s * ((1.0 + 2.0 * t) * values_[i] + t * slopes_[i]) +
                     t * t * ((3.0 - 2.0 * t) * values_[i + 1] - s * slopes_[i + 1]);
    return x < 0.0 ? 1.0 - v : v;
  }

private:
  std::vector<double> values_;
  std::vector<double> slopes_;
};

const HermiteTable& trapezoid_table()
{
  static const HermiteTable table(trapezoid_integrated_exact, trapezoid_value);
  return table;
}

const HermiteTable& sinc_table()
{
  static const HermiteTable table([](double x) { return 0.5 + sine_integral(x); }, sinc_value);
  return table;
}

} // namespace

Kernel::Kernel(KernelKind kind, double s_k, double t_k, bool integrable, bool first_moment, double psi)
  : kind_(kind)
  , s_k_(s_k)
  , t_k_(t_k)
  , integrable_(integrable)
  , abs_first_moment_finite_(first_moment)
  , psi_closed_(psi)
{}

std::string_view Kernel::name() const
{
  switch (kind_) {
    case KernelKind::normal:
      return "normal";
    case KernelKind::trapezoidal:
      return "trapezoidal";
    case KernelKind::sinc:
      return "sinc";
  }
  return "unknown";
}

double Kernel::value(double x) const
{
  switch (kind_) {
    case KernelKind::normal:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    case KernelKind::trapezoidal:
      return trapezoid_value(x);
    case KernelKind::sinc:
      return sinc_value(x);
  }
  return 0.0;
}

double Kernel::density(double x) const
{
  if (!integrable_) {
    throw UnsupportedError("sinc kernel is not Lebesgue integrable; dK is not a finite measure");
  }
  return value(x);
}

double Kernel::integrated(double x) const
{
  switch (kind_) {
    case KernelKind::normal:
      return std_normal_cdf(x);
    case KernelKind::trapezoidal:
      if (std::abs(x) < HermiteTable::kTableEnd) {
        return trapezoid_table()(x);
      }
      return trapezoid_integrated_exact(x);
    case KernelKind::sinc:
      if (std::abs(x) < HermiteTable::kTableEnd) {
        return sinc_table()(x);
      }
      return 0.5 + sine_integral(x);
  }
  return 0.0;
}

double Kernel::ft(double t) const
{
  const double a = std::abs(t);
  switch (kind_) {
    case KernelKind::normal:
      return std::exp(-0.5 * t * t);
    case KernelKind::trapezoidal:
      if (a <= 1.0) {
        return 1.0;
      }
      return a <= 2.0 ? 2.0 - a : 0.0;
    case KernelKind::sinc:
      return a <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double Kernel::ft_gap_over_t(double t) const
{
  const double a = std::abs(t);
  switch (kind_) {
    case KernelKind::normal: {
      if (t == 0.0) {
        return 0.0;
      }
      return -std::expm1(-0.5 * t * t) / t;
    }
    case KernelKind::trapezoidal:
      if (a <= 1.0) {
        return 0.0;
      }
      return a <= 2.0 ? (a - 1.0) / t : 1.0 / t;
    case KernelKind::sinc:
      return a <= 1.0 ? 0.0 : 1.0 / t;
  }
  return 0.0;
}

double Kernel::ft_deficit(double t) const
{
  const double a = std::abs(t);
  switch (kind_) {
    case KernelKind::normal: {
      const double t2 = t * t;
      if (t2 == 0.0) {
        return 1.0;
      }
      return -std::expm1(-t2) / t2;
    }
    case KernelKind::trapezoidal:
      if (a <= 1.0) {
        return 0.0;
      }
      // 1 - (2 - a)^2 = (a - 1)(3 - a)
      return a <= 2.0 ? (a - 1.0) * (3.0 - a) / (t * t) : 1.0 / (t * t);
    case KernelKind::sinc:
      return a <= 1.0 ? 0.0 : 1.0 / (t * t);
  }
  return 0.0;
}

std::span<const double> Kernel::ft_knots() const
{
  switch (kind_) {
    case KernelKind::trapezoidal:
      return kTrapezoidKnots;
    case KernelKind::sinc:
      return kSincKnots;
    case KernelKind::normal:
      break;
  }
  return {};
}

std::optional<double> Kernel::ft_support() const
{
  switch (kind_) {
    case KernelKind::trapezoidal:
      return 2.0;
    case KernelKind::sinc:
      return 1.0;
    case KernelKind::normal:
      break;
  }
  return std::nullopt;
}

Kernel make_normal_kernel()
{
  return Kernel(KernelKind::normal, 0.0, 0.0, true, true, 1.0 / std::sqrt(kPi));
}

Kernel make_trapezoidal_superkernel()
{
  // |x k(x)| ~ |cos x - cos 2x| / (pi |x|) is not integrable, so the first
  // absolute moment is infinite even though k itself is integrable.
  return Kernel(KernelKind::trapezoidal, 1.0, 1.0, true, false, (4.0 * std::numbers::ln2 - 2.0) / kPi);
}

Kernel make_sinc_kernel()
{
  return Kernel(KernelKind::sinc, 1.0, 1.0, false, false, 1.0 / kPi);
}

Kernel kernel_from_name(std::string_view name)
{
  if (name == "normal") {
    return make_normal_kernel();
  }
  if (name == "trapezoidal") {
    return make_trapezoidal_superkernel();
  }
  if (name == "sinc") {
    return make_sinc_kernel();
  }
  throw PreconditionError("unknown kernel '" + std::string(name) +
                          "'; valid kernels: normal, trapezoidal, sinc");
}

double psi_k(const Kernel& kernel, const QuadratureConfig& cfg)
{
  std::vector<double> points = {0.0};
  for (double knot : kernel.ft_knots()) {
    points.push_back(knot);
  }
  points.push_back(std::numeric_limits<double>::infinity());
  const auto r = integrate([&](double t) { return kernel.ft_deficit(t); }, points, cfg);
  return require_converged(r, "psi_k") / kPi;
}

double psi_k_space(const Kernel& kernel, const QuadratureConfig& cfg)
{
  if (kernel.kind() == KernelKind::normal) {
    const auto r = integrate(
      [](double x) { return std_normal_cdf(x) * std_normal_sf(x); },
      0.0,
      std::numeric_limits<double>::infinity(),
      cfg);
    return 2.0 * require_converged(r, "psi_k_space");
  }

  // K(1 - K) is even for symmetric k. Integrate [0, X] with X a whole number
  // of 2 pi periods, one panel per half period, then add the tail from the
  // asymptotic expansion of 1 - K at such an X.
  constexpr int periods = 400;
  const double x_max = 2.0 * kPi * periods;
  std::vector<double> points;
  points.reserve(2 * periods + 1);
  for (int i = 0; i <= 2 * periods; ++i) {
    points.push_back(kPi * i);
  }
  QuadratureConfig local = cfg;
  local.max_subdivisions = std::max(cfg.max_subdivisions, 8 * periods);

  double tail = 0.0;
  RealFunction integrand;
  if (kernel.kind() == KernelKind::sinc) {
    integrand = [](double x) {
      const double si = sine_integral(x);
      return (0.5 - si) * (0.5 + si);
    };
    // 1 - K = (f cos x + g sin x) / pi with the auxiliary functions f, g.
    tail = 2.0 / (kPi * x_max * x_max) - 1.0 / (2.0 * kPi * kPi * x_max);
  } else {
    integrand = [&kernel](double x) {
      const double k = kernel.integrated(x);
      return k * (1.0 - k);
    };
    // 1 - K = (-sin x + sin(2x)/2) / (pi x^2) + O(x^-3).
    tail = -3.0 / (4.0 * kPi * x_max * x_max) -
           5.0 / (24.0 * kPi * kPi * x_max * x_max * x_max);
  }
  const auto r = integrate(integrand, points, local);
  return 2.0 * (require_converged(r, "psi_k_space") + tail);
}

} // namespace cdfmise
