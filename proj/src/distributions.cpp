#include "cdfmise/distributions.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace cdfmise {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

const double kJdlvpPsi = (96.0 * std::numbers::ln2 - 43.0) / (8.0 * kPi);
const double kNormalPsi = 1.0 / std::sqrt(kPi);

double jdlvp_density(double x)
{
  if (x == 0.0) {
    return 3.0 / (4.0 * kPi);
  }
  const double s = std::sin(0.5 * x) / (0.5 * x);
  const double s2 = s * s;
  return 3.0 / (4.0 * kPi) * s2 * s2;
}

// Closed form of F(x) = 1/2 + int_0^x f, from three integrations by parts of
// (9 + 3 cos 2x - 12 cos x) / (2 pi x^4). Written with half-angle products
// so that no term suffers cancellation near x = 0.
// int_z^inf e^{iay} y^-4 dy = -e^{iaz} / (ia z^4) sum_k (4)_k / (iaz)^k, the
// rising-factorial series summed until its terms stop shrinking.
std::complex<double> oscillatory_tail(double a, double z)
{
  using cplx = std::complex<double>;
  const cplx iaz(0.0, a * z);
  cplx term(1.0, 0.0);
  cplx sum = term;
  for (int k = 1; k < 200; ++k) {
    const cplx next = term * static_cast<double>(3 + k) / iaz;
    if (std::abs(next) >= std::abs(term)) {
      break;
    }
    term = next;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) {
      break;
    }
  }
  const double z4 = z * z * z * z;
  return -std::exp(iaz) / (cplx(0.0, a) * z4) * sum;
}

// 1 - F(z) for large z > 0, with f = (3/2pi)(3 - 4 cos y + cos 2y) / y^4.
double jdlvp_upper_tail(double z)
{
  const double lead = 1.0 / (z * z * z);
  return 3.0 / (2.0 * kPi) *
         (lead - 4.0 * oscillatory_tail(1.0, z).real() + oscillatory_tail(2.0, z).real());
}

// Beyond this the closed form below loses its relative accuracy to
// cancellation, and the tail series takes over.
constexpr double kJdlvpTailStart = 64.0;

double jdlvp_cdf(double x)
{
  if (x <= -kJdlvpTailStart) {
    return jdlvp_upper_tail(-x);
  }
  if (x >= kJdlvpTailStart) {
    return 1.0 - jdlvp_upper_tail(x);
  }
  if (std::abs(x) < 1e-6) {
    return 0.5 + 3.0 / (4.0 * kPi) * x;
  }
  const double s = std::sin(0.5 * x);
  const double c = std::cos(0.5 * x);
  const double s2 = s * s;
  const double g0 = 24.0 * s2 * s2;
  const double g1 = 48.0 * s2 * s * c;
  const double g2 = 24.0 * s2 * (3.0 * c * c - s2);
  const double x2 = x * x;
  const double by_parts = -g0 / (3.0 * x2 * x) - g1 / (6.0 * x2) - g2 / (6.0 * x);
  return 0.5 + by_parts / (2.0 * kPi) + 2.0 * sine_integral(2.0 * x) - sine_integral(x);
}

double jdlvp_cf(double t)
{
  const double a = std::abs(t);
  if (a <= 1.0) {
    return 1.0 - 1.5 * a * a + 0.75 * a * a * a;
  }
  if (a <= 2.0) {
    const double r = 2.0 - a;
    return 0.25 * r * r * r;
  }
  return 0.0;
}

double jdlvp_deficit(double t)
{
  const double a = std::abs(t);
  if (a <= 1.0) {
    // 1 - phi = t^2 (3/2 - 3|t|/4)
    return (1.5 - 0.75 * a) * (1.0 + jdlvp_cf(a));
  }
  const double phi = jdlvp_cf(a);
  return (1.0 - phi) * (1.0 + phi) / (t * t);
}

double normal_deficit(double t)
{
  const double t2 = t * t;
  if (t2 == 0.0) {
    return 1.0;
  }
  return -std::expm1(-t2) / t2;
}

void check_scale(double a, const char* what)
{
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(what) + " must be a positive finite number");
  }
}

} // namespace

std::string Distribution::name() const
{
  std::ostringstream os;
  os.precision(17);
  if (family_ == DistributionFamily::normal) {
    os << "normal(sigma=" << scale_ << ")";
  } else if (scale_ == 1.0) {
    os << "jdlvp";
  } else {
    os << "jdlvp(scale=" << scale_ << ")";
  }
  return os.str();
}

std::optional<double> Distribution::normal_sigma() const
{
  if (family_ == DistributionFamily::normal) {
    return scale_;
  }
  return std::nullopt;
}

double Distribution::density(double x) const
{
  const double z = x / scale_;
  const double f0 = family_ == DistributionFamily::normal
                      ? std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi)
                      : jdlvp_density(z);
  return f0 / scale_;
}

double Distribution::cdf_standard(double z) const
{
  return family_ == DistributionFamily::normal ? std_normal_cdf(z) : jdlvp_cdf(z);
}

double Distribution::cdf(double x) const
{
  return cdf_standard(x / scale_);
}

double Distribution::cf(double t) const
{
  const double u = scale_ * t;
  return family_ == DistributionFamily::normal ? std::exp(-0.5 * u * u) : jdlvp_cf(u);
}

double Distribution::cf_deficit(double t) const
{
  const double u = scale_ * t;
  const double d0 = family_ == DistributionFamily::normal ? normal_deficit(u) : jdlvp_deficit(u);
  return scale_ * scale_ * d0;
}

std::vector<double> Distribution::cf_knots() const
{
  if (family_ == DistributionFamily::jdlvp) {
    return {1.0 / scale_, 2.0 / scale_};
  }
  return {};
}

double Distribution::c_f() const
{
  return family_ == DistributionFamily::jdlvp ? 2.0 / scale_ : kInf;
}

double Distribution::d_f() const
{
  return family_ == DistributionFamily::jdlvp ? 2.0 / scale_ : kInf;
}

double Distribution::psi_f() const
{
  return scale_ * (family_ == DistributionFamily::jdlvp ? kJdlvpPsi : kNormalPsi);
}

double Distribution::tail_bound(double eps) const
{
  if (!(eps > 0.0) || eps >= 0.5) {
    throw DomainError("tail_bound: eps must lie in (0, 1/2)");
  }
  // Lower tail F(-z) of the standard member; symmetric, and accurate where
  // 1 - F(z) would cancel.
  auto lower_tail = [this](double z) { return cdf_standard(-z); };
  double hi = 1.0;
  while (lower_tail(hi) > eps) {
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lower_tail(mid) > eps ? lo : hi) = mid;
  }
  return hi * scale_;
}

Distribution make_jdlvp()
{
  return Distribution(DistributionFamily::jdlvp, 1.0);
}

Distribution make_normal(double sigma)
{
  check_scale(sigma, "sigma");
  return Distribution(DistributionFamily::normal, sigma);
}

Distribution rescale(const Distribution& dist, double a)
{
  check_scale(a, "scale");
  return Distribution(dist.family_, dist.scale_ * a);
}

Distribution distribution_from_spec(std::string_view spec)
{
  const std::string catalog = "valid distributions: jdlvp[:scale=<a>], normal[:sigma=<v>][,scale=<a>]";
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  double sigma = 1.0;
  double scale = 1.0;
  bool has_sigma = false;

  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto sep = rest.find_first_of(",:");
      const std::string_view item = rest.substr(0, sep);
      rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw PreconditionError("malformed distribution parameter '" + std::string(item) + "'; " + catalog);
      }
      const std::string_view key = item.substr(0, eq);
      const std::string_view val = item.substr(eq + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc{} || ptr != val.data() + val.size()) {
        throw PreconditionError("malformed number '" + std::string(val) + "'; " + catalog);
      }
      if (key == "sigma") {
        sigma = v;
        has_sigma = true;
      } else if (key == "scale") {
        scale = v;
      } else {
        throw PreconditionError("unknown distribution parameter '" + std::string(key) + "'; " + catalog);
      }
    }
  }

  try {
    if (head == "normal") {
      return rescale(make_normal(sigma), scale);
    }
    if (head == "jdlvp") {
      if (has_sigma) {
        throw PreconditionError("jdlvp takes no sigma parameter; " + catalog);
      }
      return rescale(make_jdlvp(), scale);
    }
  } catch (const DomainError& e) {
    throw PreconditionError(std::string(e.what()) + "; " + catalog);
  }
  throw PreconditionError("unknown distribution '" + std::string(head) + "'; " + catalog);
}

double psi_f_fourier(const Distribution& dist, const QuadratureConfig& cfg)
{
  std::vector<double> points = {0.0};
  for (double knot : dist.cf_knots()) {
    points.push_back(knot);
  }
  points.push_back(kInf);
  const auto r = integrate([&](double t) { return dist.cf_deficit(t); }, points, cfg);
  return require_converged(r, "psi_f_fourier") / kPi;
}

double psi_f_space(const Distribution& dist, const QuadratureConfig& cfg)
{
  // F(x)(1 - F(x)) is even; 1 - F(x) = F(-x) avoids cancellation.
  const auto r = integrate([&](double x) { return dist.cdf(x) * dist.cdf(-x); }, 0.0, kInf, cfg);
  return 2.0 * require_converged(r, "psi_f_space");
}

std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed)
{
  if (n == 0) {
    throw PreconditionError("sample: n must be at least 1");
  }
  std::mt19937_64 gen(seed);
  std::vector<double> out;
  out.reserve(n);

  if (dist.family() == DistributionFamily::normal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(dist.scale() * normal(gen));
    }
  } else {
    // Envelope (3/4pi) min(1, 16/x^4) >= f, total mass 4/pi: a flat core on
    // [-2, 2] with probability 3/4 and Pareto(3) tails beyond |x| = 2.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::uint64_t budget = 1000000ull * n;
    std::uint64_t proposals = 0;
    while (out.size() < n) {
      if (++proposals > budget) {
        throw InternalError("jdlvp rejection sampler exceeded its proposal budget");
      }
      double x = 0.0;
      double ratio = 0.0;
      if (unif(gen) < 0.75) {
        x = 4.0 * unif(gen) - 2.0;
        const double s = x == 0.0 ? 1.0 : std::sin(0.5 * x) / (0.5 * x);
        ratio = s * s * s * s;
      } else {
        const double u = 1.0 - unif(gen); // (0, 1]
        x = 2.0 / std::cbrt(u);
        if (unif(gen) < 0.5) {
          x = -x;
        }
        const double s = std::sin(0.5 * x);
        ratio = s * s * s * s;
      }
      if (unif(gen) < ratio) {
        out.push_back(dist.scale() * x);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace cdfmise
