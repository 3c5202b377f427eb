#include "cdfmise/numerics.hpp"

#include "cdfmise/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace cdfmise {

void QuadratureConfig::validate() const
{
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_cutoff_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be strictly positive");
  }
  if (max_subdivisions < 1) {
    throw DomainError("max_subdivisions must be at least 1");
  }
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace {

// Auxiliary functions f, g from their asymptotic series, summed until the
// terms stop shrinking; the truncation error is of order e^-x. Returns
// x f(x) and x^2 g(x).
std::pair<double, double> sine_aux_series(double x)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double r = 1.0 / (x * x);
  double f = 1.0;
  double g = 1.0;
  double tf = 1.0;
  double tg = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double nf = -tf * (2.0 * k - 1.0) * (2.0 * k) * r;
    const double ng = -tg * (2.0 * k) * (2.0 * k + 1.0) * r;
    if (std::abs(nf) > std::abs(tf) || std::abs(ng) > std::abs(tg)) {
      break;
    }
    tf = nf;
    tg = ng;
    f += tf;
    g += tg;
    if (std::abs(tf) < eps && std::abs(tg) < eps) {
      break;
    }
  }
  return {f, g};
}

// Lentz evaluation of the continued fraction for e^{ix} E1(ix) = g - i f.
std::complex<double> sine_aux_fraction(double x)
{
  using cplx = std::complex<double>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = 1e-300;
  cplx b(1.0, x);
  cplx c(1.0 / tiny, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>(i - 1) * (i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) {
      break;
    }
  }
  return h;
}

// Unnormalized sine integral int_0^x sin(z)/z dz for x >= 0.
double si_unnormalized(double x)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x < 4.0) {
    // Maclaurin series; the largest term stays below 3 for x < 4.
    double sum = x;
    double term = x;
    const double x2 = x * x;
    for (int k = 1; k < 40; ++k) {
      term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double contrib = term / (2.0 * k + 1.0);
      sum += contrib;
      if (std::abs(contrib) < eps * std::abs(sum)) {
        break;
      }
    }
    return sum;
  }

  if (x >= 32.0) {
    const auto [f, g] = sine_aux_series(x);
    return std::numbers::pi / 2.0 - f / x * std::cos(x) - g / (x * x) * std::sin(x);
  }

  // Si(x) = pi/2 + Im(E1(ix))
  const std::complex<double> h = sine_aux_fraction(x) * std::complex<double>(std::cos(x), -std::sin(x));
  return std::numbers::pi / 2.0 + h.imag();
}

} // namespace

double sine_integral(double x)
{
  if (!std::isfinite(x)) {
    throw DomainError("sine_integral: non-finite argument");
  }
  const double v = si_unnormalized(std::abs(x)) / std::numbers::pi;
  return x < 0.0 ? -v : v;
}

std::complex<double> sine_integral_aux(double x)
{
  if (!(x >= 4.0) || !std::isfinite(x)) {
    throw DomainError("sine_integral_aux: argument must be finite and at least 4");
  }
  if (x >= 32.0) {
    const auto [f, g] = sine_aux_series(x);
    return {f / x, -g / (x * x)};
  }
  const std::complex<double> h = sine_aux_fraction(x);
  return {-h.imag(), -h.real()};
}

double std_normal_cdf(double x)
{
  if (std::isnan(x)) {
    throw DomainError("std_normal_cdf: NaN argument");
  }
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_sf(double x)
{
  if (std::isnan(x)) {
    throw DomainError("std_normal_sf: NaN argument");
  }
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

namespace {

// 15-point Kronrod abscissae on [0, 1] (symmetric), with the embedded
// 7-point Gauss rule on the odd indices.
constexpr std::array<double, 8> kXgk = {
  0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
  0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
  0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
  0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class SegmentKind
{
  finite,
  right_tail, // [anchor, +inf)
  left_tail   // (-inf, anchor]
};

struct Segment
{
  SegmentKind kind;
  double anchor;
};

struct Panel
{
  int segment;
  double a;
  double b;
  double value;
  double error;
  bool alive;
};

class GaussKronrod
{
public:
  GaussKronrod(const RealFunction& f, std::vector<Segment> segments)
    : f_(f)
    , segments_(std::move(segments))
  {}

  double eval(int seg, double u) const
  {
    const Segment& s = segments_[seg];
    switch (s.kind) {
      case SegmentKind::finite:
        return f_(u);
      case SegmentKind::right_tail: {
        const double w = 1.0 / u;
        return f_(s.anchor + (1.0 - u) * w) * w * w;
      }
      case SegmentKind::left_tail: {
        const double w = 1.0 / u;
        return f_(s.anchor - (1.0 - u) * w) * w * w;
      }
    }
    return 0.0;
  }

  Panel apply(int seg, double a, double b) const
  {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    const double fc = eval(seg, centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 3; ++j) {
      const int jtw = 2 * j + 1;
      const double absc = hlgth * kXgk[jtw];
      const double v1 = eval(seg, centr - absc);
      const double v2 = eval(seg, centr + absc);
      f1[jtw] = v1;
      f2[jtw] = v2;
      resg += kWg[j] * (v1 + v2);
      resk += kWgk[jtw] * (v1 + v2);
      resabs += kWgk[jtw] * (std::abs(v1) + std::abs(v2));
    }
    for (int j = 0; j < 4; ++j) {
      const int jtwm1 = 2 * j;
      const double absc = hlgth * kXgk[jtwm1];
      const double v1 = eval(seg, centr - absc);
      const double v2 = eval(seg, centr + absc);
      f1[jtwm1] = v1;
      f2[jtwm1] = v2;
      resk += kWgk[jtwm1] * (v1 + v2);
      resabs += kWgk[jtwm1] * (std::abs(v1) + std::abs(v2));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    }
    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0) {
      abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) {
      abserr = std::max(eps * 50.0 * resabs, abserr);
    }
    if (!std::isfinite(result)) {
      abserr = std::numeric_limits<double>::infinity();
    }
    return Panel{seg, a, b, result, abserr, true};
  }

private:
  const RealFunction& f_;
  std::vector<Segment> segments_;
};

double tolerance_for(double value, const QuadratureConfig& cfg)
{
  return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
}

bool splittable(const Panel& p)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double mid = 0.5 * (p.a + p.b);
  const double scale = std::max(std::abs(p.a), std::abs(p.b));
  return mid > p.a && mid < p.b && (p.b - p.a) > 8.0 * eps * scale;
}

} // namespace

QuadratureResult integrate(const RealFunction& f,
                           std::span<const double> breakpoints,
                           const QuadratureConfig& cfg)
{
  cfg.validate();
  if (breakpoints.size() < 2) {
    throw PreconditionError("integrate: need at least two breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (std::isnan(breakpoints[i]) || breakpoints[i] < breakpoints[i - 1]) {
      throw PreconditionError("integrate: breakpoints must be nondecreasing");
    }
  }

  std::vector<Segment> segments;
  std::vector<Panel> panels;
  // Initial panel geometry, filled before the rule is applied.
  struct Initial
  {
    int segment;
    double a;
    double b;
  };
  std::vector<Initial> initial;

  const double lo = breakpoints.front();
  const double hi = breakpoints.back();
  if (lo == hi) {
    return QuadratureResult{0.0, 0.0, 0, true};
  }
  if (std::isinf(lo) && std::isinf(hi) && breakpoints.size() == 2) {
    if (lo > 0.0 || hi < 0.0) {
      throw PreconditionError("integrate: degenerate infinite interval");
    }
    const std::array<double, 3> split = {lo, 0.0, hi};
    return integrate(f, split, cfg);
  }

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (a == b) {
      continue;
    }
    if (std::isinf(a) && std::isinf(b)) {
      throw PreconditionError("integrate: interior infinite breakpoint");
    }
    if (std::isinf(b)) {
      segments.push_back({SegmentKind::right_tail, a});
      initial.push_back({static_cast<int>(segments.size()) - 1, 0.0, 1.0});
    } else if (std::isinf(a)) {
      segments.push_back({SegmentKind::left_tail, b});
      initial.push_back({static_cast<int>(segments.size()) - 1, 0.0, 1.0});
    } else {
      if (segments.empty() || segments.back().kind != SegmentKind::finite) {
        segments.push_back({SegmentKind::finite, 0.0});
      }
      initial.push_back({static_cast<int>(segments.size()) - 1, a, b});
    }
  }

  GaussKronrod rule(f, segments);
  panels.reserve(initial.size() + 2 * static_cast<std::size_t>(cfg.max_subdivisions));

  auto by_error = [&panels](int lhs, int rhs) {
    return panels[lhs].error < panels[rhs].error;
  };
  std::priority_queue<int, std::vector<int>, decltype(by_error)> queue(by_error);

  double value_sum = 0.0;
  double error_sum = 0.0;
  for (const Initial& init : initial) {
    panels.push_back(rule.apply(init.segment, init.a, init.b));
    value_sum += panels.back().value;
    error_sum += panels.back().error;
    queue.push(static_cast<int>(panels.size()) - 1);
  }

  auto resum = [&]() {
    value_sum = 0.0;
    error_sum = 0.0;
    for (const Panel& p : panels) {
      if (p.alive) {
        value_sum += p.value;
        error_sum += p.error;
      }
    }
  };

  int bisections = 0;
  while (!queue.empty() && bisections < cfg.max_subdivisions) {
    if (error_sum <= tolerance_for(value_sum, cfg)) {
      resum();
      if (error_sum <= tolerance_for(value_sum, cfg)) {
        break;
      }
    }
    const int worst = queue.top();
    queue.pop();
    const Panel parent = panels[worst];
    if (!splittable(parent)) {
      continue;
    }
    const double mid = 0.5 * (parent.a + parent.b);
    Panel left = rule.apply(parent.segment, parent.a, mid);
    Panel right = rule.apply(parent.segment, mid, parent.b);
    panels[worst].alive = false;
    value_sum += left.value + right.value - parent.value;
    error_sum += left.error + right.error - parent.error;
    panels.push_back(left);
    queue.push(static_cast<int>(panels.size()) - 1);
    panels.push_back(right);
    queue.push(static_cast<int>(panels.size()) - 1);
    ++bisections;
    if (bisections % 64 == 0) {
      resum();
    }
  }
  resum();

  QuadratureResult out;
  out.value = value_sum;
  out.error_estimate = error_sum;
  out.subdivisions_used = static_cast<int>(
    std::count_if(panels.begin(), panels.end(), [](const Panel& p) { return p.alive; }));
  out.converged = std::isfinite(value_sum) && error_sum <= tolerance_for(value_sum, cfg);
  return out;
}

QuadratureResult integrate(const RealFunction& f,
                           double lower,
                           double upper,
                           const QuadratureConfig& cfg)
{
  if (std::isnan(lower) || std::isnan(upper)) {
    throw DomainError("integrate: NaN limit");
  }
  if (upper < lower) {
    QuadratureResult r = integrate(f, upper, lower, cfg);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> limits = {lower, upper};
  return integrate(f, std::span<const double>(limits), cfg);
}

double require_converged(const QuadratureResult& result, std::string_view what)
{
  if (!result.converged) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge (error estimate " +
                          std::to_string(result.error_estimate) + " after " +
                          std::to_string(result.subdivisions_used) + " panels)");
  }
  return result.value;
}

} // namespace cdfmise
