#include "near.hpp"

#include "cdfmise/errors.hpp"
#include "cdfmise/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace cdfmise;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("sine_integral reference values")
{
  CHECK(sine_integral(0.0) == 0.0);
  CHECK_NEAR(sine_integral(kPi), 0.5894898722360836, 2e-16);
  // mpmath si(x)/pi at 40 digits
  CHECK_NEAR(sine_integral(10.0), 0.52786843396897287568, 2e-15);
  CHECK_NEAR(sine_integral(50.0), 0.49389505374382473498, 2e-15);
  CHECK_NEAR(sine_integral(1000.0), 0.49982072633589786197, 2e-15);
  CHECK_NEAR(sine_integral(-3.5), -0.58350193700998942044, 2e-15);
}

TEST_CASE("sine_integral is odd")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    CHECK(sine_integral(x) == -sine_integral(-x));
  }
}

TEST_CASE("sine_integral is continuous across its internal regimes")
{
  for (double x : {4.0, 16.0, 32.0}) {
    const double lo = sine_integral(std::nextafter(x, 0.0));
    const double hi = sine_integral(x);
    CHECK_NEAR(lo, hi, 3e-15);
  }
}

TEST_CASE("sine_integral matches quadrature of sinc")
{
  auto sinc = [](double z) { return std::sin(z) / (kPi * z); };
  for (double x : {0.5, 1.0, 5.0, 20.0}) {
    const double q = require_converged(integrate(sinc, 0.0, x), "sinc");
    CHECK_NEAR(sine_integral(x), q, 1e-10);
  }
}

TEST_CASE("sine_integral rejects non-finite input")
{
  CHECK_THROWS_AS(sine_integral(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(sine_integral(kInf), DomainError);
}

TEST_CASE("sine integral auxiliary functions")
{
  // mpmath: f = Ci sin x - (Si - pi/2) cos x, g = -Ci cos x - (Si - pi/2) sin x
  const struct
  {
    double x, f, g;
  } cases[] = {{4.0, 0.22919256802452697974, 0.049678155593656750529},
               {10.0, 0.098191035010170168733, 0.0094885390163548074071},
               {31.5, 0.031682795446106519206, 0.001001834414631299196},
               {50.0, 0.019984075898337289911, 0.00039904755453781961755}};
  for (const auto& c : cases) {
    CAPTURE(c.x);
    const auto q = sine_integral_aux(c.x);
    CHECK_REL(q.real(), c.f, 1e-13);
    CHECK_REL(-q.imag(), c.g, 1e-12);
    CHECK_NEAR(0.5 - sine_integral(c.x), (q.real() * std::cos(c.x) - q.imag() * std::sin(c.x)) / kPi, 1e-15);
  }
  const auto below = sine_integral_aux(std::nextafter(32.0, 0.0));
  const auto above = sine_integral_aux(32.0);
  CHECK_REL(below.real(), above.real(), 1e-13);
  CHECK_REL(below.imag(), above.imag(), 1e-11);
  CHECK_THROWS_AS(sine_integral_aux(3.9), DomainError);
  CHECK_THROWS_AS(sine_integral_aux(kInf), DomainError);
}

TEST_CASE("std_normal_cdf values and limits")
{
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK_NEAR(std_normal_cdf(1.0), 0.8413447460685429, 1e-16);
  CHECK_NEAR(std_normal_cdf(40.0), 1.0, 1e-15);
  CHECK(std_normal_cdf(-40.0) >= 0.0);
  CHECK(std_normal_cdf(-40.0) < 1e-300);
  CHECK_REL(std_normal_sf(10.0), 7.619853024160526066e-24, 1e-13);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("integrate: Gaussian over the real line")
{
  const auto r = integrate([](double t) { return std::exp(-t * t / 2); }, -kInf, kInf);
  CHECK(r.converged);
  CHECK_NEAR(r.value, std::sqrt(2 * kPi), 1e-10);
}

TEST_CASE("integrate: constant on the unit interval")
{
  const auto r = integrate([](double) { return 1.0; }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK_NEAR(r.value, 1.0, 1e-15);
}

TEST_CASE("integrate: removable singularity at the origin, infinite range")
{
  const auto r = integrate([](double t) { return -std::expm1(-t * t) / (t * t); }, 0.0, kInf);
  CHECK(r.converged);
  CHECK(std::isfinite(r.value));
  CHECK_NEAR(r.value, std::sqrt(kPi), 1e-10);
}

TEST_CASE("integrate: polynomials up to degree 5 are exact")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    double c[6];
    for (double& ci : c) {
      ci = u(rng);
    }
    double a = u(rng);
    double b = u(rng);
    if (a > b) {
      std::swap(a, b);
    }
    auto p = [&c](double x) {
      double v = 0.0;
      for (int k = 5; k >= 0; --k) {
        v = v * x + c[k];
      }
      return v;
    };
    auto antiderivative = [&c](double x) {
      double v = 0.0;
      for (int k = 5; k >= 0; --k) {
        v = v * x + c[k] / (k + 1);
      }
      return v * x;
    };
    const auto r = integrate(p, a, b);
    CHECK(r.converged);
    CHECK_NEAR(r.value, antiderivative(b) - antiderivative(a), 1e-13);
  }
}

TEST_CASE("integrate: reversed limits flip the sign")
{
  auto f = [](double x) { return std::cos(x); };
  CHECK_NEAR(integrate(f, 1.0, 0.0).value, -std::sin(1.0), 1e-14);
}

TEST_CASE("integrate: breakpoints")
{
  const std::vector<double> pts{-1.0, 0.0, 1.0};
  const auto r = integrate([](double x) { return std::abs(x); }, pts);
  CHECK(r.converged);
  CHECK_NEAR(r.value, 1.0, 1e-15);

  const std::vector<double> unsorted{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, unsorted), PreconditionError);
}

TEST_CASE("integrate: converged results honour the error target")
{
  QuadratureConfig cfg;
  auto f = [](double x) { return std::sin(x) * std::exp(-0.1 * x); };
  const auto r = integrate(f, 0.0, 40.0, cfg);
  REQUIRE(r.converged);
  CHECK(r.error_estimate >= 0.0);
  CHECK(r.error_estimate <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value)));
}

TEST_CASE("integrate: running out of subdivisions is reported, never silent")
{
  QuadratureConfig cfg;
  cfg.max_subdivisions = 1;
  const auto r = integrate([](double x) { return std::sin(200.0 * x) * x; }, 0.0, 10.0, cfg);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(require_converged(r, "oscillatory"), QuadratureError);
}

TEST_CASE("QuadratureConfig validation")
{
  QuadratureConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = QuadratureConfig{};
  cfg.rel_tol = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = QuadratureConfig{};
  cfg.max_subdivisions = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = QuadratureConfig{};
  cfg.tail_cutoff_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
