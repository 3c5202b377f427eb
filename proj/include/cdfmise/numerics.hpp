#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string_view>

namespace cdfmise {

struct QuadratureConfig
{
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  //! Level below which tails of space-domain integrands are dropped.
  double tail_cutoff_tol = 1e-8;

  //! Throws DomainError unless all tolerances are positive and
  //! max_subdivisions >= 1.
  void validate() const;
};

struct QuadratureResult
{
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

using RealFunction = std::function<double(double)>;

//! Normalized sine integral Si(x) = int_0^x sin(z)/(pi z) dz, so that
//! Si(+inf) = 1/2.
double sine_integral(double x);

//! f(x) - i g(x) for the auxiliary functions of the sine integral, with
//! int_x^inf sin(z)/z dz = f(x) cos x + g(x) sin x. Needs x >= 4.
std::complex<double> sine_integral_aux(double x);

//! Standard normal distribution function.
double std_normal_cdf(double x);

//! Upper tail 1 - Phi(x), accurate for large positive x.
double std_normal_sf(double x);

//! Adaptive 15-point Gauss-Kronrod quadrature with global bisection of the
//! panel carrying the largest error estimate.
//!
//! Either limit may be infinite. A semi-infinite piece [a, inf) is mapped to
//! (0, 1] through x = a + (1 - u) / u, which keeps integrands decaying at
//! least like x^-2 bounded. The integrand is never evaluated at a finite
//! endpoint, so removable singularities there are harmless.
QuadratureResult integrate(const RealFunction& f,
                           double lower,
                           double upper,
                           const QuadratureConfig& cfg = {});

//! Same as above over [breakpoints.front(), breakpoints.back()], with every
//! interior breakpoint used as an initial panel boundary. The error budget
//! is shared globally across panels. Breakpoints must be nondecreasing; the
//! first and last may be infinite.
QuadratureResult integrate(const RealFunction& f,
                           std::span<const double> breakpoints,
                           const QuadratureConfig& cfg = {});

//! Returns the value, or throws QuadratureError naming `what` when the
//! result did not converge.
double require_converged(const QuadratureResult& result, std::string_view what);

} // namespace cdfmise
