#pragma once

#include "cdfmise/numerics.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cdfmise {

enum class KernelKind
{
  normal,
  trapezoidal,
  sinc
};

//! A kernel k, its integrated form K(x) = int_{-inf}^x k, and its Fourier
//! transform phi_k. All three built-ins are symmetric, so phi_k is real.
//!
//! Besides phi_k itself the class exposes the two ratios the MISE integrands
//! need, (1 - phi_k(t)) / t and (1 - phi_k(t)^2) / t^2, evaluated without
//! cancellation and with their limits at t = 0.
class Kernel
{
public:
  KernelKind kind() const { return kind_; }
  std::string_view name() const;

  //! k(x). Throws UnsupportedError for the sinc kernel when asked for the
  //! Lebesgue density; use value() for the pointwise sinc function.
  double density(double x) const;
  //! Pointwise kernel function, including sin(x)/(pi x) for sinc.
  double value(double x) const;
  //! K(x); 1/2 + Si(x) for sinc (principal value). The trapezoidal and sinc
  //! forms are read from a cubic Hermite table for |x| < 128 (error < 1e-11).
  double integrated(double x) const;
  //! phi_k(t).
  double ft(double t) const;
  //! (1 - phi_k(t)) / t.
  double ft_gap_over_t(double t) const;
  //! (1 - phi_k(t)^2) / t^2.
  double ft_deficit(double t) const;

  //! Frequencies where phi_k is not smooth (sorted, positive).
  std::span<const double> ft_knots() const;
  //! phi_k vanishes for |t| >= this value, when such a bound exists.
  std::optional<double> ft_support() const;

  double s_k() const { return s_k_; }
  double t_k() const { return t_k_; }
  bool integrable() const { return integrable_; }
  bool abs_first_moment_finite() const { return abs_first_moment_finite_; }
  //! Closed form of psi(K) = int K(1 - K).
  double psi_closed() const { return psi_closed_; }

private:
  friend Kernel make_normal_kernel();
  friend Kernel make_trapezoidal_superkernel();
  friend Kernel make_sinc_kernel();

  Kernel(KernelKind kind, double s_k, double t_k, bool integrable, bool first_moment, double psi);

  KernelKind kind_;
  double s_k_;
  double t_k_;
  bool integrable_;
  bool abs_first_moment_finite_;
  double psi_closed_;
};

//! Standard normal kernel: K = Phi, phi_k(t) = exp(-t^2/2).
Kernel make_normal_kernel();
//! Trapezoidal superkernel k(x) = (cos x - cos 2x) / (pi x^2) with
//! phi_k = 1 on [0,1], 2 - |t| on [1,2], 0 beyond.
Kernel make_trapezoidal_superkernel();
//! Sinc kernel sin(x)/(pi x); phi_k is the indicator of [-1, 1].
Kernel make_sinc_kernel();

//! Looks a kernel up by catalog name ("normal", "trapezoidal", "sinc").
//! Throws PreconditionError listing the catalog on an unknown name.
Kernel kernel_from_name(std::string_view name);

//! psi(K) through the Fourier side, (2 pi)^-1 int t^-2 (1 - |phi_k(t)|^2) dt.
double psi_k(const Kernel& kernel, const QuadratureConfig& cfg = {});

//! psi(K) through the space side, int K(x)(1 - K(x)) dx, by direct
//! quadrature. The oscillating tails of the trapezoidal and sinc kernels are
//! integrated out to a whole number of periods and closed with their leading
//! asymptotic terms.
double psi_k_space(const Kernel& kernel, const QuadratureConfig& cfg = {});

} // namespace cdfmise
