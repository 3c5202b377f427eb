#pragma once

#include "cdfmise/distributions.hpp"
#include "cdfmise/kernels.hpp"
#include "cdfmise/numerics.hpp"

#include <cstdint>
#include <string_view>

namespace cdfmise {

enum class MiseMethod
{
  fourier,
  closed_form_normal_normal,
  closed_form_normal_sinc,
  sinc_fourier,
  linear_segment,
  space_domain_oracle,
  monte_carlo
};

std::string_view to_string(MiseMethod method);

//! Integrated variance, integrated squared bias and their sum at one
//! bandwidth, with the route used to compute them.
struct MiseReport
{
  double h = 0.0;
  std::uint64_t n = 1;
  double iv = 0.0;
  double isb = 0.0;
  double mise = 0.0;
  MiseMethod method = MiseMethod::fourier;
  double error_estimate = 0.0;
};

//! IV(h) = (2 pi n)^-1 int t^-2 |phi_k(th)|^2 (1 - |phi_f(t)|^2) dt.
//! At h = 0 this is psi_f_fourier(dist) / n.
double iv_fourier(const Distribution& dist,
                  const Kernel& kernel,
                  double h,
                  std::uint64_t n,
                  const QuadratureConfig& cfg = {});

//! ISB(h) = (2 pi)^-1 int t^-2 |1 - phi_k(th)|^2 |phi_f(t)|^2 dt.
double isb_fourier(const Distribution& dist,
                   const Kernel& kernel,
                   double h,
                   const QuadratureConfig& cfg = {});

//! Exact MISE through the Fourier formulas for every pair.
MiseReport mise_fourier(const Distribution& dist,
                        const Kernel& kernel,
                        double h,
                        std::uint64_t n,
                        const QuadratureConfig& cfg = {});

//! Exact MISE, taking a closed-form or linear-segment shortcut when the pair
//! and bandwidth admit one and the Fourier route otherwise.
MiseReport mise(const Distribution& dist,
                const Kernel& kernel,
                double h,
                std::uint64_t n,
                const QuadratureConfig& cfg = {});

//! Sinc-kernel MISE,
//!   (n pi)^-1 int_0^{1/h} t^-2 (1 - |phi_f|^2) dt + pi^-1 int_{1/h}^inf t^-2 |phi_f|^2 dt,
//! with the split at t = 1/h. h <= 0 falls back to the empirical CDF.
MiseReport mise_sinc_fourier(const Distribution& dist,
                             double h,
                             std::uint64_t n,
                             const QuadratureConfig& cfg = {});

//! Closed-form MISE for N(0, sigma^2) data with the normal kernel.
double mise_normal_normal_closed(double sigma, double h, std::uint64_t n);

//! Closed-form MISE for N(0, sigma^2) data with the sinc kernel (h > 0).
double mise_normal_sinc_closed(double sigma, double h, std::uint64_t n);

//! Space-domain ISB from the triple-integral representation over
//! (x, y, z). The y and z integrals factor, and each is integrated by parts
//! against dF, so the oracle evaluates int_x (int_u f(u) K((x-u)/h) du - F(x))^2.
//! x and u are cut where each tail of F falls below cfg.tail_cutoff_tol.
//! Integrable kernels only.
double isb_space_oracle(const Distribution& dist,
                        const Kernel& kernel,
                        double h,
                        const QuadratureConfig& cfg = {});

//! Space-domain IV from the triple-integral representation with
//! F(x - h max(y, z)). Integrating z up to y gives 2 int F(x-hy) K(y) dK(y),
//! so the oracle evaluates n^-1 int_x Var_u[K((x-u)/h)] with u ~ F.
double iv_space_oracle(const Distribution& dist,
                       const Kernel& kernel,
                       double h,
                       std::uint64_t n,
                       const QuadratureConfig& cfg = {});

} // namespace cdfmise
