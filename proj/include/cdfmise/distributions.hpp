#pragma once

#include "cdfmise/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdfmise {

enum class DistributionFamily
{
  jdlvp, //!< Jackson-de la Vallee Poussin, density (3/4pi)(sin(x/2)/(x/2))^4
  normal //!< N(0, 1)
};

//! A symmetric target distribution: a standard member of its family
//! rescaled by x -> x / scale, so that f(x) = f0(x/scale)/scale and
//! phi_f(t) = phi_0(scale * t).
class Distribution
{
public:
  DistributionFamily family() const { return family_; }
  std::string name() const;
  double scale() const { return scale_; }
  //! Standard deviation when the family is normal.
  std::optional<double> normal_sigma() const;

  double density(double x) const;
  double cdf(double x) const;
  //! phi_f(t); real for the symmetric built-ins.
  double cf(double t) const;
  //! (1 - phi_f(t)^2) / t^2, with its limit at t = 0.
  double cf_deficit(double t) const;
  //! Frequencies where phi_f is not smooth (sorted, positive).
  std::vector<double> cf_knots() const;

  double c_f() const;
  double d_f() const;
  //! psi(F) = int F (1 - F), stored in closed form.
  double psi_f() const;
  bool abs_first_moment_finite() const { return true; }
  bool square_integrable() const { return true; }

  //! Symmetric point beyond which each tail carries mass at most eps:
  //! F(-x) <= eps and 1 - F(x) <= eps.
  double tail_bound(double eps) const;

private:
  friend Distribution make_jdlvp();
  friend Distribution make_normal(double sigma);
  friend Distribution rescale(const Distribution& dist, double a);

  Distribution(DistributionFamily family, double scale)
    : family_(family)
    , scale_(scale)
  {}

  double cdf_standard(double z) const;

  DistributionFamily family_;
  double scale_;
};

Distribution make_jdlvp();
//! N(0, sigma^2); throws DomainError unless sigma > 0.
Distribution make_normal(double sigma);
//! Density f_a(x) = f(x/a)/a; throws DomainError unless a > 0.
Distribution rescale(const Distribution& dist, double a);

//! Parses "jdlvp", "normal", "normal:sigma=2", "jdlvp:scale=2",
//! "normal:sigma=1,scale=3". Throws PreconditionError naming the catalog on
//! malformed input.
Distribution distribution_from_spec(std::string_view spec);

//! psi(F) through the Fourier side, (2 pi)^-1 int t^-2 (1 - |phi_f(t)|^2) dt.
double psi_f_fourier(const Distribution& dist, const QuadratureConfig& cfg = {});

//! psi(F) through the space side, int F (1 - F), by direct quadrature.
double psi_f_space(const Distribution& dist, const QuadratureConfig& cfg = {});

//! n i.i.d. draws, sorted ascending. Deterministic in `seed`. Normal draws
//! use the standard transform method; JdlVP draws use rejection from a
//! flat-core / x^-4-tail envelope.
std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

} // namespace cdfmise
