#pragma once

#include "cdfmise/distributions.hpp"
#include "cdfmise/kernels.hpp"
#include "cdfmise/numerics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cdfmise {

//! Observed data: values sorted ascending, with the seed and distribution
//! they were drawn from.
struct Sample
{
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::string source;
};

//! n draws from `dist` with the given seed.
Sample draw_sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

//! Wraps arbitrary data; sorts it. Throws PreconditionError on empty input
//! or non-finite values.
Sample make_sample(std::vector<double> values, std::uint64_t seed = 0, std::string source = "data");

//! Empirical CDF #{X_j <= x} / n.
double empirical_cdf(const Sample& sample, double x);

//! F_nh(x) = n^-1 sum_j K((x - X_j) / h); the empirical CDF at h = 0.
//! Sinc output is not clipped to [0, 1].
double estimate_cdf(const Sample& sample, const Kernel& kernel, double h, double x);

//! int (estimate(x) - F(x))^2 dx over the real line, with `breakpoints`
//! (finite, sorted) as initial panel boundaries. Both tails are integrated
//! out to infinity, so `estimate` must approach F fast enough there.
double integrated_squared_error(const RealFunction& estimate,
                                const Distribution& dist,
                                std::span<const double> breakpoints,
                                const QuadratureConfig& cfg = {});

//! Integrated squared error int (F_nh - F)^2 of one realized estimator.
double ise(const Sample& sample,
           const Kernel& kernel,
           double h,
           const Distribution& dist,
           const QuadratureConfig& cfg = {});

//! Looser tolerances for Monte Carlo work, where each ISE only has to be
//! far more accurate than the replication noise.
QuadratureConfig monte_carlo_quadrature();

struct MonteCarloMise
{
  double estimate = 0.0;
  double std_error = 0.0;
  int replications = 0;
  double h = 0.0;
  std::uint64_t n = 0;
};

//! Seed of replication `index` under master seed `seed` (splitmix64).
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index);

//! Mean and standard error of the ISE over `replications` independent
//! samples. Replications run on `threads` workers (0 = hardware
//! concurrency); the result does not depend on the thread count.
MonteCarloMise monte_carlo_mise(const Distribution& dist,
                                const Kernel& kernel,
                                double h,
                                std::uint64_t n,
                                int replications,
                                std::uint64_t seed,
                                const QuadratureConfig& cfg = monte_carlo_quadrature(),
                                unsigned threads = 0);

} // namespace cdfmise
