#pragma once

#include "cdfmise/distributions.hpp"
#include "cdfmise/kernels.hpp"
#include "cdfmise/mise.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdfmise {

struct BandwidthSearch
{
  double h_max = 8.0;
  //! Log-spaced scan points on (0, h_max]; h = 0 is always scanned as well.
  int grid_size = 512;
  //! Golden-section refinement stops once the bracket is this narrow.
  double refine_tol = 1e-7;

  void validate() const;
};

//! Default search range: 4 sigma for normal data, 8 x scale for JdlVP.
BandwidthSearch default_search(const Distribution& dist);

enum class BoundaryFlag
{
  interior,
  at_zero,
  at_upper_bracket
};

std::string_view to_string(BoundaryFlag flag);

struct BandwidthResult
{
  double h_opt = 0.0;
  double mise_at_opt = 0.0;
  std::uint64_t n = 1;
  std::pair<double, double> bracket{0.0, 0.0};
  int grid_points_scanned = 0;
  double refined_tolerance = 0.0;
  BoundaryFlag boundary_flag = BoundaryFlag::interior;
  //! Non-empty when the minimizer sits on the upper end of the search range.
  std::string warning;
};

//! Global minimizer of MISE(h) over [0, h_max]: a dense scan (h = 0 plus a
//! log-spaced grid) followed by golden-section refinement around the best
//! scan point. The sinc MISE can have several local minima, so the scan
//! picks the basin. Ties within 1e-14 (relative) go to the smaller h.
BandwidthResult optimal_bandwidth(const Distribution& dist,
                                  const Kernel& kernel,
                                  std::uint64_t n,
                                  const BandwidthSearch& search,
                                  const QuadratureConfig& cfg = {});

//! Limit S_k / D_f of the optimal bandwidth sequence (0 when D_f is
//! infinite). Throws UnsupportedError unless C_f = D_f and S_k = T_k.
double limit_bandwidth(const Distribution& dist, const Kernel& kernel);

//! All h in [bracket.first, bracket.second] with |phi_f(1/h)|^2 = 1/(n+1),
//! the critical points of the sinc MISE. Sign scan on a 1024-point grid in
//! 1/h followed by bisection. bracket.first must be positive.
std::vector<double> sinc_critical_bandwidths(const Distribution& dist,
                                             std::uint64_t n,
                                             std::pair<double, double> bracket,
                                             const QuadratureConfig& cfg = {});

//! MISE(h_0n) / MISE(0).
double relative_efficiency(const Distribution& dist,
                           const Kernel& kernel,
                           std::uint64_t n,
                           const BandwidthSearch& search,
                           const QuadratureConfig& cfg = {});

//! 1 - psi(K) S_k / (psi(F) D_f); 1 when S_k = 0 or D_f is infinite.
double asymptotic_relative_efficiency(const Distribution& dist, const Kernel& kernel);

struct EfficiencyCurve
{
  std::vector<std::uint64_t> n_values;
  std::vector<double> h_opt;
  std::vector<double> rel_eff;
  double asymptote = 1.0;
};

EfficiencyCurve efficiency_curve(const Distribution& dist,
                                 const Kernel& kernel,
                                 const std::vector<std::uint64_t>& n_values,
                                 const BandwidthSearch& search,
                                 const QuadratureConfig& cfg = {});

struct SandwichReport
{
  bool ok = true;
  double lower_bound = 0.0;
  std::vector<BandwidthResult> results;
  std::vector<std::string> violations;
};

//! Checks h_0n >= S_k/D_f - refine_tol for every n, and, when S_k > 0 and
//! D_f is finite, that the last h_0n lies within `limit_window` of S_k/D_f.
SandwichReport sandwich_check(const Distribution& dist,
                                     const Kernel& kernel,
                                     const std::vector<std::uint64_t>& n_list,
                                     const BandwidthSearch& search,
                                     double limit_window,
                                     const QuadratureConfig& cfg = {});

} // namespace cdfmise
