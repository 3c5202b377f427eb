#include "near.hpp"

#include "cdfmise/bandwidth.hpp"
#include "cdfmise/errors.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace cdfmise;

namespace {

constexpr double kPi = std::numbers::pi;
const double kPsiJdlvp = (96.0 * std::numbers::ln2 - 43.0) / (8.0 * kPi);
const double kPsiTrap = (4.0 * std::numbers::ln2 - 2.0) / kPi;

struct Pair
{
  Distribution dist;
  Kernel kernel;
};

std::vector<Pair> catalog_pairs()
{
  return {{make_jdlvp(), make_trapezoidal_superkernel()},
          {make_jdlvp(), make_sinc_kernel()},
          {make_normal(1.0), make_normal_kernel()},
          {make_normal(1.0), make_sinc_kernel()}};
}

} // namespace

TEST_CASE("optimal bandwidth reference values")
{
  // Independent scipy minimization of the exact MISE.
  const Distribution j = make_jdlvp();
  const Kernel trap = make_trapezoidal_superkernel();
  const Kernel sinc = make_sinc_kernel();
  const BandwidthSearch s = default_search(j);

  const auto t3 = optimal_bandwidth(j, trap, 1000, s);
  CHECK_NEAR(t3.h_opt, 0.91896, 2e-5);
  CHECK_NEAR(t3.mise_at_opt / (kPsiJdlvp / 1000), 0.77607, 1e-5);
  CHECK_NEAR(optimal_bandwidth(j, trap, 3000, s).h_opt, 0.84067, 2e-5);

  const auto t6 = optimal_bandwidth(j, trap, 1000000, s);
  CHECK_NEAR(t6.h_opt, 0.631773, 2e-6);
  CHECK_NEAR(relative_efficiency(j, trap, 1000000, s), 0.83856, 1e-5);

  const auto s6 = optimal_bandwidth(j, sinc, 1000000, s);
  CHECK_NEAR(s6.h_opt, 0.543106, 2e-6);
  CHECK_NEAR(relative_efficiency(j, sinc, 1000000, s), 0.81767, 1e-5);

  CHECK_NEAR(optimal_bandwidth(j, trap, 10000000, s).h_opt, 0.594, 1e-3);
  CHECK_NEAR(optimal_bandwidth(j, sinc, 10000000, s).h_opt, 0.5286, 1e-4);
}

TEST_CASE("JdlVP with trapezoidal kernel at n = 1e6 is an interior optimum above 1/2")
{
  const Distribution j = make_jdlvp();
  const auto r = optimal_bandwidth(j, make_trapezoidal_superkernel(), 1000000, default_search(j));
  CHECK(r.h_opt > 0.5);
  CHECK(r.h_opt < 0.65);
  CHECK(r.boundary_flag == BoundaryFlag::interior);
}

TEST_CASE("normal data with the sinc kernel at n = 100")
{
  const Distribution d = make_normal(1.0);
  const BandwidthSearch s = default_search(d);
  const auto r = optimal_bandwidth(d, make_sinc_kernel(), 100, s);
  const double expected = 1.0 / std::sqrt(std::log(101.0));
  CHECK_NEAR(expected, 0.46548798624189183, 1e-16);
  CHECK_NEAR(r.h_opt, expected, s.refine_tol);
  const auto roots = sinc_critical_bandwidths(d, 100, {0.05, s.h_max});
  REQUIRE(roots.size() == 1);
  CHECK_NEAR(roots[0], expected, 1e-10);
}

TEST_CASE("sinc critical points for JdlVP match the polynomial branch")
{
  // ((2 - t)^3 / 4)^2 = 1/(n+1) on 1 <= t <= 2
  const Distribution j = make_jdlvp();
  for (std::uint64_t n : {20ull, 1000ull, 1000000ull}) {
    const double t = 2.0 - std::cbrt(4.0 / std::sqrt(n + 1.0));
    const auto roots = sinc_critical_bandwidths(j, n, {0.05, 8.0});
    REQUIRE(roots.size() == 1);
    CHECK_NEAR(roots[0], 1.0 / t, 1e-10);
  }
  CHECK_NEAR(sinc_critical_bandwidths(j, 1000, {0.05, 8.0})[0], 0.66751070004787854622, 1e-10);
  // the scan range excludes the root
  CHECK(sinc_critical_bandwidths(j, 1000, {0.05, 0.6}).empty());
  CHECK_THROWS_AS(sinc_critical_bandwidths(j, 1000, {0.0, 1.0}), DomainError);
}

TEST_CASE("normal kernel on normal data: h_opt strictly decreases toward 0")
{
  const Distribution d = make_normal(1.0);
  const Kernel k = make_normal_kernel();
  double prev = 1e9;
  for (std::uint64_t n = 100; n <= 100000; n *= 2) {
    const double h = optimal_bandwidth(d, k, n, default_search(d)).h_opt;
    CHECK(h < prev);
    CHECK(h > 0.0);
    prev = h;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("limit bandwidth")
{
  CHECK(limit_bandwidth(make_jdlvp(), make_sinc_kernel()) == 0.5);
  CHECK(limit_bandwidth(make_jdlvp(), make_trapezoidal_superkernel()) == 0.5);
  CHECK(limit_bandwidth(rescale(make_jdlvp(), 2.0), make_trapezoidal_superkernel()) == 1.0);
  for (const Kernel& k : {make_normal_kernel(), make_trapezoidal_superkernel(), make_sinc_kernel()}) {
    CHECK(limit_bandwidth(make_normal(1.0), k) == 0.0);
    CHECK(limit_bandwidth(make_normal(3.0), k) == 0.0);
  }
  CHECK(limit_bandwidth(make_jdlvp(), make_normal_kernel()) == 0.0);
}

TEST_CASE("asymptotic relative efficiency")
{
  const Distribution j = make_jdlvp();
  const double trap = asymptotic_relative_efficiency(j, make_trapezoidal_superkernel());
  const double sinc = asymptotic_relative_efficiency(j, make_sinc_kernel());
  CHECK_NEAR(trap, 0.86874, 1e-4);
  CHECK_NEAR(sinc, 0.83010, 1e-4);
  CHECK_NEAR(trap, 1.0 - kPsiTrap * 0.5 / kPsiJdlvp, 1e-15);
  CHECK_NEAR(sinc, 1.0 - 0.5 / (kPi * kPsiJdlvp), 1e-15);
  CHECK(asymptotic_relative_efficiency(make_normal(1.0), make_normal_kernel()) == 1.0);
  CHECK(asymptotic_relative_efficiency(make_normal(1.0), make_sinc_kernel()) == 1.0);
  CHECK(asymptotic_relative_efficiency(j, make_normal_kernel()) == 1.0);
  // a rescaled target keeps the same ratio
  CHECK_NEAR(asymptotic_relative_efficiency(rescale(j, 3.0), make_sinc_kernel()), sinc, 1e-14);
}

TEST_CASE("normal kernel efficiency at n = 1e6 is close to one")
{
  const Distribution d = make_normal(1.0);
  const double e = relative_efficiency(d, make_normal_kernel(), 1000000, default_search(d));
  CHECK(e <= 1.0);
  CHECK(std::abs(e - 1.0) <= 0.02);
}

TEST_CASE("h_opt is nonincreasing in n for every catalog pair")
{
  for (const auto& [d, k] : catalog_pairs()) {
    CAPTURE(d.name());
    CAPTURE(k.name());
    const BandwidthSearch s = default_search(d);
    double prev = 1e9;
    for (std::uint64_t n : {100ull, 1000ull, 10000ull, 100000ull, 1000000ull}) {
      const double h = optimal_bandwidth(d, k, n, s).h_opt;
      CHECK(h <= prev + s.refine_tol);
      prev = h;
    }
  }
}

TEST_CASE("global-minimum audit")
{
  for (const auto& [d, k] : catalog_pairs()) {
    CAPTURE(d.name());
    CAPTURE(k.name());
    const BandwidthSearch s = default_search(d);
    for (std::uint64_t n : {10ull, 300ull, 100000ull}) {
      const BandwidthResult r = optimal_bandwidth(d, k, n, s);
      CHECK(r.bracket.first <= r.h_opt);
      CHECK(r.h_opt <= r.bracket.second);
      CHECK(r.bracket.second - r.bracket.first <= 2 * s.refine_tol);
      CHECK(r.mise_at_opt <= mise(d, k, r.bracket.first, n).mise * (1 + 1e-12));
      CHECK(r.mise_at_opt <= mise(d, k, r.bracket.second, n).mise * (1 + 1e-12));
      CHECK(r.grid_points_scanned == s.grid_size + 1);
      for (int i = 0; i < 512; ++i) {
        const double h = s.h_max * i / 511.0;
        CHECK(r.mise_at_opt <= mise(d, k, h, n).mise * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("superkernels beat the empirical CDF for every n >= 2")
{
  const Distribution j = make_jdlvp();
  for (const Kernel& k : {make_trapezoidal_superkernel(), make_sinc_kernel()}) {
    for (std::uint64_t n : {2ull, 3ull, 10ull, 100ull, 10000ull, 10000000ull}) {
      const BandwidthResult r = optimal_bandwidth(j, k, n, default_search(j));
      CHECK(r.mise_at_opt < j.psi_f() / n);
      CHECK(r.h_opt > 0.0);
    }
  }
}

TEST_CASE("trapezoidal beats sinc for small n and loses for large n")
{
  const Distribution j = make_jdlvp();
  const BandwidthSearch s = default_search(j);
  const Kernel trap = make_trapezoidal_superkernel();
  const Kernel sinc = make_sinc_kernel();
  for (std::uint64_t n : {10ull, 100ull, 1000ull}) {
    CHECK(relative_efficiency(j, trap, n, s) < relative_efficiency(j, sinc, n, s));
  }
  CHECK(relative_efficiency(j, trap, 1000000, s) > relative_efficiency(j, sinc, 1000000, s));
}

TEST_CASE("boundary flags")
{
  const Distribution j = make_jdlvp();
  BandwidthSearch narrow = default_search(j);
  narrow.h_max = 0.3;
  const BandwidthResult r = optimal_bandwidth(j, make_trapezoidal_superkernel(), 1000, narrow);
  CHECK(r.boundary_flag == BoundaryFlag::at_upper_bracket);
  CHECK_FALSE(r.warning.empty());
  CHECK_NEAR(r.h_opt, 0.3, 1e-12);

  const BandwidthResult ok = optimal_bandwidth(j, make_trapezoidal_superkernel(), 1000, default_search(j));
  CHECK(ok.boundary_flag == BoundaryFlag::interior);
  CHECK(ok.warning.empty());
  CHECK(to_string(BoundaryFlag::at_zero) == "at_zero");
}

TEST_CASE("search validation and defaults")
{
  CHECK(default_search(make_jdlvp()).h_max == 8.0);
  CHECK(default_search(make_normal(2.0)).h_max == 8.0);
  CHECK(default_search(make_normal(1.0)).h_max == 4.0);
  BandwidthSearch s;
  s.grid_size = 63;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = BandwidthSearch{};
  s.h_max = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = BandwidthSearch{};
  s.refine_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("efficiency curve")
{
  const Distribution j = make_jdlvp();
  const std::vector<std::uint64_t> ns{10, 100, 1000, 10000};
  const EfficiencyCurve c = efficiency_curve(j, make_sinc_kernel(), ns, default_search(j));
  CHECK(c.n_values == ns);
  REQUIRE(c.h_opt.size() == ns.size());
  REQUIRE(c.rel_eff.size() == ns.size());
  for (double e : c.rel_eff) {
    CHECK(e > 0.0);
    CHECK(e <= 1.0);
  }
  CHECK_NEAR(c.asymptote, 0.83010, 1e-4);
}

TEST_CASE("sandwich inequalities")
{
  const Distribution j = make_jdlvp();
  const BandwidthSearch s = default_search(j);
  const std::vector<std::uint64_t> ns{10, 100, 1000, 10000, 100000, 1000000};

  const SandwichReport trap = sandwich_check(j, make_trapezoidal_superkernel(), ns, s, 0.15);
  CHECK(trap.ok);
  CHECK(trap.lower_bound == 0.5);
  REQUIRE(trap.results.size() == ns.size());
  for (const auto& r : trap.results) {
    CHECK(r.h_opt >= 0.5 - s.refine_tol);
  }

  const SandwichReport sinc = sandwich_check(j, make_sinc_kernel(), ns, s, 0.05);
  CHECK(sinc.ok);
  CHECK(sinc.results.back().h_opt >= 0.5);
  CHECK(sinc.results.back().h_opt <= 0.55);

  const Distribution n1 = make_normal(1.0);
  const SandwichReport normal = sandwich_check(n1, make_normal_kernel(), ns, default_search(n1), 0.05);
  CHECK(normal.ok);
  CHECK(normal.lower_bound == 0.0);

  // a window the finite-n sequence has not reached yet is reported, not hidden
  const SandwichReport tight = sandwich_check(j, make_trapezoidal_superkernel(), ns, s, 0.01);
  CHECK_FALSE(tight.ok);
  CHECK_FALSE(tight.violations.empty());

  CHECK_THROWS_AS(sandwich_check(j, make_sinc_kernel(), {}, s, 0.05), PreconditionError);
}
