#include "near.hpp"

#include "cdfmise/errors.hpp"
#include "cdfmise/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

using namespace cdfmise;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Kernel> all_kernels()
{
  return {make_normal_kernel(), make_trapezoidal_superkernel(), make_sinc_kernel()};
}

// 1/2 + int_0^x k by quadrature with a panel every pi.
double integrated_by_quadrature(const Kernel& k, double x)
{
  std::vector<double> pts{0.0};
  const double step = kPi;
  for (double p = step; p < std::abs(x); p += step) {
    pts.push_back(p);
  }
  pts.push_back(std::abs(x));
  QuadratureConfig cfg;
  cfg.max_subdivisions = 20000;
  const double half = require_converged(integrate([&](double z) { return k.value(z); }, pts, cfg), "K");
  return x >= 0 ? 0.5 + half : 0.5 - half;
}

} // namespace

TEST_CASE("normal kernel")
{
  const Kernel k = make_normal_kernel();
  CHECK(k.ft(0.0) == 1.0);
  CHECK(k.integrated(0.0) == 0.5);
  CHECK(k.s_k() == 0.0);
  CHECK(k.t_k() == 0.0);
  CHECK(k.integrable());
  CHECK(k.abs_first_moment_finite());
  CHECK_FALSE(k.ft_support().has_value());
  CHECK_NEAR(k.ft(1.3), std::exp(-0.845), 1e-15);
  CHECK_NEAR(k.density(0.0), 1.0 / std::sqrt(2 * kPi), 1e-16);
}

TEST_CASE("normal kernel: both sides of the psi(K) identity give 1/sqrt(pi)")
{
  const Kernel k = make_normal_kernel();
  CHECK_NEAR(psi_k(k), 1.0 / std::sqrt(kPi), 1e-8);
  CHECK_NEAR(psi_k_space(k), 1.0 / std::sqrt(kPi), 1e-8);
  CHECK_NEAR(k.psi_closed(), 1.0 / std::sqrt(kPi), 1e-15);
}

TEST_CASE("trapezoidal superkernel")
{
  const Kernel k = make_trapezoidal_superkernel();
  CHECK(k.ft(0.7) == 1.0);
  CHECK(k.ft(1.0) == 1.0);
  CHECK(k.ft(1.5) == 0.5);
  CHECK(k.ft(2.0) == 0.0);
  CHECK(k.ft(2.5) == 0.0);
  CHECK(k.ft(-1.5) == 0.5);
  CHECK(k.s_k() == 1.0);
  CHECK(k.t_k() == 1.0);
  CHECK(k.integrable());
  CHECK_FALSE(k.abs_first_moment_finite());
  CHECK(k.ft_support() == 2.0);
  CHECK_NEAR(k.value(0.0), 1.5 / kPi, 1e-15);
}

TEST_CASE("trapezoidal superkernel: phi_k matches a numeric Fourier transform of k")
{
  // phi_k(t) = 2 int_0^inf k(x) cos(tx) dx, cut at 4000 pi. The grid keeps
  // |1 - t| and |2 - t| at least 0.05 so the dropped tail stays below 1e-6.
  const Kernel k = make_trapezoidal_superkernel();
  const double cut = 4000.0 * kPi;
  std::vector<double> pts;
  for (int i = 0; i <= 4000; ++i) {
    pts.push_back(i * kPi);
  }
  pts.back() = cut;
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-11;
  cfg.max_subdivisions = 100000;
  std::vector<double> ts;
  for (int i = 0; i < 19; ++i) {
    ts.push_back(0.05 + 0.1 * i);
  }
  ts.push_back(2.5);
  for (double t : ts) {
    const double numeric =
      2.0 * require_converged(integrate([&](double x) { return k.value(x) * std::cos(t * x); }, pts, cfg), "ft");
    CHECK_NEAR(k.ft(t), numeric, 1e-6);
  }
}

TEST_CASE("trapezoidal superkernel: psi_k")
{
  const Kernel k = make_trapezoidal_superkernel();
  const double expected = (4.0 * std::numbers::ln2 - 2.0) / kPi;
  CHECK_NEAR(expected, 0.2459226, 1e-7);
  CHECK_NEAR(psi_k(k), expected, 1e-8);
  CHECK_NEAR(psi_k_space(k), expected, 1e-8);
}

TEST_CASE("sinc kernel")
{
  const Kernel k = make_sinc_kernel();
  CHECK(k.integrated(0.0) == 0.5);
  CHECK(k.ft(0.9999) == 1.0);
  CHECK(k.ft(1.0001) == 0.0);
  CHECK(k.s_k() == 1.0);
  CHECK(k.t_k() == 1.0);
  CHECK_FALSE(k.integrable());
  CHECK_THROWS_AS(k.density(0.3), UnsupportedError);
  CHECK_NEAR(k.value(2.0), std::sin(2.0) / (2.0 * kPi), 1e-16);
  CHECK_NEAR(psi_k(k), 1.0 / kPi, 1e-8);
  CHECK_NEAR(1.0 / kPi, 0.3183099, 1e-7);
  CHECK_NEAR(psi_k_space(k), 1.0 / kPi, 1e-6);
}

TEST_CASE("kernel invariants")
{
  for (const Kernel& k : all_kernels()) {
    CAPTURE(k.name());
    CHECK(k.ft(0.0) == 1.0);
    CHECK(k.s_k() <= k.t_k());
    for (int i = 0; i <= 400; ++i) {
      const double t = 0.01 * i;
      CHECK(k.ft(t) >= 0.0);
      CHECK(k.ft(t) <= 1.0);
      CHECK(k.ft(t) == k.ft(-t));
    }
    CHECK_NEAR(k.integrated(-1e6), 0.0, 1e-6);
    CHECK_NEAR(k.integrated(1e6), 1.0, 1e-6);
  }
}

TEST_CASE("s_k extraction property")
{
  for (const Kernel& k : all_kernels()) {
    if (k.s_k() <= 0.0) {
      continue;
    }
    CAPTURE(k.name());
    const double top = k.s_k() * (1.0 - 1e-9);
    for (int i = 0; i < 50; ++i) {
      CHECK(k.ft(top * i / 49.0) == 1.0);
    }
    bool dips = false;
    for (int i = 1; i <= 100; ++i) {
      dips = dips || k.ft(k.s_k() + 0.001 * i) < 1.0;
    }
    CHECK(dips);
  }
}

TEST_CASE("ratio helpers agree with phi_k away from the origin")
{
  for (const Kernel& k : all_kernels()) {
    CAPTURE(k.name());
    for (double t : {0.3, 0.9, 1.2, 1.7, 2.4, 5.0}) {
      const double f = k.ft(t);
      CHECK_NEAR(k.ft_gap_over_t(t), (1.0 - f) / t, 1e-14);
      CHECK_NEAR(k.ft_deficit(t), (1.0 - f * f) / (t * t), 1e-13);
    }
    CHECK(std::isfinite(k.ft_gap_over_t(0.0)));
    CHECK(std::isfinite(k.ft_deficit(0.0)));
  }
  CHECK_NEAR(make_normal_kernel().ft_deficit(0.0), 1.0, 1e-15);
  CHECK(make_trapezoidal_superkernel().ft_deficit(0.0) == 0.0);
}

TEST_CASE("integrated kernel is antisymmetric about 1/2")
{
  for (const Kernel& k : all_kernels()) {
    CAPTURE(k.name());
    for (double x : {0.1, 1.0, 3.7, 20.0, 127.5, 128.0, 500.0}) {
      CHECK_NEAR(k.integrated(-x), 1.0 - k.integrated(x), 1e-15);
    }
  }
}

TEST_CASE("normal K is nondecreasing")
{
  const Kernel k = make_normal_kernel();
  double prev = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double v = k.integrated(0.025 * i);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("tabulated K agrees with direct integration of k")
{
  const Kernel trap = make_trapezoidal_superkernel();
  const Kernel sinc = make_sinc_kernel();
  for (double x : {0.3, 1.7, -5.2, 33.3, 100.1, 127.99, 128.5, -300.0}) {
    CAPTURE(x);
    CHECK_NEAR(trap.integrated(x), integrated_by_quadrature(trap, x), 1e-10);
    CHECK_NEAR(sinc.integrated(x), integrated_by_quadrature(sinc, x), 1e-10);
    CHECK_NEAR(sinc.integrated(x), 0.5 + sine_integral(x), 1e-11);
  }
}

TEST_CASE("K(1 - K) is integrable for every built-in")
{
  for (const Kernel& k : all_kernels()) {
    CAPTURE(k.name());
    const double p = psi_k_space(k);
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
  }
}

TEST_CASE("kernel catalog lookup")
{
  CHECK(kernel_from_name("normal").kind() == KernelKind::normal);
  CHECK(kernel_from_name("trapezoidal").kind() == KernelKind::trapezoidal);
  CHECK(kernel_from_name("sinc").kind() == KernelKind::sinc);
  try {
    kernel_from_name("epanechnikov");
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("trapezoidal") != std::string::npos);
    CHECK(msg.find("sinc") != std::string::npos);
  }
}
