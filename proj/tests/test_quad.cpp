#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lyaplab/errors.hpp"
#include "lyaplab/quad.hpp"

using namespace lyaplab;

TEST_CASE("closed-form integrals") {
  const double z[] = {0.0};
  const QuadResult a = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, z, 1e-8);
  CHECK(a.converged);
  CHECK(std::abs(a.value - 2.0) < 1e-8);
  CHECK(a.err_est <= 1e-8);

  const QuadResult b = integrate_adaptive([](double x) { return -std::log(x); }, 0.0, 1.0, z, 1e-8);
  CHECK(b.converged);
  CHECK(std::abs(b.value - 1.0) < 1e-8);

  const QuadResult c = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, 2.0 * std::numbers::pi, {}, 1e-12);
  CHECK(c.converged);
  CHECK(std::abs(c.value) < 1e-12);

  const double mid[] = {0.3};
  const QuadResult d = integrate_adaptive([](double x) { return std::pow(std::abs(x - 0.3), -0.5); }, 0.0, 1.0, mid, 1e-9);
  CHECK(d.converged);
  CHECK(std::abs(d.value - 2.0 * (std::sqrt(0.3) + std::sqrt(0.7))) < 1e-9);

  const QuadResult e = integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, z, 1e-8);
  CHECK(e.divergent);
  CHECK_FALSE(e.converged);
}

TEST_CASE("tolerance halving is stable") {
  const double z[] = {0.0, 0.5};
  const auto f = [](double x) { return std::pow(std::abs(x), -0.7) + std::log(std::abs(x - 0.5)); };
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const QuadResult a = integrate_adaptive(f, -1.0, 1.0, z, tol);
    const QuadResult b = integrate_adaptive(f, -1.0, 1.0, z, tol / 2.0);
    REQUIRE(a.converged);
    CHECK(std::abs(a.value - b.value) <= 2.0 * a.err_est + 1e-15);
  }
}

TEST_CASE("budget exhaustion is reported") {
  const QuadResult r = integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, {},
                                          QuadTolerance{1e-14, 1e-14}, 5);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
  CHECK(r.subdivisions <= 5);
}

TEST_CASE("scaled integral stays bounded as d shrinks") {
  double lo = INFINITY, hi = 0.0;
  for (double d : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0}) {
    const double v = quadr_bound_check(d, 0.75);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 10.0);

  // d = 1: no rescaling, plain integral of |x (x - 1)|^-0.6 over [-1, 1].
  const double z[] = {0.0, 1.0};
  const QuadResult plain = integrate_adaptive(
      [](double x) { return std::pow(std::abs(x * (x - 1.0)), -0.6); }, -1.0, 1.0, z, 1e-10);
  CHECK(quadr_bound_check(1.0, 0.6) == doctest::Approx(plain.value).epsilon(1e-8));

  // Complex d: |x - d| >= |x - Re d| keeps the integral below the real case.
  const double real_case = quadr_bound_check(1e-2, 0.75);
  const double imag_case = quadr_bound_check({0.0, 1e-2}, 0.75);
  CHECK(imag_case <= real_case);
  CHECK(imag_case > 0.1 * real_case);

  CHECK_THROWS(quadr_bound_check(0.0, 0.75));
  CHECK_THROWS(quadr_bound_check(2.0, 0.75));
}
