#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lyaplab/dos.hpp"
#include "lyaplab/errors.hpp"

using namespace lyaplab;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("histogram construction") {
  const auto e = uniform_edges(-1.0, 1.0, 4);
  REQUIRE(e.size() == 5);
  CHECK(e[2] == 0.0);
  const SpectralHistogram h = make_histogram(e, {1.0, 1.0, 1.0, 1.0});
  CHECK(sum(h.mass) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cumulative_mass(h, 0.0) == doctest::Approx(0.5));
  CHECK(cumulative_mass(h, -0.75) == doctest::Approx(0.125));
  CHECK(cumulative_mass(h, 5.0) == doctest::Approx(1.0));
  CHECK(histogram_mass(h, -0.25, 0.25) == doctest::Approx(0.25));
  CHECK_THROWS(make_histogram({0.0, 1.0}, {-1.0}));
  CHECK_THROWS(make_histogram({1.0, 0.0}, {1.0}));
  CHECK_THROWS(make_histogram({0.0, 1.0, 2.0}, {1.0}));

  const SpectralHistogram atom = make_histogram({0.0, 0.0}, {1.0});
  CHECK(cumulative_mass(atom, -1e-9) == 0.0);
  CHECK(cumulative_mass(atom, 0.0) == 1.0);
}

TEST_CASE("dos_histogram of constant potentials") {
  const OperatorSpec c{ConstantDriver{0.3}, 4.0};
  const auto edges = uniform_edges(-1.0, 1.5, 250);
  const SpectralHistogram h = dos_histogram(c, 500, 1, edges, 1);
  CHECK_FALSE(h.coverage_warning);
  CHECK(sum(h.mass) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(histogram_mass(h, 0.3 - 0.5 - 0.01, 0.3 + 0.5 + 0.01) == doctest::Approx(1.0).epsilon(1e-12));

  const OperatorSpec free{ConstantDriver{0.0}, 1.0};
  const SpectralHistogram f = dos_histogram(free, 5000, 1, uniform_edges(-2.5, 2.5, 500), 1);
  CHECK(std::abs(cumulative_mass(f, 0.0) - 0.5) < 1e-2);
  double sup = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.01)
    sup = std::max(sup, std::abs(cumulative_mass(f, x) - std::acos(-x / 2.0) / kPi));
  CHECK(sup < 1e-2);

  const SpectralHistogram narrow = dos_histogram(free, 200, 1, uniform_edges(-1.0, 1.0, 20), 1);
  CHECK(narrow.coverage_warning);
  CHECK(sum(narrow.mass) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dos_histogram is reproducible and worker independent") {
  const OperatorSpec sm{StdMapDriver{}, 20.0};
  const auto edges = uniform_edges(-1.2, 1.2, 96);
  const auto a = dos_histogram(sm, 400, 6, edges, 3, 1);
  const auto b = dos_histogram(sm, 400, 6, edges, 3, 3);
  CHECK(a.mass == b.mass);
  for (double m : a.mass) CHECK(m >= 0.0);
}

TEST_CASE("Stieltjes transform examples") {
  const SpectralHistogram atom = make_histogram({-1e-9, 1e-9}, {1.0});
  const Complex s = stieltjes(atom, ComplexEnergy(0.0, 1.0));
  CHECK(s.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(s.imag() == doctest::Approx(1.0).epsilon(1e-8));

  const SpectralHistogram flat = make_histogram(uniform_edges(-1.0, 1.0, 8), std::vector<double>(8, 1.0));
  // Integral of (1/2) dE / (E - 2) over [-1, 1] is -ln(3) / 2.
  const Complex edge = stieltjes(flat, ComplexEnergy(2.0, 1e-6));
  CHECK(edge.real() == doctest::Approx(-0.5 * std::log(3.0)).epsilon(1e-5));
  CHECK(edge.imag() > 0.0);

  const double r = 1e3 * 2.0;
  const Complex far = stieltjes(flat, ComplexEnergy(0.0, r));
  CHECK(std::abs(far - Complex(0.0, 1.0 / r)) < 1e-2 / r);

  for (double d : {1e-8, 1e-3, 0.5, 10.0})
    for (double e : {-3.0, -1.0, 0.2, 1.0, 4.0}) CHECK(stieltjes(flat, ComplexEnergy(e, d)).imag() > 0.0);
  CHECK_THROWS_AS(stieltjes(flat, ComplexEnergy(0.0, 0.0)), DomainError);
}

TEST_CASE("green_avg against the free resolvent") {
  const double lambda = 1e6, delta = 0.1, v = 0.25;
  const OperatorSpec c{ConstantDriver{v}, lambda};
  const GreenAverage g = green_avg(c, ComplexEnergy(v, delta), 20, 1, 1, 1.0);
  const double ref = 1.0 / std::sqrt(delta * delta + 4.0 / (lambda * lambda));
  CHECK(std::abs(g.mean_g - Complex(0.0, ref)) < 1e-3);
  CHECK(std::abs(g.mean_g.imag() - 10.0) < 1e-3);
  CHECK(g.mean_abs_g_alpha == doctest::Approx(ref).epsilon(1e-6));
  CHECK(g.clamp_violations == 0);

  // Moderate coupling: the free-resolvent formula with hopping 1/lambda.
  const OperatorSpec c2{ConstantDriver{0.0}, 2.0};
  const GreenAverage g2 = green_avg(c2, ComplexEnergy(0.0, 0.3), 200, 1, 1, 1.0);
  CHECK(std::abs(g2.mean_g - Complex(0.0, 1.0 / std::sqrt(0.09 + 1.0))) < 1e-10);

  const OperatorSpec iid{IidDriver{Distribution::uniform(0.0, 1.0)}, 10.0};
  const GreenAverage a = green_avg(iid, ComplexEnergy(0.4, 0.05), 30, 1, 5, 0.5);
  const GreenAverage b = green_avg(iid, ComplexEnergy(0.4, 0.05), 30, 1, 5, 0.5);
  CHECK(a.mean_g == b.mean_g);
  CHECK(a.mean_abs_g_alpha == b.mean_abs_g_alpha);
  const GreenAverage w1 = green_avg(iid, ComplexEnergy(0.4, 0.05), 30, 16, 5, 0.5, 1);
  const GreenAverage w3 = green_avg(iid, ComplexEnergy(0.4, 0.05), 30, 16, 5, 0.5, 3);
  CHECK(w1.mean_g == w3.mean_g);
  CHECK(w1.std_error_abs_g_alpha == w3.std_error_abs_g_alpha);
  CHECK(w1.mean_g.imag() > 0.0);
  CHECK(w1.clamp_violations == 0);
}

TEST_CASE("fractional-moment window bounds") {
  const OperatorSpec c{ConstantDriver{0.0}, 1e6};
  for (double alpha : {0.25, 0.5, 1.0}) {
    const WindowBound w = frac_moment_bound(c, 0.0, 0.01, alpha, 10, 1, 1);
    CHECK(w.bound == doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-3));
    CHECK(w.bound >= 1.0);
  }
  const OperatorSpec small{ConstantDriver{0.0}, 2.0};
  const WindowBound wide = frac_moment_bound(small, 0.0, 50.0, 1.0, 50, 1, 1);
  CHECK(wide.bound == doctest::Approx(2.0).epsilon(1e-3));

  const OperatorSpec iid{IidDriver{Distribution::uniform(0.0, 1.0)}, 10.0};
  const WindowBound wb = frac_moment_bound(iid, 0.5, 1e-3, 0.5, 30, 400, 2);
  const MeanStderr mass = empirical_window_mass(iid, 0.5, 1e-3, 2000, 20, 2);
  CHECK(wb.bound >= mass.mean - 2.0 * mass.std_error);
  CHECK(wb.bound == doctest::Approx(std::pow(2e-3, 0.5) * green_avg(iid, ComplexEnergy(0.5, 1e-3), 30, 400, 2, 0.5).mean_abs_g_alpha));
  for (double e0 : {0.1, 0.3, 0.7, 0.9})
    for (double d : {1e-2, 5e-2}) {
      const WindowBound bb = frac_moment_bound(iid, e0, d, 1.0, 30, 100, 3);
      const MeanStderr mm = empirical_window_mass(iid, e0, d, 1000, 10, 3);
      CHECK(bb.bound + 2.0 * bb.std_error >= mm.mean - 2.0 * mm.std_error);
    }
}

TEST_CASE("Stieltjes transform of the DOS matches the averaged Green function") {
  const OperatorSpec iid{IidDriver{Distribution::uniform(0.0, 1.0)}, 10.0};
  const ComplexEnergy z(0.1, 0.05);
  const SpectralHistogram h = dos_histogram(iid, 2000, 40, uniform_edges(-0.3, 1.3, 3200), 4);
  const GreenAverage g = green_avg(iid, z, 30, 2000, 4, 1.0);
  const Complex s = stieltjes(h, z);
  CHECK(std::abs(s - g.mean_g) <= 5e-2 * std::abs(g.mean_g));
}
