#include <doctest.h>

#include <cmath>

#include "lyaplab/bounds.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/lyapunov.hpp"

using namespace lyaplab;

TEST_CASE("prop31_bound examples") {
  const double e = std::exp(1.0);
  const BoundReport r = prop31_bound({1.0, 0.0, 0.01, 1e-6, 1e-6});
  const double numerator = 1.0 - 0.06 * std::log(e * e * 100.0);
  CHECK(numerator == doctest::Approx(0.6037).epsilon(1e-4));
  CHECK(r.log_raw_bound == doctest::Approx(std::log(2.0 * e) - numerator / 2e-6).epsilon(1e-12));
  CHECK(r.raw_bound == 0.0);
  CHECK_FALSE(r.vacuous);
  CHECK(r.clamped_bound == r.raw_bound);

  const BoundReport v = prop31_bound({2.0, 2.5, 0.5, 1e-3, 1e-2});
  CHECK(v.raw_bound >= 2.0 * e);
  CHECK(v.vacuous);
  CHECK(v.clamped_bound == 2e-3);

  CHECK_THROWS_AS(prop31_bound({1.0, 0.0, 0.01, 0.02, 0.05}), DomainError);
  CHECK_THROWS_AS(prop31_bound({1.0, 0.0, 0.5, 1e-3, 1e-4}), DomainError);
  CHECK_THROWS_AS(prop31_bound({1.0, 0.0, 1.5, 1e-3, 1e-2}), DomainError);
}

TEST_CASE("prop31_bound monotonicity on parameter grids") {
  for (double xi : {0.01, 0.1, 0.5})
    for (double delta : {1e-6, 1e-4}) {
      for (double g : {delta, 10 * delta, 1e-2})
        for (double t : {0.0, 2.0}) {
          double prev = INFINITY;
          for (double ll = 5.0; ll <= 40.0; ll += 1.0) {
            const BoundReport r = prop31_bound({ll, t, xi, delta, g});
            CHECK(r.log_raw_bound < prev);
            CHECK(r.clamped_bound <= 2.0 * delta);
            CHECK(r.vacuous == (r.raw_bound >= 2.0 * delta));
            prev = r.log_raw_bound;
          }
          prev = -INFINITY;
          for (double tt = 0.0; tt <= 10.0; tt += 0.5) {
            const double lb = prop31_bound({30.0, tt, xi, delta, g}).log_raw_bound;
            CHECK(lb > prev);
            prev = lb;
          }
        }
      // The g-derivative of the exponent has the sign of numerator + 6 xi, so
      // growth in g is asserted where that stays positive.
      double prev = -INFINITY;
      for (double g = delta; g <= 0.05; g *= 1.5) {
        const Prop31Inputs in{30.0, 1.0, xi, delta, g};
        const double numerator = in.ln_lambda - in.t - 6.0 * xi * (2.0 + std::log(g / (xi * delta)));
        if (numerator <= -6.0 * xi) break;
        const double lb = prop31_bound(in).log_raw_bound;
        CHECK(lb > prev);
        prev = lb;
      }
    }
}

TEST_CASE("measure_Zt counting") {
  const std::vector<EnergyGamma> rows{{-0.015, 3}, {-0.005, 3}, {0.005, 1}, {0.015, 3}};
  CHECK(measure_Zt(rows, 2.0, 0.0, 0.015) == doctest::Approx(0.01));
  CHECK(measure_Zt(rows, 0.5, 0.0, 0.015) == 0.0);

  std::vector<EnergyGamma> all;
  for (int k = 0; k <= 200; ++k) all.push_back({-1.0 + 0.01 * k, 0.0});
  const double full = measure_Zt(all, 1.0, 0.2, 0.5);
  CHECK(std::abs(full - 1.0) <= 0.01 + 1e-12);

  std::vector<EnergyGamma> bent = all;
  bent[50].e += 1e-3;
  CHECK_THROWS_AS(measure_Zt(bent, 1.0, 0.2, 0.5), DomainError);
  CHECK_THROWS_AS(measure_Zt(all, 1.0, 0.9, 0.5), DomainError);
}

TEST_CASE("prop2 right-hand side") {
  CHECK(prop2_rhs(1.0, 1.0, 2.0, 1) == doctest::Approx(3.0 * std::log(2.0) + 1.0).epsilon(1e-15));
  CHECK(std::abs(prop2_rhs(1.0, 1.0, 2.0, 1) - 3.0794) < 1e-4);
  CHECK(prop2_rhs(1.0, 1.0, 2.0, 2) == doctest::Approx(std::pow(3.0 * std::log(2.0) + 1.0, 2)).epsilon(1e-14));
  CHECK(prop2_rhs(1.0, 0.01, 0.5, 1) == doctest::Approx(3.0 * std::log(101.0) + 4.0).epsilon(1e-14));
  // A -> infinity with A delta fixed: the 3 A ln(...) term dominates linearly.
  const double r1 = prop2_rhs(1e6, 1e-6, 1e9, 1), r2 = prop2_rhs(2e6, 5e-7, 1e9, 1);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(prop2_rhs(1.0, 1.0, 1.0, 0), DomainError);
}

TEST_CASE("prop2 Monte Carlo") {
  const Distribution u = Distribution::uniform(0.0, 1.0);
  const ComplexEnergy z(0.5, 0.01);
  const MeanStderr m1 = prop2_mc(u, 1, z, 10.0, 0.0, 0.5, 200000, 1);
  const double exact = 2.0 * std::asinh(50.0);
  CHECK(exact == doctest::Approx(9.2104).epsilon(1e-4));
  CHECK(std::abs(m1.mean - exact) < 3.0 * m1.std_error);
  CHECK(m1.mean <= prop2_rhs(1.0, 0.01, 0.5, 1));

  for (std::int64_t m : {2, 3})
    for (Complex a : {Complex(0.0, 0.0), Complex(0.1, 0.05), Complex(-0.2, 0.1)}) {
      const MeanStderr mc = prop2_mc(u, m, z, 10.0, a, 0.5, 50000, 2);
      CHECK(mc.mean <= prop2_rhs(1.0, 0.01, 0.5, m) + 3.0 * mc.std_error);
    }

  const MeanStderr w1 = prop2_mc(u, 2, z, 10.0, 0.0, 0.5, 5000, 3, 1);
  const MeanStderr w3 = prop2_mc(u, 2, z, 10.0, 0.0, 0.5, 5000, 3, 3);
  CHECK(w1.mean == w3.mean);
  CHECK(w1.std_error == w3.std_error);

  CHECK_THROWS_AS(prop2_mc(u, 1, z, 10.0, Complex(0.3, 0.0), 0.5, 10, 1), DomainError);
  CHECK_THROWS_AS(prop2_mc(u, 1, z, 10.0, Complex(0.0, -0.1), 0.5, 10, 1), DomainError);
}

TEST_CASE("lemma checks") {
  const Distribution u = Distribution::uniform(0.0, 1.0);
  const LemmaCheck a = lemma_bdddens_check(1.0, 0.01, 0.5, u);
  CHECK(a.lhs == doctest::Approx(2.0 * std::asinh(50.0)).epsilon(1e-9));
  CHECK(a.rhs == doctest::Approx(13.8458).epsilon(1e-4));
  CHECK(a.lhs <= a.rhs);

  const LemmaCheck big = lemma_bdddens_check(1.0, 1e3, 0.5, u);
  CHECK(big.lhs <= 1e-3);
  CHECK(big.lhs <= big.rhs);

  const LemmaCheck far = lemma_bdddens_check(1.0, 0.01, 110.0, u);
  CHECK(far.lhs <= 1.0 / 109.0);

  for (double delta : {1e-4, 1e-3, 0.1, 1.0})
    for (double e : {-0.5, 0.0, 0.37, 1.0, 2.0}) {
      const LemmaCheck c = lemma_bdddens_check(1.0, delta, e, u);
      CHECK(c.lhs <= c.rhs);
      const LemmaCheck s = lemma_split_check(1.0, delta, e, 0.2, u, 0.05);
      CHECK(s.lhs <= s.rhs);
    }

  // Only the restriction to [E - xi, E + xi] has bounded density; the atom
  // sits outside it.
  const Distribution mixed = Distribution::mixture({{0.0, 1.0, 0.7}}, {{2.0, 0.3}});
  for (double delta : {1e-4, 1e-2}) {
    const LemmaCheck s = lemma_split_check(0.7, delta, 0.5, 0.5, mixed, 0.2);
    CHECK(s.lhs <= s.rhs);
    CHECK(s.rhs == doctest::Approx(3.0 * 0.7 * std::log1p(1.0 / (0.7 * delta)) + 4.0));
  }
}

TEST_CASE("empirical g") {
  const SpectralHistogram h = make_histogram(uniform_edges(0.0, 1.0, 100), std::vector<double>(100, 1.0));
  CHECK(empirical_g(h, 0.5, 0.01, 0.1) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(empirical_g(h, 0.5, 1e-9, 0.1) >= 1e-9);
  std::vector<double> m(100, 1.0);
  m[70] = 50.0;
  const SpectralHistogram spike = make_histogram(uniform_edges(0.0, 1.0, 100), m);
  CHECK(empirical_g(spike, 0.5, 0.005, 0.1) < empirical_g(spike, 0.5, 0.005, 0.25));
}

TEST_CASE("end-to-end exceptional-set bound for the iid model") {
  const double lambda = 1e3, e0 = 0.5, delta = 1e-6, xi = 0.01;
  const OperatorSpec iid{IidDriver{Distribution::uniform(0.0, 1.0)}, lambda};
  const SpectralHistogram h =
      dos_histogram(iid, 4000, 4, uniform_edges(-0.01, 1.01, 1020), 1);
  const double g = empirical_g(h, e0, delta, xi);
  const BoundReport r = prop31_bound({std::log(lambda), std::log(lambda) - 3.0, xi, delta, g});
  CHECK_FALSE(r.vacuous);

  std::vector<double> es;
  for (int k = 0; k <= 20; ++k) es.push_back(e0 - delta + k * delta / 10.0);
  const auto gam = lyapunov_scan(iid, es, 20000, 2, 1);
  std::vector<EnergyGamma> rows;
  for (std::size_t k = 0; k < es.size(); ++k) rows.push_back({es[k], gam[k].gamma});
  CHECK(measure_Zt(rows, std::log(lambda) - 3.0, e0, delta) <= r.clamped_bound);
}
