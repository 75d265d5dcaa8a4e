#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "lyaplab/errors.hpp"
#include "lyaplab/operator.hpp"
#include "lyaplab/rng.hpp"

using namespace lyaplab;

namespace {

Eigen::MatrixXcd dense(std::span<const double> v, double lambda, Complex z) {
  const auto m = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = v[i] - z;
    if (i + 1 < m) a(i, i + 1) = a(i + 1, i) = 1.0 / lambda;
  }
  return a;
}

OperatorSpec iid(double lambda) { return {IidDriver{Distribution::uniform(0.0, 1.0)}, lambda}; }

}  // namespace

TEST_CASE("sample_potential examples") {
  OperatorSpec sm{StdMapDriver{make_std_map_state(0.0, -kPi), std::nullopt}, 10.0};
  const PotentialWindow w = sample_potential(sm, -1, 2, 0);
  REQUIRE(w.size() == 4);
  CHECK(w.offset() == -1);
  const double expect[] = {-1.0, 1.0, -1.0, 1.0};
  for (int k = 0; k < 4; ++k) CHECK(w.values()[k] == doctest::Approx(expect[k]).epsilon(1e-12));

  OperatorSpec c{ConstantDriver{0.3}, 4.0};
  const PotentialWindow cw = sample_potential(c, -7, 7, 99);
  for (double v : cw.values()) CHECK(v == 0.3);

  const auto a = sample_potential(iid(2.0), 0, 50, 5);
  const auto b = sample_potential(iid(2.0), 0, 50, 5);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto other = sample_potential(iid(2.0), 0, 50, 6);
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), other.values().begin()));
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  CHECK_THROWS_AS(sample_potential(c, 3, 2, 0), DomainError);
}

TEST_CASE("standard-map potential is -cos along the orbit and windows are consistent") {
  OperatorSpec sm{StdMapDriver{make_std_map_state(0.4, -1.2), std::nullopt}, 25.0};
  const auto orbit = std_map_orbit(make_std_map_state(0.4, -1.2), 25.0, 20);
  // Windows starting at 0 iterate forward only and reproduce the orbit exactly;
  // earlier starts pass through the inverse map, whose rounding the chaotic
  // dynamics amplifies, so only a few leading sites are compared there.
  const PotentialWindow w = sample_potential(sm, 0, 20, 0);
  for (std::size_t k = 1; k < orbit.size(); ++k) CHECK(w.values()[k - 1] == -std::cos(orbit[k]));
  const PotentialWindow back = sample_potential(sm, -1, 5, 0);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(back.values()[k] == doctest::Approx(-std::cos(orbit[k])).epsilon(1e-9));

  const std::vector<OperatorSpec> specs = {
      OperatorSpec{StdMapDriver{}, 25.0},
      OperatorSpec{SkewShiftDriver{3, 1.94, {}, std::nullopt}, 5.0}, iid(3.0),
      OperatorSpec{PeriodicDriver{{0.1, 0.2, 0.3}}, 2.0}};
  for (const OperatorSpec& s : specs) {
    const PotentialWindow wide = sample_potential(s, 0, 20, 4, 2);
    const PotentialWindow tail = sample_potential(s, 3, 20, 4, 2);
    for (std::size_t k = 0; k < tail.size(); ++k)
      CHECK(tail.values()[k] == doctest::Approx(wide.values()[3 + k]).epsilon(1e-12));
    const auto [lo, hi] = s.potential_range();
    for (double v : wide.values()) {
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
  }
}

TEST_CASE("spec and energy validation") {
  CHECK_THROWS_AS(ComplexEnergy(0.0, -1e-3), DomainError);
  CHECK_THROWS_AS((OperatorSpec{ConstantDriver{0.0}, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((OperatorSpec{PeriodicDriver{{}}, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((OperatorSpec{SkewShiftDriver{0, 1.0, {}, std::nullopt}, 1.0}.validate()),
                  ConfigError);
  CHECK(OperatorSpec{ConstantDriver{1.0}, 2.0}.is_deterministic());
  CHECK_FALSE(iid(2.0).is_deterministic());
}

TEST_CASE("determinant recursion") {
  const std::vector<double> v2{2.0, 3.0};
  CHECK(det_recursion(v2, 1.0, 0.0)[2].value() == Complex(5.0, 0.0));
  const std::vector<double> v1{2.0};
  const auto d1 = det_recursion(v1, 1.0, Complex(0.0, 1.0));
  CHECK(d1[0].value() == Complex(1.0, 0.0));
  CHECK(d1[1].value() == Complex(2.0, -1.0));

  RngStream r(1, Subsystem::Verify, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + r.next_u64() % 8;
    std::vector<double> v(m);
    for (double& x : v) x = r.uniform(-3.0, 3.0);
    const double lambda = r.uniform(0.2, 30.0);
    const Complex z(r.uniform(-3.0, 3.0), r.uniform(0.0, 2.0));
    const auto d = det_recursion(v, lambda, z);
    const Complex ref = dense(v, lambda, z).determinant();
    CHECK(std::abs(d[m].value() - ref) <= 1e-10 * std::abs(ref));
    double mm = 0.0;
    for (double x : v) mm = std::max(mm, std::abs(x - z));
    CHECK(d[m].abs() <= std::pow(mm + 1.0 / lambda, static_cast<double>(m)) * (1.0 + 1e-12));
  }

  PotentialWindow w(0, {0.5, 0.5}, 1.0);
  CHECK_THROWS_AS(det_recursion(w, ComplexEnergy(0.0, 0.1), 3), DomainError);
}

TEST_CASE("determinants of long windows stay representable") {
  std::vector<double> v(5000, 3.0);
  const auto d = det_recursion(v, 10.0, Complex(0.0, 0.0));
  // Constant potential: Delta_m grows like ((3 + sqrt(9 - 4/100)) / 2)^m.
  const double rate = std::log((3.0 + std::sqrt(9.0 - 0.04)) / 2.0);
  CHECK(d.back().log_abs() / 5000.0 == doctest::Approx(rate).epsilon(1e-6));
  CHECK(std::isfinite(d.back().log_abs()));
}

TEST_CASE("green entries") {
  PotentialWindow one(0, {2.0}, 1.0);
  const Complex g = green_entry(one, ComplexEnergy(0.0, 1.0), 0, 0);
  CHECK(g.real() == doctest::Approx(0.4));
  CHECK(g.imag() == doctest::Approx(0.2));

  PotentialWindow two(0, {0.0, 0.0}, 1.0);
  CHECK(std::abs(green_entry(two, ComplexEnergy(0.0, 0.0), 0, 0)) < 1e-15);
  CHECK(green_entry(two, ComplexEnergy(0.0, 0.0), 0, 1).real() == doctest::Approx(1.0));

  PotentialWindow singular(0, {0.0}, 1.0);
  CHECK_THROWS_AS(green_entry(singular, ComplexEnergy(0.0, 0.0), 0, 0), NumericalFailure);

  const PotentialWindow w = sample_potential(iid(2.0), 0, 63, 8);
  const ComplexEnergy z(0.1, 0.01);
  const Eigen::MatrixXcd inv = dense(w.values(), w.lambda(), z.z()).inverse();
  for (std::size_t i : {0u, 5u, 31u, 63u})
    for (std::size_t j : {0u, 17u, 63u}) {
      const Complex gij = green_entry(w, z, i, j);
      CHECK(std::abs(gij - inv(i, j)) <= 1e-8 * std::abs(inv(i, j)));
    }

  // Cramer: |G(i, i)| = |Delta_[0, i) Delta_(i, m)| / |Delta_m|.
  const auto full = det_recursion(w.values(), w.lambda(), z.z());
  for (std::size_t i : {0u, 10u, 40u, 63u}) {
    const auto left = det_recursion(w.values().subspan(0, i), w.lambda(), z.z());
    const auto right = det_recursion(w.values().subspan(i + 1), w.lambda(), z.z());
    const double cramer =
        std::exp(left.back().log_abs() + right.back().log_abs() - full.back().log_abs());
    CHECK(std::abs(green_entry(w, z, i, i)) == doctest::Approx(cramer).epsilon(1e-8));
  }
  CHECK_THROWS_AS(green_entry(w, z, 64, 0), DomainError);
}

TEST_CASE("Sturm counts") {
  PotentialWindow a(0, {0.0, 0.0}, 1.0);
  CHECK(sturm_count(a, 0.0) == 1);
  PotentialWindow b(0, {5.0, 5.0}, 1.0);
  CHECK(sturm_count(b, 5.0) == 1);
  CHECK(sturm_count(b, 3.9) == 0);
  CHECK(sturm_count(b, 6.1) == 2);

  const PotentialWindow w = sample_potential(iid(1.5), 0, 199, 12);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(200, 200);
  for (int i = 0; i < 200; ++i) {
    h(i, i) = w.values()[i];
    if (i + 1 < 200) h(i, i + 1) = h(i + 1, i) = w.hopping();
  }
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
  RngStream r(2, Subsystem::Verify, 11);
  std::vector<double> es;
  for (int k = 0; k < 50; ++k) es.push_back(r.uniform(-1.5, 2.5));
  std::sort(es.begin(), es.end());
  const auto batched = sturm_counts(w.values(), w.lambda(), es);
  std::int64_t prev = 0;
  for (std::size_t k = 0; k < es.size(); ++k) {
    const auto expect = std::count_if(ev.begin(), ev.end(), [&](double x) { return x < es[k]; });
    CHECK(sturm_count(w, es[k]) == expect);
    CHECK(batched[k] == expect);
    CHECK(batched[k] >= prev);
    prev = batched[k];
  }
  CHECK(sturm_count(w, -10.0) == 0);
  CHECK(sturm_count(w, 10.0) == 200);
}

TEST_CASE("|Delta_3| is nondecreasing in Im z on standard-map windows") {
  RngStream r(3, Subsystem::Verify, 12);
  for (int trial = 0; trial < 200; ++trial) {
    OperatorSpec sm{StdMapDriver{make_std_map_state(r.uniform(-kPi, kPi), r.uniform(-kPi, kPi)),
                                 std::nullopt},
                    r.uniform(7.0, 60.0)};
    const PotentialWindow w = sample_potential(sm, -1, 1, 0);
    const double e = r.uniform(-1.2, 1.2);
    double prev = 0.0;
    for (double delta : {0.0, 1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
      const double a = det_recursion(w, ComplexEnergy(e, delta), 3)[3].abs();
      CHECK(a >= prev * (1.0 - 1e-12));
      prev = a;
    }
  }
}
