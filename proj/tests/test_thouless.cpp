#include <doctest.h>

#include <cmath>

#include "lyaplab/lyapunov.hpp"
#include "lyaplab/thouless.hpp"

using namespace lyaplab;

namespace {

// Exact arcsine law on [-2t, 2t] discretized into `bins` bins.
SpectralHistogram arcsine(double t, std::size_t bins) {
  const auto edges = uniform_edges(-2.0 * t, 2.0 * t, bins);
  std::vector<double> mass(bins);
  const auto ids = [&](double e) { return std::acos(std::clamp(-e / (2.0 * t), -1.0, 1.0)) / kPi; };
  for (std::size_t k = 0; k < bins; ++k) mass[k] = ids(edges[k + 1]) - ids(edges[k]);
  return make_histogram(edges, mass);
}

}  // namespace

TEST_CASE("log potential examples") {
  const SpectralHistogram atom = make_histogram({0.0, 0.0}, {1.0});
  CHECK(log_potential(atom, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_potential(atom, 0.0) == -INFINITY);
  CHECK(thouless_gamma(atom, std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(thouless_gamma(atom, -3.0, 1.0) == doctest::Approx(std::log(3.0)).epsilon(1e-15));

  const SpectralHistogram flat = make_histogram({-1.0, 1.0}, {1.0});
  CHECK(log_potential(flat, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  const SpectralHistogram split = make_histogram(uniform_edges(-1.0, 1.0, 7), std::vector<double>(7, 1.0));
  CHECK(log_potential(split, 0.0) == doctest::Approx(-1.0).epsilon(1e-13));
  // Closed form on a bin edge: integral of ln|1 - x| / 2 over [-1, 1] = ln 2 - 1.
  CHECK(log_potential(split, 1.0) == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-13));

  const double t = 0.3;
  const SpectralHistogram as = arcsine(t, 10000);
  CHECK(log_potential(as, 3.0 * t) == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) * t / 2.0)).epsilon(1e-5));
}

TEST_CASE("Thouless value of the constant potential matches the periodic oracle") {
  for (double lambda : {1.0, 4.0, 10.0})
    for (double v : {0.0, 0.4}) {
      const SpectralHistogram h = arcsine(1.0 / lambda, 10000);
      for (double de : {2.5, 3.0, 5.0}) {
        const double e = v + de / lambda;
        const std::vector<double> one{v};
        // The histogram is centred at 0; shifting E by -v moves it onto v.
        CHECK(std::abs(thouless_gamma(h, e - v, lambda) - periodic_oracle(one, e, lambda)) < 1e-3);
      }
    }
}

TEST_CASE("log potential is additive in ln lambda, continuous, and concave off the support") {
  const SpectralHistogram h = make_histogram(uniform_edges(-0.5, 0.8, 13),
                                             {1, 3, 2, 0.5, 4, 1, 1, 2, 0.1, 3, 2, 1, 1});
  for (double e : {-2.0, -0.2, 0.31, 1.7})
    for (double lambda : {0.5, 3.0, 1e4}) {
      const double diff = thouless_gamma(h, e, lambda) - thouless_gamma(h, e, 1.0);
      CHECK(diff == doctest::Approx(std::log(lambda)).epsilon(1e-12));
    }
  double prev = log_potential(h, -1.5);
  for (double e = -1.5 + 1e-4; e <= 1.5; e += 1e-4) {
    const double cur = log_potential(h, e);
    CHECK(std::abs(cur - prev) < 5e-3);
    prev = cur;
  }
  // Second differences are non-positive outside [-0.5, 0.8]: ln|x| is concave
  // on each half-line, so is any positive mixture of its translates.
  const double step = 1e-2;
  for (double e : {-3.0, -1.5, -0.6, 0.9, 1.4, 4.0}) {
    const double d2 = log_potential(h, e + step) - 2.0 * log_potential(h, e) + log_potential(h, e - step);
    CHECK(d2 <= 1e-12);
  }
}

TEST_CASE("thouless_scan residuals") {
  const OperatorSpec c{ConstantDriver{0.2}, 4.0};
  ThoulessBudget budget;
  budget.transfer_n = 200000;
  budget.dos_n = 4000;
  budget.bins = 2000;
  const std::vector<double> grid{-1.0, 0.0, 0.2, 0.5, 0.9, 2.0};
  for (const ThoulessRow& r : thouless_scan(c, grid, budget, 1)) {
    CHECK(std::abs(r.residual) < 1e-2);
    CHECK(r.residual == r.gamma_transfer - r.gamma_thouless);
  }

  const OperatorSpec iid{IidDriver{Distribution::uniform(0.0, 1.0)}, 10.0};
  ThoulessBudget b2;
  b2.transfer_n = 200000;
  b2.transfer_b = 4;
  b2.dos_n = 4000;
  b2.dos_b = 8;
  b2.bins = 1000;
  const std::vector<double> interior{0.1, 0.3, 0.5, 0.7, 0.9};
  const auto rows = thouless_scan(iid, interior, b2, 2);
  for (const ThoulessRow& r : rows) CHECK(std::abs(r.residual) < 5e-2);
  const auto rows3 = thouless_scan(iid, interior, b2, 2, 3);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].residual == rows3[k].residual);

  const std::vector<double> outside{25.0};
  const auto far = thouless_scan(iid, outside, b2, 2);
  CHECK(std::isfinite(far[0].residual));

  const auto edges = spectrum_edges(iid, 100);
  REQUIRE(edges.size() == 101);
  CHECK(edges.front() < -0.2);
  CHECK(edges.back() > 1.2);
}
