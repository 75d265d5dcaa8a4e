#include <doctest.h>

#include <cmath>
#include <set>

#include "lyaplab/parallel.hpp"
#include "lyaplab/rng.hpp"

using namespace lyaplab;

TEST_CASE("philox matches the Random123 known-answer vectors") {
  CHECK(Philox4x32::apply({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::apply({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are pure functions of seed, subsystem, member and draw index") {
  RngStream a(7, Subsystem::SitePotential, 3);
  RngStream b(7, Subsystem::SitePotential, 3);
  for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
  RngStream c(7, Subsystem::SitePotential, 3);
  const auto blk = c.block(5);
  CHECK(c.block(5) == blk);
  // Sequential draws walk the blocks in order.
  RngStream d(7, Subsystem::SitePotential, 3);
  for (int k = 0; k < 10; ++k) d.next_u64();
  CHECK(d.next_u64() == blk[0]);
}

TEST_CASE("different members, subsystems and seeds give different streams") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1u, 2u})
    for (auto sub : {Subsystem::InitialCondition, Subsystem::SitePotential, Subsystem::MonteCarlo})
      for (std::uint64_t m = 0; m < 4; ++m) firsts.insert(RngStream(seed, sub, m).next_u64());
  CHECK(firsts.size() == 24);
}

TEST_CASE("uniform draws lie in [0, 1) with the right moments") {
  RngStream r(11, Subsystem::Verify, 0);
  std::vector<double> xs(200000);
  for (double& x : xs) {
    x = r.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  const MeanStderr m = mean_stderr(xs);
  CHECK(std::abs(m.mean - 0.5) < 4.0 * m.std_error);
  CHECK(m.std_error == doctest::Approx(std::sqrt(1.0 / 12.0 / 200000.0)).epsilon(0.01));
  CHECK(RngStream::to_unit(~0ull) < 1.0);
  CHECK(RngStream::to_unit(0) == 0.0);
}

TEST_CASE("mean_stderr reduces in index order and is exact on constant input") {
  const std::vector<double> same(17, 0.1);
  const MeanStderr a = mean_stderr(same);
  CHECK(a.mean == 0.1);
  CHECK(a.std_error == 0.0);
  const MeanStderr b = mean_stderr(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(b.mean == doctest::Approx(2.5));
  CHECK(b.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  try {
    parallel_for(100, 3, [](std::size_t i) {
      if (i == 40 || i == 70) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "40");
  }
}
