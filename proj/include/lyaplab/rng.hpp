#pragma once

#include <array>
#include <cstdint>

namespace lyaplab {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A pure function of (counter, key); no internal state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter counter, Key key);
};

/// Independent stream families. Adding an entry never perturbs the others.
enum class Subsystem : std::uint32_t {
  InitialCondition = 1,
  SitePotential = 2,
  MonteCarlo = 3,
  Verify = 4,
};

/// Random stream addressed by (seed, subsystem, member). Draw k of member m
/// is a fixed function of those four numbers, so results never depend on how
/// members are scheduled across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, Subsystem subsystem, std::uint64_t member);

  /// Raw 128-bit block at an explicit counter position; does not advance.
  std::array<std::uint64_t, 2> block(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_;
  std::uint64_t member_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace lyaplab
