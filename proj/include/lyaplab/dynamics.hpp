#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

namespace lyaplab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A point of R/2piZ stored by its representative in [-pi, pi).
class Angle {
 public:
  constexpr Angle() = default;

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT

  friend Angle reduce_angle(double x);

 private:
  constexpr explicit Angle(double v) : value_(v) {}
  double value_ = 0.0;
};

/// Canonical representative of x mod 2pi in [-pi, pi); pi itself maps to -pi.
/// Throws DomainError for non-finite input.
Angle reduce_angle(double x);

/// Circle distance |reduce_angle(a - b)|, in [0, pi].
double angular_distance(double a, double b);

// ---------------------------------------------------------------------------
// Standard map T(x1, x2) = (x2, 2 x2 + lambda sin x2 - x1).

struct StdMapState {
  Angle x_prev;  // x_{n-1}
  Angle x_curr;  // x_n
};

StdMapState make_std_map_state(double x_prev, double x_curr);

StdMapState std_map_step(StdMapState s, double lambda);
/// Explicit inverse: (x1, x2) -> (2 x1 + lambda sin x1 - x2, x1).
StdMapState std_map_step_inverse(StdMapState s, double lambda);

/// Streams the orbit x_{-1}, x_0, x_1, ... of a standard-map initial
/// condition in O(1) memory.
class StdMapOrbit {
 public:
  StdMapOrbit(StdMapState init, double lambda);

  /// Returns x_{index()} and advances.
  Angle next();
  std::int64_t index() const { return index_; }

 private:
  StdMapState state_;
  double lambda_;
  std::int64_t index_ = -1;
};

/// Materializes x_{-1}, x_0, ..., x_{n_steps} (n_steps + 2 angles).
std::vector<Angle> std_map_orbit(StdMapState init, double lambda,
                                 std::int64_t n_steps);

/// Residual |x_{n+1} + x_{n-1} - 2 x_n - lambda sin x_n| measured mod 2pi.
double pendulum_residual(double x_prev, double x_curr, double x_next,
                         double lambda);

// ---------------------------------------------------------------------------
// Skew shift T(w1..wd) = (w1 + alpha, w2 + w1, ..., wd + w_{d-1}).

struct SkewShiftState {
  std::vector<Angle> coords;
};

SkewShiftState make_skew_shift_state(const std::vector<double>& coords);

SkewShiftState skew_shift_step(const SkewShiftState& s, double rotation_alpha);
SkewShiftState skew_shift_step_inverse(const SkewShiftState& s,
                                       double rotation_alpha);

/// In-place variants used by the potential streams.
void advance_skew_shift(std::vector<Angle>& coords, double rotation_alpha);
void retreat_skew_shift(std::vector<Angle>& coords, double rotation_alpha);

}  // namespace lyaplab
