#include "lyaplab/dynamics.hpp"

#include <cmath>

#include "lyaplab/errors.hpp"

namespace lyaplab {

Angle reduce_angle(double x) {
  if (!std::isfinite(x)) throw DomainError("reduce_angle: non-finite input");
  double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  // floor() can land one period off when (x + pi) / 2pi rounds to an integer.
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return Angle(r);
}

double angular_distance(double a, double b) {
  return std::abs(reduce_angle(a - b).value());
}

StdMapState make_std_map_state(double x_prev, double x_curr) {
  return {reduce_angle(x_prev), reduce_angle(x_curr)};
}

namespace {
void check_kick(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw DomainError("standard map: kick strength must be finite and >= 0");
}
}  // namespace

StdMapState std_map_step(StdMapState s, double lambda) {
  check_kick(lambda);
  const double x = s.x_curr.value();
  return {s.x_curr, reduce_angle(2.0 * x + lambda * std::sin(x) - s.x_prev)};
}

StdMapState std_map_step_inverse(StdMapState s, double lambda) {
  check_kick(lambda);
  const double x = s.x_prev.value();
  return {reduce_angle(2.0 * x + lambda * std::sin(x) - s.x_curr), s.x_prev};
}

StdMapOrbit::StdMapOrbit(StdMapState init, double lambda)
    : state_(init), lambda_(lambda) {
  check_kick(lambda);
}

Angle StdMapOrbit::next() {
  const Angle out = state_.x_prev;
  state_ = std_map_step(state_, lambda_);
  ++index_;
  return out;
}

std::vector<Angle> std_map_orbit(StdMapState init, double lambda,
                                 std::int64_t n_steps) {
  if (n_steps < 0) throw DomainError("std_map_orbit: n_steps must be >= 0");
  std::vector<Angle> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 2);
  StdMapOrbit orbit(init, lambda);
  for (std::int64_t k = 0; k < n_steps + 2; ++k) out.push_back(orbit.next());
  return out;
}

double pendulum_residual(double x_prev, double x_curr, double x_next,
                         double lambda) {
  return std::abs(
      reduce_angle(x_next + x_prev - 2.0 * x_curr - lambda * std::sin(x_curr))
          .value());
}

SkewShiftState make_skew_shift_state(const std::vector<double>& coords) {
  if (coords.empty()) throw DomainError("skew shift: dimension must be >= 1");
  SkewShiftState s;
  s.coords.reserve(coords.size());
  for (double c : coords) s.coords.push_back(reduce_angle(c));
  return s;
}

void advance_skew_shift(std::vector<Angle>& w, double rotation_alpha) {
  for (std::size_t k = w.size() - 1; k >= 1; --k)
    w[k] = reduce_angle(w[k] + w[k - 1]);
  w[0] = reduce_angle(w[0] + rotation_alpha);
}

void retreat_skew_shift(std::vector<Angle>& w, double rotation_alpha) {
  w[0] = reduce_angle(w[0] - rotation_alpha);
  for (std::size_t k = 1; k < w.size(); ++k)
    w[k] = reduce_angle(w[k] - w[k - 1]);
}

SkewShiftState skew_shift_step(const SkewShiftState& s, double rotation_alpha) {
  if (s.coords.empty()) throw DomainError("skew shift: dimension must be >= 1");
  SkewShiftState out = s;
  advance_skew_shift(out.coords, rotation_alpha);
  return out;
}

SkewShiftState skew_shift_step_inverse(const SkewShiftState& s,
                                       double rotation_alpha) {
  if (s.coords.empty()) throw DomainError("skew shift: dimension must be >= 1");
  SkewShiftState out = s;
  retreat_skew_shift(out.coords, rotation_alpha);
  return out;
}

}  // namespace lyaplab
