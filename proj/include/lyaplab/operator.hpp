#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lyaplab/distribution.hpp"
#include "lyaplab/dynamics.hpp"

namespace lyaplab {

using Complex = std::complex<double>;

/// Spectral parameter z = e + i delta with delta >= 0.
class ComplexEnergy {
 public:
  ComplexEnergy(double e, double delta);

  double e() const { return e_; }
  double delta() const { return delta_; }
  Complex z() const { return {e_, delta_}; }

 private:
  double e_;
  double delta_;
};

/// Sampled potential V(offset), ..., V(offset + size - 1) of the operator
///   (H psi)(n) = lambda^-1 (psi(n-1) + psi(n+1)) + V(n) psi(n).
/// Operations on a window take positions relative to its first sample.
class PotentialWindow {
 public:
  PotentialWindow(std::int64_t offset, std::vector<double> values, double lambda);

  std::int64_t offset() const { return offset_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double lambda() const { return lambda_; }
  double hopping() const { return 1.0 / lambda_; }

 private:
  std::int64_t offset_;
  std::vector<double> values_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Drivers. V(n) = f(T^n omega) with omega drawn from the driver's invariant
// measure unless a fixed initial condition is given.

struct StdMapDriver {
  std::optional<StdMapState> init;   // nullopt: uniform on the 2-torus
  std::optional<double> map_lambda;  // nullopt: the operator coupling
};

/// h(w) = offset + amplitude cos(w): one non-degenerate maximum at 0 and
/// one minimum at pi.
struct CosineProfile {
  double amplitude = 1.0;
  double offset = 0.0;
  double operator()(double w) const;
};

struct SkewShiftDriver {
  int dim = 2;
  double rotation_alpha = 0.0;
  CosineProfile h;
  std::optional<std::vector<double>> init;  // nullopt: uniform on T^d
};

struct IidDriver {
  Distribution dist;
};

struct ConstantDriver {
  double value = 0.0;
};

struct PeriodicDriver {
  std::vector<double> values;
};

using Driver = std::variant<StdMapDriver, SkewShiftDriver, IidDriver,
                            ConstantDriver, PeriodicDriver>;

struct OperatorSpec {
  Driver driver;
  double lambda = 1.0;

  /// Throws ConfigError when the description is inconsistent.
  void validate() const;
  std::string kind() const;
  /// Closed interval containing every value of V.
  std::pair<double, double> potential_range() const;
  /// True when V does not depend on the sampled initial condition.
  bool is_deterministic() const;
};

/// Streams V(start), V(start + 1), ... for ensemble member `member` of
/// `seed`. Member m always sees the same initial condition, so different
/// consumers (cocycles, truncations, Green functions) with matched seeds look
/// at the same potential.
class PotentialStream {
 public:
  PotentialStream(const OperatorSpec& spec, std::uint64_t seed,
                  std::uint64_t member, std::int64_t start);
  ~PotentialStream();
  PotentialStream(PotentialStream&&) noexcept;
  PotentialStream& operator=(PotentialStream&&) noexcept;

  double next();
  void fill(std::span<double> out);
  std::int64_t index() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Potential on [n0, n1] for member 0 of `seed`.
PotentialWindow sample_potential(const OperatorSpec& spec, std::int64_t n0,
                                 std::int64_t n1, std::uint64_t seed);
PotentialWindow sample_potential(const OperatorSpec& spec, std::int64_t n0,
                                 std::int64_t n1, std::uint64_t seed,
                                 std::uint64_t member);

// ---------------------------------------------------------------------------
// Determinants of the Dirichlet truncations.

/// mantissa * 2^exp2; keeps determinants of long windows representable.
struct ScaledComplex {
  Complex mantissa;
  std::int64_t exp2 = 0;

  Complex value() const;
  double log_abs() const;
  double abs() const { return std::exp(log_abs()); }
};

/// Delta_0, ..., Delta_m with Delta_k = det(H_k - z), H_k the restriction to
/// the first k sites of the window:
///   Delta_k = (V(k-1) - z) Delta_{k-1} - lambda^-2 Delta_{k-2}.
std::vector<ScaledComplex> det_recursion(const PotentialWindow& w,
                                         ComplexEnergy z, std::size_t m);

/// Same recursion for an explicit list of diagonal entries (used by tests and
/// by the resonance module).
std::vector<ScaledComplex> det_recursion(std::span<const double> v,
                                         double lambda, Complex z);

/// Entry (i, j) of (H_w - z)^-1 by a tridiagonal solve with partial pivoting.
/// Throws NumericalFailure when the restriction is singular at z.
Complex green_entry(const PotentialWindow& w, ComplexEnergy z, std::size_t i,
                    std::size_t j);

/// Column j of (H_w - z)^-1.
std::vector<Complex> green_column(const PotentialWindow& w, ComplexEnergy z,
                                  std::size_t j);

/// Number of eigenvalues of H_w below e (negative pivots of the LDL^T
/// factorization of H_w - e). An exactly zero pivot is resolved by lowering e
/// by 1e-14 (1 + |e|) and recounting.
std::int64_t sturm_count(const PotentialWindow& w, double e);

/// sturm_count at each of `energies` in one sweep over the sites.
std::vector<std::int64_t> sturm_counts(std::span<const double> v, double lambda,
                                       std::span<const double> energies);

}  // namespace lyaplab
