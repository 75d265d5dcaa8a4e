#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyaplab/operator.hpp"

namespace lyaplab {

/// Direction of (psi(n+1), psi(n)) plus the log of everything divided out.
struct TransferState {
  double top = 1.0;     // psi(n+1)
  double bottom = 0.0;  // psi(n)
  double log_norm = 0.0;
  std::int64_t steps = 0;
};

struct LyapunovEstimate {
  double gamma = 0.0;
  double std_error = 0.0;
  std::int64_t steps = 0;
  std::int64_t ensemble = 0;
};

/// One step of [[lambda (E - v), -1], [1, 0]] followed by renormalization
/// of the column to unit length.
TransferState transfer_step(TransferState s, double v, double e, double lambda);

/// Growth rate along member 0 of `seed`, starting from the column (1, 0).
LyapunovEstimate lyapunov_single(const OperatorSpec& spec, double e,
                                 std::int64_t n, std::uint64_t seed);

/// Mean over members 0..b-1. `workers` = 0 uses every hardware thread; the
/// result does not depend on it.
LyapunovEstimate lyapunov_avg(const OperatorSpec& spec, double e, std::int64_t n,
                              std::int64_t b, std::uint64_t seed,
                              unsigned workers = 1);

/// lyapunov_avg at every energy; each member's potential is generated once
/// and shared by all energies.
std::vector<LyapunovEstimate> lyapunov_scan(const OperatorSpec& spec,
                                            std::span<const double> energies,
                                            std::int64_t n, std::int64_t b,
                                            std::uint64_t seed,
                                            unsigned workers = 1);

/// Per-trajectory log growth, before averaging: result[m][k] is
/// log_norm / n for member m at energies[k].
std::vector<std::vector<double>> lyapunov_members(
    const OperatorSpec& spec, std::span<const double> energies, std::int64_t n,
    std::int64_t b, std::uint64_t seed, unsigned workers = 1);

/// (1/n) sum of ln ||T_k|| (operator 2-norm) along member 0: an upper bound
/// for the single-trajectory estimate.
double mean_log_matrix_norm(const OperatorSpec& spec, double e, std::int64_t n,
                            std::uint64_t seed);

/// Exact exponent of a periodic potential: (1/p) ln of the spectral radius of
/// the p-step monodromy matrix, 0 when |trace| <= 2.
double periodic_oracle(std::span<const double> values, double e, double lambda);

}  // namespace lyaplab
