#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyaplab/dos.hpp"
#include "lyaplab/operator.hpp"

namespace lyaplab {

/// Integral of ln|E - E'| against the histogram, exact per bin. An atom
/// located exactly at E gives -infinity.
double log_potential(const SpectralHistogram& h, double e);

/// ln lambda + log_potential(h, e).
double thouless_gamma(const SpectralHistogram& h, double e, double lambda);

struct ThoulessRow {
  double e = 0.0;
  double gamma_transfer = 0.0;
  double std_error_transfer = 0.0;
  double gamma_thouless = 0.0;
  double residual = 0.0;  // gamma_transfer - gamma_thouless
};

struct ThoulessBudget {
  std::int64_t transfer_n = 1000000;
  std::int64_t transfer_b = 1;
  std::int64_t dos_n = 4000;
  std::int64_t dos_b = 1;
  std::size_t bins = 2000;
};

/// Transfer-matrix exponents at each energy against the Thouless value of one
/// shared histogram over [min V - 2/lambda, max V + 2/lambda] (padded by one
/// bin on each side).
std::vector<ThoulessRow> thouless_scan(const OperatorSpec& spec,
                                       std::span<const double> grid,
                                       const ThoulessBudget& budget,
                                       std::uint64_t seed, unsigned workers = 1);

/// Edges used by thouless_scan.
std::vector<double> spectrum_edges(const OperatorSpec& spec, std::size_t bins);

}  // namespace lyaplab
