#include "lyaplab/thouless.hpp"

#include <cmath>
#include <limits>

#include "lyaplab/errors.hpp"
#include "lyaplab/lyapunov.hpp"

namespace lyaplab {

namespace {

// Antiderivative of ln|u|.
double xlogx(double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; }

}  // namespace

double log_potential(const SpectralHistogram& h, double e) {
  if (!std::isfinite(e)) throw DomainError("log_potential: non-finite energy");
  double acc = 0.0;
  for (std::size_t k = 0; k < h.mass.size(); ++k) {
    const double m = h.mass[k];
    if (m == 0.0) continue;
    const double a = h.edges[k];
    const double b = h.edges[k + 1];
    const double width = b - a;
    const double mid = 0.5 * (a + b) - e;
    if (width == 0.0) {
      if (a == e) return -std::numeric_limits<double>::infinity();
      acc += m * std::log(std::abs(a - e));
    } else if (width < 1e-3 * std::abs(mid)) {
      // Average of ln|mid + s| over |s| <= width/2.
      const double r = width / mid;
      acc += m * (std::log(std::abs(mid)) - r * r / 24.0);
    } else {
      acc += m * (xlogx(b - e) - xlogx(a - e)) / width;
    }
  }
  return acc;
}

double thouless_gamma(const SpectralHistogram& h, double e, double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw DomainError("thouless_gamma: lambda must be > 0");
  return std::log(lambda) + log_potential(h, e);
}

std::vector<double> spectrum_edges(const OperatorSpec& spec, std::size_t bins) {
  if (bins < 3) throw DomainError("spectrum_edges: need at least 3 bins");
  const auto [vlo, vhi] = spec.potential_range();
  const double lo = vlo - 2.0 / spec.lambda;
  const double hi = vhi + 2.0 / spec.lambda;
  const double w = (hi - lo) / static_cast<double>(bins - 2);
  return uniform_edges(lo - w, hi + w, bins);
}

std::vector<ThoulessRow> thouless_scan(const OperatorSpec& spec, std::span<const double> grid,
                                       const ThoulessBudget& budget, std::uint64_t seed,
                                       unsigned workers) {
  if (grid.empty()) throw DomainError("thouless_scan: empty energy grid");
  const std::vector<double> edges = spectrum_edges(spec, budget.bins);
  const SpectralHistogram h =
      dos_histogram(spec, budget.dos_n, budget.dos_b, edges, seed, workers);
  const std::vector<LyapunovEstimate> g =
      lyapunov_scan(spec, grid, budget.transfer_n, budget.transfer_b, seed, workers);
  std::vector<ThoulessRow> rows(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ThoulessRow& r = rows[k];
    r.e = grid[k];
    r.gamma_transfer = g[k].gamma;
    r.std_error_transfer = g[k].std_error;
    r.gamma_thouless = thouless_gamma(h, grid[k], spec.lambda);
    r.residual = r.gamma_transfer - r.gamma_thouless;
  }
  return rows;
}

}  // namespace lyaplab
