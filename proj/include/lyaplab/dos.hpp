#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyaplab/operator.hpp"
#include "lyaplab/parallel.hpp"

namespace lyaplab {

/// Piecewise-uniform spectral measure. A bin with equal edges is an atom.
struct SpectralHistogram {
  std::vector<double> edges;  // non-decreasing, size = mass.size() + 1
  std::vector<double> mass;   // >= 0, sums to 1
  bool coverage_warning = false;  // edges missed part of the spectrum
};

/// Validates, normalizes to total mass 1 and returns the histogram.
SpectralHistogram make_histogram(std::vector<double> edges, std::vector<double> mass);

/// bins + 1 equally spaced edges.
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

/// Ensemble-averaged eigenvalue counting on Dirichlet truncations of length n
/// (sites 0..n-1 of members 0..b-1). Edges must be strictly increasing.
/// Mass outside [edges.front(), edges.back()] is dropped and the rest
/// renormalized; coverage_warning is set when the edges do not contain
/// [min V - 2/lambda, max V + 2/lambda].
SpectralHistogram dos_histogram(const OperatorSpec& spec, std::int64_t n,
                                std::int64_t b, std::span<const double> edges,
                                std::uint64_t seed, unsigned workers = 1);

/// Histogram mass below e (linear inside bins; atoms count when e >= atom).
double cumulative_mass(const SpectralHistogram& h, double e);

/// Mass of [lo, hi] under the piecewise-uniform reading of the histogram.
double histogram_mass(const SpectralHistogram& h, double lo, double hi);

/// Integral of d rho(E') / (E' - z), exact per bin. Requires delta > 0.
Complex stieltjes(const SpectralHistogram& h, ComplexEnergy z);

struct GreenAverage {
  Complex mean_g;
  Complex std_error_g;            // componentwise
  double mean_abs_g_alpha = 0.0;  // mean |G|^alpha
  double std_error_abs_g_alpha = 0.0;
  double mean_im_g_alpha = 0.0;   // mean (Im G)^alpha, diagnostic only
  std::int64_t samples = 0;
  std::int64_t clamp_violations = 0;  // samples with |G| > 1.01 / delta
};

/// Ensemble means of G(0, 0) on the windows [-window_half, window_half] of
/// members 0..b-1. Requires delta > 0 and moment_alpha in (0, 1].
GreenAverage green_avg(const OperatorSpec& spec, ComplexEnergy z,
                       std::int64_t window_half, std::int64_t b,
                       std::uint64_t seed, double moment_alpha,
                       unsigned workers = 1);

struct WindowBound {
  double e0 = 0.0;
  double delta = 0.0;
  double moment_alpha = 1.0;
  double bound = 0.0;  // (2 delta)^alpha mean |G(e0 + i delta)|^alpha
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::int64_t clamp_violations = 0;
};

WindowBound frac_moment_bound(const OperatorSpec& spec, double e0, double delta,
                              double moment_alpha, std::int64_t window_half,
                              std::int64_t b, std::uint64_t seed,
                              unsigned workers = 1);

/// Mean over members of (#eigenvalues in [e0 - delta, e0 + delta]) / n on
/// truncations of length n, with its standard error.
MeanStderr empirical_window_mass(const OperatorSpec& spec, double e0, double delta,
                                 std::int64_t n, std::int64_t b, std::uint64_t seed,
                                 unsigned workers = 1);

}  // namespace lyaplab
