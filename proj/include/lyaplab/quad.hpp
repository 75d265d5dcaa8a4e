#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>

namespace lyaplab {

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  bool converged = false;
  std::int64_t subdivisions = 0;
  bool divergent = false;  // integrand not integrable at a declared point
};

struct QuadTolerance {
  double abs = 1e-10;
  double rel = 1e-10;
};

/// Global adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Each split point inside [a, b] (or equal to a or b) is treated as a
/// possible integrable singularity: the pieces next to it start as a dyadic
/// ladder of panels shrinking toward it, and the part closer than the last
/// rung is extrapolated from the ratios of consecutive rungs. f is never
/// evaluated at a split point. Converged means err_est <= max(abs, rel |value|).
/// When the rungs stop decaying the integral is flagged divergent and the
/// partial value is returned.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, std::span<const double> split_points,
                              QuadTolerance tol, std::int64_t max_subdiv = 4000);

/// Absolute tolerance only.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, std::span<const double> split_points,
                              double tol, std::int64_t max_subdiv = 4000);

/// |d|^(2 alpha - 1) * integral over [-1, 1] of |x (x - d)|^-alpha, the
/// rescaled quantity that stays bounded as d -> 0 for alpha in (1/2, 1).
/// Throws NumericalFailure when the quadrature does not converge.
double quadr_bound_check(std::complex<double> d, double moment_alpha);

}  // namespace lyaplab
