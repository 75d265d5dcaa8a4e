#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lyaplab/distribution.hpp"
#include "lyaplab/dos.hpp"
#include "lyaplab/operator.hpp"
#include "lyaplab/parallel.hpp"

namespace lyaplab {

struct Prop31Inputs {
  double ln_lambda = 0.0;
  double t = 0.0;      // Lyapunov threshold
  double xi = 1.0;     // 0 < delta < xi <= 1
  double delta = 0.0;
  double g = 0.0;      // >= delta
};

struct BoundReport {
  Prop31Inputs inputs;
  double raw_bound = 0.0;
  double log_raw_bound = 0.0;  // raw_bound underflows long before this does
  double clamped_bound = 0.0;  // min(raw_bound, 2 delta)
  bool vacuous = false;        // raw_bound >= 2 delta
};

/// meas Z_t <= 2e exp{-(ln lambda - t - 6 xi ln(e^2 g / (xi delta))) / (2 g)},
/// clamped by the trivial bound 2 delta.
BoundReport prop31_bound(const Prop31Inputs& p);

struct EnergyGamma {
  double e = 0.0;
  double gamma = 0.0;
};

/// h * #{rows with |E - e0| <= delta and gamma <= t} for rows on a uniform
/// grid of spacing h that covers [e0 - delta, e0 + delta] to within h.
double measure_Zt(std::span<const EnergyGamma> rows, double t, double e0, double delta);

/// (3 A ln(1 + 1/(A delta)) + 2/xi)^m.
double prop2_rhs(double a_density, double delta, double xi, std::int64_t m);

/// Monte Carlo mean of |Delta_m - a Delta_{m-1}|^-1 over i.i.d. draws of
/// V(0..m-1) from dist, Delta_k = det(H_k - z). Requires |a| <= xi/2 and
/// Im a >= 0.
MeanStderr prop2_mc(const Distribution& dist, std::int64_t m, ComplexEnergy z,
                    double lambda, Complex a, double xi, std::int64_t samples,
                    std::uint64_t seed, unsigned workers = 1);

struct LemmaCheck {
  double lhs = 0.0;
  double lhs_err = 0.0;  // quadrature error estimate
  double rhs = 0.0;
};

/// lhs = integral of d tau(v) / sqrt((v - E)^2 + delta^2) by adaptive
/// quadrature, rhs = 3 A ln(1 + 1/(A delta)). tau must have density <= A.
LemmaCheck lemma_bdddens_check(double a_density, double delta, double e,
                               const Distribution& dist);

/// Split-measure variant: only the restriction of dist to [E - xi, E + xi]
/// needs density <= A; lhs = integral of d sigma(v) / sqrt((v - E - a)^2 +
/// delta^2) with |a| <= xi/2, rhs = 3 A ln(1 + 1/(A delta)) + 2/xi.
LemmaCheck lemma_split_check(double a_density, double delta, double e, double xi,
                             const Distribution& dist, double a = 0.0);

/// max(delta, sup over |E - e0| <= xi of the histogram mass of
/// [E - delta, E + delta]); exact for the piecewise-uniform histogram.
double empirical_g(const SpectralHistogram& h, double e0, double delta, double xi);

}  // namespace lyaplab
