#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lyaplab/dynamics.hpp"
#include "lyaplab/operator.hpp"
#include "lyaplab/quad.hpp"

namespace lyaplab {

/// Determinant of the three-site truncation at (x_{-1}, x_0, x_1) of a
/// standard-map orbit, V = -cos:
///   c1 = cos x1 + z, c0 = cos x0 + z, c_{-1} = cos(2 x0 + lambda sin x0 - x1) + z,
///   Delta3 = -[c_{-1} (c0 c1 - lambda^-2) - lambda^-2 c1].
/// `drop_coupling` removes the lambda^-2 terms.
Complex delta3(Angle x0, Angle x1, ComplexEnergy z, double lambda,
               bool drop_coupling = false);

/// reduce_angle(2 x0 + lambda sin x0).
Angle theta(Angle x0, double lambda);

/// Integral over [-pi, pi] of |g(x)|^-alpha with
///   g(x) = (cos x + E)(cos(x - th) + E) - eps ((cos x + E) + (cos(x - th) + E)).
/// Zeros of g are located as unit-circle roots of a quartic and declared to the
/// quadrature. Coinciding zeros with alpha >= 1/2 come back flagged divergent.
QuadResult J_integral(double e, Angle th, double moment_alpha, double eps,
                      QuadTolerance tol = {1e-10, 1e-8});
/// Complex E and eps, as used inside I_integral.
QuadResult J_integral(Complex e, Angle th, double moment_alpha, Complex eps,
                      QuadTolerance tol = {1e-10, 1e-8});

/// Integral over [-pi, pi] of |cos x + E|^-alpha dist(theta(x), b)^-(2 alpha - 1),
/// dist the circle distance. Requires |E| < 1 and alpha in (1/2, 1).
QuadResult K_integral(double lambda, Angle b, double e, double moment_alpha,
                      QuadTolerance tol = {1e-10, 1e-7});

/// Integral of |Delta3|^-alpha over {(x0, x1): |cos x0 + z| >= a_cut lambda^-2},
/// computed as an outer x0 quadrature of |c0|^-alpha J(z, theta(x0), alpha,
/// 1 / (lambda^2 c0)).
QuadResult I_integral(double lambda, ComplexEnergy z, double a_cut,
                      double moment_alpha, QuadTolerance tol = {1e-6, 1e-5});

/// Lebesgue measure of {x0 in [-pi, pi): |cos x0 + z| < a_cut lambda^-2}.
double excluded_measure(double lambda, ComplexEnergy z, double a_cut);

/// All x in [-pi, pi] with 2x + lambda sin x = b (mod 2pi), ascending.
std::vector<double> theta_level_roots(double lambda, double b);

/// Roots of h(x) = lambda cos x + 2x = b (mod 2pi) on [-pi/2, pi/2], ascending,
/// found by bisection on the monotone branches of h.
std::vector<Angle> hbar_roots(double lambda, Angle b);

/// For a root x of h(x) = b + 2 pi l, the remainder eps in
///   x = 2/lambda +- sqrt(4/lambda^2 + 2 (lambda - 2 pi l - b)/lambda + eps),
/// i.e. eps = (x - 2/lambda)^2 - 4/lambda^2 - 2 (lambda - 2 pi l - b)/lambda.
/// l is taken as the nearest integer to (h(x) - b) / 2pi.
double hbar_asymptotic_remainder(double lambda, double b, double x);

struct LambdaClass {
  double lambda = 0.0;
  Angle lambda_bar;       // lambda mod 2pi
  double delta_exp = 0.1;
  double distance = 0.0;  // min over offsets of |reduce(lambda - o)|
  bool resonant = false;  // distance < lambda^-delta_exp
};

/// Requires lambda >= 2 pi.
LambdaClass classify_lambda(double lambda, double delta_exp = 0.1,
                            const std::vector<double>& offsets = {0.0, kPi});

/// Smallest lambda' >= lambda, on a grid of spacing `step`, that is regular.
double next_regular_lambda(double lambda, double delta_exp = 0.1,
                           const std::vector<double>& offsets = {0.0, kPi},
                           double step = 0.01);

}  // namespace lyaplab
