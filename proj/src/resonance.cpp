#include "lyaplab/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "lyaplab/errors.hpp"

namespace lyaplab {

namespace {

void check_alpha_open(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError(std::string(who) + ": moment_alpha must lie in (0, 1)");
}

void check_lambda(double lambda, const char* who) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw DomainError(std::string(who) + ": lambda must be finite and > 0");
}

// Root of a monotone f on [lo, hi] with f(lo) and f(hi) of opposite signs
// (or zero), to the last representable bit.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Solutions of F(x) = b (mod 2pi) for F monotone between consecutive entries
// of `breaks`.
std::vector<double> level_roots(const std::function<double(double)>& F,
                                const std::vector<double>& breaks, double b) {
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double l = breaks[i];
    const double r = breaks[i + 1];
    if (!(r > l)) continue;
    const double fl = F(l);
    const double fr = F(r);
    const double lo = std::min(fl, fr);
    const double hi = std::max(fl, fr);
    const auto k0 = static_cast<std::int64_t>(std::ceil((lo - b) / kTwoPi));
    const auto k1 = static_cast<std::int64_t>(std::floor((hi - b) / kTwoPi));
    for (std::int64_t k = k0; k <= k1; ++k) {
      const double target = b + kTwoPi * static_cast<double>(k);
      roots.push_back(bisect([&](double x) { return F(x) - target; }, l, r));
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double x : roots)
    if (out.empty() || x - out.back() > 1e-13) out.push_back(x);
  return out;
}

using Poly = std::vector<Complex>;  // coefficient k multiplies w^k

Poly poly_mul(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

Complex poly_eval(const Poly& p, Complex w) {
  Complex acc = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * w + p[k];
  return acc;
}

Complex poly_deriv_eval(const Poly& p, Complex w) {
  Complex acc = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) acc = acc * w + static_cast<double>(k) * p[k];
  return acc;
}

std::vector<Complex> poly_roots(const Poly& p) {
  const int n = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) c(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("J_integral: root finder failed");
  std::vector<Complex> roots;
  for (int i = 0; i < n; ++i) {
    Complex w = es.eigenvalues()[i];
    // A few guarded Newton steps.
    for (int it = 0; it < 3; ++it) {
      const Complex d = poly_deriv_eval(p, w);
      if (d == 0.0) break;
      const Complex w2 = w - poly_eval(p, w) / d;
      if (std::abs(poly_eval(p, w2)) < std::abs(poly_eval(p, w))) w = w2;
      else break;
    }
    roots.push_back(w);
  }
  return roots;
}

// Angles of the zeros of g on (or near) the unit circle, merged.
std::vector<double> j_split_points(Complex e, double th, Complex eps) {
  const Complex eith = std::polar(1.0, th);
  const Poly a{1.0, 2.0 * e, 1.0};
  const Poly b{eith, 2.0 * e, std::conj(eith)};
  Poly p = poly_mul(a, b);
  for (std::size_t k = 0; k < 3; ++k) p[k + 1] -= 2.0 * eps * (a[k] + b[k]);
  std::vector<double> args;
  for (Complex w : poly_roots(p)) {
    if (std::abs(std::abs(w) - 1.0) > 0.05) continue;
    const double x = std::arg(w);
    args.push_back(x);
    if (kPi - std::abs(x) < 1e-7) {
      args.push_back(-kPi);
      args.push_back(kPi);
    }
  }
  std::sort(args.begin(), args.end());
  std::vector<double> out;
  std::size_t i = 0;
  while (i < args.size()) {
    std::size_t j = i + 1;
    double sum = args[i];
    while (j < args.size() && args[j] - args[j - 1] < 1e-7) sum += args[j++];
    double x = sum / static_cast<double>(j - i);
    if (args[i] == -kPi) x = -kPi;
    if (args[j - 1] == kPi) x = kPi;
    out.push_back(x);
    i = j;
  }
  return out;
}

QuadResult combine(const QuadResult& x, const QuadResult& y) {
  QuadResult r;
  r.value = x.value + y.value;
  r.err_est = x.err_est + y.err_est;
  r.converged = x.converged && y.converged;
  r.divergent = x.divergent || y.divergent;
  r.subdivisions = x.subdivisions + y.subdivisions;
  return r;
}

}  // namespace

Complex delta3(Angle x0, Angle x1, ComplexEnergy z, double lambda, bool drop_coupling) {
  check_lambda(lambda, "delta3");
  const Complex zz = z.z();
  const double t2 = drop_coupling ? 0.0 : 1.0 / (lambda * lambda);
  const Complex c1 = std::cos(x1.value()) + zz;
  const Complex c0 = std::cos(x0.value()) + zz;
  const double xm1 = 2.0 * x0.value() + lambda * std::sin(x0.value()) - x1.value();
  const Complex cm1 = std::cos(xm1) + zz;
  return -(cm1 * (c0 * c1 - t2) - t2 * c1);
}

Angle theta(Angle x0, double lambda) {
  check_lambda(lambda, "theta");
  return reduce_angle(2.0 * x0.value() + lambda * std::sin(x0.value()));
}

QuadResult J_integral(Complex e, Angle th, double moment_alpha, Complex eps,
                      QuadTolerance tol) {
  check_alpha_open(moment_alpha, "J_integral");
  const double t = th.value();
  const auto g = [&](double x) {
    const Complex p = std::cos(x) + e;
    const Complex q = std::cos(x - t) + e;
    return std::pow(std::abs(p * q - eps * (p + q)), -moment_alpha);
  };
  const std::vector<double> splits = j_split_points(e, t, eps);
  return integrate_adaptive(g, -kPi, kPi, splits, tol);
}

QuadResult J_integral(double e, Angle th, double moment_alpha, double eps,
                      QuadTolerance tol) {
  return J_integral(Complex(e, 0.0), th, moment_alpha, Complex(eps, 0.0), tol);
}

std::vector<double> theta_level_roots(double lambda, double b) {
  check_lambda(lambda, "theta_level_roots");
  const auto F = [lambda](double x) { return 2.0 * x + lambda * std::sin(x); };
  std::vector<double> breaks{-kPi};
  if (lambda > 2.0) {
    const double xc = std::acos(-2.0 / lambda);
    breaks.push_back(-xc);
    breaks.push_back(xc);
  }
  breaks.push_back(kPi);
  return level_roots(F, breaks, b);
}

QuadResult K_integral(double lambda, Angle b, double e, double moment_alpha,
                      QuadTolerance tol) {
  check_lambda(lambda, "K_integral");
  if (!(std::abs(e) < 1.0)) throw DomainError("K_integral: need |E| < 1");
  if (!(moment_alpha > 0.5 && moment_alpha < 1.0))
    throw DomainError("K_integral: moment_alpha must lie in (1/2, 1)");
  const double bb = b.value();
  const double p = 2.0 * moment_alpha - 1.0;
  const auto f = [&](double x) {
    const double th = 2.0 * x + lambda * std::sin(x);
    const double d = std::abs(std::remainder(th - bb, kTwoPi));
    return std::pow(std::abs(std::cos(x) + e), -moment_alpha) * std::pow(d, -p);
  };
  std::vector<double> splits = theta_level_roots(lambda, bb);
  const double xs = std::acos(-e);
  splits.push_back(xs);
  splits.push_back(-xs);
  // Kinks of the circle distance.
  for (double x : theta_level_roots(lambda, bb + kPi)) splits.push_back(x);
  return integrate_adaptive(f, -kPi, kPi, splits, tol, 20000);
}

double excluded_measure(double lambda, ComplexEnergy z, double a_cut) {
  check_lambda(lambda, "excluded_measure");
  if (!(a_cut > 0.0)) throw DomainError("excluded_measure: a_cut must be > 0");
  const double c = a_cut / (lambda * lambda);
  if (c <= z.delta()) return 0.0;
  const double w = std::sqrt(c * c - z.delta() * z.delta());
  // |cos x0 + E| < w  <=>  -E - w < cos x0 < -E + w.
  const auto arccos_clamped = [](double v) { return std::acos(std::clamp(v, -1.0, 1.0)); };
  return 2.0 * (arccos_clamped(-z.e() - w) - arccos_clamped(-z.e() + w));
}

QuadResult I_integral(double lambda, ComplexEnergy z, double a_cut,
                      double moment_alpha, QuadTolerance tol) {
  check_lambda(lambda, "I_integral");
  check_alpha_open(moment_alpha, "I_integral");
  if (!(a_cut > 0.0)) throw DomainError("I_integral: a_cut must be > 0");
  const double c = a_cut / (lambda * lambda);
  const double e = z.e();
  const Complex zz = z.z();

  // Admissible x0: |cos x0 + E| >= w, i.e. cos x0 >= -E + w or cos x0 <= -E - w.
  std::vector<std::pair<double, double>> pieces;
  if (c <= z.delta()) {
    pieces.emplace_back(-kPi, kPi);
  } else {
    const double w = std::sqrt(c * c - z.delta() * z.delta());
    const double up = -e + w;
    const double down = -e - w;
    if (up <= 1.0) {
      const double r = std::acos(std::max(up, -1.0));
      pieces.emplace_back(-r, r);
    }
    if (down >= -1.0) {
      const double r = std::acos(std::min(down, 1.0));
      if (r < kPi) {
        pieces.emplace_back(-kPi, -r);
        pieces.emplace_back(r, kPi);
      }
    }
  }

  // Inner double zeros: theta(x0) in {0, +-2 x*} with cos x* = -E.
  std::vector<double> splits = theta_level_roots(lambda, 0.0);
  if (std::abs(e) < 1.0) {
    const double xs = std::acos(-e);
    for (double lvl : {2.0 * xs, -2.0 * xs})
      for (double x : theta_level_roots(lambda, lvl)) splits.push_back(x);
  }

  std::sort(splits.begin(), splits.end());
  bool inner_divergent = false;
  // Inner results that miss their own tolerance only occur next to the outer
  // split points, where the outer panels are tiny. Their error is charged to
  // the outer estimate weighted by the distance to the nearest split or piece
  // end, which bounds the width of the panel that sampled them.
  double inner_excess = 0.0;
  const QuadTolerance inner_tol{tol.abs * 1e-2, tol.rel * 1e-2};
  const auto nearest = [&](double x, double l, double r) {
    double d = std::min(x - l, r - x);
    const auto it = std::lower_bound(splits.begin(), splits.end(), x);
    if (it != splits.end()) d = std::min(d, *it - x);
    if (it != splits.begin()) d = std::min(d, x - *std::prev(it));
    return std::max(d, 0.0);
  };
  double piece_l = -kPi, piece_r = kPi;
  const auto outer = [&](double x0) {
    const Complex c0 = std::cos(x0) + zz;
    const Complex eps = 1.0 / (lambda * lambda * c0);
    const QuadResult in = J_integral(zz, reduce_angle(2.0 * x0 + lambda * std::sin(x0)),
                                     moment_alpha, eps, inner_tol);
    inner_divergent = inner_divergent || in.divergent;
    const double weight = std::pow(std::abs(c0), -moment_alpha);
    if (!in.converged) inner_excess += nearest(x0, piece_l, piece_r) * weight * in.err_est;
    return weight * in.value;
  };

  QuadResult total;
  total.converged = true;
  for (const auto& [l, r] : pieces) {
    if (!(r > l)) continue;
    std::vector<double> inside;
    for (double s : splits)
      if (s > l && s < r) inside.push_back(s);
    piece_l = l;
    piece_r = r;
    total = combine(total, integrate_adaptive(outer, l, r, inside, tol));
  }
  total.err_est += inner_excess;
  total.divergent = total.divergent || inner_divergent;
  total.converged = total.converged && !total.divergent &&
                    total.err_est <= std::max(tol.abs, tol.rel * std::abs(total.value));
  return total;
}

std::vector<Angle> hbar_roots(double lambda, Angle b) {
  check_lambda(lambda, "hbar_roots");
  const auto h = [lambda](double x) { return lambda * std::cos(x) + 2.0 * x; };
  const double half = 0.5 * kPi;
  std::vector<double> breaks{-half};
  if (lambda > 2.0) breaks.push_back(std::asin(2.0 / lambda));
  breaks.push_back(half);
  std::vector<Angle> out;
  for (double x : level_roots(h, breaks, b.value())) out.push_back(reduce_angle(x));
  return out;
}

double hbar_asymptotic_remainder(double lambda, double b, double x) {
  check_lambda(lambda, "hbar_asymptotic_remainder");
  const double h = lambda * std::cos(x) + 2.0 * x;
  const double ell = std::nearbyint((h - b) / kTwoPi);
  const double s = x - 2.0 / lambda;
  return s * s - 4.0 / (lambda * lambda) - 2.0 * (lambda - kTwoPi * ell - b) / lambda;
}

LambdaClass classify_lambda(double lambda, double delta_exp,
                            const std::vector<double>& offsets) {
  if (!std::isfinite(lambda) || lambda < kTwoPi)
    throw DomainError("classify_lambda: need lambda >= 2 pi");
  if (!(delta_exp > 0.0)) throw DomainError("classify_lambda: delta_exp must be > 0");
  if (offsets.empty()) throw DomainError("classify_lambda: need at least one offset");
  LambdaClass out;
  out.lambda = lambda;
  out.lambda_bar = reduce_angle(lambda);
  out.delta_exp = delta_exp;
  out.distance = kPi;
  for (double o : offsets) out.distance = std::min(out.distance, angular_distance(lambda, o));
  out.resonant = out.distance < std::pow(lambda, -delta_exp);
  return out;
}

double next_regular_lambda(double lambda, double delta_exp,
                           const std::vector<double>& offsets, double step) {
  if (!(step > 0.0)) throw DomainError("next_regular_lambda: step must be > 0");
  for (int k = 0; k < 100000; ++k) {
    const double l = lambda + step * k;
    if (!classify_lambda(l, delta_exp, offsets).resonant) return l;
  }
  throw DomainError("next_regular_lambda: no regular value found");
}

}  // namespace lyaplab
