#include "lyaplab/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "lyaplab/bounds.hpp"
#include "lyaplab/dos.hpp"
#include "lyaplab/dynamics.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/lyapunov.hpp"
#include "lyaplab/operator.hpp"
#include "lyaplab/quad.hpp"
#include "lyaplab/resonance.hpp"
#include "lyaplab/rng.hpp"
#include "lyaplab/thouless.hpp"

namespace lyaplab {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Exponent of the constant potential at u = lambda (E - v), |u| > 2.
double constant_gamma(double u) {
  const double a = std::abs(u);
  return std::log(0.5 * (a + std::sqrt(a * a - 4.0)));
}

struct Suite {
  std::uint64_t seed;
  unsigned workers;
  std::vector<VerifyResult> out;

  void run(const char* name, const std::function<VerifyResult()>& check) {
    VerifyResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.name = name;
    out.push_back(std::move(r));
  }
};

VerifyResult pass_if(bool ok, std::string detail) { return {"", ok, std::move(detail)}; }

// Jacobian determinant of the standard map by central differences.
double jacobian_det(double x1, double x2, double lambda) {
  const double h = 1e-6;
  double d[2][2];
  for (int j = 0; j < 2; ++j) {
    const double p1 = x1 + (j == 0 ? h : 0.0), p2 = x2 + (j == 1 ? h : 0.0);
    const double m1 = x1 - (j == 0 ? h : 0.0), m2 = x2 - (j == 1 ? h : 0.0);
    const StdMapState a = std_map_step(make_std_map_state(p1, p2), lambda);
    const StdMapState b = std_map_step(make_std_map_state(m1, m2), lambda);
    d[0][j] = reduce_angle(a.x_prev - b.x_prev) / (2.0 * h);
    d[1][j] = reduce_angle(a.x_curr - b.x_curr) / (2.0 * h);
  }
  return d[0][0] * d[1][1] - d[0][1] * d[1][0];
}

}  // namespace

std::vector<VerifyResult> run_verify(std::uint64_t seed, unsigned workers) {
  Suite s{seed, workers, {}};

  s.run("rng.philox_known_answer", [] {
    const auto a = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    const auto b = Philox4x32::apply({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
    const bool ok = a == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
                    b == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
    return pass_if(ok, "Random123 reference vectors");
  });

  s.run("dynamics.area_preservation", [&] {
    RngStream rng(seed, Subsystem::Verify, 1);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double x1 = rng.uniform(-kPi, kPi), x2 = rng.uniform(-kPi, kPi);
      worst = std::max(worst, std::abs(jacobian_det(x1, x2, 7.3) - 1.0));
    }
    return pass_if(worst < 1e-6, fmt("max |det DT - 1| = %.3g", worst));
  });

  s.run("dynamics.inverse_roundtrip", [&] {
    RngStream rng(seed, Subsystem::Verify, 2);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const StdMapState a = make_std_map_state(rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi));
      const StdMapState b = std_map_step_inverse(std_map_step(a, 50.0), 50.0);
      worst = std::max({worst, angular_distance(a.x_prev, b.x_prev),
                        angular_distance(a.x_curr, b.x_curr)});
    }
    return pass_if(worst < 1e-9, fmt("max roundtrip error = %.3g", worst));
  });

  s.run("dynamics.orbit_recursion", [] {
    const double lambda = 50.0;
    const auto orbit = std_map_orbit(make_std_map_state(0.3, 1.1), lambda, 10000);
    double worst = 0.0;
    for (std::size_t n = 1; n + 1 < orbit.size(); ++n)
      worst = std::max(worst, pendulum_residual(orbit[n - 1], orbit[n], orbit[n + 1], lambda));
    return pass_if(worst < 1e-9, fmt("max residual over 1e4 steps = %.3g", worst));
  });

  s.run("dynamics.skew_shift_roundtrip", [] {
    SkewShiftState a = make_skew_shift_state({0.1, -2.0, 3.0});
    SkewShiftState b = a;
    for (int k = 0; k < 1000; ++k) b = skew_shift_step(b, 1.94);
    for (int k = 0; k < 1000; ++k) b = skew_shift_step_inverse(b, 1.94);
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      worst = std::max(worst, angular_distance(a.coords[i], b.coords[i]));
    return pass_if(worst < 1e-9, fmt("max error after 1000 steps = %.3g", worst));
  });

  s.run("operator.determinant_vs_dense", [&] {
    RngStream rng(seed, Subsystem::Verify, 3);
    double worst = 0.0;
    bool bound_ok = true;
    for (int k = 0; k < 200; ++k) {
      const std::size_t m = 1 + rng.next_u64() % 8;
      const double lambda = rng.uniform(0.5, 20.0);
      std::vector<double> v(m);
      for (double& x : v) x = rng.uniform(-1.0, 1.0);
      const Complex z(rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0));
      const auto dets = det_recursion(v, lambda, z);
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
      for (std::size_t i = 0; i < m; ++i) {
        a(i, i) = v[i] - z;
        if (i + 1 < m) a(i, i + 1) = a(i + 1, i) = 1.0 / lambda;
      }
      const Complex dense = a.determinant();
      const Complex rec = dets[m].value();
      worst = std::max(worst, std::abs(rec - dense) / std::max(std::abs(dense), 1e-300));
      const double mm = 1.0 + std::abs(z);  // max |v - z| <= 1 + |z|
      bound_ok = bound_ok && std::abs(rec) <= std::pow(mm + 1.0 / lambda, m) * (1 + 1e-12);
    }
    return pass_if(worst < 1e-10 && bound_ok,
                   fmt("max rel error %.3g, bound held = %g", worst, bound_ok ? 1.0 : 0.0));
  });

  s.run("operator.sturm_vs_eigen", [&] {
    OperatorSpec spec{IidDriver{Distribution::uniform(0.0, 1.0)}, 3.0};
    const PotentialWindow w = sample_potential(spec, 0, 59, seed);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(60, 60);
    for (int i = 0; i < 60; ++i) {
      a(i, i) = w.values()[i];
      if (i + 1 < 60) a(i, i + 1) = a(i + 1, i) = w.hopping();
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    bool ok = true;
    for (double e = -1.0; e <= 2.0; e += 0.0371) {
      const auto expect = std::count_if(ev.begin(), ev.end(), [&](double x) { return x < e; });
      ok = ok && sturm_count(w, e) == expect;
    }
    return pass_if(ok, "counts agree with dense eigenvalues on a 60-site window");
  });

  s.run("operator.green_symmetry_and_clamp", [&] {
    OperatorSpec spec{IidDriver{Distribution::uniform(0.0, 1.0)}, 4.0};
    const PotentialWindow w = sample_potential(spec, -10, 10, seed);
    const ComplexEnergy z(0.4, 1e-3);
    double asym = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < w.size(); i += 3)
      for (std::size_t j = 0; j < w.size(); j += 4) {
        const Complex gij = green_entry(w, z, i, j);
        asym = std::max(asym, std::abs(gij - green_entry(w, z, j, i)));
        worst = std::max(worst, std::abs(gij) * z.delta());
      }
    return pass_if(asym < 1e-8 && worst <= 1.0 + 1e-9,
                   fmt("max |G_ij - G_ji| = %.3g, max delta |G| = %.6f", asym, worst));
  });

  s.run("lyapunov.constant_oracle", [&] {
    double worst = 0.0;
    for (double v : {0.0, 0.3}) {
      OperatorSpec spec{ConstantDriver{v}, 10.0};
      for (double e : {-0.5, 0.8}) {
        const double u = spec.lambda * (e - v);
        worst = std::max(worst, std::abs(lyapunov_single(spec, e, 100000, seed).gamma -
                                         constant_gamma(u)));
      }
    }
    return pass_if(worst < 5e-3, fmt("max error = %.3g", worst));
  });

  s.run("lyapunov.periodic_oracle", [&] {
    OperatorSpec spec{PeriodicDriver{{-1.0, 1.0}}, 10.0};
    const double exact = 0.5 * std::log((102.0 + std::sqrt(10400.0)) / 2.0);
    const double est = lyapunov_single(spec, 0.0, 100000, seed).gamma;
    const double oracle = periodic_oracle(std::vector<double>{-1.0, 1.0}, 0.0, 10.0);
    return pass_if(std::abs(est - exact) < 5e-3 && std::abs(oracle - exact) < 1e-12,
                   fmt("estimate %.6f vs exact %.6f", est, exact));
  });

  s.run("lyapunov.norm_upper_bound", [&] {
    OperatorSpec spec{StdMapDriver{}, 20.0};
    const double g = lyapunov_single(spec, 0.1, 20000, seed).gamma;
    const double ub = mean_log_matrix_norm(spec, 0.1, 20000, seed);
    return pass_if(g >= 0.0 && g <= ub + 1e-12, fmt("gamma %.6f <= mean ln||T|| %.6f", g, ub));
  });

  s.run("lyapunov.worker_invariance", [&] {
    OperatorSpec spec{StdMapDriver{}, 20.0};
    const std::vector<double> es{-0.2, 0.0, 0.3};
    const auto a = lyapunov_scan(spec, es, 5000, 8, seed, 1);
    const auto b = lyapunov_scan(spec, es, 5000, 8, seed, 3);
    bool same = true;
    for (std::size_t k = 0; k < es.size(); ++k)
      same = same && a[k].gamma == b[k].gamma && a[k].std_error == b[k].std_error;
    return pass_if(same, "bitwise equal at 1 and 3 workers");
  });

  s.run("dos.constant_arcsine", [&] {
    OperatorSpec spec{ConstantDriver{0.0}, 2.0};
    const auto edges = uniform_edges(-1.05, 1.05, 420);
    const SpectralHistogram h = dos_histogram(spec, 2000, 1, edges, seed, workers);
    double total = 0.0, sup = 0.0;
    for (double m : h.mass) total += m;
    for (double e : edges) {
      const double x = std::clamp(e * spec.lambda / 2.0, -1.0, 1.0);
      sup = std::max(sup, std::abs(cumulative_mass(h, e) - (1.0 - std::acos(x) / kPi)));
    }
    return pass_if(std::abs(total - 1.0) < 1e-12 && sup < 1e-2 && !h.coverage_warning,
                   fmt("sup IDS distance %.3g, mass - 1 = %.3g", sup, total - 1.0));
  });

  s.run("dos.stieltjes_half_plane", [&] {
    OperatorSpec spec{IidDriver{Distribution::uniform(0.0, 1.0)}, 10.0};
    const SpectralHistogram h =
        dos_histogram(spec, 2000, 2, spectrum_edges(spec, 200), seed, workers);
    bool ok = true;
    for (double e = -0.5; e <= 1.5; e += 0.1)
      ok = ok && stieltjes(h, ComplexEnergy(e, 0.05)).imag() > 0.0;
    return pass_if(ok, "Im stieltjes > 0 for Im z > 0");
  });

  s.run("dos.fractional_moment_dominance", [&] {
    OperatorSpec spec{IidDriver{Distribution::uniform(0.0, 1.0)}, 3.0};
    const WindowBound wb = frac_moment_bound(spec, 0.5, 1e-2, 0.5, 20, 400, seed, workers);
    const MeanStderr em = empirical_window_mass(spec, 0.5, 1e-2, 2000, 4, seed, workers);
    return pass_if(wb.clamp_violations == 0 &&
                       em.mean <= wb.bound + 2.0 * std::hypot(em.std_error, wb.std_error),
                   fmt("bound %.4g vs window mass %.4g", wb.bound, em.mean));
  });

  s.run("thouless.constant_closed_form", [&] {
    OperatorSpec spec{ConstantDriver{0.0}, 5.0};
    const auto edges = spectrum_edges(spec, 400);
    // Exact arcsine masses per bin.
    std::vector<double> mass(edges.size() - 1);
    const auto ids = [&](double e) {
      return 1.0 - std::acos(std::clamp(e * spec.lambda / 2.0, -1.0, 1.0)) / kPi;
    };
    for (std::size_t k = 0; k < mass.size(); ++k) mass[k] = ids(edges[k + 1]) - ids(edges[k]);
    const SpectralHistogram h = make_histogram(edges, mass);
    double worst = 0.0;
    for (double e : {0.5, 0.7, -0.9})
      worst = std::max(worst, std::abs(thouless_gamma(h, e, spec.lambda) -
                                       constant_gamma(spec.lambda * e)));
    return pass_if(worst < 1e-2, fmt("max residual %.3g", worst));
  });

  s.run("bounds.prop31_monotone_in_threshold", [] {
    double prev = -std::numeric_limits<double>::infinity();
    bool ok = true;
    const double ln_lambda = std::log(1e6);
    for (double frac : {0.2, 0.4, 0.6, 0.8}) {
      const BoundReport r = prop31_bound({ln_lambda, frac * ln_lambda, 0.5, 1e-4, 0.01});
      ok = ok && r.log_raw_bound >= prev && r.clamped_bound <= 2.0 * r.inputs.delta;
      prev = r.log_raw_bound;
    }
    return pass_if(ok, "raw bound non-decreasing in t, clamp <= 2 delta");
  });

  s.run("bounds.prop2_m1_closed_form", [&] {
    const Distribution d = Distribution::uniform(-0.5, 0.5);
    const double delta = 1e-2;
    const double exact = 2.0 * std::asinh(0.5 / delta);
    const LemmaCheck q = lemma_bdddens_check(1.0, delta, 0.0, d);
    const MeanStderr mc =
        prop2_mc(d, 1, ComplexEnergy(0.0, delta), 1.0, 0.0, 1.0, 20000, seed, workers);
    return pass_if(std::abs(q.lhs - exact) < 1e-6 && std::abs(mc.mean - exact) < 3.0 * mc.std_error,
                   fmt("quadrature %.8f, exact %.8f", q.lhs, exact));
  });

  s.run("bounds.lemma_dominance", [] {
    const Distribution d = Distribution::uniform(0.0, 1.0);
    bool ok = true;
    for (double delta : {1e-4, 1e-2, 0.5}) {
      const LemmaCheck a = lemma_bdddens_check(1.0, delta, 0.3, d);
      const LemmaCheck b = lemma_split_check(1.0, delta, 0.3, 0.2, d, 0.05);
      ok = ok && a.lhs <= a.rhs && b.lhs <= b.rhs;
    }
    return pass_if(ok, "lhs <= rhs for both lemmas");
  });

  s.run("resonance.level_roots", [] {
    double worst = 0.0;
    for (double lambda : {20.0 * kPi, 21.3 * kPi})
      for (double b : {0.0, 1.0, kPi}) {
        for (double x : theta_level_roots(lambda, b))
          worst = std::max(worst, angular_distance(2.0 * x + lambda * std::sin(x), b));
        for (Angle x : hbar_roots(lambda, reduce_angle(b)))
          worst = std::max(worst, angular_distance(lambda * std::cos(x) + 2.0 * x, b));
      }
    return pass_if(worst < 1e-8, fmt("max level residual %.3g", worst));
  });

  s.run("resonance.classification", [] {
    const LambdaClass a = classify_lambda(20.0 * kPi);
    const LambdaClass b = classify_lambda(20.5 * kPi);
    const double next = next_regular_lambda(50.0);
    return pass_if(a.resonant && !b.resonant && !classify_lambda(next).resonant,
                   fmt("next regular after 50: %.2f", next));
  });

  s.run("resonance.K_finite_below_half", [] {
    const QuadResult r = K_integral(21.0 * kPi, reduce_angle(kPi), 0.0, 0.6);
    return pass_if(r.converged && !r.divergent, fmt("K = %.6g +- %.2g", r.value, r.err_est));
  });

  s.run("quad.endpoint_singularities", [] {
    const double z[] = {0.0};
    const QuadResult a = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                            z, QuadTolerance{1e-12, 1e-10});
    const QuadResult b = integrate_adaptive(
        [](double x) { return std::pow(std::abs(x), -0.9); }, -1.0, 1.0, z,
        QuadTolerance{1e-10, 1e-8});
    return pass_if(a.converged && std::abs(a.value - 2.0) < 1e-9 && b.converged &&
                       std::abs(b.value - 20.0) < 1e-6,
                   fmt("%.12f, %.10f", a.value, b.value));
  });

  s.run("quad.scaled_integral_bounded", [] {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double d : {1e-3, 1e-2, 1e-1, 1.0}) {
      const double v = quadr_bound_check(d, 0.75);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return pass_if(hi / lo < 10.0, fmt("max/min = %.4f", hi / lo));
  });

  return std::move(s.out);
}

}  // namespace lyaplab
