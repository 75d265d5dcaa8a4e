#include "lyaplab/lyaplab.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <tuple>
#include <vector>

#include "lyaplab/bounds.hpp"
#include "lyaplab/dos.hpp"
#include "lyaplab/dynamics.hpp"
#include "lyaplab/errors.hpp"
#include "lyaplab/lyapunov.hpp"
#include "lyaplab/operator.hpp"
#include "lyaplab/quad.hpp"
#include "lyaplab/resonance.hpp"
#include "lyaplab/thouless.hpp"
#include "lyaplab/verify.hpp"
#include "model_json.hpp"

#ifndef LYAPLAB_VERSION
#define LYAPLAB_VERSION "0.0.0"
#endif

struct lyl_model {
  lyaplab::OperatorSpec spec;
};

struct lyl_histogram {
  lyaplab::SpectralHistogram hist;
};

namespace {

using namespace lyaplab;

thread_local std::string g_last_error;

lyl_status fail(lyl_status code, const char* msg) {
  g_last_error = msg;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
lyl_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return LYL_OK;
  } catch (const ConfigError& e) {
    return fail(LYL_ERR_CONFIG, e.what());
  } catch (const DomainError& e) {
    return fail(LYL_ERR_DOMAIN, e.what());
  } catch (const NumericalFailure& e) {
    return fail(LYL_ERR_NUMERICAL, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LYL_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LYL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LYL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LYL_ERR_INTERNAL, "unknown exception");
  }
}

template <class... Ptr>
void require(const Ptr*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw ConfigError("null pointer argument");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Distribution parse_distribution(const char* text) {
  require(text);
  return distribution_from_json(nlohmann::json::parse(text));
}

QuadTolerance tolerance_or(const lyl_quad_tolerance* tol, QuadTolerance fallback) {
  return tol ? QuadTolerance{tol->abs, tol->rel} : fallback;
}

lyl_quad_result to_c(const QuadResult& r) {
  return {r.value, r.err_est, r.converged ? 1 : 0, r.divergent ? 1 : 0, r.subdivisions};
}

lyl_complex to_c(Complex z) { return {z.real(), z.imag()}; }

}  // namespace

extern "C" {

const char* lyl_last_error(void) { return g_last_error.c_str(); }

const char* lyl_version(void) { return LYAPLAB_VERSION; }

void lyl_string_free(char* s) { delete[] s; }

lyl_status lyl_model_from_json(const char* json, lyl_model** out) {
  return guarded([&] {
    require(json, out);
    *out = nullptr;
    *out = new lyl_model{model_from_json(nlohmann::json::parse(json))};
  });
}

lyl_status lyl_model_to_json(const lyl_model* m, char** out) {
  return guarded([&] {
    require(m, out);
    *out = dup_string(model_to_json(m->spec).dump());
  });
}

void lyl_model_free(lyl_model* m) { delete m; }

double lyl_model_lambda(const lyl_model* m) { return m ? m->spec.lambda : 0.0; }

lyl_status lyl_model_potential_range(const lyl_model* m, double* lo, double* hi) {
  return guarded([&] {
    require(m, lo, hi);
    std::tie(*lo, *hi) = m->spec.potential_range();
  });
}

lyl_status lyl_potential(const lyl_model* m, int64_t n0, int64_t n1, uint64_t seed,
                         uint64_t member, double* out) {
  return guarded([&] {
    require(m, out);
    const PotentialWindow w = sample_potential(m->spec, n0, n1, seed, member);
    std::copy(w.values().begin(), w.values().end(), out);
  });
}

lyl_status lyl_distribution_support(const char* dist_json, double* lo, double* hi) {
  return guarded([&] {
    require(lo, hi);
    const Distribution d = parse_distribution(dist_json);
    *lo = d.support_min();
    *hi = d.support_max();
  });
}

lyl_status lyl_distribution_max_density(const char* dist_json, double lo, double hi,
                                        double* out) {
  return guarded([&] {
    require(out);
    *out = parse_distribution(dist_json).max_density_on(lo, hi);
  });
}

lyl_status lyl_std_map_orbit(double x_prev, double x_curr, double lambda, int64_t n_steps,
                             double* out) {
  return guarded([&] {
    require(out);
    const auto orbit = std_map_orbit(make_std_map_state(x_prev, x_curr), lambda, n_steps);
    for (std::size_t k = 0; k < orbit.size(); ++k) out[k] = orbit[k];
  });
}

lyl_status lyl_pendulum_residual(double x_prev, double x_curr, double x_next, double lambda,
                                 double* out) {
  return guarded([&] {
    require(out);
    *out = pendulum_residual(x_prev, x_curr, x_next, lambda);
  });
}

lyl_status lyl_lyapunov_scan(const lyl_model* m, const double* energies, size_t count,
                             int64_t n, int64_t b, uint64_t seed, unsigned workers,
                             lyl_lyapunov_estimate* out) {
  return guarded([&] {
    require(m, energies, out);
    const auto est = lyapunov_scan(m->spec, {energies, count}, n, b, seed, workers);
    for (std::size_t k = 0; k < count; ++k)
      out[k] = {est[k].gamma, est[k].std_error, est[k].steps, est[k].ensemble};
  });
}

lyl_status lyl_periodic_oracle(const double* values, size_t period, double e, double lambda,
                               double* out) {
  return guarded([&] {
    require(values, out);
    *out = periodic_oracle({values, period}, e, lambda);
  });
}

lyl_status lyl_dos_histogram(const lyl_model* m, int64_t n, int64_t b, const double* edges,
                             size_t n_edges, uint64_t seed, unsigned workers,
                             lyl_histogram** out) {
  return guarded([&] {
    require(m, edges, out);
    *out = nullptr;
    *out = new lyl_histogram{dos_histogram(m->spec, n, b, {edges, n_edges}, seed, workers)};
  });
}

lyl_status lyl_histogram_create(const double* edges, const double* mass, size_t bins,
                                lyl_histogram** out) {
  return guarded([&] {
    require(edges, mass, out);
    *out = nullptr;
    *out = new lyl_histogram{make_histogram(std::vector<double>(edges, edges + bins + 1),
                                            std::vector<double>(mass, mass + bins))};
  });
}

void lyl_histogram_free(lyl_histogram* h) { delete h; }

size_t lyl_histogram_bins(const lyl_histogram* h) { return h ? h->hist.mass.size() : 0; }

void lyl_histogram_data(const lyl_histogram* h, double* edges, double* mass) {
  if (!h) return;
  if (edges) std::copy(h->hist.edges.begin(), h->hist.edges.end(), edges);
  if (mass) std::copy(h->hist.mass.begin(), h->hist.mass.end(), mass);
}

int lyl_histogram_coverage_warning(const lyl_histogram* h) {
  return h && h->hist.coverage_warning ? 1 : 0;
}

lyl_status lyl_histogram_cumulative(const lyl_histogram* h, double e, double* out) {
  return guarded([&] {
    require(h, out);
    *out = cumulative_mass(h->hist, e);
  });
}

lyl_status lyl_uniform_edges(double lo, double hi, size_t bins, double* out) {
  return guarded([&] {
    require(out);
    const auto edges = uniform_edges(lo, hi, bins);
    std::copy(edges.begin(), edges.end(), out);
  });
}

lyl_status lyl_stieltjes(const lyl_histogram* h, double e, double delta, lyl_complex* out) {
  return guarded([&] {
    require(h, out);
    *out = to_c(stieltjes(h->hist, ComplexEnergy(e, delta)));
  });
}

lyl_status lyl_green_avg(const lyl_model* m, double e, double delta, int64_t window_half,
                         int64_t b, uint64_t seed, double moment_alpha, unsigned workers,
                         lyl_green_average* out) {
  return guarded([&] {
    require(m, out);
    const GreenAverage g = green_avg(m->spec, ComplexEnergy(e, delta), window_half, b, seed,
                                     moment_alpha, workers);
    *out = {to_c(g.mean_g), to_c(g.std_error_g), g.mean_abs_g_alpha, g.std_error_abs_g_alpha,
            g.mean_im_g_alpha, g.samples, g.clamp_violations};
  });
}

lyl_status lyl_frac_moment_bound(const lyl_model* m, double e0, double delta,
                                 double moment_alpha, int64_t window_half, int64_t b,
                                 uint64_t seed, unsigned workers, lyl_window_bound* out) {
  return guarded([&] {
    require(m, out);
    const WindowBound w =
        frac_moment_bound(m->spec, e0, delta, moment_alpha, window_half, b, seed, workers);
    *out = {w.e0, w.delta, w.moment_alpha, w.bound, w.std_error, w.samples, w.clamp_violations};
  });
}

lyl_status lyl_empirical_window_mass(const lyl_model* m, double e0, double delta, int64_t n,
                                     int64_t b, uint64_t seed, unsigned workers, double* mean,
                                     double* std_error) {
  return guarded([&] {
    require(m, mean, std_error);
    const MeanStderr r = empirical_window_mass(m->spec, e0, delta, n, b, seed, workers);
    *mean = r.mean;
    *std_error = r.std_error;
  });
}

lyl_status lyl_log_potential(const lyl_histogram* h, double e, double* out) {
  return guarded([&] {
    require(h, out);
    *out = log_potential(h->hist, e);
  });
}

lyl_status lyl_thouless_gamma(const lyl_histogram* h, double e, double lambda, double* out) {
  return guarded([&] {
    require(h, out);
    *out = thouless_gamma(h->hist, e, lambda);
  });
}

lyl_status lyl_spectrum_edges(const lyl_model* m, size_t bins, double* out) {
  return guarded([&] {
    require(m, out);
    const auto edges = spectrum_edges(m->spec, bins);
    std::copy(edges.begin(), edges.end(), out);
  });
}

lyl_thouless_budget lyl_thouless_budget_default(void) {
  const ThoulessBudget b;
  return {b.transfer_n, b.transfer_b, b.dos_n, b.dos_b, b.bins};
}

lyl_status lyl_thouless_scan(const lyl_model* m, const double* grid, size_t count,
                             const lyl_thouless_budget* budget, uint64_t seed, unsigned workers,
                             lyl_thouless_row* out) {
  return guarded([&] {
    require(m, grid, budget, out);
    const ThoulessBudget b{budget->transfer_n, budget->transfer_b, budget->dos_n, budget->dos_b,
                           budget->bins};
    const auto rows = thouless_scan(m->spec, {grid, count}, b, seed, workers);
    for (std::size_t k = 0; k < count; ++k)
      out[k] = {rows[k].e, rows[k].gamma_transfer, rows[k].std_error_transfer,
                rows[k].gamma_thouless, rows[k].residual};
  });
}

lyl_status lyl_prop31_bound(const lyl_prop31_inputs* in, lyl_bound_report* out) {
  return guarded([&] {
    require(in, out);
    const BoundReport r = prop31_bound({in->ln_lambda, in->t, in->xi, in->delta, in->g});
    *out = {*in, r.raw_bound, r.log_raw_bound, r.clamped_bound, r.vacuous ? 1 : 0};
  });
}

lyl_status lyl_measure_zt(const double* e, const double* gamma, size_t count, double t,
                          double e0, double delta, double* out) {
  return guarded([&] {
    require(e, gamma, out);
    std::vector<EnergyGamma> rows(count);
    for (std::size_t k = 0; k < count; ++k) rows[k] = {e[k], gamma[k]};
    *out = measure_Zt(rows, t, e0, delta);
  });
}

lyl_status lyl_prop2_rhs(double a_density, double delta, double xi, int64_t m, double* out) {
  return guarded([&] {
    require(out);
    *out = prop2_rhs(a_density, delta, xi, m);
  });
}

lyl_status lyl_prop2_mc(const char* dist_json, int64_t m, double e, double delta, double lambda,
                        lyl_complex a, double xi, int64_t samples, uint64_t seed,
                        unsigned workers, double* mean, double* std_error) {
  return guarded([&] {
    require(mean, std_error);
    const MeanStderr r = prop2_mc(parse_distribution(dist_json), m, ComplexEnergy(e, delta),
                                  lambda, Complex(a.re, a.im), xi, samples, seed, workers);
    *mean = r.mean;
    *std_error = r.std_error;
  });
}

lyl_status lyl_lemma_bdddens_check(double a_density, double delta, double e,
                                   const char* dist_json, lyl_lemma_check* out) {
  return guarded([&] {
    require(out);
    const LemmaCheck c = lemma_bdddens_check(a_density, delta, e, parse_distribution(dist_json));
    *out = {c.lhs, c.lhs_err, c.rhs};
  });
}

lyl_status lyl_lemma_split_check(double a_density, double delta, double e, double xi,
                                 const char* dist_json, double a, lyl_lemma_check* out) {
  return guarded([&] {
    require(out);
    const LemmaCheck c =
        lemma_split_check(a_density, delta, e, xi, parse_distribution(dist_json), a);
    *out = {c.lhs, c.lhs_err, c.rhs};
  });
}

lyl_status lyl_empirical_g(const lyl_histogram* h, double e0, double delta, double xi,
                           double* out) {
  return guarded([&] {
    require(h, out);
    *out = empirical_g(h->hist, e0, delta, xi);
  });
}

lyl_status lyl_delta3(double x0, double x1, double e, double delta, double lambda,
                      int drop_coupling, lyl_complex* out) {
  return guarded([&] {
    require(out);
    *out = to_c(delta3(reduce_angle(x0), reduce_angle(x1), ComplexEnergy(e, delta), lambda,
                       drop_coupling != 0));
  });
}

lyl_status lyl_theta(double x0, double lambda, double* out) {
  return guarded([&] {
    require(out);
    *out = theta(reduce_angle(x0), lambda);
  });
}

lyl_status lyl_j_integral(double e, double th, double moment_alpha, double eps,
                          const lyl_quad_tolerance* tol, lyl_quad_result* out) {
  return guarded([&] {
    require(out);
    *out = to_c(J_integral(e, reduce_angle(th), moment_alpha, eps,
                           tolerance_or(tol, QuadTolerance{1e-10, 1e-8})));
  });
}

lyl_status lyl_k_integral(double lambda, double b, double e, double moment_alpha,
                          const lyl_quad_tolerance* tol, lyl_quad_result* out) {
  return guarded([&] {
    require(out);
    *out = to_c(K_integral(lambda, reduce_angle(b), e, moment_alpha,
                           tolerance_or(tol, QuadTolerance{1e-10, 1e-7})));
  });
}

lyl_status lyl_i_integral(double lambda, double e, double delta, double a_cut,
                          double moment_alpha, const lyl_quad_tolerance* tol,
                          lyl_quad_result* out) {
  return guarded([&] {
    require(out);
    *out = to_c(I_integral(lambda, ComplexEnergy(e, delta), a_cut, moment_alpha,
                           tolerance_or(tol, QuadTolerance{1e-6, 1e-5})));
  });
}

lyl_status lyl_excluded_measure(double lambda, double e, double delta, double a_cut,
                                double* out) {
  return guarded([&] {
    require(out);
    *out = excluded_measure(lambda, ComplexEnergy(e, delta), a_cut);
  });
}

lyl_status lyl_hbar_roots(double lambda, double b, double* out, size_t capacity,
                          size_t* count) {
  return guarded([&] {
    require(count);
    if (capacity > 0) require(out);
    const auto roots = hbar_roots(lambda, reduce_angle(b));
    *count = roots.size();
    for (std::size_t k = 0; k < roots.size() && k < capacity; ++k) out[k] = roots[k];
  });
}

lyl_status lyl_classify_lambda(double lambda, double delta_exp, lyl_lambda_class* out) {
  return guarded([&] {
    require(out);
    const LambdaClass c = classify_lambda(lambda, delta_exp);
    *out = {c.lambda, c.lambda_bar, c.delta_exp, c.distance, c.resonant ? 1 : 0};
  });
}

lyl_status lyl_next_regular_lambda(double lambda, double delta_exp, double step, double* out) {
  return guarded([&] {
    require(out);
    *out = next_regular_lambda(lambda, delta_exp, {0.0, kPi}, step);
  });
}

lyl_status lyl_quadr_bound_check(lyl_complex d, double moment_alpha, double* out) {
  return guarded([&] {
    require(out);
    *out = quadr_bound_check({d.re, d.im}, moment_alpha);
  });
}

lyl_status lyl_verify(uint64_t seed, unsigned workers, lyl_verify_callback cb, void* user,
                      int* failures) {
  return guarded([&] {
    require(failures);
    int failed = 0;
    for (const VerifyResult& r : run_verify(seed, workers)) {
      if (!r.passed) ++failed;
      if (cb) cb(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    *failures = failed;
  });
}

}  // extern "C"
