#include "lyaplab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyaplab/errors.hpp"
#include "lyaplab/quad.hpp"
#include "lyaplab/rng.hpp"

namespace lyaplab {

BoundReport prop31_bound(const Prop31Inputs& p) {
  const bool finite = std::isfinite(p.ln_lambda) && std::isfinite(p.t) &&
                      std::isfinite(p.xi) && std::isfinite(p.delta) && std::isfinite(p.g);
  if (!finite) throw DomainError("prop31_bound: inputs must be finite");
  if (!(p.delta > 0.0 && p.delta < p.xi && p.xi <= 1.0))
    throw DomainError("prop31_bound: need 0 < delta < xi <= 1");
  if (!(p.g >= p.delta)) throw DomainError("prop31_bound: need g >= delta");
  const double numerator =
      p.ln_lambda - p.t - 6.0 * p.xi * (2.0 + std::log(p.g / (p.xi * p.delta)));
  BoundReport r;
  r.inputs = p;
  r.log_raw_bound = std::log(2.0) + 1.0 - numerator / (2.0 * p.g);
  r.raw_bound = std::exp(r.log_raw_bound);
  r.vacuous = r.log_raw_bound >= std::log(2.0 * p.delta);
  r.clamped_bound = r.vacuous ? 2.0 * p.delta : r.raw_bound;
  return r;
}

double measure_Zt(std::span<const EnergyGamma> rows, double t, double e0, double delta) {
  if (rows.size() < 2) throw DomainError("measure_Zt: need at least two grid rows");
  if (!(delta > 0.0)) throw DomainError("measure_Zt: need delta > 0");
  const double h = (rows.back().e - rows.front().e) / static_cast<double>(rows.size() - 1);
  if (!(h > 0.0)) throw DomainError("measure_Zt: grid must be increasing");
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (std::abs(rows[k].e - rows[k - 1].e - h) > 1e-6 * h)
      throw DomainError("measure_Zt: grid is not uniform");
  if (rows.front().e > e0 - delta + h || rows.back().e < e0 + delta - h)
    throw DomainError("measure_Zt: grid does not cover the window");
  const double slack = 1e-9 * h;
  std::int64_t count = 0;
  for (const EnergyGamma& r : rows)
    if (std::abs(r.e - e0) <= delta + slack && r.gamma <= t) ++count;
  return h * static_cast<double>(count);
}

double prop2_rhs(double a_density, double delta, double xi, std::int64_t m) {
  if (!(a_density > 0.0 && delta > 0.0 && xi > 0.0))
    throw DomainError("prop2_rhs: A, delta, xi must be > 0");
  if (m < 1) throw DomainError("prop2_rhs: m must be >= 1");
  const double base =
      3.0 * a_density * std::log1p(1.0 / (a_density * delta)) + 2.0 / xi;
  return std::pow(base, static_cast<double>(m));
}

MeanStderr prop2_mc(const Distribution& dist, std::int64_t m, ComplexEnergy z, double lambda,
                    Complex a, double xi, std::int64_t samples, std::uint64_t seed,
                    unsigned workers) {
  if (m < 1) throw DomainError("prop2_mc: m must be >= 1");
  if (samples < 1) throw DomainError("prop2_mc: samples must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("prop2_mc: lambda must be > 0");
  if (!(xi > 0.0)) throw DomainError("prop2_mc: xi must be > 0");
  if (std::abs(a) > xi / 2.0) throw DomainError("prop2_mc: need |a| <= xi/2");
  if (a.imag() < 0.0) throw DomainError("prop2_mc: need Im a >= 0");
  if (!dist.is_probability()) throw DomainError("prop2_mc: distribution must be a probability");
  const double t2 = 1.0 / (lambda * lambda);
  const Complex zz = z.z();
  std::vector<double> vals(static_cast<std::size_t>(samples));
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (vals.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t blk) {
    const std::size_t end = std::min(vals.size(), (blk + 1) * kBlock);
    for (std::size_t s = blk * kBlock; s < end; ++s) {
      const RngStream rng(seed, Subsystem::MonteCarlo, s);
      Complex prev = 1.0;  // Delta_{k-1}
      Complex prev2 = 0.0;
      for (std::int64_t k = 0; k < m; ++k) {
        const auto bits = rng.block(static_cast<std::uint64_t>(k));
        const double v = dist.sample(RngStream::to_unit(bits[0]), RngStream::to_unit(bits[1]));
        const Complex next = (v - zz) * prev - t2 * prev2;
        prev2 = prev;
        prev = next;
      }
      vals[s] = 1.0 / std::abs(prev - a * prev2);
    }
  });
  return mean_stderr(vals);
}

namespace {

LemmaCheck lemma_lhs(double delta, double center, const Distribution& dist) {
  LemmaCheck out;
  const auto kernel = [&](double v) {
    return 1.0 / std::sqrt((v - center) * (v - center) + delta * delta);
  };
  for (const Distribution::Piece& p : dist.pieces()) {
    if (p.weight == 0.0) continue;
    std::vector<double> splits;
    if (center > p.lo && center < p.hi) splits.push_back(center);
    const QuadResult r =
        integrate_adaptive(kernel, p.lo, p.hi, splits, QuadTolerance{1e-12, 1e-10});
    if (!r.converged) throw NumericalFailure("lemma check: quadrature did not converge");
    const double dens = p.weight / (p.hi - p.lo);
    out.lhs += dens * r.value;
    out.lhs_err += dens * r.err_est;
  }
  for (const Distribution::Atom& at : dist.atoms()) out.lhs += at.weight * kernel(at.at);
  return out;
}

void check_lemma_args(double a_density, double delta) {
  if (!(a_density > 0.0) || !(delta > 0.0))
    throw DomainError("lemma check: A and delta must be > 0");
}

}  // namespace

LemmaCheck lemma_bdddens_check(double a_density, double delta, double e,
                               const Distribution& dist) {
  check_lemma_args(a_density, delta);
  if (dist.max_density_on(-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()) > a_density * (1.0 + 1e-12))
    throw DomainError("lemma_bdddens_check: density exceeds A");
  LemmaCheck out = lemma_lhs(delta, e, dist);
  out.rhs = 3.0 * a_density * std::log1p(1.0 / (a_density * delta));
  return out;
}

LemmaCheck lemma_split_check(double a_density, double delta, double e, double xi,
                             const Distribution& dist, double a) {
  check_lemma_args(a_density, delta);
  if (!(xi > 0.0)) throw DomainError("lemma_split_check: xi must be > 0");
  if (std::abs(a) > xi / 2.0) throw DomainError("lemma_split_check: need |a| <= xi/2");
  if (dist.max_density_on(e - xi, e + xi) > a_density * (1.0 + 1e-12))
    throw DomainError("lemma_split_check: density on [E - xi, E + xi] exceeds A");
  LemmaCheck out = lemma_lhs(delta, e + a, dist);
  out.rhs = 3.0 * a_density * std::log1p(1.0 / (a_density * delta)) + 2.0 / xi;
  return out;
}

double empirical_g(const SpectralHistogram& h, double e0, double delta, double xi) {
  if (!(delta > 0.0) || !(xi >= 0.0)) throw DomainError("empirical_g: need delta > 0, xi >= 0");
  // The window mass is piecewise linear in E with kinks where E +- delta hits
  // an edge, so the sup is attained at one of those points or at e0 +- xi.
  std::vector<double> cand{e0 - xi, e0 + xi};
  for (double edge : h.edges)
    for (double c : {edge - delta, edge + delta})
      if (std::abs(c - e0) <= xi) cand.push_back(c);
  double best = 0.0;
  for (double c : cand) best = std::max(best, histogram_mass(h, c - delta, c + delta));
  return std::max(delta, best);
}

}  // namespace lyaplab
