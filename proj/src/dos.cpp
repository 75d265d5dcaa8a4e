#include "lyaplab/dos.hpp"

#include <algorithm>
#include <cmath>

#include "lyaplab/errors.hpp"

namespace lyaplab {

namespace {

void check_counts(std::int64_t n, std::int64_t b) {
  if (n < 2) throw DomainError("dos: N must be >= 2");
  if (b < 1) throw DomainError("dos: B must be >= 1");
}

// Per-member eigenvalue counts below each energy, on sites 0..n-1.
std::vector<std::vector<std::int64_t>> member_counts(const OperatorSpec& spec,
                                                     std::int64_t n, std::int64_t b,
                                                     std::span<const double> energies,
                                                     std::uint64_t seed,
                                                     unsigned workers) {
  spec.validate();
  check_counts(n, b);
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(b));
  parallel_for(counts.size(), workers, [&](std::size_t m) {
    PotentialStream stream(spec, seed, m, 0);
    std::vector<double> v(static_cast<std::size_t>(n));
    stream.fill(v);
    counts[m] = sturm_counts(v, spec.lambda, energies);
  });
  return counts;
}

// log(1 + w) / w, accurate for small w.
Complex log1p_over(Complex w) {
  if (std::abs(w) < 1e-3) return 1.0 - w / 2.0 + w * w / 3.0 - w * w * w / 4.0;
  return std::log(1.0 + w) / w;
}

}  // namespace

SpectralHistogram make_histogram(std::vector<double> edges, std::vector<double> mass) {
  if (edges.size() != mass.size() + 1 || mass.empty())
    throw DomainError("histogram: need edges.size() == mass.size() + 1 >= 2");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!std::isfinite(edges[k])) throw DomainError("histogram: non-finite edge");
    if (k > 0 && edges[k] < edges[k - 1]) throw DomainError("histogram: edges must be non-decreasing");
  }
  double total = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) throw DomainError("histogram: masses must be finite and >= 0");
    total += m;
  }
  if (!(total > 0.0)) throw DomainError("histogram: total mass must be > 0");
  for (double& m : mass) m /= total;
  return {std::move(edges), std::move(mass), false};
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (!(lo < hi) || bins < 1) throw DomainError("uniform_edges: need lo < hi and bins >= 1");
  std::vector<double> e(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k)
    e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  e.back() = hi;
  return e;
}

SpectralHistogram dos_histogram(const OperatorSpec& spec, std::int64_t n, std::int64_t b,
                                std::span<const double> edges, std::uint64_t seed,
                                unsigned workers) {
  if (edges.size() < 2) throw DomainError("dos_histogram: need at least two edges");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1]))
      throw DomainError("dos_histogram: edges must be strictly increasing");
  const auto counts = member_counts(spec, n, b, edges, seed, workers);
  const std::size_t bins = edges.size() - 1;
  std::vector<double> mass(bins);
  std::vector<double> col(counts.size());
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t m = 0; m < counts.size(); ++m)
      col[m] = static_cast<double>(counts[m][k + 1] - counts[m][k]) / static_cast<double>(n);
    mass[k] = mean_stderr(col).mean;
  }
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw DomainError("dos_histogram: no eigenvalue falls inside the edges");
  SpectralHistogram h = make_histogram(std::vector<double>(edges.begin(), edges.end()), mass);
  const auto [vlo, vhi] = spec.potential_range();
  const double hop = 2.0 / spec.lambda;
  h.coverage_warning = edges.front() > vlo - hop || edges.back() < vhi + hop;
  return h;
}

double cumulative_mass(const SpectralHistogram& h, double e) {
  double acc = 0.0;
  for (std::size_t k = 0; k < h.mass.size(); ++k) {
    const double a = h.edges[k];
    const double b = h.edges[k + 1];
    if (e >= b) {
      acc += h.mass[k];
    } else if (e > a) {
      acc += h.mass[k] * (e - a) / (b - a);
    }
  }
  return acc;
}

double histogram_mass(const SpectralHistogram& h, double lo, double hi) {
  if (hi < lo) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < h.mass.size(); ++k) {
    const double a = h.edges[k];
    const double b = h.edges[k + 1];
    if (a == b) {
      if (a >= lo && a <= hi) acc += h.mass[k];
      continue;
    }
    const double l = std::max(a, lo);
    const double r = std::min(b, hi);
    if (r > l) acc += h.mass[k] * (r - l) / (b - a);
  }
  return acc;
}

Complex stieltjes(const SpectralHistogram& h, ComplexEnergy z) {
  if (!(z.delta() > 0.0)) throw DomainError("stieltjes: need delta > 0");
  const Complex zz = z.z();
  Complex acc = 0.0;
  for (std::size_t k = 0; k < h.mass.size(); ++k) {
    if (h.mass[k] == 0.0) continue;
    const double a = h.edges[k];
    const double b = h.edges[k + 1];
    const Complex az = a - zz;
    // (1/(b-a)) [log(b - z) - log(a - z)] = log(1 + w) / w / (a - z), w = (b-a)/(a-z);
    // both logs stay on the same sheet because Im z > 0.
    const Complex w = (b - a) / az;
    const Complex per = std::abs(w) < 1e-3 ? log1p_over(w) / az
                                           : (std::log(b - zz) - std::log(az)) / (b - a);
    acc += h.mass[k] * per;
  }
  return acc;
}

GreenAverage green_avg(const OperatorSpec& spec, ComplexEnergy z, std::int64_t window_half,
                       std::int64_t b, std::uint64_t seed, double moment_alpha,
                       unsigned workers) {
  spec.validate();
  if (!(z.delta() > 0.0)) throw DomainError("green_avg: need delta > 0");
  if (window_half < 0) throw DomainError("green_avg: window_half must be >= 0");
  if (b < 1) throw DomainError("green_avg: B must be >= 1");
  if (!(moment_alpha > 0.0 && moment_alpha <= 1.0))
    throw DomainError("green_avg: moment_alpha must lie in (0, 1]");
  const auto nb = static_cast<std::size_t>(b);
  std::vector<Complex> g(nb);
  parallel_for(nb, workers, [&](std::size_t m) {
    const PotentialWindow w = sample_potential(spec, -window_half, window_half, seed, m);
    const auto c = static_cast<std::size_t>(window_half);
    g[m] = green_entry(w, z, c, c);
  });
  std::vector<double> re(nb), im(nb), absa(nb), ima(nb);
  GreenAverage out;
  const double clamp = 1.01 / z.delta();
  for (std::size_t m = 0; m < nb; ++m) {
    re[m] = g[m].real();
    im[m] = g[m].imag();
    absa[m] = std::pow(std::abs(g[m]), moment_alpha);
    ima[m] = std::pow(std::max(g[m].imag(), 0.0), moment_alpha);
    if (std::abs(g[m]) > clamp) ++out.clamp_violations;
  }
  const MeanStderr r = mean_stderr(re), i = mean_stderr(im), a = mean_stderr(absa);
  out.mean_g = {r.mean, i.mean};
  out.std_error_g = {r.std_error, i.std_error};
  out.mean_abs_g_alpha = a.mean;
  out.std_error_abs_g_alpha = a.std_error;
  out.mean_im_g_alpha = mean_stderr(ima).mean;
  out.samples = b;
  return out;
}

WindowBound frac_moment_bound(const OperatorSpec& spec, double e0, double delta,
                              double moment_alpha, std::int64_t window_half,
                              std::int64_t b, std::uint64_t seed, unsigned workers) {
  const GreenAverage g =
      green_avg(spec, ComplexEnergy(e0, delta), window_half, b, seed, moment_alpha, workers);
  const double scale = std::pow(2.0 * delta, moment_alpha);
  WindowBound out;
  out.e0 = e0;
  out.delta = delta;
  out.moment_alpha = moment_alpha;
  out.bound = scale * g.mean_abs_g_alpha;
  out.std_error = scale * g.std_error_abs_g_alpha;
  out.samples = g.samples;
  out.clamp_violations = g.clamp_violations;
  return out;
}

MeanStderr empirical_window_mass(const OperatorSpec& spec, double e0, double delta,
                                 std::int64_t n, std::int64_t b, std::uint64_t seed,
                                 unsigned workers) {
  if (!(delta > 0.0)) throw DomainError("empirical_window_mass: need delta > 0");
  const double energies[2] = {e0 - delta, e0 + delta};
  const auto counts = member_counts(spec, n, b, energies, seed, workers);
  std::vector<double> frac(counts.size());
  for (std::size_t m = 0; m < counts.size(); ++m)
    frac[m] = static_cast<double>(counts[m][1] - counts[m][0]) / static_cast<double>(n);
  return mean_stderr(frac);
}

}  // namespace lyaplab
