#include "lyaplab/lyapunov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "lyaplab/errors.hpp"
#include "lyaplab/parallel.hpp"

namespace lyaplab {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr int kRescaleEvery = 16;
constexpr double kMaxStepGrowth = 0x1.0p30;  // 16 steps stay far inside double range

void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw DomainError("lyapunov: lambda must be finite and > 0");
}

// Exponent of |x| for a finite nonzero x, ignoring subnormals.
inline std::int64_t exponent_of(double x) {
  return static_cast<std::int64_t>((std::bit_cast<std::uint64_t>(x) >> 52) & 0x7ff) - 1023;
}

inline double pow2(std::int64_t e) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(e + 1023) << 52);
}

// Columns for several energies driven by the same potential. Rescaling is by
// exact powers of two, so the only rounding is in the matrix products.
class MultiCocycle {
 public:
  MultiCocycle(std::span<const double> energies, double lambda)
      : shift_(energies.size()),
        top_(energies.size(), 1.0),
        bottom_(energies.size(), 0.0),
        exp_(energies.size(), 0),
        lambda_(lambda) {
    for (std::size_t k = 0; k < energies.size(); ++k) shift_[k] = lambda * energies[k];
  }

  void run(std::span<const double> v) {
    const std::size_t ne = shift_.size();
    double* top = top_.data();
    double* bottom = bottom_.data();
    const double* shift = shift_.data();
    for (double vs : v) {
      const double lv = lambda_ * vs;
      for (std::size_t k = 0; k < ne; ++k) {
        const double t = (shift[k] - lv) * top[k] - bottom[k];
        bottom[k] = top[k];
        top[k] = t;
      }
      if (++since_rescale_ == kRescaleEvery) rescale();
    }
  }

  // log of the column norm accumulated so far, per energy.
  std::vector<double> log_norms() {
    rescale();
    std::vector<double> out(shift_.size());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = static_cast<double>(exp_[k]) * std::numbers::ln2 +
               0.5 * std::log(top_[k] * top_[k] + bottom_[k] * bottom_[k]);
    return out;
  }

 private:
  void rescale() {
    since_rescale_ = 0;
    for (std::size_t k = 0; k < shift_.size(); ++k) {
      const double m = std::max(std::abs(top_[k]), std::abs(bottom_[k]));
      if (!(m > 0.0) || !std::isfinite(m))
        throw NumericalFailure("lyapunov: transfer column left the representable range");
      const std::int64_t e = exponent_of(m);
      const double s = pow2(-e);
      top_[k] *= s;
      bottom_[k] *= s;
      exp_[k] += e;
    }
  }

  std::vector<double> shift_;
  std::vector<double> top_;
  std::vector<double> bottom_;
  std::vector<std::int64_t> exp_;
  double lambda_;
  int since_rescale_ = 0;
};

void check_growth(const OperatorSpec& spec, std::span<const double> energies) {
  const auto [vlo, vhi] = spec.potential_range();
  const double vmax = std::max(std::abs(vlo), std::abs(vhi));
  for (double e : energies) {
    if (!std::isfinite(e)) throw DomainError("lyapunov: non-finite energy");
    if (spec.lambda * (std::abs(e) + vmax) + 2.0 > kMaxStepGrowth)
      throw DomainError("lyapunov: lambda (|E| + max|V|) too large for the cocycle");
  }
}

std::vector<double> member_log_norms(const OperatorSpec& spec,
                                     std::span<const double> energies,
                                     std::int64_t n, std::uint64_t seed,
                                     std::uint64_t member) {
  PotentialStream stream(spec, seed, member, 0);
  MultiCocycle cocycle(energies, spec.lambda);
  std::vector<double> buf(kChunk);
  for (std::int64_t done = 0; done < n;) {
    const auto len = static_cast<std::size_t>(
        std::min<std::int64_t>(static_cast<std::int64_t>(kChunk), n - done));
    std::span<double> part(buf.data(), len);
    stream.fill(part);
    cocycle.run(part);
    done += static_cast<std::int64_t>(len);
  }
  return cocycle.log_norms();
}

}  // namespace

TransferState transfer_step(TransferState s, double v, double e, double lambda) {
  check_lambda(lambda);
  const double top = lambda * (e - v) * s.top - s.bottom;
  const double bottom = s.top;
  const double norm = std::hypot(top, bottom);
  return {top / norm, bottom / norm, s.log_norm + std::log(norm), s.steps + 1};
}

std::vector<std::vector<double>> lyapunov_members(const OperatorSpec& spec,
                                                  std::span<const double> energies,
                                                  std::int64_t n, std::int64_t b,
                                                  std::uint64_t seed,
                                                  unsigned workers) {
  spec.validate();
  if (n < 1) throw DomainError("lyapunov: N must be >= 1");
  if (b < 1) throw DomainError("lyapunov: B must be >= 1");
  check_growth(spec, energies);
  std::vector<std::vector<double>> rates(static_cast<std::size_t>(b));
  parallel_for(rates.size(), workers, [&](std::size_t m) {
    std::vector<double> ln = member_log_norms(spec, energies, n, seed, m);
    // A column estimate can dip a hair below zero on elliptic energies; the
    // top exponent itself cannot.
    for (double& x : ln) x = std::max(x / static_cast<double>(n), 0.0);
    rates[m] = std::move(ln);
  });
  return rates;
}

std::vector<LyapunovEstimate> lyapunov_scan(const OperatorSpec& spec,
                                            std::span<const double> energies,
                                            std::int64_t n, std::int64_t b,
                                            std::uint64_t seed, unsigned workers) {
  const auto rates = lyapunov_members(spec, energies, n, b, seed, workers);
  std::vector<LyapunovEstimate> out(energies.size());
  std::vector<double> col(rates.size());
  for (std::size_t k = 0; k < energies.size(); ++k) {
    for (std::size_t m = 0; m < rates.size(); ++m) col[m] = rates[m][k];
    const MeanStderr ms = mean_stderr(col);
    out[k] = {ms.mean, ms.std_error, n, b};
  }
  return out;
}

LyapunovEstimate lyapunov_avg(const OperatorSpec& spec, double e, std::int64_t n,
                              std::int64_t b, std::uint64_t seed, unsigned workers) {
  const double energies[1] = {e};
  return lyapunov_scan(spec, energies, n, b, seed, workers).front();
}

LyapunovEstimate lyapunov_single(const OperatorSpec& spec, double e, std::int64_t n,
                                 std::uint64_t seed) {
  return lyapunov_avg(spec, e, n, 1, seed, 1);
}

double mean_log_matrix_norm(const OperatorSpec& spec, double e, std::int64_t n,
                            std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw DomainError("lyapunov: N must be >= 1");
  PotentialStream stream(spec, seed, 0, 0);
  double sum = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    // ||[[u, -1], [1, 0]]||_2 = largest root of s^2 - (u^2 + 2) s + 1.
    const double u = spec.lambda * (e - stream.next());
    const double tr = u * u + 2.0;
    sum += 0.5 * std::log(0.5 * (tr + std::sqrt(tr * tr - 4.0)));
  }
  return sum / static_cast<double>(n);
}

double periodic_oracle(std::span<const double> values, double e, double lambda) {
  check_lambda(lambda);
  if (values.empty()) throw DomainError("periodic_oracle: period must be >= 1");
  // M = T_{p-1} ... T_0, kept as mantissa * 2^scale.
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  std::int64_t scale = 0;
  for (double v : values) {
    const double u = lambda * (e - v);
    const double n00 = u * m00 - m10;
    const double n01 = u * m01 - m11;
    m10 = m00;
    m11 = m01;
    m00 = n00;
    m01 = n01;
    const double big = std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
    const std::int64_t ex = exponent_of(big);
    const double s = pow2(-ex);
    m00 *= s;
    m01 *= s;
    m10 *= s;
    m11 *= s;
    scale += ex;
  }
  // det M = 1, so trace = t * 2^scale with t the scaled trace.
  const double t = std::abs(m00 + m11);
  const double log_tr = std::log(t) + static_cast<double>(scale) * std::numbers::ln2;
  if (!(log_tr > std::log(2.0))) return 0.0;
  // Spectral radius (|tr| + sqrt(tr^2 - 4)) / 2 = |tr| (1 + sqrt(1 - 4/tr^2)) / 2.
  const double inv_tr2 = std::exp(-2.0 * log_tr);
  const double log_rho = log_tr + std::log(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * inv_tr2))));
  return log_rho / static_cast<double>(values.size());
}

}  // namespace lyaplab
