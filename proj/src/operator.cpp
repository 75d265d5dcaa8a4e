#include "lyaplab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lyaplab/errors.hpp"
#include "lyaplab/rng.hpp"

namespace lyaplab {

ComplexEnergy::ComplexEnergy(double e, double delta) : e_(e), delta_(delta) {
  if (!std::isfinite(e) || !std::isfinite(delta) || delta < 0.0)
    throw DomainError("complex energy: need finite e and delta >= 0");
}

PotentialWindow::PotentialWindow(std::int64_t offset, std::vector<double> values,
                                 double lambda)
    : offset_(offset), values_(std::move(values)), lambda_(lambda) {
  if (values_.empty()) throw DomainError("potential window: empty");
  if (!std::isfinite(lambda_) || lambda_ <= 0.0)
    throw DomainError("potential window: lambda must be > 0");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("potential window: non-finite value");
}

double CosineProfile::operator()(double w) const {
  return offset + amplitude * std::cos(w);
}

// ---------------------------------------------------------------------------
// OperatorSpec

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

void OperatorSpec::validate() const {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw ConfigError("model: lambda must be finite and > 0");
  std::visit(
      Overloaded{
          [](const StdMapDriver& d) {
            if (d.map_lambda && (!std::isfinite(*d.map_lambda) || *d.map_lambda < 0.0))
              throw ConfigError("stdmap: map_lambda must be finite and >= 0");
          },
          [](const SkewShiftDriver& d) {
            if (d.dim < 1) throw ConfigError("skewshift: dim must be >= 1");
            if (!std::isfinite(d.rotation_alpha))
              throw ConfigError("skewshift: rotation_alpha must be finite");
            if (!std::isfinite(d.h.amplitude) || !std::isfinite(d.h.offset))
              throw ConfigError("skewshift: profile parameters must be finite");
            if (d.init && static_cast<int>(d.init->size()) != d.dim)
              throw ConfigError("skewshift: init must have dim coordinates");
          },
          [](const IidDriver& d) {
            if (!d.dist.is_probability())
              throw ConfigError("iid: distribution must have total mass 1");
          },
          [](const ConstantDriver& d) {
            if (!std::isfinite(d.value)) throw ConfigError("constant: value must be finite");
          },
          [](const PeriodicDriver& d) {
            if (d.values.empty()) throw ConfigError("periodic: need at least one value");
            for (double v : d.values)
              if (!std::isfinite(v)) throw ConfigError("periodic: values must be finite");
          },
      },
      driver);
}

std::string OperatorSpec::kind() const {
  return std::visit(Overloaded{
                        [](const StdMapDriver&) { return std::string("stdmap"); },
                        [](const SkewShiftDriver&) { return std::string("skewshift"); },
                        [](const IidDriver&) { return std::string("iid"); },
                        [](const ConstantDriver&) { return std::string("constant"); },
                        [](const PeriodicDriver&) { return std::string("periodic"); },
                    },
                    driver);
}

std::pair<double, double> OperatorSpec::potential_range() const {
  return std::visit(
      Overloaded{
          [](const StdMapDriver&) { return std::pair{-1.0, 1.0}; },
          [](const SkewShiftDriver& d) {
            const double a = std::abs(d.h.amplitude);
            return std::pair{d.h.offset - a, d.h.offset + a};
          },
          [](const IidDriver& d) {
            return std::pair{d.dist.support_min(), d.dist.support_max()};
          },
          [](const ConstantDriver& d) { return std::pair{d.value, d.value}; },
          [](const PeriodicDriver& d) {
            const auto [lo, hi] = std::minmax_element(d.values.begin(), d.values.end());
            return std::pair{*lo, *hi};
          },
      },
      driver);
}

bool OperatorSpec::is_deterministic() const {
  return std::visit(Overloaded{
                        [](const StdMapDriver& d) { return d.init.has_value(); },
                        [](const SkewShiftDriver& d) { return d.init.has_value(); },
                        [](const IidDriver&) { return false; },
                        [](const ConstantDriver&) { return true; },
                        [](const PeriodicDriver&) { return true; },
                    },
                    driver);
}

// ---------------------------------------------------------------------------
// Potential streams

namespace {

struct StdMapGen {
  StdMapState state;  // (x_{n-1}, x_n) with n the next index served
  double kick;
  double next() {
    const double v = -std::cos(state.x_curr.value());
    state = std_map_step(state, kick);
    return v;
  }
};

struct SkewGen {
  std::vector<Angle> w;  // T^n omega with n the next index served
  double alpha;
  CosineProfile h;
  double next() {
    const double v = h(w.back().value());
    advance_skew_shift(w, alpha);
    return v;
  }
};

struct IidGen {
  RngStream stream;
  const Distribution* dist;
  std::int64_t n;
  double next() {
    const auto bits = stream.block(static_cast<std::uint64_t>(n++));
    return dist->sample(RngStream::to_unit(bits[0]), RngStream::to_unit(bits[1]));
  }
};

struct ConstGen {
  double value;
  double next() const { return value; }
};

struct PeriodicGen {
  const std::vector<double>* values;
  std::size_t pos;
  double next() {
    const double v = (*values)[pos];
    if (++pos == values->size()) pos = 0;
    return v;
  }
};

}  // namespace

struct PotentialStream::Impl {
  OperatorSpec spec;  // owns the data the generators point into
  std::variant<StdMapGen, SkewGen, IidGen, ConstGen, PeriodicGen> gen;
  std::int64_t index;
};

PotentialStream::PotentialStream(const OperatorSpec& spec, std::uint64_t seed,
                                 std::uint64_t member, std::int64_t start)
    : impl_(std::make_unique<Impl>(Impl{spec, ConstGen{0.0}, start})) {
  spec.validate();
  Impl& im = *impl_;
  RngStream init_rng(seed, Subsystem::InitialCondition, member);
  std::visit(
      Overloaded{
          [&](const StdMapDriver& d) {
            StdMapState s = d.init ? *d.init
                                   : make_std_map_state(init_rng.uniform(-kPi, kPi),
                                                        init_rng.uniform(-kPi, kPi));
            const double kick = d.map_lambda.value_or(im.spec.lambda);
            for (std::int64_t n = 0; n < start; ++n) s = std_map_step(s, kick);
            for (std::int64_t n = 0; n > start; --n) s = std_map_step_inverse(s, kick);
            im.gen = StdMapGen{s, kick};
          },
          [&](const SkewShiftDriver& d) {
            std::vector<double> w0;
            if (d.init) {
              w0 = *d.init;
            } else {
              for (int k = 0; k < d.dim; ++k) w0.push_back(init_rng.uniform(-kPi, kPi));
            }
            std::vector<Angle> w = make_skew_shift_state(w0).coords;
            for (std::int64_t n = 0; n < start; ++n) advance_skew_shift(w, d.rotation_alpha);
            for (std::int64_t n = 0; n > start; --n) retreat_skew_shift(w, d.rotation_alpha);
            im.gen = SkewGen{std::move(w), d.rotation_alpha, d.h};
          },
          [&](const IidDriver& d) {
            im.gen = IidGen{RngStream(seed, Subsystem::SitePotential, member), &d.dist, start};
          },
          [&](const ConstantDriver& d) { im.gen = ConstGen{d.value}; },
          [&](const PeriodicDriver& d) {
            const auto p = static_cast<std::int64_t>(d.values.size());
            im.gen = PeriodicGen{&d.values, static_cast<std::size_t>(((start % p) + p) % p)};
          },
      },
      im.spec.driver);
}

PotentialStream::~PotentialStream() = default;
PotentialStream::PotentialStream(PotentialStream&&) noexcept = default;
PotentialStream& PotentialStream::operator=(PotentialStream&&) noexcept = default;

double PotentialStream::next() {
  ++impl_->index;
  return std::visit([](auto& g) { return g.next(); }, impl_->gen);
}

void PotentialStream::fill(std::span<double> out) {
  std::visit(
      [&](auto& g) {
        for (double& v : out) v = g.next();
      },
      impl_->gen);
  impl_->index += static_cast<std::int64_t>(out.size());
}

std::int64_t PotentialStream::index() const { return impl_->index; }

PotentialWindow sample_potential(const OperatorSpec& spec, std::int64_t n0,
                                 std::int64_t n1, std::uint64_t seed) {
  return sample_potential(spec, n0, n1, seed, 0);
}

PotentialWindow sample_potential(const OperatorSpec& spec, std::int64_t n0,
                                 std::int64_t n1, std::uint64_t seed,
                                 std::uint64_t member) {
  if (n0 > n1) throw DomainError("sample_potential: need n0 <= n1");
  PotentialStream stream(spec, seed, member, n0);
  std::vector<double> v(static_cast<std::size_t>(n1 - n0 + 1));
  stream.fill(v);
  return PotentialWindow(n0, std::move(v), spec.lambda);
}

// ---------------------------------------------------------------------------
// Determinants

Complex ScaledComplex::value() const {
  const int e = static_cast<int>(std::clamp<std::int64_t>(exp2, -100000, 100000));
  return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

double ScaledComplex::log_abs() const {
  return std::log(std::abs(mantissa)) + static_cast<double>(exp2) * std::numbers::ln2;
}

namespace {
double inf_norm(Complex c) { return std::max(std::abs(c.real()), std::abs(c.imag())); }
}  // namespace

std::vector<ScaledComplex> det_recursion(std::span<const double> v, double lambda,
                                         Complex z) {
  if (!(lambda > 0.0)) throw DomainError("det_recursion: lambda must be > 0");
  const double t2 = 1.0 / (lambda * lambda);
  std::vector<ScaledComplex> out;
  out.reserve(v.size() + 1);
  out.push_back({Complex(1.0, 0.0), 0});
  // prev = Delta_{k-2}, cur = Delta_{k-1}, both carried in the scale 2^exp.
  Complex prev(0.0, 0.0);
  Complex cur(1.0, 0.0);
  std::int64_t exp = 0;
  constexpr double kHi = 0x1.0p512;
  constexpr double kLo = 0x1.0p-512;
  for (double vk : v) {
    const Complex next = (vk - z) * cur - t2 * prev;
    prev = cur;
    cur = next;
    const double m = std::max(inf_norm(cur), inf_norm(prev));
    if (m > kHi || (m < kLo && m > 0.0)) {
      const int s = std::ilogb(m);
      prev = {std::ldexp(prev.real(), -s), std::ldexp(prev.imag(), -s)};
      cur = {std::ldexp(cur.real(), -s), std::ldexp(cur.imag(), -s)};
      exp += s;
    }
    out.push_back({cur, exp});
  }
  return out;
}

std::vector<ScaledComplex> det_recursion(const PotentialWindow& w, ComplexEnergy z,
                                         std::size_t m) {
  if (m > w.size())
    throw DomainError("det_recursion: window shorter than the requested order");
  return det_recursion(w.values().first(m), w.lambda(), z.z());
}

// ---------------------------------------------------------------------------
// Green function: LAPACK xGTSV elimination with partial pivoting, one RHS.

std::vector<Complex> green_column(const PotentialWindow& w, ComplexEnergy z,
                                  std::size_t j) {
  const std::size_t n = w.size();
  if (j >= n) throw DomainError("green_column: index outside the window");
  const double t = w.hopping();
  std::vector<Complex> d(n), dl(n > 1 ? n - 1 : 0, t), du(n > 1 ? n - 1 : 0, t);
  for (std::size_t k = 0; k < n; ++k) d[k] = w.values()[k] - z.z();
  std::vector<Complex> b(n, 0.0);
  b[j] = 1.0;
  const auto singular = [] {
    throw NumericalFailure("green_entry: restriction is singular at this energy");
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) singular();
      const Complex fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;  // no fill-in
    } else {
      const Complex fact = d[i] / dl[i];
      d[i] = dl[i];
      const Complex temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];  // second superdiagonal fill-in
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const Complex bi = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bi - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) singular();
  b[n - 1] /= d[n - 1];
  if (n > 1) {
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t ii = n - 2; ii-- > 0;)
      b[ii] = (b[ii] - du[ii] * b[ii + 1] - dl[ii] * b[ii + 2]) / d[ii];
  }
  for (const Complex& x : b)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) singular();
  return b;
}

Complex green_entry(const PotentialWindow& w, ComplexEnergy z, std::size_t i,
                    std::size_t j) {
  if (i >= w.size() || j >= w.size())
    throw DomainError("green_entry: index outside the window");
  // The inverse is symmetric (complex symmetric, not Hermitian), so column j
  // row i equals column i row j.
  return green_column(w, z, j)[i];
}

// ---------------------------------------------------------------------------
// Sturm counts

namespace {

// Returns -1 when an exactly zero pivot was hit.
std::int64_t sturm_pass(std::span<const double> v, double t2, double e) {
  std::int64_t neg = 0;
  double q = 1.0;
  bool first = true;
  for (double vk : v) {
    q = first ? vk - e : (vk - e) - t2 / q;
    first = false;
    if (q == 0.0) return -1;
    neg += q < 0.0;
  }
  return neg;
}

std::int64_t sturm_count_span(std::span<const double> v, double lambda, double e) {
  const double t2 = 1.0 / (lambda * lambda);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::int64_t c = sturm_pass(v, t2, e);
    if (c >= 0) return c;
    e -= 1e-14 * (1.0 + std::abs(e));
  }
  throw NumericalFailure("sturm_count: could not avoid a zero pivot");
}

}  // namespace

std::int64_t sturm_count(const PotentialWindow& w, double e) {
  if (!std::isfinite(e)) throw DomainError("sturm_count: non-finite energy");
  return sturm_count_span(w.values(), w.lambda(), e);
}

std::vector<std::int64_t> sturm_counts(std::span<const double> v, double lambda,
                                       std::span<const double> energies) {
  if (v.empty()) throw DomainError("sturm_counts: empty window");
  if (!(lambda > 0.0)) throw DomainError("sturm_counts: lambda must be > 0");
  const std::size_t ne = energies.size();
  const double t2 = 1.0 / (lambda * lambda);
  std::vector<double> q(ne);
  std::vector<std::int64_t> neg(ne, 0);
  std::vector<unsigned char> zero(ne, 0);
  const double v0 = v[0];
  for (std::size_t k = 0; k < ne; ++k) {
    q[k] = v0 - energies[k];
    neg[k] = q[k] < 0.0;
    zero[k] = q[k] == 0.0;
  }
  for (std::size_t s = 1; s < v.size(); ++s) {
    const double vs = v[s];
    double* qp = q.data();
    std::int64_t* np = neg.data();
    unsigned char* zp = zero.data();
    for (std::size_t k = 0; k < ne; ++k) {
      const double qk = (vs - energies[k]) - t2 / qp[k];
      qp[k] = qk;
      np[k] += qk < 0.0;
      zp[k] |= qk == 0.0;
    }
  }
  for (std::size_t k = 0; k < ne; ++k)
    if (zero[k]) neg[k] = sturm_count_span(v, lambda, energies[k]);
  return neg;
}

}  // namespace lyaplab
