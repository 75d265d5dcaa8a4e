#include "lyaplab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyaplab/errors.hpp"

namespace lyaplab {

Distribution::Distribution(std::vector<Piece> pieces, std::vector<Atom> atoms,
                           double total)
    : pieces_(std::move(pieces)), atoms_(std::move(atoms)), total_(total) {}

Distribution Distribution::uniform(double lo, double hi) {
  return mixture({Piece{lo, hi, 1.0}}, {});
}

Distribution Distribution::mixture(std::vector<Piece> pieces,
                                   std::vector<Atom> atoms) {
  double total = 0.0;
  for (const Piece& p : pieces) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
      throw ConfigError("distribution: each uniform piece needs lo < hi");
    if (!std::isfinite(p.weight) || p.weight < 0.0)
      throw ConfigError("distribution: piece weights must be >= 0");
    total += p.weight;
  }
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.at) || !std::isfinite(a.weight) || a.weight < 0.0)
      throw ConfigError("distribution: atoms need a finite location and weight >= 0");
    total += a.weight;
  }
  if (!(total > 0.0) || total > 1.0 + 1e-12)
    throw ConfigError("distribution: total mass must lie in (0, 1]");
  return Distribution(std::move(pieces), std::move(atoms), total);
}

bool Distribution::is_probability() const {
  return std::abs(total_ - 1.0) <= 1e-12;
}

double Distribution::support_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces_)
    if (p.weight > 0.0) m = std::min(m, p.lo);
  for (const Atom& a : atoms_)
    if (a.weight > 0.0) m = std::min(m, a.at);
  return m;
}

double Distribution::support_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces_)
    if (p.weight > 0.0) m = std::max(m, p.hi);
  for (const Atom& a : atoms_)
    if (a.weight > 0.0) m = std::max(m, a.at);
  return m;
}

double Distribution::max_density_on(double lo, double hi) const {
  for (const Atom& a : atoms_)
    if (a.weight > 0.0 && a.at >= lo && a.at <= hi)
      return std::numeric_limits<double>::infinity();
  // Overlapping pieces add up; the density is piecewise constant, so it is
  // enough to probe the midpoints between consecutive breakpoints.
  std::vector<double> cuts{lo, hi};
  for (const Piece& p : pieces_) {
    if (p.lo > lo && p.lo < hi) cuts.push_back(p.lo);
    if (p.hi > lo && p.hi < hi) cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    double d = 0.0;
    for (const Piece& p : pieces_)
      if (mid > p.lo && mid < p.hi) d += p.weight / (p.hi - p.lo);
    best = std::max(best, d);
  }
  return best;
}

double Distribution::mass_of(double lo, double hi) const {
  double m = 0.0;
  for (const Piece& p : pieces_) {
    const double a = std::max(lo, p.lo);
    const double b = std::min(hi, p.hi);
    if (b > a) m += p.weight * (b - a) / (p.hi - p.lo);
  }
  for (const Atom& a : atoms_)
    if (a.at >= lo && a.at <= hi) m += a.weight;
  return m;
}

double Distribution::sample(double u_select, double u_position) const {
  double target = u_select * total_;
  for (const Piece& p : pieces_) {
    if (target < p.weight) return p.lo + (p.hi - p.lo) * u_position;
    target -= p.weight;
  }
  for (const Atom& a : atoms_) {
    if (target < a.weight) return a.at;
    target -= a.weight;
  }
  // Rounding pushed the selector past the last component.
  if (!atoms_.empty()) return atoms_.back().at;
  const Piece& p = pieces_.back();
  return p.lo + (p.hi - p.lo) * u_position;
}

}  // namespace lyaplab
