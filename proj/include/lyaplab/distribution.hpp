#pragma once

#include <vector>

namespace lyaplab {

/// Piecewise-uniform measure with optional atoms. Covers the uniform laws
/// used by the i.i.d. model and the split measures of the bounded-density
/// lemmas. Total mass may be below one (sub-probability measures); sampling
/// requires a probability measure.
class Distribution {
 public:
  struct Piece {
    double lo = 0.0;
    double hi = 1.0;
    double weight = 1.0;  // mass carried by [lo, hi]
  };
  struct Atom {
    double at = 0.0;
    double weight = 0.0;
  };

  Distribution() : Distribution(uniform(0.0, 1.0)) {}

  static Distribution uniform(double lo, double hi);
  /// Throws ConfigError on empty/inverted pieces, negative weights or total
  /// mass outside (0, 1].
  static Distribution mixture(std::vector<Piece> pieces, std::vector<Atom> atoms);

  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double total_mass() const { return total_; }
  bool is_probability() const;
  double support_min() const;
  double support_max() const;

  /// Largest density of the absolutely continuous part on [lo, hi]. Atoms
  /// inside the interval make this +infinity.
  double max_density_on(double lo, double hi) const;
  /// Mass of [lo, hi].
  double mass_of(double lo, double hi) const;

  /// Maps two independent uniforms in [0, 1) to a sample.
  double sample(double u_select, double u_position) const;

 private:
  Distribution(std::vector<Piece> pieces, std::vector<Atom> atoms, double total);

  std::vector<Piece> pieces_;
  std::vector<Atom> atoms_;
  double total_ = 0.0;
};

}  // namespace lyaplab
