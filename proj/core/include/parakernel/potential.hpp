#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "parakernel/errors.hpp"

namespace parakernel {

/// Radial potential: linear combinations of smooth compactly supported bumps
/// and bounded power-decay tails W(r) = c (2+r)^{-p}. Sign unrestricted.
/// Values are finite at every r >= 0. Immutable value type.
class Potential {
 public:
  Potential() = default;  // identically zero

  /// Mollifier bump exp(1 - 1/(1-u^2)) with u = (r - center)/halfWidth,
  /// rescaled so the peak value is `amplitude`; vanishes identically outside
  /// [center - halfWidth, center + halfWidth].
  static Potential bump(double center, double halfWidth, double amplitude);
  /// W(r) = amplitude * (2 + r)^{-exponent}.
  static Potential powerDecay(double amplitude, double exponent);
  static Potential sum(const std::vector<Potential>& parts);
  static Potential scaled(double coupling, const Potential& inner);

  double operator()(double r) const;

  bool isZero() const { return terms_.empty(); }
  /// Radius beyond which the potential vanishes identically; +inf when a
  /// power-decay term is present.
  double supportRadius() const;
  /// Exact bound on sup |W| (triangle inequality over terms).
  double supBound() const;

  Potential abs() const;        // |W| as a potential (termwise; exact when
                                // terms have disjoint signs or equal shape)
  bool absExact() const;        // whether abs() equals |W(.)| pointwise

  /// If other == factor * (*this) pointwise, returns factor.
  std::optional<double> proportionTo(const Potential& other) const;
  /// If other == factor * |*this| pointwise, returns factor.
  std::optional<double> absProportionTo(const Potential& other) const;

  std::string describe() const;

 private:
  struct Term {
    enum class Kind { Bump, Power } kind;
    double center = 0.0;
    double halfWidth = 0.0;
    double amplitude = 0.0;  // peak value (bump) or scale (power)
    double exponent = 0.0;
  };
  double evalTerm(const Term& t, double r) const;
  std::vector<Term> terms_;
};

}  // namespace parakernel
