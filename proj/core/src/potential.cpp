#include "parakernel/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace parakernel {

Potential Potential::bump(double center, double halfWidth, double amplitude) {
  if (!(halfWidth > 0.0)) throw DomainError("bump half-width must be positive");
  if (center < 0.0) throw DomainError("bump center must be nonnegative");
  Potential w;
  if (amplitude != 0.0) {
    w.terms_.push_back({Term::Kind::Bump, center, halfWidth, amplitude, 0.0});
  }
  return w;
}

Potential Potential::powerDecay(double amplitude, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("power-decay exponent must be positive");
  Potential w;
  if (amplitude != 0.0) {
    w.terms_.push_back({Term::Kind::Power, 0.0, 0.0, amplitude, exponent});
  }
  return w;
}

Potential Potential::sum(const std::vector<Potential>& parts) {
  Potential w;
  for (const auto& p : parts) {
    w.terms_.insert(w.terms_.end(), p.terms_.begin(), p.terms_.end());
  }
  return w;
}

Potential Potential::scaled(double coupling, const Potential& inner) {
  Potential w;
  if (coupling == 0.0) return w;
  w.terms_ = inner.terms_;
  for (auto& t : w.terms_) t.amplitude *= coupling;
  return w;
}

double Potential::evalTerm(const Term& t, double r) const {
  switch (t.kind) {
    case Term::Kind::Bump: {
      const double u = (r - t.center) / t.halfWidth;
      if (std::fabs(u) >= 1.0) return 0.0;
      return t.amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    case Term::Kind::Power:
      return t.amplitude * std::pow(2.0 + r, -t.exponent);
  }
  return 0.0;
}

double Potential::operator()(double r) const {
  double v = 0.0;
  for (const auto& t : terms_) v += evalTerm(t, r);
  return v;
}

double Potential::supportRadius() const {
  double sup = 0.0;
  for (const auto& t : terms_) {
    if (t.kind == Term::Kind::Power) return std::numeric_limits<double>::infinity();
    sup = std::max(sup, t.center + t.halfWidth);
  }
  return sup;
}

double Potential::supBound() const {
  double bound = 0.0;
  for (const auto& t : terms_) {
    if (t.kind == Term::Kind::Power) {
      bound += std::fabs(t.amplitude) * std::pow(2.0, -t.exponent);
    } else {
      bound += std::fabs(t.amplitude);
    }
  }
  return bound;
}

Potential Potential::abs() const {
  Potential w;
  w.terms_ = terms_;
  for (auto& t : w.terms_) t.amplitude = std::fabs(t.amplitude);
  return w;
}

bool Potential::absExact() const {
  // Termwise |.| equals pointwise |.| when all terms share a sign, or when
  // the terms never overlap with opposite signs. The cheap sufficient check:
  bool anyPos = false, anyNeg = false;
  for (const auto& t : terms_) {
    (t.amplitude > 0.0 ? anyPos : anyNeg) = true;
  }
  return !(anyPos && anyNeg);
}

namespace {

std::vector<double> probeRadii() {
  std::vector<double> r;
  for (double x = 0.0; x <= 12.0; x += 0.37) r.push_back(x);
  for (double x = 16.0; x <= 4096.0; x *= 2.0) r.push_back(x);
  return r;
}

std::optional<double> proportionOnProbe(const std::vector<double>& base,
                                        const std::vector<double>& target) {
  double factor = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (std::fabs(base[i]) > 1e-300) {
      factor = target[i] / base[i];
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double scale = std::max(1e-300, std::fabs(factor * base[i]));
    if (std::fabs(target[i] - factor * base[i]) > 1e-9 * scale + 1e-300) {
      return std::nullopt;
    }
  }
  return factor;
}

}  // namespace

std::optional<double> Potential::proportionTo(const Potential& other) const {
  const auto radii = probeRadii();
  std::vector<double> base(radii.size()), target(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    base[i] = (*this)(radii[i]);
    target[i] = other(radii[i]);
  }
  return proportionOnProbe(base, target);
}

std::optional<double> Potential::absProportionTo(const Potential& other) const {
  const auto radii = probeRadii();
  std::vector<double> base(radii.size()), target(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    base[i] = std::fabs((*this)(radii[i]));
    target[i] = other(radii[i]);
  }
  return proportionOnProbe(base, target);
}

std::string Potential::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i) os << " + ";
    if (t.kind == Term::Kind::Bump) {
      os << "bump(center=" << t.center << ", width=" << t.halfWidth
         << ", amplitude=" << t.amplitude << ")";
    } else {
      os << t.amplitude << "*<r>^-" << t.exponent;
    }
  }
  return os.str();
}

}  // namespace parakernel
