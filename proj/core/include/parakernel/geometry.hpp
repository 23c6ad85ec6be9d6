#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parakernel/errors.hpp"
#include "parakernel/quadrature.hpp"

namespace parakernel {

enum class GeometryKind { FlatPlane, HalfCylinder, Model, LogPlane, Custom };

/// Warping function of a model geometry together with its derivative.
struct Warping {
  std::function<double(double)> psi;
  std::function<double(double)> psiPrime;
};

/// A weighted manifold reduced to a radial area density m(r): the
/// (N-1)-volume of the sphere of radius r including the weight, so that
/// V(r) = integral of m over [0, r]. Instances are immutable after
/// construction and cheap to copy (shared internals); all operations on them
/// are pure and safe to call concurrently.
class RadialGeometry {
 public:
  struct Spec {
    int dimension = 2;
    std::function<double(double)> areaDensity;              // m(r), > 0 for r > 0
    std::function<double(double)> logDensitySlope;          // m'(r)/m(r); optional
    std::optional<Warping> warping;                         // model instances
    std::function<double(double, double)> remoteBallVolume; // (|x|, rho); optional
    GeometryKind kind = GeometryKind::Custom;
    std::string label = "custom";
    double quadratureTol = 1e-8;
    double tableHorizon = 1e15;
  };

  explicit RadialGeometry(Spec spec);

  /// R^2 with Lebesgue measure: m(r) = 2 pi r.
  static RadialGeometry flatPlane();
  /// Hemispherical cap glued to a cylinder over S^{N-1}; warping blends from
  /// psi(r) = r near the origin to psi = 1 beyond blendRadius.
  static RadialGeometry halfCylinder(int dimension = 3, double blendRadius = 1.0);
  /// Model manifold with psi(r) = r^beta beyond blendRadius, blended to
  /// psi(0) = 0, psi'(0) = 1, psi''(0) = 0 on [0, blendRadius].
  static RadialGeometry model(int dimension, double beta, double blendRadius = 1.0);
  /// R^2 weighted by log(2 + |x|).
  static RadialGeometry logPlane();

  int dimension() const;
  GeometryKind kind() const;
  const std::string& label() const;
  double quadratureTol() const;
  const Warping* warping() const;

  double density(double r) const;
  double logDensitySlope(double r) const;

  bool hasRemoteBallRule() const;
  double remoteBallVolume(double absCenter, double rho) const;

  /// V(r), by checkpointed adaptive quadrature of the density.
  double volume(double r) const;

  /// Integral of 1/m over [rFrom, rTo], 1e-6 <= rFrom <= rTo.
  double inverseDensityIntegral(double rFrom, double rTo) const;

  /// Cumulative integral of 2s/V(s) over [1, r] (0 for r <= 1).
  double reciprocalVolumeIntegral(double r) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// H(r) = 1 + (integral over [1, r] of 2s/V(s) ds)_+, the substituted form of
/// 1 + (integral over [1, r^2] of dt/V(sqrt t))_+. Equals 1 for r <= 1,
/// nondecreasing.
double bigH(const RadialGeometry& geom, double r);

/// bigH evaluated cumulatively along an increasing set of radii.
std::vector<double> bigHOnGrid(const RadialGeometry& geom, std::span<const double> radii);

/// Hhat(y) = 1 + (integral over [1, |y|^2] of dt / Vrem(y, sqrt t))_+ with the
/// remote-ball envelope in place of the true off-center volume. Equals 1 for
/// |y| <= 1. Throws DomainError when the geometry has no remote-ball rule.
double hatH(const RadialGeometry& geom, double absY);

/// Remote-ball envelope extended across the anchored regime: the remote rule
/// for rho <= |y|, the anchored volume scaled for continuity beyond, and the
/// plain anchored volume when |y| is inside the smoothing zone.
double remoteOrAnchoredVolume(const RadialGeometry& geom, double absY, double rho);

struct ParabolicityReport {
  enum class Status { Parabolic, NonParabolic, Undetermined };
  struct Sample {
    double radius;
    double partialIntegral;  // integral of 2s/V(s) over [1, radius]
    double increment;        // contribution of [radius/2, radius]
  };
  Status status = Status::Undetermined;
  std::vector<Sample> samples;

  bool parabolic() const { return status == Status::Parabolic; }
  bool nonParabolic() const { return status == Status::NonParabolic; }
};

struct ParabolicityOptions {
  double rMax = 1e8;
  /// Increments of the H-integral are compared on H's own unit scale:
  /// three consecutive doublings below convergedTol declare convergence.
  double convergedTol = 1e-2;
  /// Increments that stay at or above divergentFloor through rMax declare
  /// divergence; anything in between is reported as undetermined.
  double divergentFloor = 1.5e-2;
};

/// Finite-horizon convergence test of the H-integral. Parabolic means the
/// partial integrals keep growing (the tail never passes the convergence
/// test); an inconclusive scan reports Undetermined, never a silent guess.
ParabolicityReport isParabolic(const RadialGeometry& geom,
                               const ParabolicityOptions& opt = {});

struct DoublingCheck {
  bool pass = false;
  double worstRatio = 0.0;   // sup over scanned (s, r) of V(r) / (V(s) (r/s)^{2+delta})
  double growthFactor = 0.0; // worst ratio over the full range vs the half range
};

/// Scans log-spaced pairs 1 <= s < r <= rMax and reports the supremum of
/// V(r) / (V(s) (r/s)^{2+delta}). Passes when the supremum has stabilized over
/// the scanned range (growth factor <= 1.25).
DoublingCheck doublingExponentCheck(const RadialGeometry& geom, double delta,
                                    double sMin = 1.0, double rMax = 1e6);

}  // namespace parakernel
