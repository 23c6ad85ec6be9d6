#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "parakernel/geometry.hpp"
#include "parakernel/grid.hpp"
#include "parakernel/potential.hpp"

namespace parakernel {

enum class Criticality { Subcritical, Critical, Supercritical, Undetermined };

const char* criticalityName(Criticality c);

/// Evidence backing a classification verdict.
struct Classification {
  Criticality tag = Criticality::Undetermined;
  std::optional<double> nodeRadius;  // present whenever tag == Supercritical
  bool nodeExtrapolated = false;     // node projected beyond the solve horizon
  double terminalFlux = 0.0;
  double fluxScale = 0.0;            // max |flux| seen along the solve
  double growthRatio = 0.0;          // sup over last decade / sup over first decade
  double fitConstCoeff = 0.0;        // least squares h ~ alpha + beta H on the tail
  double fitBigHCoeff = 0.0;
};

/// Grid solution h of (Delta_mu + W) h = 0 with its flux a = m h'.
struct Profile {
  GridFunction h;
  GridFunction flux;
  double terminalFlux = 0.0;
  double fluxScale = 0.0;
  double residualNorm = 0.0;  // max interior residual of the discrete operator
  Criticality tag = Criticality::Undetermined;
  std::optional<double> nodeRadius;
};

struct ProfileOptions {
  double rMax = 1e6;
  double tol = 1e-3;        // contract tolerance for the reported residual
  double r0 = 1e-6;         // series start: h = h0, flux = W(0) V(r0)
  int perDecade = 64;
  double h0 = 1.0;          // initial value; the ODE is linear in h0
  double stepTol = 1e-10;   // internal stepper tolerance (relative)
};

/// Integrates h' = a/m, a' = W m h from the origin with h(0) = h0 and zero
/// initial flux by an adaptive Dormand-Prince step, detecting the first node
/// of h by sign change and bisection refinement.
Profile solveProfileIVP(const RadialGeometry& geom, const Potential& W,
                        const ProfileOptions& opt = {});

/// Second-order flux-form finite differences for (Delta_mu + W) h at interior
/// nodes. Endpoint entries are NaN. Requires at least 3 nodes.
GridFunction applyOperator(const RadialGeometry& geom, const Potential& W,
                           const GridFunction& h);

struct ClassifyOptions {
  ProfileOptions profile;
  double fluxThreshold = 1e-6;   // scaled by (1 + fluxScale)
  double growthThreshold = 3.0;
  bool requireParabolicBase = true;
};

/// Criticality trichotomy for Delta_mu + W over a parabolic base geometry.
/// Supercritical when the profile has a node (found in-range, or projected
/// from a negative terminal flux, which forces a node on a parabolic base);
/// subcritical on positive terminal flux; critical when the profile stays
/// bounded; otherwise Undetermined, which is a value, not an error.
Classification classify(const RadialGeometry& geom, const Potential& W,
                        const ClassifyOptions& opt = {});

struct CouplingOptions {
  double tol = 1e-3;
  ClassifyOptions classify;
  int undeterminedRetries = 3;  // rMax is raised on retry
};

struct CouplingResult {
  double coupling = 0.0;
  double bracketLo = 0.0, bracketHi = 0.0;
  Classification atLo, atHi;  // evidence at the final bracket ends
  int iterations = 0;
};

/// Bisection on c of classify(geom, W1 - c (W2 - q)) between a
/// non-supercritical cLo and a supercritical cHi.
CouplingResult criticalCoupling(const RadialGeometry& geom, const Potential& W1,
                                const Potential& W2, const Potential& q,
                                double cLo, double cHi,
                                const CouplingOptions& opt = {});

/// The weighted geometry (M, h^2 dmu) of a Doob transform, carrying the base
/// geometry, the transforming potential and its profile. Beyond the profile
/// grid the profile continues with constant flux: h(r) = h(R) + a_R int ds/m.
class TransformedGeometry {
 public:
  TransformedGeometry(RadialGeometry base, Potential potential, Profile profile);

  const RadialGeometry& geometry() const { return *transformed_; }
  const RadialGeometry& base() const { return base_; }
  const Potential& potential() const { return potential_; }
  const Profile& profile() const { return profile_; }

  double profileValue(double r) const;
  double profileFlux(double r) const;

  /// Integral of 1/m_nu over [r, infinity); finite exactly when the terminal
  /// flux is positive. Throws DomainError otherwise (parabolic transform).
  double inverseDensityTail(double r) const;

 private:
  RadialGeometry base_;
  Potential potential_;
  Profile profile_;
  CubicInterpolant hInterp_;   // on log radius
  CubicInterpolant fluxInterp_;
  double gridMax_ = 0.0;
  double hAtGridMax_ = 0.0;
  std::shared_ptr<RadialGeometry> transformed_;
};

/// dnu = h^2 dmu. Requires a profile without a node.
TransformedGeometry hTransform(const RadialGeometry& geom, const Potential& W,
                               const Profile& profile);

/// Pointwise product g(r) h(r), resampled onto the h grid: the profile of the
/// summed potential on the base geometry.
GridFunction composeProfiles(const Profile& h, const Profile& gOnTransform);

/// Limit of a profile on the transform at infinity, via the constant-flux
/// continuation and the finite tail integral of 1/m_nu.
double limitAtInfinity(const TransformedGeometry& tg, const Profile& gOnTransform);

}  // namespace parakernel
