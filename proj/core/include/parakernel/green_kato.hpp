#pragma once

#include <span>
#include <vector>

#include "parakernel/schrodinger.hpp"

namespace parakernel {

/// G_nu(r) = G_nu(x, o) for |x| = r on a transformed geometry, computed from
/// the fundamental-solution flux law m_nu G' = -1, so G(r) is the tail
/// integral of 1/m_nu with the constant-flux continuation supplying the tail
/// in closed form. Positive, strictly decreasing, G -> 0 at infinity.
struct GreenPoleFunction {
  GridFunction g;
  double tailAnchor = 0.0;  // radius where the closed-form tail takes over
};

GreenPoleFunction greenAtPole(const TransformedGeometry& tg,
                              std::span<const double> radii);

/// The two-sided envelope expression for G_nu(x, y) with all constants 1:
///   (H(|y|) + H(|x|))^-2 (int over [d^2, max(1,|x|^2,|y|^2)] of
///    dt / Vrem(y, sqrt t))_+  +  (H(|y|) + H(|x|))^-1.
/// Band calibration against exact values is the caller's job.
struct GreenEnvelopeValue {
  double value = 0.0;
  double positivePart = 0.0;    // the first term
  double reciprocalTerm = 0.0;  // the second term
  double lower() const { return value; }
  double upper() const { return value; }
};

GreenEnvelopeValue greenEnvelope(const RadialGeometry& base, double absX,
                                 double absY, double distance);

struct KatoReport {
  enum class Verdict { Convergent, Divergent, Undetermined };
  struct Sample {
    double radius;
    double integral;   // I(R) = int over B(o, R) of |W| (H + Hhat) dmu
    double increment;  // I(R) - I(R/2)
  };
  Verdict verdict = Verdict::Undetermined;
  std::vector<Sample> samples;
  double tailDecayExponent = 0.0;  // -log2 slope of the late increments

  bool convergent() const { return verdict == Verdict::Convergent; }
};

struct KatoOptions {
  double rMax = 1e8;
  double convergentTol = 1e-4;  // relative increment; three consecutive below
  double divergentFloor = 1e-2; // relative increment; three consecutive at or above
};

/// Kato integral criterion on doubling radii. The verdict is convergent when
/// three consecutive doubling increments fall below the tolerance (relative to
/// the accumulated integral), divergent when the last three stay at or above
/// the floor, and undetermined otherwise.
KatoReport katoIntegral(const RadialGeometry& geom, const Potential& W,
                        const KatoOptions& opt = {});

/// Upper estimate of sup_x int G_nu(x, y) |W(y)| dnu(y) over a radius sample,
/// using the Green envelope (calibrated against the exact pole function so the
/// kernel bound dominates it) plus the local-ball term C_VD sup_{B(x,1)} |W|.
struct GreenBoundEstimate {
  struct Sample {
    double x = 0.0;
    double integral = 0.0;   // envelope-kernel integral from this center
    double localTerm = 0.0;  // C_VD sup_{B(x,1)} |W|
  };
  double bound = 0.0;                // max over samples of integral + localTerm
  double envelopeCalibration = 1.0;  // factor making envelope >= pole Green
  double doublingConstant = 0.0;
  std::vector<Sample> samples;
};

struct GreenBoundOptions {
  double quadTol = 1e-7;
  int calibrationPerDecade = 8;
};

GreenBoundEstimate greenBoundNorm(const TransformedGeometry& tg, const Potential& W,
                                  std::span<const double> sampleRadii,
                                  const GreenBoundOptions& opt = {});

/// Exact expected occupation of a radial potential by the radial diffusion
/// started at radius x: int |W|(rho) G_pole(max(x, rho)) m_nu(rho) drho.
/// The kernel is the scale-function Green function of the radial generator,
/// so no envelope constants enter.
double radialOccupationIntegral(const TransformedGeometry& tg, const Potential& W,
                                double x);

/// Khasminskii bound sup e_W < (1 - alpha)^{-1}, applicable for alpha < 1.
struct KhasminskiiBound {
  bool applicable = false;
  double bound = 0.0;
};

KhasminskiiBound khasminskiiBound(double alpha);

}  // namespace parakernel
