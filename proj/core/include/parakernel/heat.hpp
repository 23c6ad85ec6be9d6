#pragma once

#include <vector>

#include "parakernel/geometry.hpp"
#include "parakernel/grid.hpp"
#include "parakernel/potential.hpp"

namespace parakernel {

struct HeatRunConfig {
  double rMin = 1e-2;
  double rMax = 100.0;
  int perDecade = 64;
  double tMax = 100.0;
  double theta = 0.5;               // Crank-Nicolson
  double dt = 0.0;                  // 0: derived from the accuracy guard
  double accuracyGuardMultiple = 8; // dt <= multiple * min cell width
  int rannacherSteps = 2;           // damped implicit-Euler startup steps
  double deltaWidthCells = 3.0;     // delta-approximation width, in first cells
  int recordCount = 33;             // log-spaced record times up to tMax
  double recordTMin = 1e-2;
  double boundaryExclusionFactor = 4.0;
  double boundaryLossLimit = 0.01;
};

/// Numerical heat kernel slices p(t, r) at the pole (or the evolution of a
/// caller-supplied nonnegative initial density). Values are densities with
/// respect to the weighted measure, so sum of p * cellMass is the mass.
struct KernelSlice {
  std::vector<double> times;
  std::vector<double> radii;
  std::vector<std::vector<double>> values;  // [time][radius]
  std::vector<double> massHistory;
  std::vector<double> boundaryLoss;   // cumulative outflow at the outer edge
  std::vector<double> potentialLoss;  // cumulative mass removed by W
  double deltaWidth = 0.0;
  double reliableTimeFloor = 0.0;     // kernel values below this t are unreliable
  double admissibleRadiusCap = 0.0;   // rMax - exclusionFactor * sqrt(tMax)
  double boundaryLossLimit = 0.01;
  long clippedCount = 0;              // negative undershoots clipped on output
};

KernelSlice solveHeatRadial(const RadialGeometry& geom, const Potential& W,
                            const GridFunction& init, const HeatRunConfig& cfg);

/// solveHeatRadial with a normalized narrow bump around the pole
/// (total weighted mass 1, width = cfg.deltaWidthCells first cells).
KernelSlice heatKernelAtPole(const RadialGeometry& geom, const Potential& W,
                             const HeatRunConfig& cfg);

/// Envelope of the subcritical regime at all constants 1:
///   hx hy / ((hy + hSqrtT)^2 vol) * exp(-gaussParam d^2 / t).
double envelopeSubcritical(double hx, double hy, double hSqrtT, double vol,
                           double t, double distance, double gaussParam);

/// Envelope of the critical regime: exp(-gaussParam d^2 / t) / vol.
double envelopeCritical(double vol, double t, double distance, double gaussParam);

enum class EnvelopeKind { Subcritical, Critical };

struct BoundCheckConfig {
  EnvelopeKind kind = EnvelopeKind::Critical;
  double tMin = 1.0;
  double tMax = 100.0;
  double rFactor = 3.0;       // admit r <= rFactor sqrt(t)
  double fitRMinFactor = 0.5; // exponent fit restricted to r >= this * sqrt(t)
  std::vector<double> gaussParams = {0.125, 1.0 / 6.0, 0.25, 0.5};
  double bandLimit = 50.0;
  double exponentLo = 0.125;
  double exponentHi = 0.5;
};

struct BoundCheckReport {
  double bandMin = 0.0;
  double bandMax = 0.0;
  double bestGaussParam = 0.0;
  std::vector<double> fittedExponents;  // one per admitted time slice
  double exponentMedian = 0.0;
  bool exponentsInWindow = false;
  bool pass = false;
  std::size_t admittedPoints = 0;
  struct RatioSample {
    double t, r, ratio;
  };
  std::vector<RatioSample> ratios;  // at the best Gaussian parameter

  double band() const { return bandMin > 0.0 ? bandMax / bandMin : 0.0; }
};

/// Ratio field p / envelope over the admissible region for a kernel computed
/// at the pole (so the H(|y|) = H(0) = 1 branch applies), scanning the
/// configured Gaussian parameters and keeping the tightest band. Also fits the
/// Gaussian exponent (slope of log p against r^2/t) per time slice.
BoundCheckReport boundCheck(const KernelSlice& kernel, const RadialGeometry& base,
                            EnvelopeKind kind, const BoundCheckConfig& cfg);

}  // namespace parakernel
