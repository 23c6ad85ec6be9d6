#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "parakernel/green_kato.hpp"
#include "parakernel/schrodinger.hpp"

namespace parakernel {

struct PathSimOptions {
  double horizon = 100.0;
  double dt = 1e-3;
  int pathCount = 10000;
  std::uint64_t seed = 1;
  /// Step growth away from the origin: dt_local = dt (1 + (R/adaptiveRadius)^2),
  /// capped at dt * maxDtFactor and at horizon/100.
  double adaptiveRadius = 4.0;
  double maxDtFactor = 4096.0;
};

/// Radial diffusion paths on a transformed geometry (drift m_nu'/m_nu,
/// diffusion coefficient 2, reflection at 0) carrying the occupation
/// integrals of a fixed potential. Reproducible given (seed, dt, T, count):
/// every path draws from its own counter-derived stream.
struct PathEnsemble {
  double startRadius = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  int pathCount = 0;
  std::uint64_t seed = 0;
  std::vector<double> potentialIntegral;     // per path, int W(R_s) ds
  std::vector<double> absPotentialIntegral;  // per path, int |W(R_s)| ds
  std::vector<double> finalRadius;
  std::vector<double> maxRadius;
  std::vector<std::uint8_t> alive;  // all true unless a step failed
  std::shared_ptr<const TransformedGeometry> transform;
  Potential potential;
};

PathEnsemble simulatePaths(const TransformedGeometry& tg, const Potential& W,
                           double x0, const PathSimOptions& opt);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standardError = 0.0;
  double ciLow = 0.0, ciHigh = 0.0;  // 95% normal approximation
  int pathCount = 0;
  double truncationBound = 0.0;  // finite-horizon bias bound, reported not hidden
};

/// Sample mean of exp(-int W) for the ensemble's potential or any scalar
/// multiple of it (or of its absolute value); the per-path accumulators make
/// those gauges exact reweightings. Requires a convergent Kato integral.
MonteCarloEstimate gaugeEstimate(const PathEnsemble& ens, const Potential& W);

/// Sample mean of int |W| ds, comparable to the Green integral
/// int G_nu(x0, y) |W(y)| dnu(y).
MonteCarloEstimate occupationNorm(const PathEnsemble& ens, const Potential& W);

}  // namespace parakernel
