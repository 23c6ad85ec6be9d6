#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "parakernel/errors.hpp"

namespace parakernel {

/// Gauss-Kronrod 7-15 panel. Returns the K15 value, writes the |K15-G7|-based
/// error estimate to `err`. Throws NumericError if the integrand is non-finite
/// anywhere on the panel, naming the offending abscissa.
double gaussKronrod15(const std::function<double(double)>& f, double a, double b,
                      double& err);

struct QuadratureOptions {
  double relTol = 1e-9;
  double absTol = 0.0;
  int maxPanels = 4000;
};

/// Adaptive bisection quadrature on [a, b].
double integrateAdaptive(const std::function<double(double)>& f, double a, double b,
                         const QuadratureOptions& opt = {});

/// Adaptive quadrature on [a, b] with the interval pre-split into octaves of a
/// when b/a is large. Suited to integrands that vary on logarithmic scales.
double integrateLogSegmented(const std::function<double(double)>& f, double a,
                             double b, const QuadratureOptions& opt = {});

/// Cumulative integral of a fixed integrand with checkpoints on octaves,
/// so that F(r) = integral from the origin (or from an anchor) to r can be
/// queried cheaply across many orders of magnitude. Immutable once built.
class CumulativeTable {
 public:
  CumulativeTable() = default;

  /// Checkpoints at low * 2^k for k = 0 .. n, covering [low, horizon].
  /// If fromOrigin, F(r) means the integral over [0, r] (the [0, low] head is
  /// integrated adaptively and folded into every checkpoint); otherwise F(r)
  /// is the integral over [low, r] and queries require r >= low.
  static CumulativeTable build(std::function<double(double)> f, double low,
                               double horizon, bool fromOrigin,
                               const QuadratureOptions& opt = {});

  double operator()(double r) const;
  double low() const { return low_; }
  double horizon() const { return horizon_; }
  bool fromOrigin() const { return fromOrigin_; }

 private:
  std::function<double(double)> f_;
  std::vector<double> checkpoints_;  // cumulative value at low_ * 2^k
  double low_ = 0;
  double horizon_ = 0;
  bool fromOrigin_ = false;
  QuadratureOptions opt_;
};

}  // namespace parakernel
