#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "parakernel/errors.hpp"

namespace parakernel {

/// Strictly increasing radii, log-spaced by default (64 nodes per decade).
std::vector<double> logSpacedGrid(double rMin, double rMax, int perDecade = 64);

/// One real value per grid node.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> radii, std::vector<double> values);

  std::size_t size() const { return radii_.size(); }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double radius(std::size_t i) const { return radii_[i]; }
  double value(std::size_t i) const { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

/// Shape-preserving piecewise-cubic interpolant (Fritsch-Carlson slopes).
/// Queries outside the node range clamp to the end values.
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(std::span<const double> xs, std::span<const double> ys);

  double operator()(double x) const;
  double derivative(double x) const;
  double xMin() const { return xs_.empty() ? 0.0 : xs_.front(); }
  double xMax() const { return xs_.empty() ? 0.0 : xs_.back(); }

 private:
  std::size_t segmentOf(double x) const;
  std::vector<double> xs_, ys_, slopes_;
};

/// Interpolant of a grid function in log-radius coordinates.
CubicInterpolant makeLogRadiusInterpolant(const GridFunction& f);

}  // namespace parakernel
