#include "parakernel/grid.hpp"

#include <algorithm>
#include <cmath>

namespace parakernel {

std::vector<double> logSpacedGrid(double rMin, double rMax, int perDecade) {
  if (!(rMin > 0.0) || !(rMax > rMin) || perDecade < 1) {
    throw DomainError("invalid log grid parameters");
  }
  const double x0 = std::log10(rMin);
  const double x1 = std::log10(rMax);
  const auto n = static_cast<std::size_t>(std::ceil((x1 - x0) * perDecade)) + 1;
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
    r[i] = std::pow(10.0, x);
  }
  r.front() = rMin;
  r.back() = rMax;
  return r;
}

GridFunction::GridFunction(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  if (radii_.size() != values_.size()) {
    throw DomainError("grid/value length mismatch");
  }
  for (std::size_t i = 1; i < radii_.size(); ++i) {
    if (!(radii_[i] > radii_[i - 1])) {
      throw DomainError("grid radii must be strictly increasing");
    }
  }
}

CubicInterpolant::CubicInterpolant(std::span<const double> xs,
                                   std::span<const double> ys)
    : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()) {
  const std::size_t n = xs_.size();
  if (n < 2 || n != ys_.size()) throw DomainError("interpolant needs >= 2 nodes");
  slopes_.assign(n, 0.0);
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  }
  slopes_[0] = d[0];
  slopes_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      const double w1 = 2.0 * (xs_[i + 1] - xs_[i]) + (xs_[i] - xs_[i - 1]);
      const double w2 = (xs_[i + 1] - xs_[i]) + 2.0 * (xs_[i] - xs_[i - 1]);
      slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
}

std::size_t CubicInterpolant::segmentOf(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.begin()) return 0;
  auto i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(i, xs_.size() - 2);
}

double CubicInterpolant::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const std::size_t i = segmentOf(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * ys_[i] + h10 * h * slopes_[i] + h01 * ys_[i + 1] +
         h11 * h * slopes_[i + 1];
}

double CubicInterpolant::derivative(double x) const {
  if (x <= xs_.front() || x >= xs_.back()) return 0.0;
  const std::size_t i = segmentOf(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double g00 = (6 * t2 - 6 * t) / h;
  const double g10 = 3 * t2 - 4 * t + 1;
  const double g01 = (-6 * t2 + 6 * t) / h;
  const double g11 = 3 * t2 - 2 * t;
  return g00 * ys_[i] + g10 * slopes_[i] + g01 * ys_[i + 1] + g11 * slopes_[i + 1];
}

CubicInterpolant makeLogRadiusInterpolant(const GridFunction& f) {
  std::vector<double> xs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) xs[i] = std::log(f.radius(i));
  return CubicInterpolant(xs, f.values());
}

}  // namespace parakernel
