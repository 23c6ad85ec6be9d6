#include "parakernel/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parakernel/rng.hpp"

namespace parakernel {

namespace {

// Uniform-in-log drift lookup table; per-step evaluation is one log and one
// linear interpolation.
class DriftTable {
 public:
  DriftTable(const RadialGeometry& nu, double rLo, double rHi, int perDecade) {
    xLo_ = std::log(rLo);
    const double xHi = std::log(rHi);
    n_ = static_cast<std::size_t>((xHi - xLo_) / (std::log(10.0) / perDecade)) + 2;
    dx_ = (xHi - xLo_) / static_cast<double>(n_ - 1);
    values_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = std::exp(xLo_ + dx_ * static_cast<double>(i));
      const double b = nu.logDensitySlope(r);
      if (!std::isfinite(b)) {
        throw NumericError("non-finite drift at radius " + std::to_string(r));
      }
      values_[i] = b;
    }
  }

  double operator()(double r) const {
    const double x = std::log(r);
    double u = (x - xLo_) / dx_;
    if (u <= 0.0) u = 0.0;
    if (u >= static_cast<double>(n_ - 1)) u = static_cast<double>(n_ - 1) - 1e-9;
    const auto i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
  }

 private:
  std::vector<double> values_;
  double xLo_ = 0.0, dx_ = 1.0;
  std::size_t n_ = 0;
};

}  // namespace

PathEnsemble simulatePaths(const TransformedGeometry& tg, const Potential& W,
                           double x0, const PathSimOptions& opt) {
  if (!(x0 >= 0.0)) throw DomainError("start radius must be nonnegative");
  if (!(opt.dt > 0.0) || opt.dt > opt.horizon / 100.0) {
    throw DomainError("simulatePaths requires 0 < dt <= horizon/100");
  }
  {
    const auto rep = isParabolic(tg.geometry());
    if (!rep.nonParabolic()) {
      throw DomainError("simulatePaths expects a transient (non-parabolic) "
                        "transform");
    }
  }

  const RadialGeometry& nu = tg.geometry();
  // Drift near the origin follows the dimension law (N-1)/r; below rFloor the
  // capped-drift step never resolves it anyway.
  const double rFloor = 1e-7;
  const DriftTable drift(nu, rFloor, 1e9, 32);

  const double wSupport = W.supportRadius();
  const double wSkipRadius =
      std::isfinite(wSupport) ? wSupport : std::numeric_limits<double>::infinity();

  PathEnsemble ens;
  ens.startRadius = x0;
  ens.horizon = opt.horizon;
  ens.dt = opt.dt;
  ens.pathCount = opt.pathCount;
  ens.seed = opt.seed;
  ens.potentialIntegral.resize(opt.pathCount);
  ens.absPotentialIntegral.resize(opt.pathCount);
  ens.finalRadius.resize(opt.pathCount);
  ens.maxRadius.resize(opt.pathCount);
  ens.alive.assign(opt.pathCount, 1);
  ens.transform = std::make_shared<TransformedGeometry>(tg);
  ens.potential = W;

  const double adaptR2 = opt.adaptiveRadius * opt.adaptiveRadius;
  const double dtCap = std::min(opt.dt * opt.maxDtFactor, opt.horizon / 100.0);

#pragma omp parallel for schedule(static)
  for (int p = 0; p < opt.pathCount; ++p) {
    GaussianStream gauss(mixStream(opt.seed, static_cast<std::uint64_t>(p)));
    double r = x0;
    double t = 0.0;
    double acc = 0.0, accAbs = 0.0;
    double wPrev = W(r), wAbsPrev = std::fabs(wPrev);
    double rMaxSeen = r;

    while (t < opt.horizon) {
      double dt = opt.dt * (1.0 + r * r / adaptR2);
      if (dt > dtCap) dt = dtCap;
      if (t + dt > opt.horizon) dt = opt.horizon - t;
      const double stepLen = std::sqrt(2.0 * dt);

      double b = drift(std::max(r, rFloor));
      const double cap = 0.5 * stepLen / dt;
      if (b > cap) b = cap;
      if (b < -cap) b = -cap;

      r = std::fabs(r + b * dt + stepLen * gauss.next());
      if (r > rMaxSeen) rMaxSeen = r;
      t += dt;

      double w = 0.0, wAbs = 0.0;
      if (r <= wSkipRadius) {
        w = W(r);
        wAbs = std::fabs(w);
      }
      acc += 0.5 * dt * (wPrev + w);
      accAbs += 0.5 * dt * (wAbsPrev + wAbs);
      wPrev = w;
      wAbsPrev = wAbs;
    }
    ens.potentialIntegral[p] = acc;
    ens.absPotentialIntegral[p] = accAbs;
    ens.finalRadius[p] = r;
    ens.maxRadius[p] = rMaxSeen;
  }
  return ens;
}

namespace {

struct GaugeWeights {
  double signedScale = 0.0;  // weight of int W ds
  double absScale = 0.0;     // weight of int |W| ds
};

GaugeWeights resolveWeights(const PathEnsemble& ens, const Potential& W) {
  if (W.isZero()) return {0.0, 0.0};
  if (auto s = ens.potential.proportionTo(W)) return {*s, 0.0};
  if (auto s = ens.potential.absProportionTo(W)) return {0.0, *s};
  throw DomainError("ensemble carries no accumulators for this potential; "
                    "re-simulate with it");
}

MonteCarloEstimate summarize(const std::vector<double>& samples) {
  MonteCarloEstimate est;
  est.pathCount = static_cast<int>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - est.mean) * (v - est.mean);
  const double var =
      samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  est.standardError = std::sqrt(var / static_cast<double>(samples.size()));
  est.ciLow = est.mean - 1.959963984540054 * est.standardError;
  est.ciHigh = est.mean + 1.959963984540054 * est.standardError;
  return est;
}

// Expected remaining occupation of |W| for a path ending at radius R, through
// the exact radial occupation identity on a radius grid.
std::vector<double> tailOccupationBound(const PathEnsemble& ens,
                                        const Potential& absW,
                                        const std::vector<double>& grid) {
  std::vector<double> bounds(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bounds[i] = radialOccupationIntegral(*ens.transform, absW, grid[i]);
  }
  return bounds;
}

}  // namespace

MonteCarloEstimate gaugeEstimate(const PathEnsemble& ens, const Potential& W) {
  const GaugeWeights weights = resolveWeights(ens, W);
  {
    const auto kato = katoIntegral(ens.transform->base(), W);
    if (kato.verdict == KatoReport::Verdict::Divergent) {
      throw DomainError("gaugeEstimate requires a convergent Kato integral");
    }
  }
  const auto n = static_cast<std::size_t>(ens.pathCount);
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = std::exp(-(weights.signedScale * ens.potentialIntegral[i] +
                            weights.absScale * ens.absPotentialIntegral[i]));
  }
  MonteCarloEstimate est = summarize(samples);

  // Truncation: |e_W - e_W,T| <= E[ e^{-A_T} (e^{f(R_T)} - 1) ] with f the
  // envelope bound on the remaining |W| occupation from the endpoint radius.
  const double scaleAbs =
      std::fabs(weights.signedScale) + std::fabs(weights.absScale);
  if (scaleAbs > 0.0) {
    const Potential absW = Potential::scaled(scaleAbs, ens.potential.abs());
    auto grid = logSpacedGrid(
        std::max(1e-2, *std::min_element(ens.finalRadius.begin(),
                                         ens.finalRadius.end()) * 0.5 + 1e-2),
        std::max(1.0, *std::max_element(ens.finalRadius.begin(),
                                        ens.finalRadius.end())) * 2.0,
        4);
    const auto bounds = tailOccupationBound(ens, absW, grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ens.finalRadius[i];
      // nearest grid sample at or below r (bounds decrease in r)
      std::size_t k = 0;
      while (k + 1 < grid.size() && grid[k + 1] <= r) ++k;
      acc += samples[i] * std::expm1(bounds[k]);
    }
    est.truncationBound = acc / static_cast<double>(n);
  }
  return est;
}

MonteCarloEstimate occupationNorm(const PathEnsemble& ens, const Potential& W) {
  const GaugeWeights weights = resolveWeights(ens, W);
  const double scaleAbs =
      std::fabs(weights.signedScale) + std::fabs(weights.absScale);
  const auto n = static_cast<std::size_t>(ens.pathCount);
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = scaleAbs * ens.absPotentialIntegral[i];
  }
  MonteCarloEstimate est = summarize(samples);
  if (scaleAbs > 0.0) {
    const Potential absW = Potential::scaled(scaleAbs, ens.potential.abs());
    const std::vector<double> grid = {std::max(
        1e-2, *std::min_element(ens.finalRadius.begin(), ens.finalRadius.end()))};
    est.truncationBound = tailOccupationBound(ens, absW, grid)[0];
  }
  return est;
}

}  // namespace parakernel
