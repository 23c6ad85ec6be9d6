#include "parakernel/geometry.hpp"

#include "parakernel/grid.hpp"

#include <algorithm>
#include <cmath>

namespace parakernel {

namespace {

double sphereArea(int n) {
  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

struct RadialGeometry::Impl {
  Spec spec;
  CumulativeTable volumeTable;       // integral of m over [0, r]
  CumulativeTable invDensityTable;   // integral of 1/m over [1e-6, r]
  CumulativeTable bigHTable;         // integral of 2s/V(s) over [1, r]
};

RadialGeometry::RadialGeometry(Spec spec) {
  if (spec.dimension < 2) throw DomainError("geometry dimension must be >= 2");
  if (!spec.areaDensity) throw DomainError("geometry requires an area density");
  auto impl = std::make_shared<Impl>();
  impl->spec = std::move(spec);

  QuadratureOptions opt;
  opt.relTol = impl->spec.quadratureTol;
  const double horizon = impl->spec.tableHorizon;
  const auto& m = impl->spec.areaDensity;
  impl->volumeTable = CumulativeTable::build(m, 1.0 / 1048576.0, horizon, true, opt);
  impl->invDensityTable = CumulativeTable::build(
      [m](double r) { return 1.0 / m(r); }, 1e-6, horizon, false, opt);

  const CumulativeTable* vt = &impl->volumeTable;
  impl->bigHTable = CumulativeTable::build(
      [vt](double s) { return 2.0 * s / (*vt)(s); }, 1.0, horizon, false, opt);

  impl_ = std::move(impl);
}

namespace {

RadialGeometry::Spec modelSpec(int dimension, double beta, double blendRadius) {
  if (dimension < 2) throw DomainError("model dimension must be >= 2");
  const double omega = sphereArea(dimension);
  const double b = blendRadius;
  const double scale = std::pow(b, 1.0 - beta);
  // Blend psi(r) = b * phi(r/b), phi(u) = u + (1-beta) u^3 (1-u), which matches
  // psi(0)=0, psi'(0)=1, psi''(0)=0 and the value and slope of scale * r^beta
  // at r = b.
  auto psi = [b, beta, scale](double r) {
    if (r >= b) return scale * std::pow(r, beta);
    const double u = r / b;
    return b * (u + (1.0 - beta) * u * u * u * (1.0 - u));
  };
  auto psiPrime = [b, beta, scale](double r) {
    if (r >= b) return beta * scale * std::pow(r, beta - 1.0);
    const double u = r / b;
    return 1.0 + (1.0 - beta) * (3.0 * u * u - 4.0 * u * u * u);
  };

  RadialGeometry::Spec spec;
  spec.dimension = dimension;
  spec.kind = GeometryKind::Model;
  spec.warping = Warping{psi, psiPrime};
  const int nm1 = dimension - 1;
  spec.areaDensity = [omega, psi, nm1](double r) {
    return omega * std::pow(psi(r), nm1);
  };
  spec.logDensitySlope = [psi, psiPrime, nm1](double r) {
    return nm1 * psiPrime(r) / psi(r);
  };
  spec.remoteBallVolume = [omega, psi, dimension, nm1](double absCenter, double rho) {
    const double p = psi(absCenter);
    return (omega / dimension) * rho * std::pow(std::min(rho, p), nm1);
  };
  return spec;
}

}  // namespace

RadialGeometry RadialGeometry::model(int dimension, double beta, double blendRadius) {
  Spec spec = modelSpec(dimension, beta, blendRadius);
  spec.label = "model(" + std::to_string(dimension) + "," + std::to_string(beta) + ")";
  return RadialGeometry(std::move(spec));
}

RadialGeometry RadialGeometry::flatPlane() {
  Spec spec;
  spec.dimension = 2;
  spec.kind = GeometryKind::FlatPlane;
  spec.label = "flat-plane";
  spec.areaDensity = [](double r) { return 2.0 * M_PI * r; };
  spec.logDensitySlope = [](double r) { return 1.0 / r; };
  spec.warping = Warping{[](double r) { return r; }, [](double) { return 1.0; }};
  spec.remoteBallVolume = [](double absCenter, double rho) {
    return M_PI * rho * std::min(rho, absCenter);
  };
  return RadialGeometry(std::move(spec));
}

RadialGeometry RadialGeometry::halfCylinder(int dimension, double blendRadius) {
  Spec spec = modelSpec(dimension, 0.0, blendRadius);
  spec.kind = GeometryKind::HalfCylinder;
  spec.label = "half-cylinder";
  return RadialGeometry(std::move(spec));
}

RadialGeometry RadialGeometry::logPlane() {
  Spec spec;
  spec.dimension = 2;
  spec.kind = GeometryKind::LogPlane;
  spec.label = "log-plane";
  spec.areaDensity = [](double r) { return 2.0 * M_PI * r * std::log(2.0 + r); };
  spec.logDensitySlope = [](double r) {
    return 1.0 / r + 1.0 / ((2.0 + r) * std::log(2.0 + r));
  };
  spec.remoteBallVolume = [](double absCenter, double rho) {
    return M_PI * rho * rho * std::log(2.0 + absCenter + rho);
  };
  return RadialGeometry(std::move(spec));
}

int RadialGeometry::dimension() const { return impl_->spec.dimension; }
GeometryKind RadialGeometry::kind() const { return impl_->spec.kind; }
const std::string& RadialGeometry::label() const { return impl_->spec.label; }
double RadialGeometry::quadratureTol() const { return impl_->spec.quadratureTol; }

const Warping* RadialGeometry::warping() const {
  return impl_->spec.warping ? &*impl_->spec.warping : nullptr;
}

double RadialGeometry::density(double r) const { return impl_->spec.areaDensity(r); }

double RadialGeometry::logDensitySlope(double r) const {
  if (impl_->spec.logDensitySlope) return impl_->spec.logDensitySlope(r);
  const double dr = 1e-5 * std::max(r, 1e-3);
  const double lo = std::max(r - dr, 1e-12);
  return (std::log(density(r + dr)) - std::log(density(lo))) / (r + dr - lo);
}

bool RadialGeometry::hasRemoteBallRule() const {
  return static_cast<bool>(impl_->spec.remoteBallVolume);
}

double RadialGeometry::remoteBallVolume(double absCenter, double rho) const {
  if (!hasRemoteBallRule()) {
    throw DomainError("geometry '" + label() + "' has no remote-ball volume rule");
  }
  return impl_->spec.remoteBallVolume(absCenter, rho);
}

double RadialGeometry::volume(double r) const {
  if (r < 0.0) throw DomainError("volume requires r >= 0");
  if (r == 0.0) return 0.0;
  return impl_->volumeTable(r);
}

double RadialGeometry::inverseDensityIntegral(double rFrom, double rTo) const {
  if (rTo < rFrom) return -inverseDensityIntegral(rTo, rFrom);
  return impl_->invDensityTable(rTo) - impl_->invDensityTable(rFrom);
}

double RadialGeometry::reciprocalVolumeIntegral(double r) const {
  if (r <= 1.0) return 0.0;
  return impl_->bigHTable(r);
}

double bigH(const RadialGeometry& geom, double r) {
  if (r < 0.0) throw DomainError("bigH requires r >= 0");
  return 1.0 + std::max(0.0, geom.reciprocalVolumeIntegral(r));
}

std::vector<double> bigHOnGrid(const RadialGeometry& geom,
                               std::span<const double> radii) {
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) out[i] = bigH(geom, radii[i]);
  return out;
}

double remoteOrAnchoredVolume(const RadialGeometry& geom, double absY, double rho) {
  if (absY <= 1.0) return geom.volume(rho);
  if (rho <= absY) return geom.remoteBallVolume(absY, rho);
  // Continue with the anchored volume, scaled to stay continuous at rho = |y|.
  const double edge = geom.remoteBallVolume(absY, absY);
  return edge * geom.volume(rho) / geom.volume(absY);
}

double hatH(const RadialGeometry& geom, double absY) {
  if (absY < 0.0) throw DomainError("hatH requires |y| >= 0");
  if (absY <= 1.0) return 1.0;
  if (!geom.hasRemoteBallRule()) {
    throw DomainError("hatH needs a remote-ball rule; geometry '" + geom.label() +
                      "' has none");
  }
  QuadratureOptions opt;
  opt.relTol = geom.quadratureTol();
  const double integral = integrateLogSegmented(
      [&geom, absY](double t) {
        return 1.0 / geom.remoteBallVolume(absY, std::sqrt(t));
      },
      1.0, absY * absY, opt);
  return 1.0 + std::max(0.0, integral);
}

ParabolicityReport isParabolic(const RadialGeometry& geom,
                               const ParabolicityOptions& opt) {
  ParabolicityReport report;
  double r = 1.0;
  double partial = 0.0;
  int consecutiveBelow = 0;
  std::vector<double> increments;
  while (2.0 * r <= opt.rMax) {
    const double rNext = 2.0 * r;
    const double inc =
        geom.reciprocalVolumeIntegral(rNext) - geom.reciprocalVolumeIntegral(r);
    partial += inc;
    report.samples.push_back({rNext, partial, inc});
    increments.push_back(inc);
    consecutiveBelow = inc < opt.convergedTol ? consecutiveBelow + 1 : 0;
    if (consecutiveBelow >= 3) {
      report.status = ParabolicityReport::Status::NonParabolic;
      return report;
    }
    r = rNext;
  }
  const std::size_t n = increments.size();
  if (n >= 3 && increments[n - 1] >= opt.divergentFloor &&
      increments[n - 2] >= opt.divergentFloor && increments[n - 3] >= opt.divergentFloor) {
    report.status = ParabolicityReport::Status::Parabolic;
  } else {
    report.status = ParabolicityReport::Status::Undetermined;
  }
  return report;
}

DoublingCheck doublingExponentCheck(const RadialGeometry& geom, double delta,
                                    double sMin, double rMax) {
  if (!(delta >= 0.0)) throw DomainError("doubling check requires delta >= 0");
  if (!(sMin >= 1.0) || !(rMax > sMin)) {
    throw DomainError("doubling check requires 1 <= sMin < rMax");
  }
  const int perDecade = 8;
  const auto grid = logSpacedGrid(sMin, rMax, perDecade);
  std::vector<double> vols(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vols[i] = geom.volume(grid[i]);

  const double rHalf = std::sqrt(sMin * rMax);
  double supHalf = 0.0;
  double supFull = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double ratio =
          vols[j] / (vols[i] * std::pow(grid[j] / grid[i], 2.0 + delta));
      supFull = std::max(supFull, ratio);
      if (grid[j] <= rHalf) supHalf = std::max(supHalf, ratio);
    }
  }
  DoublingCheck check;
  check.worstRatio = supFull;
  check.growthFactor = supHalf > 0.0 ? supFull / supHalf : 0.0;
  check.pass = std::isfinite(supFull) && check.growthFactor <= 1.25;
  return check;
}

}  // namespace parakernel
