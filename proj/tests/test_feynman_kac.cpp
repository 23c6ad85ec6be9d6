#include <doctest.h>

#include <cmath>

#include "parakernel/feynman_kac.hpp"

using namespace parakernel;

namespace {

const RadialGeometry& plane() {
  static const RadialGeometry g = RadialGeometry::flatPlane();
  return g;
}

const Potential& canonicalQ() {
  static const Potential q = Potential::bump(2.0, 1.0, 0.25);
  return q;
}

const TransformedGeometry& planeTransform() {
  static const TransformedGeometry tg =
      hTransform(plane(), canonicalQ(), solveProfileIVP(plane(), canonicalQ()));
  return tg;
}

PathSimOptions quickOptions() {
  PathSimOptions opt;
  opt.horizon = 20.0;
  opt.dt = 5e-3;
  opt.pathCount = 2000;
  opt.seed = 7;
  return opt;
}

}  // namespace

TEST_CASE("zero potential: gauge is exactly one with zero variance") {
  const auto ens = simulatePaths(planeTransform(), Potential(), 0.0, quickOptions());
  const auto gauge = gaugeEstimate(ens, Potential());
  CHECK(gauge.mean == 1.0);
  CHECK(gauge.standardError == 0.0);
  const auto occ = occupationNorm(ens, Potential());
  CHECK(occ.mean == 0.0);
  for (double a : ens.potentialIntegral) CHECK(a == 0.0);
}

TEST_CASE("identical seeds reproduce accumulators bit for bit") {
  const auto w = Potential::bump(2.0, 1.0, 0.2);
  const auto e1 = simulatePaths(planeTransform(), w, 0.0, quickOptions());
  const auto e2 = simulatePaths(planeTransform(), w, 0.0, quickOptions());
  REQUIRE(e1.potentialIntegral.size() == e2.potentialIntegral.size());
  for (std::size_t i = 0; i < e1.potentialIntegral.size(); ++i) {
    CHECK(e1.potentialIntegral[i] == e2.potentialIntegral[i]);
    CHECK(e1.finalRadius[i] == e2.finalRadius[i]);
  }
  PathSimOptions other = quickOptions();
  other.seed = 8;
  const auto e3 = simulatePaths(planeTransform(), w, 0.0, other);
  CHECK(e3.potentialIntegral != e1.potentialIntegral);
}

TEST_CASE("transience: returns below the start radius thin out with the horizon") {
  const double x0 = 10.0;
  double previous = 1.0;
  for (double T : {100.0, 1000.0, 10000.0}) {
    PathSimOptions opt;
    opt.horizon = T;
    opt.dt = T / 20000.0;
    opt.pathCount = 3000;
    opt.seed = 11;
    const auto ens = simulatePaths(planeTransform(), Potential(), x0, opt);
    double below = 0.0;
    for (double r : ens.finalRadius) {
      if (r < x0) below += 1.0;
    }
    const double frac = below / ens.finalRadius.size();
    const double se = std::sqrt(frac * (1.0 - frac) / ens.finalRadius.size());
    CHECK(frac <= previous + 2.0 * se);
    previous = frac;
  }
}

TEST_CASE("gauge bounds follow the potential sign") {
  const auto wPos = Potential::bump(2.0, 1.0, 0.2);
  const auto ensP = simulatePaths(planeTransform(), wPos, 0.0, quickOptions());
  const auto gaugeP = gaugeEstimate(ensP, wPos);
  CHECK(gaugeP.mean <= 1.0);

  const auto wNeg = Potential::scaled(-0.05, wPos);
  const auto ensN = simulatePaths(planeTransform(), wNeg, 0.0, quickOptions());
  const auto gaugeN = gaugeEstimate(ensN, wNeg);
  CHECK(gaugeN.mean >= 1.0);
}

TEST_CASE("Jensen: gauge dominates exp(-occupation) for nonnegative W") {
  const auto w = Potential::bump(2.0, 1.0, 0.3);
  const auto ens = simulatePaths(planeTransform(), w, 0.0, quickOptions());
  const auto gauge = gaugeEstimate(ens, w);
  const auto occ = occupationNorm(ens, w);
  CHECK(gauge.mean >= std::exp(-occ.mean) - 1e-12);
}

TEST_CASE("occupation norm is exactly linear in the coupling") {
  const auto w = Potential::bump(2.0, 1.0, 0.2);
  const auto ens = simulatePaths(planeTransform(), w, 0.0, quickOptions());
  const auto occ1 = occupationNorm(ens, w);
  const auto occ2 = occupationNorm(ens, Potential::scaled(2.0, w));
  CHECK(occ2.mean == doctest::Approx(2.0 * occ1.mean).epsilon(1e-14));
}

TEST_CASE("ensemble accumulators only serve matching potentials") {
  const auto w = Potential::bump(2.0, 1.0, 0.2);
  const auto ens = simulatePaths(planeTransform(), w, 0.0, quickOptions());
  CHECK_NOTHROW(gaugeEstimate(ens, Potential::scaled(-1.0, w)));
  CHECK_THROWS_AS(gaugeEstimate(ens, Potential::bump(4.0, 1.0, 0.2)), DomainError);
}

TEST_CASE("precondition failures") {
  PathSimOptions opt = quickOptions();
  opt.dt = opt.horizon;  // violates dt <= T/100
  CHECK_THROWS_AS(simulatePaths(planeTransform(), Potential(), 0.0, opt),
                  DomainError);

  // A parabolic transform (trivial profile) is rejected.
  const auto trivial =
      hTransform(plane(), Potential(), solveProfileIVP(plane(), Potential()));
  CHECK_THROWS_AS(simulatePaths(trivial, Potential(), 0.0, quickOptions()),
                  DomainError);
}

TEST_CASE("gauge and occupation agree with their quadrature oracles"
          * doctest::timeout(300)) {
  // W = bump family difference on the transform of the plane.
  const auto w = Potential::bump(2.0, 1.0, 0.2);
  PathSimOptions opt;
  opt.horizon = 400.0;
  opt.dt = 2e-3;
  opt.pathCount = 20000;
  opt.seed = 2024;
  const auto ens = simulatePaths(planeTransform(), w, 0.0, opt);

  const auto gauge = gaugeEstimate(ens, w);
  const auto gODE = solveProfileIVP(planeTransform().geometry(), w);
  const double oracle = gODE.h.front() / limitAtInfinity(planeTransform(), gODE);
  CHECK(std::fabs(gauge.mean - oracle) <=
        3.0 * gauge.standardError + gauge.truncationBound);

  const auto occ = occupationNorm(ens, w);
  const double occOracle = radialOccupationIntegral(planeTransform(), w, 0.0);
  CHECK(std::fabs(occ.mean - occOracle) <=
        3.0 * occ.standardError + occ.truncationBound + 0.10 * occOracle);
  // The finite horizon can only lose occupation.
  CHECK(occ.mean <= occOracle + 3.0 * occ.standardError);
}
