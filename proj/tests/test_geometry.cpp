#include <doctest.h>

#include <cmath>

#include "parakernel/geometry.hpp"
#include "parakernel/grid.hpp"
#include "parakernel/quadrature.hpp"

using namespace parakernel;

namespace {

// Closed-form volume of the log-weighted plane:
// 2 pi int_0^r u log(2+u) du = 2 pi (r^2/2 log(2+r) - r^2/4 + r - 2 log((2+r)/2)).
double logPlaneVolumeExact(double r) {
  return 2.0 * M_PI *
         (0.5 * r * r * std::log(2.0 + r) - 0.25 * r * r + r -
          2.0 * std::log(0.5 * (2.0 + r)));
}

struct Band {
  double lo = 1e300, hi = 0.0;
  void add(double v) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  double ratio() const { return hi / lo; }
};

}  // namespace

TEST_CASE("volume: flat plane disc area") {
  const auto plane = RadialGeometry::flatPlane();
  CHECK(plane.volume(1.0) == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(plane.volume(0.0) == 0.0);
}

TEST_CASE("volume: model growth law V ~ r^{beta(N-1)+1}") {
  const auto m = RadialGeometry::model(3, 0.5);
  const double ratio = m.volume(100.0) / m.volume(10.0);
  // beta (N-1) + 1 = 2, so a decade in radius is a factor 100 in volume.
  CHECK(ratio >= 50.0);
  CHECK(ratio <= 200.0);
}

TEST_CASE("volume: log-plane closed form and growth band") {
  const auto lp = RadialGeometry::logPlane();
  for (double r : {0.5, 1.0, 7.0, 123.0, 9000.0}) {
    CHECK(lp.volume(r) == doctest::Approx(logPlaneVolumeExact(r)).epsilon(1e-8));
  }
  Band band;
  for (double r = 1.0; r <= 1.0001e4; r *= 1.3) {
    band.add(lp.volume(r) / (r * r * std::log(2.0 + r)));
  }
  CHECK(band.ratio() <= 1.5);
}

TEST_CASE("volume is strictly increasing and doubling on built-ins") {
  for (const auto& geom :
       {RadialGeometry::flatPlane(), RadialGeometry::logPlane(),
        RadialGeometry::halfCylinder(3), RadialGeometry::model(3, 0.25)}) {
    double prev = 0.0;
    double worstDoubling = 0.0;
    for (double r = 1e-3; r <= 1e6; r *= 2.0) {
      const double v = geom.volume(r);
      CHECK(v > prev);
      prev = v;
      worstDoubling = std::max(worstDoubling, geom.volume(2.0 * r) / v);
    }
    CHECK(worstDoubling < 20.0);
  }
}

TEST_CASE("near-origin regularity: V(r) ~ r^N") {
  for (int n : {2, 3}) {
    const auto geom = RadialGeometry::model(n, 0.5);
    const double ratio = geom.volume(2e-4) / geom.volume(1e-4);
    CHECK(ratio == doctest::Approx(std::pow(2.0, n)).epsilon(0.02));
  }
}

TEST_CASE("bigH: equals 1 below the anchor radius") {
  CHECK(bigH(RadialGeometry::flatPlane(), 0.5) == 1.0);
  CHECK(bigH(RadialGeometry::logPlane(), 0.5) == 1.0);
  CHECK(bigH(RadialGeometry::model(3, 0.25), 1.0) == 1.0);
}

TEST_CASE("bigH: flat-plane closed form 1 + (2/pi) log r") {
  const auto plane = RadialGeometry::flatPlane();
  const double r = std::exp(10.0);
  CHECK(bigH(plane, r) ==
        doctest::Approx(1.0 + 20.0 / M_PI).epsilon(1e-7));
}

TEST_CASE("bigH: half-cylinder grows linearly") {
  const auto hc = RadialGeometry::halfCylinder(3);
  Band band;
  for (double r = 10.0; r <= 1.0001e4; r *= 1.5) {
    band.add(bigH(hc, r) / (2.0 + r));
  }
  CHECK(band.ratio() <= 2.0);
}

TEST_CASE("bigH agrees with the t-variable form (substitution identity)") {
  for (const auto& geom :
       {RadialGeometry::flatPlane(), RadialGeometry::logPlane(),
        RadialGeometry::model(3, 0.5)}) {
    for (double r : {2.0, 10.0, 100.0, 1e3}) {
      QuadratureOptions opt;
      opt.relTol = geom.quadratureTol();
      const double tForm =
          1.0 + std::max(0.0, integrateLogSegmented(
                                  [&](double t) {
                                    return 1.0 / geom.volume(std::sqrt(t));
                                  },
                                  1.0, r * r, opt));
      CHECK(bigH(geom, r) == doctest::Approx(tForm).epsilon(2e-8));
    }
  }
}

TEST_CASE("hatH: equals 1 in the smoothing zone") {
  CHECK(hatH(RadialGeometry::flatPlane(), 0.3) == 1.0);
}

TEST_CASE("hatH: model N=3 beta=1/4 grows like |y|^{1 - beta(N-1)}") {
  const auto m = RadialGeometry::model(3, 0.25);
  Band band;
  for (double y = 10.0; y <= 1.0001e4; y *= 1.5) {
    band.add(hatH(m, y) / std::sqrt(y));
  }
  CHECK(band.ratio() <= 3.0);
}

TEST_CASE("hatH: comparable to bigH on the flat plane") {
  const auto plane = RadialGeometry::flatPlane();
  Band band;
  for (double y = 10.0; y <= 1.0001e4; y *= 1.5) {
    band.add(hatH(plane, y) / bigH(plane, y));
  }
  CHECK(band.ratio() <= 2.0);
}

TEST_CASE("hatH <= C bigH over the test grid for every built-in") {
  for (const auto& geom :
       {RadialGeometry::flatPlane(), RadialGeometry::logPlane(),
        RadialGeometry::halfCylinder(3), RadialGeometry::model(3, 0.25)}) {
    double worst = 0.0;
    for (double y = 2.0; y <= 1.0001e4; y *= 2.0) {
      worst = std::max(worst, hatH(geom, y) / bigH(geom, y));
    }
    CHECK(worst < 50.0);
    CHECK(std::isfinite(worst));
  }
}

TEST_CASE("hatH requires a remote-ball rule") {
  RadialGeometry::Spec spec;
  spec.dimension = 2;
  spec.areaDensity = [](double r) { return 2.0 * M_PI * r; };
  spec.label = "bare";
  const RadialGeometry bare(std::move(spec));
  CHECK_THROWS_AS(hatH(bare, 10.0), DomainError);
}

TEST_CASE("parabolicity of the built-in examples") {
  CHECK(isParabolic(RadialGeometry::flatPlane()).parabolic());
  CHECK(isParabolic(RadialGeometry::logPlane()).parabolic());
  CHECK(isParabolic(RadialGeometry::model(3, 0.9)).nonParabolic());
}

TEST_CASE("model family: parabolic iff beta <= 1/(N-1)") {
  for (double beta : {-0.2, 0.0, 0.25, 0.5, 0.9}) {
    const auto rep = isParabolic(RadialGeometry::model(3, beta));
    if (beta <= 0.5) {
      CHECK(rep.parabolic());
    } else {
      CHECK(rep.nonParabolic());
    }
  }
}

TEST_CASE("parabolicity diagnostic reports the partial integrals") {
  const auto rep = isParabolic(RadialGeometry::flatPlane());
  REQUIRE(rep.samples.size() > 3);
  double prev = 0.0;
  for (const auto& s : rep.samples) {
    CHECK(s.partialIntegral >= prev);
    prev = s.partialIntegral;
  }
}

TEST_CASE("doubling exponent check") {
  const auto check01 = doublingExponentCheck(RadialGeometry::flatPlane(), 0.1);
  CHECK(check01.pass);
  CHECK(check01.worstRatio <= 1.05);
  CHECK(check01.worstRatio >= 0.5);

  for (double delta : {0.1, 0.5, 1.0}) {
    CHECK(doublingExponentCheck(RadialGeometry::model(3, 0.5), delta).pass);
  }

  const auto lp = RadialGeometry::logPlane();
  CHECK(doublingExponentCheck(lp, 0.5).pass);
  CHECK_FALSE(doublingExponentCheck(lp, 0.0).pass);
}

TEST_CASE("volume errors: negative radius rejected, non-finite density named") {
  const auto plane = RadialGeometry::flatPlane();
  CHECK_THROWS_AS(plane.volume(-1.0), DomainError);

  RadialGeometry::Spec spec;
  spec.dimension = 2;
  spec.areaDensity = [](double r) {
    return r > 50.0 ? std::numeric_limits<double>::quiet_NaN() : 2.0 * M_PI * r;
  };
  spec.label = "poisoned";
  CHECK_THROWS_AS(RadialGeometry(std::move(spec)), NumericError);
}

TEST_CASE("model warping satisfies the origin conditions") {
  const auto m = RadialGeometry::model(3, 0.5);
  const Warping* w = m.warping();
  REQUIRE(w != nullptr);
  CHECK(w->psi(1e-9) == doctest::Approx(1e-9).epsilon(1e-6));
  CHECK(w->psiPrime(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  // psi''(0) = 0: the slope change over a tiny interval is quadratically small.
  CHECK(std::fabs(w->psiPrime(1e-4) - w->psiPrime(0.0)) < 1e-6);
}
