#include <doctest.h>

#include <cmath>

#include "parakernel/green_kato.hpp"
#include "parakernel/heat.hpp"

using namespace parakernel;

namespace {

const RadialGeometry& plane() {
  static const RadialGeometry g = RadialGeometry::flatPlane();
  return g;
}

const TransformedGeometry& planeTransform() {
  static const TransformedGeometry tg = [] {
    const Potential q = Potential::bump(2.0, 1.0, 0.25);
    return hTransform(plane(), q, solveProfileIVP(plane(), q));
  }();
  return tg;
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

TEST_CASE("greenAtPole: G H stays in a band and G is strictly decreasing") {
  const auto radii = logSpacedGrid(10.0, 1e3, 16);
  const auto green = greenAtPole(planeTransform(), radii);
  Band band;
  for (std::size_t i = 0; i < green.g.size(); ++i) {
    band.add(green.g.value(i) * bigH(plane(), green.g.radius(i)));
    if (i) CHECK(green.g.value(i) < green.g.value(i - 1));
  }
  CHECK(band.ratio() <= 2.0);
}

TEST_CASE("greenAtPole: G(2r) < G(r) across scales") {
  const auto radii = logSpacedGrid(0.5, 2e3, 4);
  const auto green = greenAtPole(planeTransform(), radii);
  for (double r : {1.0, 4.0, 32.0, 500.0}) {
    const double g1 = planeTransform().inverseDensityTail(r);
    const double g2 = planeTransform().inverseDensityTail(2.0 * r);
    CHECK(g2 < g1);
  }
  CHECK(green.g.size() == radii.size());
}

TEST_CASE("greenAtPole satisfies the flux law m_nu G' = -1") {
  const auto& tg = planeTransform();
  for (double r : {2.0, 17.0, 230.0}) {
    const double dr = 1e-4 * r;
    const double dG = (tg.inverseDensityTail(r + dr) -
                       tg.inverseDensityTail(r - dr)) /
                      (2.0 * dr);
    CHECK(-tg.geometry().density(r) * dG == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("greenAtPole rejects parabolic transforms") {
  const auto p = solveProfileIVP(plane(), Potential());
  const auto trivial = hTransform(plane(), Potential(), p);
  const auto radii = logSpacedGrid(1.0, 10.0, 4);
  CHECK_THROWS_AS(greenAtPole(trivial, radii), DomainError);
}

TEST_CASE("greenAtPole cross-checks against the time-integrated kernel") {
  const auto& tg = planeTransform();
  HeatRunConfig cfg;
  cfg.rMin = 0.05;
  cfg.rMax = 150.0;
  cfg.perDecade = 48;
  cfg.tMax = 500.0;
  cfg.accuracyGuardMultiple = 24.0;
  cfg.recordCount = 97;
  cfg.recordTMin = 1e-2;
  const auto kernel = heatKernelAtPole(tg.geometry(), Potential(), cfg);

  // The radial diffusion is Markov in the radius, so the truncated time
  // integral closes exactly with the final-slice occupation identity.
  std::vector<double> cellMass(kernel.radii.size());
  {
    const auto& nodes = kernel.radii;
    std::vector<double> faces(nodes.size() + 1);
    faces[0] = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      faces[i] = std::sqrt(nodes[i - 1] * nodes[i]);
    }
    faces[nodes.size()] = cfg.rMax;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cellMass[i] =
          tg.geometry().volume(faces[i + 1]) - tg.geometry().volume(faces[i]);
    }
  }

  for (double r : {5.0, 10.0}) {
    std::size_t ri = 0;
    while (kernel.radii[ri] < r) ++ri;
    double integral = 0.0;
    for (std::size_t ti = 1; ti < kernel.times.size(); ++ti) {
      integral += 0.5 * (kernel.values[ti][ri] + kernel.values[ti - 1][ri]) *
                  (kernel.times[ti] - kernel.times[ti - 1]);
    }
    double tail = 0.0;
    const auto& last = kernel.values.back();
    for (std::size_t i = 0; i < kernel.radii.size(); ++i) {
      if (last[i] <= 0.0) continue;
      tail += last[i] *
              tg.inverseDensityTail(std::max(kernel.radii[i], kernel.radii[ri])) *
              cellMass[i];
    }
    const double route = integral + tail;
    const double exact = tg.inverseDensityTail(kernel.radii[ri]);
    CHECK(route == doctest::Approx(exact).epsilon(0.10));
  }
}

TEST_CASE("greenEnvelope: anchored case with the positive part vanishing") {
  const auto env = greenEnvelope(plane(), 0.0, 0.0, 2.0);
  CHECK(env.positivePart == 0.0);
  CHECK(env.value == doctest::Approx(0.5));
  CHECK(env.lower() == env.upper());  // constants are 1; the band is the caller's
}

TEST_CASE("greenEnvelope tracks the exact pole Green function") {
  const auto& tg = planeTransform();
  Band band;
  for (double d = 2.0; d <= 1.0001e3; d *= 1.6) {
    const double env = greenEnvelope(plane(), 0.0, d, d).value;
    band.add(env / tg.inverseDensityTail(d));
  }
  CHECK(band.ratio() <= 3.0);
  CHECK(std::isfinite(band.hi));
}

TEST_CASE("greenEnvelope decays like 1/H on the far diagonal") {
  Band band;
  for (double R = 10.0; R <= 1.0001e3; R *= 2.0) {
    band.add(greenEnvelope(plane(), R, R, R).value * bigH(plane(), R));
  }
  CHECK(band.ratio() <= 1.5);
}

TEST_CASE("katoIntegral: power decay p = 2.5 converges") {
  KatoOptions opt;
  opt.rMax = 1e12;
  const auto report = katoIntegral(plane(), Potential::powerDecay(1.0, 2.5), opt);
  CHECK(report.verdict == KatoReport::Verdict::Convergent);
}

TEST_CASE("katoIntegral: power decay p = 2 diverges like log^2 R") {
  KatoOptions opt;
  opt.rMax = 1e12;
  const auto report = katoIntegral(plane(), Potential::powerDecay(1.0, 2.0), opt);
  CHECK(report.verdict == KatoReport::Verdict::Divergent);

  // sqrt I vs log R should be a straight line (R^2 >= 0.98) past the core.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, n = 0;
  for (const auto& s : report.samples) {
    if (s.radius < 1e3) continue;
    const double x = std::log(s.radius);
    const double y = std::sqrt(s.integral);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y; n += 1;
  }
  REQUIRE(n > 5);
  const double cov = n * sxy - sx * sy;
  const double r2 = cov * cov / ((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(r2 >= 0.98);
}

TEST_CASE("katoIntegral: compact support converges with constant tail") {
  const auto report = katoIntegral(plane(), Potential::bump(2.0, 1.0, 1.0));
  CHECK(report.verdict == KatoReport::Verdict::Convergent);
  for (const auto& s : report.samples) {
    if (s.radius >= 8.0) CHECK(s.increment == 0.0);
  }
}

TEST_CASE("katoIntegral: I is nondecreasing and exactly linear in the coupling") {
  const auto w = Potential::powerDecay(1.0, 3.0);
  const auto r1 = katoIntegral(plane(), w);
  const auto r3 = katoIntegral(plane(), Potential::scaled(3.0, w));
  double prev = 0.0;
  for (std::size_t i = 0; i < r1.samples.size(); ++i) {
    CHECK(r1.samples[i].integral >= prev);
    prev = r1.samples[i].integral;
    CHECK(r3.samples[i].integral ==
          doctest::Approx(3.0 * r1.samples[i].integral).epsilon(1e-9));
  }
}

TEST_CASE("greenBoundNorm: zero potential, linearity, and domination") {
  const auto& tg = planeTransform();
  const std::vector<double> samples = {0.0, 1.0, 3.0, 10.0};

  const auto zero = greenBoundNorm(tg, Potential(), samples);
  CHECK(zero.bound == 0.0);

  const auto w = Potential::bump(2.0, 1.0, 0.1);
  const auto e1 = greenBoundNorm(tg, w, samples);
  const auto e2 = greenBoundNorm(tg, Potential::scaled(2.0, w), samples);
  CHECK(e2.bound == doctest::Approx(2.0 * e1.bound).epsilon(1e-9));

  // Upper bound by construction: dominates the exact pole integral.
  const double exactAtPole = radialOccupationIntegral(tg, w, 0.0);
  CHECK(e1.samples.front().integral >= exactAtPole);
}

TEST_CASE("greenBoundNorm: power tail is finite and stable under refinement") {
  const auto& tg = planeTransform();
  const std::vector<double> samples = {0.0, 2.0, 8.0};
  const auto w = Potential::powerDecay(1.0, 4.0);
  GreenBoundOptions coarseOpt;
  coarseOpt.quadTol = 1e-5;
  coarseOpt.calibrationPerDecade = 4;
  GreenBoundOptions fineOpt;
  fineOpt.quadTol = 1e-9;
  fineOpt.calibrationPerDecade = 16;
  const auto coarse = greenBoundNorm(tg, w, samples, coarseOpt);
  const auto fine = greenBoundNorm(tg, w, samples, fineOpt);
  CHECK(std::isfinite(coarse.bound));
  CHECK(coarse.bound > 0.0);
  CHECK(std::fabs(coarse.bound - fine.bound) <= 0.20 * fine.bound);
}

TEST_CASE("greenBoundNorm requires a convergent Kato integral") {
  const auto& tg = planeTransform();
  const std::vector<double> samples = {0.0};
  CHECK_THROWS_AS(greenBoundNorm(tg, Potential::powerDecay(1.0, 2.0), samples),
                  DomainError);
}

TEST_CASE("radialOccupationIntegral decreases in the start radius") {
  const auto& tg = planeTransform();
  const auto w = Potential::bump(2.0, 1.0, 0.2);
  const double at0 = radialOccupationIntegral(tg, w, 0.0);
  const double at10 = radialOccupationIntegral(tg, w, 10.0);
  const double at100 = radialOccupationIntegral(tg, w, 100.0);
  CHECK(at0 > at10);
  CHECK(at10 > at100);
  CHECK(radialOccupationIntegral(tg, Potential(), 0.0) == 0.0);
}

TEST_CASE("khasminskiiBound") {
  CHECK(khasminskiiBound(0.0).bound == doctest::Approx(1.0));
  CHECK(khasminskiiBound(0.5).bound == doctest::Approx(2.0));
  CHECK(khasminskiiBound(0.5).applicable);
  CHECK_FALSE(khasminskiiBound(1.2).applicable);
  CHECK_THROWS_AS(khasminskiiBound(-0.1), DomainError);
}
