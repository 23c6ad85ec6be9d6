#include <doctest.h>

#include <cmath>
#include <future>
#include <vector>

#include "parakernel/feynman_kac.hpp"
#include "parakernel/green_kato.hpp"
#include "parakernel/rng.hpp"
#include "parakernel/schrodinger.hpp"

using namespace parakernel;

namespace {

// Hand-rolled generators over a fixed stream keep the cases reproducible.
struct Gen {
  SplitMix64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
  }
  Potential randomPotential() {
    const int kind = static_cast<int>(rng() % 3);
    switch (kind) {
      case 0:
        return Potential::bump(uniform(0.5, 6.0), uniform(0.3, 2.0),
                               uniform(-1.0, 1.0));
      case 1:
        return Potential::powerDecay(uniform(-1.0, 1.0), uniform(2.1, 6.0));
      default:
        return Potential::sum({Potential::bump(uniform(0.5, 4.0), uniform(0.3, 1.5),
                                               uniform(-0.5, 0.5)),
                               Potential::powerDecay(uniform(-0.5, 0.5),
                                                     uniform(2.5, 5.0))});
    }
  }
};

const RadialGeometry& plane() {
  static const RadialGeometry g = RadialGeometry::flatPlane();
  return g;
}

}  // namespace

TEST_CASE("property: potential algebra is pointwise linear") {
  Gen gen(101);
  for (int trial = 0; trial < 30; ++trial) {
    const Potential a = gen.randomPotential();
    const Potential b = gen.randomPotential();
    const double lambda = gen.uniform(-3.0, 3.0);
    const Potential combo = Potential::sum({a, Potential::scaled(lambda, b)});
    for (double r : {0.0, 0.7, 2.3, 5.1, 40.0}) {
      CHECK(combo(r) == doctest::Approx(a(r) + lambda * b(r)).epsilon(1e-12));
      CHECK(std::isfinite(combo(r)));
    }
  }
}

TEST_CASE("property: Kato integral is homogeneous of degree one") {
  Gen gen(202);
  for (int trial = 0; trial < 6; ++trial) {
    Potential w = gen.randomPotential();
    if (w.isZero()) continue;
    const double lambda = gen.uniform(0.1, 5.0);
    KatoOptions opt;
    opt.rMax = 1e6;
    const auto base = katoIntegral(plane(), w, opt);
    const auto scaled = katoIntegral(plane(), Potential::scaled(lambda, w), opt);
    REQUIRE(base.samples.size() == scaled.samples.size());
    for (std::size_t i = 0; i < base.samples.size(); i += 5) {
      CHECK(scaled.samples[i].integral ==
            doctest::Approx(lambda * base.samples[i].integral).epsilon(1e-8));
    }
  }
}

TEST_CASE("property: profile solve is linear in the initial value") {
  Gen gen(303);
  for (int trial = 0; trial < 5; ++trial) {
    const Potential w = Potential::bump(gen.uniform(1.0, 4.0), gen.uniform(0.4, 1.5),
                                        gen.uniform(0.05, 0.6));
    ProfileOptions opt;
    opt.rMax = 1e4;
    const double lambda = gen.uniform(0.2, 4.0);
    const Profile base = solveProfileIVP(plane(), w, opt);
    opt.h0 = lambda;
    const Profile scaled = solveProfileIVP(plane(), w, opt);
    for (std::size_t i = 0; i < base.h.size(); i += 97) {
      CHECK(scaled.h.value(i) ==
            doctest::Approx(lambda * base.h.value(i)).epsilon(1e-8));
    }
  }
}

TEST_CASE("property: volumes stay positive, increasing and doubling for random"
          " model geometries") {
  Gen gen(404);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(gen.rng() % 3);
    const double betaMax = 1.0 / (n - 1);
    const double beta = gen.uniform(-0.4 * betaMax, betaMax);
    const auto geom = RadialGeometry::model(n, beta);
    double prev = 0.0;
    for (double r = 1e-2; r <= 1e6; r *= 3.7) {
      const double v = geom.volume(r);
      CHECK(v > prev);
      CHECK(geom.volume(2.0 * r) <= 2.5 * std::pow(2.0, n) * v);
      prev = v;
    }
    CHECK(isParabolic(geom).parabolic());
  }
}

TEST_CASE("property: interpolants reproduce nodes and preserve monotone data") {
  Gen gen(505);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs(12), ys(12);
    double x = 0.0, y = gen.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x += gen.uniform(0.1, 2.0);
      y += gen.uniform(0.0, 1.0);  // nondecreasing
      xs[i] = x;
      ys[i] = y;
    }
    const CubicInterpolant interp(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(interp(xs[i]) == doctest::Approx(ys[i]).epsilon(1e-12));
    }
    double prev = interp(xs.front());
    for (double t = xs.front(); t <= xs.back(); t += 0.05) {
      const double v = interp(t);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("property: big-H grid evaluation matches pointwise evaluation") {
  const auto radii = logSpacedGrid(0.5, 1e5, 8);
  const auto grid = bigHOnGrid(plane(), radii);
  REQUIRE(grid.size() == radii.size());
  for (std::size_t i = 0; i < radii.size(); i += 7) {
    CHECK(grid[i] == doctest::Approx(bigH(plane(), radii[i])).epsilon(1e-12));
  }
}

TEST_CASE("property: geometry evaluation is stable under concurrent use") {
  const auto geom = RadialGeometry::logPlane();
  auto worker = [&geom](int lane) {
    double acc = 0.0;
    for (double r = 1.0 + lane; r < 1e5; r *= 2.3) {
      acc += bigH(geom, r) + geom.volume(r) + hatH(geom, r);
    }
    return acc;
  };
  std::vector<double> serial(4);
  for (int lane = 0; lane < 4; ++lane) serial[lane] = worker(lane);
  std::vector<std::future<double>> tasks;
  for (int lane = 0; lane < 4; ++lane) {
    tasks.push_back(std::async(std::launch::async, worker, lane));
  }
  for (int lane = 0; lane < 4; ++lane) {
    CHECK(tasks[lane].get() == serial[lane]);
  }
}

TEST_CASE("property: per-path streams are independent of ensemble size") {
  const Potential q = Potential::bump(2.0, 1.0, 0.25);
  const TransformedGeometry tg = hTransform(plane(), q, solveProfileIVP(plane(), q));
  PathSimOptions small;
  small.horizon = 10.0;
  small.dt = 0.05;
  small.pathCount = 64;
  small.seed = 99;
  PathSimOptions large = small;
  large.pathCount = 256;
  const auto a = simulatePaths(tg, q, 0.0, small);
  const auto b = simulatePaths(tg, q, 0.0, large);
  for (int i = 0; i < small.pathCount; ++i) {
    CHECK(a.finalRadius[i] == b.finalRadius[i]);
    CHECK(a.potentialIntegral[i] == b.potentialIntegral[i]);
  }
}
