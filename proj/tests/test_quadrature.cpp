#include <doctest.h>

#include <cmath>
#include <limits>

#include "parakernel/quadrature.hpp"

using namespace parakernel;

TEST_CASE("adaptive quadrature on polynomials and transcendentals") {
  CHECK(integrateAdaptive([](double s) { return 2.0 * M_PI * s; }, 0.0, 1.0) ==
        doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(integrateAdaptive([](double s) { return std::exp(-s); }, 0.0, 30.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("log-segmented quadrature spans many decades") {
  const double v = integrateLogSegmented([](double s) { return 1.0 / s; }, 1.0,
                                         std::exp(1.0));
  CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  const double tail = integrateLogSegmented(
      [](double s) { return 1.0 / (s * s); }, 1.0, 1e12);
  CHECK(tail == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("non-finite integrand raises a NumericError naming the radius") {
  CHECK_THROWS_AS(integrateAdaptive(
                      [](double s) {
                        return s > 0.3 ? std::numeric_limits<double>::quiet_NaN()
                                       : 1.0;
                      },
                      0.0, 1.0),
                  NumericError);
}

TEST_CASE("cumulative table matches direct adaptive integration") {
  auto f = [](double s) { return s * std::exp(-s / 50.0); };
  const auto table = CumulativeTable::build(f, 1.0 / 1024.0, 1e6, true);
  for (double r : {1e-4, 0.5, 3.0, 171.0, 4096.0}) {
    const double direct = integrateLogSegmented(f, 0.0, r);
    CHECK(table(r) == doctest::Approx(direct).epsilon(1e-7));
  }
}

TEST_CASE("anchored cumulative table rejects queries below the anchor") {
  const auto table =
      CumulativeTable::build([](double s) { return 1.0 / s; }, 1.0, 1e6, false);
  CHECK(table(1024.0) == doctest::Approx(std::log(1024.0)).epsilon(1e-9));
  CHECK_THROWS_AS(table(0.5), NumericError);
}
