#include "parakernel/green_kato.hpp"

#include <algorithm>
#include <cmath>

namespace parakernel {

GreenPoleFunction greenAtPole(const TransformedGeometry& tg,
                              std::span<const double> radii) {
  const auto rep = isParabolic(tg.geometry());
  if (!rep.nonParabolic()) {
    throw DomainError("greenAtPole requires a non-parabolic transform (test "
                      "reported " +
                      std::string(rep.parabolic() ? "parabolic" : "undetermined") +
                      ")");
  }
  std::vector<double> rs(radii.begin(), radii.end());
  if (rs.empty()) throw DomainError("greenAtPole requires at least one radius");
  if (!std::is_sorted(rs.begin(), rs.end())) {
    throw DomainError("greenAtPole radii must be increasing");
  }
  std::vector<double> g(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    g[i] = tg.inverseDensityTail(rs[i]);
  }
  GreenPoleFunction out;
  out.g = GridFunction(std::move(rs), std::move(g));
  out.tailAnchor = tg.profile().h.radii().back();
  return out;
}

GreenEnvelopeValue greenEnvelope(const RadialGeometry& base, double absX,
                                 double absY, double distance) {
  if (absX < 0.0 || absY < 0.0 || distance < 0.0) {
    throw DomainError("greenEnvelope requires nonnegative inputs");
  }
  const double Hx = bigH(base, absX);
  const double Hy = bigH(base, absY);
  const double denom = Hx + Hy;

  GreenEnvelopeValue out;
  out.reciprocalTerm = 1.0 / denom;

  const double upper = std::max({1.0, absX * absX, absY * absY});
  const double lowerLimit = distance * distance;
  if (lowerLimit < upper) {
    QuadratureOptions opt;
    opt.relTol = base.quadratureTol();
    const double integral = integrateLogSegmented(
        [&base, absY](double t) {
          return 1.0 / remoteOrAnchoredVolume(base, absY, std::sqrt(t));
        },
        std::max(lowerLimit, 1e-300), upper, opt);
    out.positivePart = std::max(0.0, integral) / (denom * denom);
  }
  out.value = out.positivePart + out.reciprocalTerm;
  return out;
}

KatoReport katoIntegral(const RadialGeometry& geom, const Potential& W,
                        const KatoOptions& opt) {
  KatoReport report;
  QuadratureOptions qopt;
  qopt.relTol = std::max(geom.quadratureTol(), 1e-9);

  auto integrand = [&geom, &W](double s) {
    const double w = std::fabs(W(s));
    if (w == 0.0) return 0.0;
    return w * (bigH(geom, s) + hatH(geom, s)) * geom.density(s);
  };

  double acc = integrateAdaptive(integrand, 0.0, 1.0, qopt);
  int consecutiveBelow = 0;
  double r = 1.0;
  std::vector<double> relIncrements;
  while (r < opt.rMax) {
    const double rNext = std::min(2.0 * r, opt.rMax);
    const double inc = integrateAdaptive(integrand, r, rNext, qopt);
    acc += inc;
    report.samples.push_back({rNext, acc, inc});
    const double rel = acc > 0.0 ? inc / acc : 0.0;
    relIncrements.push_back(rel);
    consecutiveBelow = rel < opt.convergentTol ? consecutiveBelow + 1 : 0;
    if (consecutiveBelow >= 3) {
      report.verdict = KatoReport::Verdict::Convergent;
      break;
    }
    r = rNext;
  }
  const std::size_t n = relIncrements.size();
  if (report.verdict != KatoReport::Verdict::Convergent) {
    if (n >= 3 && relIncrements[n - 1] >= opt.divergentFloor &&
        relIncrements[n - 2] >= opt.divergentFloor &&
        relIncrements[n - 3] >= opt.divergentFloor) {
      report.verdict = KatoReport::Verdict::Divergent;
    }
  }
  if (n >= 2) {
    const double a = report.samples[n - 2].increment;
    const double b = report.samples[n - 1].increment;
    if (a > 0.0 && b > 0.0) report.tailDecayExponent = -std::log2(b / a);
  }
  return report;
}

GreenBoundEstimate greenBoundNorm(const TransformedGeometry& tg, const Potential& W,
                                  std::span<const double> sampleRadii,
                                  const GreenBoundOptions& opt) {
  const auto kato = katoIntegral(tg.base(), W);
  if (kato.verdict == KatoReport::Verdict::Divergent) {
    throw DomainError("greenBoundNorm requires a convergent Kato integral; the "
                      "report is divergent at R = " +
                      std::to_string(kato.samples.back().radius));
  }
  if (W.isZero()) {
    GreenBoundEstimate zero;
    for (double x : sampleRadii) zero.samples.push_back({x, 0.0, 0.0});
    return zero;
  }

  const RadialGeometry& base = tg.base();
  const RadialGeometry& nu = tg.geometry();

  // Calibrate the c = 1 envelope so it dominates the exact pole Green function.
  GreenBoundEstimate est;
  {
    const auto probe = logSpacedGrid(1e-2, 1e5, opt.calibrationPerDecade);
    const auto pole = greenAtPole(tg, probe);
    double kappa = 1.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double env = greenEnvelope(base, 0.0, probe[i], probe[i]).value;
      if (env > 0.0) kappa = std::max(kappa, pole.g.value(i) / env);
    }
    est.envelopeCalibration = kappa;
  }

  // Doubling constant of the transform over the scanned range.
  {
    double cvd = 0.0;
    for (double r = 1e-2; r <= 1e6; r *= 2.0) {
      cvd = std::max(cvd, nu.volume(2.0 * r) / nu.volume(r));
    }
    est.doublingConstant = cvd;
  }

  QuadratureOptions qopt;
  qopt.relTol = opt.quadTol;
  const double wSupport = W.supportRadius();
  const double integralCap = std::isfinite(wSupport)
                                 ? wSupport
                                 : 1e8;  // power tails are negligible far out

  double worst = 0.0;
  for (double x : sampleRadii) {
    auto integrand = [&](double rho) {
      const double w = std::fabs(W(rho));
      if (w == 0.0) return 0.0;
      const double d = std::fabs(x - rho);  // worst-case angle
      const double env = greenEnvelope(base, x, rho, d).value;
      return w * env * nu.density(rho);
    };
    const double integral =
        est.envelopeCalibration * integrateLogSegmented(integrand, 0.0, integralCap, qopt);

    double localSup = 0.0;
    for (double rho = std::max(0.0, x - 1.0); rho <= x + 1.0; rho += 0.05) {
      localSup = std::max(localSup, std::fabs(W(rho)));
    }
    const double localTerm = est.doublingConstant * localSup;
    est.samples.push_back({x, integral, localTerm});
    worst = std::max(worst, integral + localTerm);
  }
  est.bound = worst;
  return est;
}

double radialOccupationIntegral(const TransformedGeometry& tg, const Potential& W,
                                double x) {
  if (W.isZero()) return 0.0;
  const RadialGeometry& nu = tg.geometry();
  QuadratureOptions qopt;
  qopt.relTol = 1e-7;
  const double support = W.supportRadius();
  const double cap = std::isfinite(support) ? support : 1e8;
  const double floorR = 1e-6;
  auto integrand = [&](double rho) {
    const double w = std::fabs(W(rho));
    if (w == 0.0) return 0.0;
    const double at = std::max({x, rho, floorR});
    return w * tg.inverseDensityTail(at) * nu.density(rho);
  };
  return integrateLogSegmented(integrand, 0.0, cap, qopt);
}

KhasminskiiBound khasminskiiBound(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("khasminskiiBound requires alpha >= 0");
  KhasminskiiBound out;
  if (alpha < 1.0) {
    out.applicable = true;
    out.bound = 1.0 / (1.0 - alpha);
  }
  return out;
}

}  // namespace parakernel
