#include "parakernel/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parakernel {

const char* criticalityName(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "Subcritical";
    case Criticality::Critical: return "Critical";
    case Criticality::Supercritical: return "Supercritical";
    default: return "Undetermined";
  }
}

namespace {

struct State {
  double h;
  double a;  // flux m h'
};

struct Deriv {
  double dh;
  double da;
};

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kB4[7] = {5179.0 / 57600, 0,  7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

class ProfileStepper {
 public:
  ProfileStepper(const RadialGeometry& geom, const Potential& W)
      : geom_(geom), w_(W) {}

  Deriv eval(double r, const State& y) const {
    const double m = geom_.density(r);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw NumericError("non-positive density at radius " + std::to_string(r));
    }
    return {y.a / m, w_(r) * m * y.h};
  }

  // One adaptive step from r with suggested size dr (clipped to rEnd).
  // Returns the accepted step size; updates r, y, and the error-based proposal.
  double step(double& r, State& y, double& drProposal, double rEnd, double tol,
              double hScale, double aScale) {
    double dr = std::min(drProposal, rEnd - r);
    for (int attempt = 0; attempt < 60; ++attempt) {
      Deriv k[7];
      k[0] = eval(r, y);
      State stage;
      for (int s = 1; s < 7; ++s) {
        double dh = 0.0, da = 0.0;
        for (int j = 0; j < s; ++j) {
          dh += kA[s][j] * k[j].dh;
          da += kA[s][j] * k[j].da;
        }
        stage = {y.h + dr * dh, y.a + dr * da};
        k[s] = eval(r + kC[s] * dr, stage);
      }
      // Stage 7 already used the 5th-order weights: stage is the new state.
      State y5 = stage;
      double h4 = y.h, a4 = y.a;
      for (int j = 0; j < 7; ++j) {
        h4 += dr * kB4[j] * k[j].dh;
        a4 += dr * kB4[j] * k[j].da;
      }
      const double errH = std::fabs(y5.h - h4) / (tol * std::max(std::fabs(y5.h), hScale));
      const double errA = std::fabs(y5.a - a4) / (tol * std::max(std::fabs(y5.a), aScale));
      const double err = std::max(errH, errA);
      if (err <= 1.0 || dr <= 1e-14 * std::max(r, 1.0)) {
        if (dr <= 1e-14 * std::max(r, 1.0) && err > 4.0) {
          throw NumericError("step-size underflow near radius " + std::to_string(r));
        }
        r += dr;
        y = y5;
        const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        drProposal = dr * std::clamp(grow, 0.2, 5.0);
        return dr;
      }
      dr *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
    }
    throw NumericError("profile stepper failed to converge near radius " +
                       std::to_string(r));
  }

 private:
  const RadialGeometry& geom_;
  const Potential& w_;
};

// Cubic Hermite root refinement for the node radius inside [r0, r1].
double refineNode(double r0, const State& y0, const Deriv& d0, double r1,
                  const State& y1, const Deriv& d1) {
  const double span = r1 - r0;
  auto hermite = [&](double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0.h + (t3 - 2 * t2 + t) * span * d0.dh +
           (-2 * t3 + 3 * t2) * y1.h + (t3 - t2) * span * d1.dh;
  };
  double lo = 0.0, hi = 1.0;
  double flo = y0.h;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = hermite(mid);
    if (flo * fmid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
    const double rMid = r0 + mid * span;
    if ((hi - lo) * span <= 1e-10 * rMid) break;
  }
  return r0 + 0.5 * (lo + hi) * span;
}

double normalizedResidual(const RadialGeometry& geom, const Potential& W,
                          const GridFunction& h) {
  if (h.size() < 3) return 0.0;
  const auto& r = h.radii();
  const auto& v = h.values();
  const std::size_t n = r.size();
  std::vector<double> resid(n, 0.0), scale(n, 0.0);
  double globalScale = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double fR = 0.5 * (r[i] + r[i + 1]);
    const double fL = 0.5 * (r[i - 1] + r[i]);
    const double FR = geom.density(fR) * (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
    const double FL = geom.density(fL) * (v[i] - v[i - 1]) / (r[i] - r[i - 1]);
    const double mi = geom.density(r[i]);
    const double span = fR - fL;
    const double fluxTerm = (FR - FL) / (span * mi);
    const double wTerm = W(r[i]) * v[i];
    resid[i] = -fluxTerm + wTerm;
    scale[i] = (std::fabs(FR) + std::fabs(FL)) / (span * mi) + std::fabs(wTerm);
    globalScale = std::max(globalScale, scale[i]);
  }
  // Residual relative to the operator's sup scale over the grid: nodewise
  // relative measures degenerate where both flux terms vanish.
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    worst = std::max(worst, std::fabs(resid[i]));
  }
  return worst / (globalScale + 1e-300);
}

}  // namespace

Profile solveProfileIVP(const RadialGeometry& geom, const Potential& W,
                        const ProfileOptions& opt) {
  if (!(opt.rMax > 1.0)) throw DomainError("profile solve requires rMax > 1");
  if (!(opt.tol > 0.0)) throw DomainError("profile solve requires tol > 0");
  const double stepTol = std::min(opt.stepTol, 0.01 * opt.tol);

  const auto grid = logSpacedGrid(opt.r0, opt.rMax, opt.perDecade);
  std::vector<double> radiiOut, hOut, aOut;
  radiiOut.reserve(grid.size());
  hOut.reserve(grid.size());
  aOut.reserve(grid.size());

  ProfileStepper stepper(geom, W);
  double r = opt.r0;
  State y{opt.h0, W(0.0) * geom.volume(opt.r0) * opt.h0};
  double hScale = std::fabs(opt.h0);
  double aScale = std::max(std::fabs(y.a), 1e-12 * std::fabs(opt.h0));
  double drProposal = 0.1 * opt.r0;

  Profile out;
  out.tag = Criticality::Undetermined;

  radiiOut.push_back(r);
  hOut.push_back(y.h);
  aOut.push_back(y.a);

  bool nodeFound = false;
  for (std::size_t gi = 1; gi < grid.size() && !nodeFound; ++gi) {
    const double target = grid[gi];
    while (target - r > 1e-14 * target) {
      const double rPrev = r;
      const State yPrev = y;
      const Deriv dPrev = stepper.eval(r, y);
      stepper.step(r, y, drProposal, target, stepTol, hScale, aScale);
      hScale = std::max(hScale, std::fabs(y.h));
      aScale = std::max(aScale, std::fabs(y.a));
      if (yPrev.h > 0.0 && y.h <= 0.0) {
        const Deriv dNow = stepper.eval(r, y);
        out.nodeRadius = refineNode(rPrev, yPrev, dPrev, r, y, dNow);
        out.tag = Criticality::Supercritical;
        nodeFound = true;
        break;
      }
    }
    if (!nodeFound) {
      radiiOut.push_back(target);
      hOut.push_back(y.h);
      aOut.push_back(y.a);
      r = target;
    }
  }

  out.h = GridFunction(radiiOut, hOut);
  out.flux = GridFunction(radiiOut, aOut);
  out.terminalFlux = aOut.back();
  out.fluxScale = aScale;
  out.residualNorm = normalizedResidual(geom, W, out.h);
  return out;
}

GridFunction applyOperator(const RadialGeometry& geom, const Potential& W,
                           const GridFunction& h) {
  if (h.size() < 3) throw DomainError("applyOperator needs at least 3 nodes");
  const auto& r = h.radii();
  const auto& v = h.values();
  std::vector<double> out(r.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double fR = 0.5 * (r[i] + r[i + 1]);
    const double fL = 0.5 * (r[i - 1] + r[i]);
    const double FR = geom.density(fR) * (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
    const double FL = geom.density(fL) * (v[i] - v[i - 1]) / (r[i] - r[i - 1]);
    out[i] = -(FR - FL) / ((fR - fL) * geom.density(r[i])) + W(r[i]) * v[i];
  }
  return GridFunction(r, out);
}

namespace {

// Projected node of the constant-flux continuation
// h(r) = h(R) + a * int_R^r ds/m beyond the solve horizon. Returns +inf when
// the crossing lies past the geometry's table horizon.
double extrapolatedNode(const RadialGeometry& geom, double rEnd, double hEnd,
                        double flux) {
  const double needed = hEnd / -flux;  // int_R^r ds/m at the crossing
  double lo = rEnd, hi = rEnd;
  for (int i = 0; i < 60; ++i) {
    hi = std::min(2.0 * hi, 1e15);
    if (geom.inverseDensityIntegral(rEnd, hi) >= needed) break;
    lo = hi;
    if (hi >= 1e15) return std::numeric_limits<double>::infinity();
  }
  if (geom.inverseDensityIntegral(rEnd, hi) < needed) {
    return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 100 && hi - lo > 1e-10 * lo; ++i) {
    const double mid = std::sqrt(lo * hi);
    (geom.inverseDensityIntegral(rEnd, mid) < needed ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Classification classify(const RadialGeometry& geom, const Potential& W,
                        const ClassifyOptions& opt) {
  if (opt.requireParabolicBase) {
    const auto rep = isParabolic(geom);
    if (!rep.parabolic()) {
      throw DomainError(
          "classification requires a parabolic base geometry (test reported " +
          std::string(rep.nonParabolic() ? "non-parabolic" : "undetermined") + ")");
    }
  }
  const Profile p = solveProfileIVP(geom, W, opt.profile);

  Classification cls;
  cls.terminalFlux = p.terminalFlux;
  cls.fluxScale = p.fluxScale;

  if (p.tag == Criticality::Supercritical) {
    cls.tag = Criticality::Supercritical;
    cls.nodeRadius = p.nodeRadius;
    return cls;
  }

  const double threshold = opt.fluxThreshold * (1.0 + p.fluxScale);
  const auto& radii = p.h.radii();
  const auto& values = p.h.values();

  // Growth diagnostic: sup |h| over the last decade vs the first decade.
  double firstSup = 0.0, lastSup = 0.0;
  const double firstEdge = radii.front() * 10.0;
  const double lastEdge = radii.back() / 10.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] <= firstEdge) firstSup = std::max(firstSup, std::fabs(values[i]));
    if (radii[i] >= lastEdge) lastSup = std::max(lastSup, std::fabs(values[i]));
  }
  cls.growthRatio = firstSup > 0.0 ? lastSup / firstSup : 0.0;

  // Least-squares fit h ~ alpha + beta H over the last decade.
  {
    double s11 = 0, s1H = 0, sHH = 0, s1y = 0, sHy = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (radii[i] < lastEdge) continue;
      const double H = bigH(geom, radii[i]);
      s11 += 1.0;
      s1H += H;
      sHH += H * H;
      s1y += values[i];
      sHy += H * values[i];
    }
    const double det = s11 * sHH - s1H * s1H;
    if (std::fabs(det) > 1e-12 * (s11 * sHH + 1.0)) {
      cls.fitConstCoeff = (s1y * sHH - sHy * s1H) / det;
      cls.fitBigHCoeff = (s11 * sHy - s1H * s1y) / det;
    }
  }

  if (p.terminalFlux < -threshold) {
    // Negative terminal flux on a parabolic base forces a node beyond the
    // horizon: h(r) = h(R) - |a| int_R^r ds/m crosses zero since the integral
    // diverges.
    cls.tag = Criticality::Supercritical;
    cls.nodeExtrapolated = true;
    cls.nodeRadius =
        extrapolatedNode(geom, radii.back(), values.back(), p.terminalFlux);
    return cls;
  }
  if (p.terminalFlux > threshold) {
    cls.tag = Criticality::Subcritical;
    return cls;
  }
  if (cls.growthRatio < opt.growthThreshold) {
    cls.tag = Criticality::Critical;
    return cls;
  }
  cls.tag = Criticality::Undetermined;
  return cls;
}

namespace {

Potential couplingFamily(const Potential& W1, const Potential& W2,
                         const Potential& q, double c) {
  return Potential::sum(
      {W1, Potential::scaled(-c, W2), Potential::scaled(c, q)});
}

Classification classifyWithRetries(const RadialGeometry& geom, const Potential& W,
                                   const ClassifyOptions& base, int retries) {
  ClassifyOptions opt = base;
  opt.requireParabolicBase = false;  // checked once by the caller
  Classification cls = classify(geom, W, opt);
  for (int i = 0; i < retries && cls.tag == Criticality::Undetermined; ++i) {
    opt.profile.rMax *= 10.0;
    cls = classify(geom, W, opt);
  }
  return cls;
}

}  // namespace

CouplingResult criticalCoupling(const RadialGeometry& geom, const Potential& W1,
                                const Potential& W2, const Potential& q,
                                double cLo, double cHi,
                                const CouplingOptions& opt) {
  if (!(cLo < cHi)) throw DomainError("coupling bracket requires cLo < cHi");

  // W2 - q must differ from zero somewhere on the grid.
  {
    bool differs = false;
    for (double r = 0.0; r <= 64.0 && !differs; r += 0.25) {
      if (std::fabs(W2(r) - q(r)) > 1e-14 * (std::fabs(W2(r)) + std::fabs(q(r)) + 1.0)) {
        differs = true;
      }
    }
    if (!differs) throw DomainError("degenerate input: W2 - q vanishes on the grid");
  }

  const auto baseRep = isParabolic(geom);
  if (!baseRep.parabolic()) {
    throw DomainError("critical coupling requires a parabolic base geometry");
  }

  const Classification clsW1 = classifyWithRetries(geom, W1, opt.classify, 0);
  if (clsW1.tag != Criticality::Subcritical) {
    throw DomainError(std::string("criticalCoupling requires subcritical W1, got ") +
                      criticalityName(clsW1.tag));
  }

  CouplingResult res;
  res.atLo = classifyWithRetries(geom, couplingFamily(W1, W2, q, cLo), opt.classify,
                                 opt.undeterminedRetries);
  res.atHi = classifyWithRetries(geom, couplingFamily(W1, W2, q, cHi), opt.classify,
                                 opt.undeterminedRetries);
  if (res.atLo.tag == Criticality::Supercritical ||
      res.atHi.tag != Criticality::Supercritical) {
    throw DomainError("invalid coupling bracket: need non-supercritical at cLo and "
                      "supercritical at cHi");
  }

  while (cHi - cLo > opt.tol) {
    const double mid = 0.5 * (cLo + cHi);
    const Classification cls = classifyWithRetries(
        geom, couplingFamily(W1, W2, q, mid), opt.classify, opt.undeterminedRetries);
    if (cls.tag == Criticality::Supercritical) {
      cHi = mid;
      res.atHi = cls;
    } else {
      cLo = mid;
      res.atLo = cls;
    }
    ++res.iterations;
  }
  res.bracketLo = cLo;
  res.bracketHi = cHi;
  res.coupling = 0.5 * (cLo + cHi);
  return res;
}

TransformedGeometry::TransformedGeometry(RadialGeometry base, Potential potential,
                                         Profile profile)
    : base_(std::move(base)), potential_(std::move(potential)),
      profile_(std::move(profile)) {
  if (profile_.tag == Criticality::Supercritical || profile_.nodeRadius) {
    throw DomainError("h-transform requires a node-free profile");
  }
  for (double v : profile_.h.values()) {
    if (!(v > 0.0)) throw DomainError("h-transform requires a positive profile");
  }
  hInterp_ = makeLogRadiusInterpolant(profile_.h);
  fluxInterp_ = makeLogRadiusInterpolant(profile_.flux);
  gridMax_ = profile_.h.radii().back();
  hAtGridMax_ = profile_.h.values().back();

  const double flux = profile_.terminalFlux;
  if (flux < 0.0) {
    const double hFar =
        hAtGridMax_ + flux * base_.inverseDensityIntegral(gridMax_, 1e15);
    if (hFar <= 0.0) {
      throw DomainError("profile continuation crosses zero: transform undefined");
    }
  }

  RadialGeometry::Spec spec;
  spec.dimension = base_.dimension();
  spec.kind = GeometryKind::Custom;
  spec.label = "h-transform(" + base_.label() + ")";
  spec.quadratureTol = base_.quadratureTol();
  const RadialGeometry baseCopy = base_;
  const CubicInterpolant hI = hInterp_;
  const double gm = gridMax_;
  const double hgm = hAtGridMax_;
  auto hExt = [baseCopy, hI, gm, hgm, flux](double r) {
    if (r <= gm) return hI(std::log(r));
    return hgm + flux * baseCopy.inverseDensityIntegral(gm, r);
  };
  spec.areaDensity = [baseCopy, hExt](double r) {
    const double h = hExt(r);
    return baseCopy.density(r) * h * h;
  };
  const CubicInterpolant aI = fluxInterp_;
  auto fluxExt = [aI, gm, flux](double r) {
    if (r <= gm) return aI(std::log(r));
    return flux;
  };
  spec.logDensitySlope = [baseCopy, hExt, fluxExt](double r) {
    const double h = hExt(r);
    return baseCopy.logDensitySlope(r) +
           2.0 * fluxExt(r) / (baseCopy.density(r) * h);
  };
  transformed_ = std::make_shared<RadialGeometry>(std::move(spec));
}

double TransformedGeometry::profileValue(double r) const {
  if (r <= gridMax_) return hInterp_(std::log(r));
  return hAtGridMax_ +
         profile_.terminalFlux * base_.inverseDensityIntegral(gridMax_, r);
}

double TransformedGeometry::profileFlux(double r) const {
  if (r <= gridMax_) return fluxInterp_(std::log(r));
  return profile_.terminalFlux;
}

double TransformedGeometry::inverseDensityTail(double r) const {
  const double flux = profile_.terminalFlux;
  if (!(flux > 0.0)) {
    throw DomainError("transform is parabolic (terminal flux <= 0): the Green "
                      "tail diverges");
  }
  if (r >= gridMax_) return 1.0 / (flux * profileValue(r));
  return transformed_->inverseDensityIntegral(r, gridMax_) +
         1.0 / (flux * hAtGridMax_);
}

TransformedGeometry hTransform(const RadialGeometry& geom, const Potential& W,
                               const Profile& profile) {
  return TransformedGeometry(geom, W, profile);
}

GridFunction composeProfiles(const Profile& h, const Profile& gOnTransform) {
  const auto gInterp = makeLogRadiusInterpolant(gOnTransform.h);
  const auto& radii = h.h.radii();
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    out[i] = h.h.value(i) * gInterp(std::log(radii[i]));
  }
  return GridFunction(radii, out);
}

double limitAtInfinity(const TransformedGeometry& tg, const Profile& gOnTransform) {
  const double rEnd = gOnTransform.h.radii().back();
  return gOnTransform.h.values().back() +
         gOnTransform.terminalFlux * tg.inverseDensityTail(rEnd);
}

}  // namespace parakernel
