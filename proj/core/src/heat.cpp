#include "parakernel/heat.hpp"

#include <algorithm>
#include <cmath>

namespace parakernel {

namespace {

struct Mesh {
  std::vector<double> nodes;      // cell centers
  std::vector<double> faces;      // faces[i] separates cell i-1 and i; faces[0] = 0
  std::vector<double> cellMass;   // V(faces[i+1]) - V(faces[i])
  std::vector<double> conduct;    // conduct[i] couples cell i and i+1
  double outerConduct = 0.0;      // Dirichlet coupling of the last cell to rMax
  double rMax = 0.0;
};

Mesh buildMesh(const RadialGeometry& geom, const HeatRunConfig& cfg) {
  Mesh mesh;
  mesh.nodes = logSpacedGrid(cfg.rMin, cfg.rMax, cfg.perDecade);
  mesh.nodes.pop_back();  // the outer boundary r = rMax carries the Dirichlet 0
  const std::size_t n = mesh.nodes.size();
  if (n < 3) throw DomainError("heat mesh needs at least 3 cells");
  mesh.rMax = cfg.rMax;
  mesh.faces.resize(n + 1);
  mesh.faces[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    mesh.faces[i] = std::sqrt(mesh.nodes[i - 1] * mesh.nodes[i]);
  }
  mesh.faces[n] = cfg.rMax;
  mesh.cellMass.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mesh.cellMass[i] = geom.volume(mesh.faces[i + 1]) - geom.volume(mesh.faces[i]);
    if (!(mesh.cellMass[i] > 0.0)) throw NumericError("non-positive cell mass");
  }
  mesh.conduct.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    mesh.conduct[i] =
        geom.density(mesh.faces[i + 1]) / (mesh.nodes[i + 1] - mesh.nodes[i]);
  }
  mesh.outerConduct = geom.density(cfg.rMax) / (cfg.rMax - mesh.nodes[n - 1]);
  return mesh;
}

// Thomas solve of the tridiagonal system in place; d is the right-hand side
// on input and the solution on output.
void solveTridiagonal(std::vector<double>& a, std::vector<double>& b,
                      std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (b[i - 1] == 0.0) throw NumericError("tridiagonal solve breakdown");
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  if (b[n - 1] == 0.0) throw NumericError("tridiagonal solve breakdown");
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
  }
}

std::vector<double> recordTimes(const HeatRunConfig& cfg) {
  std::vector<double> times;
  const double t0 = std::min(cfg.recordTMin, cfg.tMax);
  const int n = std::max(2, cfg.recordCount);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    times.push_back(t0 * std::pow(cfg.tMax / t0, x));
  }
  times.back() = cfg.tMax;
  return times;
}

}  // namespace

KernelSlice solveHeatRadial(const RadialGeometry& geom, const Potential& W,
                            const GridFunction& init, const HeatRunConfig& cfg) {
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) {
    throw DomainError("theta weight must lie in [0, 1]");
  }
  const Mesh mesh = buildMesh(geom, cfg);
  const std::size_t n = mesh.nodes.size();
  if (init.size() != n) {
    throw DomainError("initial data must live on the solver grid (" +
                      std::to_string(n) + " cells)");
  }
  for (double v : init.values()) {
    if (v < 0.0) throw DomainError("initial data must be nonnegative");
  }

  double minWidth = mesh.faces[1] - mesh.faces[0];
  for (std::size_t i = 1; i < n; ++i) {
    minWidth = std::min(minWidth, mesh.faces[i + 1] - mesh.faces[i]);
  }
  double dt = cfg.dt;
  const double guard = cfg.accuracyGuardMultiple * minWidth;
  if (dt <= 0.0) {
    dt = guard;
  } else if (dt > guard * (1.0 + 1e-12)) {
    throw NumericError("accuracy guard violation: dt " + std::to_string(dt) +
                       " exceeds " + std::to_string(guard));
  }

  std::vector<double> wNode(n);
  for (std::size_t i = 0; i < n; ++i) wNode[i] = W(mesh.nodes[i]);

  std::vector<double> u(init.values());

  KernelSlice out;
  out.radii = mesh.nodes;
  out.deltaWidth = 0.0;
  out.admissibleRadiusCap =
      cfg.rMax - cfg.boundaryExclusionFactor * std::sqrt(cfg.tMax);
  out.boundaryLossLimit = cfg.boundaryLossLimit;

  const std::vector<double> wanted = recordTimes(cfg);
  std::size_t nextRecord = 0;

  double t = 0.0;
  double bLoss = 0.0;
  double wLoss = 0.0;

  std::vector<double> lo(n), diag(n), up(n), rhs(n);

  auto applyExplicit = [&](const std::vector<double>& v, double weight,
                           std::vector<double>& target) {
    for (std::size_t i = 0; i < n; ++i) {
      double flux = 0.0;
      if (i + 1 < n) flux += mesh.conduct[i] * (v[i + 1] - v[i]);
      else flux += mesh.outerConduct * (0.0 - v[i]);
      if (i > 0) flux -= mesh.conduct[i - 1] * (v[i] - v[i - 1]);
      target[i] = v[i] * mesh.cellMass[i] / dt +
                  weight * (flux - wNode[i] * v[i] * mesh.cellMass[i]);
    }
  };

  auto stepOnce = [&](double theta, double stepDt) {
    const double dtSaved = dt;
    dt = stepDt;
    applyExplicit(u, 1.0 - theta, rhs);
    for (std::size_t i = 0; i < n; ++i) {
      double offDiag = 0.0;
      lo[i] = up[i] = 0.0;
      if (i + 1 < n) {
        up[i] = -theta * mesh.conduct[i];
        offDiag += mesh.conduct[i];
      } else {
        offDiag += mesh.outerConduct;
      }
      if (i > 0) {
        lo[i] = -theta * mesh.conduct[i - 1];
        offDiag += mesh.conduct[i - 1];
      }
      diag[i] = mesh.cellMass[i] / dt +
                theta * (offDiag + wNode[i] * mesh.cellMass[i]);
    }
    solveTridiagonal(lo, diag, up, rhs);
    // Book-keeping of boundary and potential mass fluxes for this step.
    const double uOldLast = u[n - 1];
    double wOld = 0.0, wNew = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wOld += wNode[i] * u[i] * mesh.cellMass[i];
      wNew += wNode[i] * rhs[i] * mesh.cellMass[i];
    }
    bLoss += stepDt * mesh.outerConduct *
             (theta * rhs[n - 1] + (1.0 - theta) * uOldLast);
    wLoss += stepDt * (theta * wNew + (1.0 - theta) * wOld);
    u = rhs;
    dt = dtSaved;
  };

  auto record = [&]() {
    out.times.push_back(t);
    std::vector<double> slice(u);
    for (double& v : slice) {
      if (v < 0.0) {
        if (v < -1e-10) ++out.clippedCount;
        v = 0.0;
      }
    }
    out.values.push_back(std::move(slice));
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += u[i] * mesh.cellMass[i];
    out.massHistory.push_back(mass);
    out.boundaryLoss.push_back(bLoss);
    out.potentialLoss.push_back(wLoss);
  };

  // Rannacher startup: damped implicit-Euler half steps suppress the ringing
  // a sharp initial profile would otherwise excite in the theta = 1/2 scheme.
  for (int i = 0; i < cfg.rannacherSteps; ++i) {
    stepOnce(1.0, 0.5 * dt);
    t += 0.5 * dt;
  }

  while (t < cfg.tMax * (1.0 - 1e-12)) {
    while (nextRecord < wanted.size() && wanted[nextRecord] <= t * (1.0 + 1e-12)) {
      record();
      ++nextRecord;
    }
    double stepDt = dt;
    if (nextRecord < wanted.size() && t + stepDt > wanted[nextRecord]) {
      stepDt = wanted[nextRecord] - t;
    }
    stepDt = std::min(stepDt, cfg.tMax - t);
    stepOnce(cfg.theta, stepDt);
    t += stepDt;
  }
  record();  // the final time

  return out;
}

KernelSlice heatKernelAtPole(const RadialGeometry& geom, const Potential& W,
                             const HeatRunConfig& cfg) {
  const Mesh mesh = buildMesh(geom, cfg);
  const std::size_t n = mesh.nodes.size();
  const double width =
      std::max(cfg.deltaWidthCells * mesh.faces[1], mesh.faces[1] * 1.001);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mesh.nodes[i] / width;
    if (x < 1.0) u[i] = std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += u[i] * mesh.cellMass[i];
  if (!(mass > 0.0)) {
    u[0] = 1.0;
    mass = mesh.cellMass[0];
  }
  for (double& v : u) v /= mass;

  KernelSlice out = solveHeatRadial(geom, W, GridFunction(mesh.nodes, u), cfg);
  out.deltaWidth = width;
  out.reliableTimeFloor = 10.0 * width * width;
  return out;
}

double envelopeSubcritical(double hx, double hy, double hSqrtT, double vol,
                           double t, double distance, double gaussParam) {
  if (!(t > 0.0)) throw DomainError("envelope requires t > 0");
  const double denom = (hy + hSqrtT) * (hy + hSqrtT) * vol;
  return hx * hy / denom * std::exp(-gaussParam * distance * distance / t);
}

double envelopeCritical(double vol, double t, double distance, double gaussParam) {
  if (!(t > 0.0)) throw DomainError("envelope requires t > 0");
  return std::exp(-gaussParam * distance * distance / t) / vol;
}

BoundCheckReport boundCheck(const KernelSlice& kernel, const RadialGeometry& base,
                            EnvelopeKind kind, const BoundCheckConfig& cfg) {
  BoundCheckReport best;
  bool haveBest = false;

  // Admissible slices: inside [tMin, tMax], past the delta-reliability floor,
  // with boundary loss within the limit.
  std::vector<std::size_t> slices;
  for (std::size_t ti = 0; ti < kernel.times.size(); ++ti) {
    const double t = kernel.times[ti];
    if (t < cfg.tMin || t > cfg.tMax) continue;
    if (t < kernel.reliableTimeFloor) continue;
    if (kernel.boundaryLoss[ti] >
        kernel.boundaryLossLimit * std::max(kernel.massHistory.front(), 1e-300)) {
      continue;
    }
    slices.push_back(ti);
  }
  if (slices.empty()) throw DomainError("boundCheck: empty admissible region");

  std::vector<double> hR;  // H(|x|) over the kernel radii
  hR.reserve(kernel.radii.size());
  for (double r : kernel.radii) hR.push_back(bigH(base, r));

  for (double gaussParam : cfg.gaussParams) {
    BoundCheckReport rep;
    rep.bestGaussParam = gaussParam;
    rep.bandMin = 0.0;
    rep.bandMax = 0.0;
    for (std::size_t ti : slices) {
      const double t = kernel.times[ti];
      const double sqrtT = std::sqrt(t);
      const double hSqrtT = bigH(base, sqrtT);
      const double vol = base.volume(sqrtT);
      for (std::size_t ri = 0; ri < kernel.radii.size(); ++ri) {
        const double r = kernel.radii[ri];
        if (r > cfg.rFactor * sqrtT) continue;
        if (r > kernel.admissibleRadiusCap) continue;
        const double p = kernel.values[ti][ri];
        if (!(p > 0.0)) continue;
        const double env =
            kind == EnvelopeKind::Subcritical
                ? envelopeSubcritical(hR[ri], 1.0, hSqrtT, vol, t, r, gaussParam)
                : envelopeCritical(vol, t, r, gaussParam);
        const double ratio = p / env;
        if (rep.bandMin == 0.0 || ratio < rep.bandMin) rep.bandMin = ratio;
        if (ratio > rep.bandMax) rep.bandMax = ratio;
        rep.ratios.push_back({t, r, ratio});
        ++rep.admittedPoints;
      }
    }
    if (rep.admittedPoints == 0) continue;
    if (!haveBest || rep.band() < best.band()) {
      best = std::move(rep);
      haveBest = true;
    }
  }
  if (!haveBest) throw DomainError("boundCheck: empty admissible region");

  // Gaussian-exponent fit per admitted slice: slope of log p against r^2/t.
  for (std::size_t ti : slices) {
    const double t = kernel.times[ti];
    const double sqrtT = std::sqrt(t);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, count = 0;
    for (std::size_t ri = 0; ri < kernel.radii.size(); ++ri) {
      const double r = kernel.radii[ri];
      if (r < cfg.fitRMinFactor * sqrtT || r > cfg.rFactor * sqrtT) continue;
      if (r > kernel.admissibleRadiusCap) continue;
      const double p = kernel.values[ti][ri];
      if (!(p > 0.0)) continue;
      const double x = r * r / t;
      const double y = std::log(p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      count += 1;
    }
    if (count < 5) continue;
    const double det = count * sxx - sx * sx;
    if (std::fabs(det) < 1e-12) continue;
    const double slope = (count * sxy - sx * sy) / det;
    best.fittedExponents.push_back(-slope);
  }
  if (!best.fittedExponents.empty()) {
    std::vector<double> sorted = best.fittedExponents;
    std::sort(sorted.begin(), sorted.end());
    best.exponentMedian = sorted[sorted.size() / 2];
    best.exponentsInWindow =
        std::all_of(best.fittedExponents.begin(), best.fittedExponents.end(),
                    [&cfg](double e) {
                      return e >= cfg.exponentLo && e <= cfg.exponentHi;
                    });
  }
  best.pass = best.band() <= cfg.bandLimit && best.exponentsInWindow;
  return best;
}

}  // namespace parakernel
