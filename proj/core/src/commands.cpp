#include "parakernel/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "parakernel/csv.hpp"
#include "parakernel/feynman_kac.hpp"
#include "parakernel/green_kato.hpp"
#include "parakernel/heat.hpp"
#include "parakernel/schrodinger.hpp"

namespace parakernel {

namespace {

RadialGeometry buildGeometry(const RunConfig& cfg) {
  const std::string kind = cfg.getString("geometry", "kind", "flat-plane");
  const int n = cfg.getInt("geometry", "N", 3);
  const double beta = cfg.getDouble("geometry", "beta", 0.5);
  const double blend = cfg.getDouble("geometry", "blend_radius", 1.0);
  if (kind == "flat-plane") return RadialGeometry::flatPlane();
  if (kind == "half-cylinder") return RadialGeometry::halfCylinder(n, blend);
  if (kind == "model") return RadialGeometry::model(n, beta, blend);
  if (kind == "log-plane") return RadialGeometry::logPlane();
  throw ConfigError("unknown geometry kind '" + kind +
                    "' (expected flat-plane, half-cylinder, model or log-plane)");
}

Potential buildPotential(const RunConfig& cfg, const std::string& name,
                         std::set<std::string>& inProgress);

Potential buildPotentialByName(const RunConfig& cfg, const std::string& name) {
  std::set<std::string> guard;
  return buildPotential(cfg, name, guard);
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

Potential buildPotential(const RunConfig& cfg, const std::string& name,
                         std::set<std::string>& inProgress) {
  const std::string section = "potential." + name;
  if (!cfg.hasSection(section)) {
    throw ConfigError("missing required section [" + section + "]");
  }
  if (!inProgress.insert(name).second) {
    throw ConfigError("potential '" + name + "' references itself");
  }
  const std::string kind = cfg.getString(section, "kind", "");
  Potential result;
  if (kind == "bump") {
    result = Potential::bump(cfg.getDouble(section, "center", 2.0),
                             cfg.getDouble(section, "width", 1.0),
                             cfg.getDouble(section, "amplitude", 1.0));
  } else if (kind == "power") {
    result = Potential::powerDecay(cfg.getDouble(section, "amplitude", 1.0),
                                   cfg.getDouble(section, "exponent", 4.0));
  } else if (kind == "sum") {
    const auto names = splitList(cfg.getString(section, "terms", ""));
    if (names.empty()) {
      throw ConfigError("sum potential '" + name + "' needs a terms list");
    }
    std::vector<Potential> parts;
    for (const auto& t : names) parts.push_back(buildPotential(cfg, t, inProgress));
    result = Potential::sum(parts);
  } else if (kind == "scaled") {
    const std::string inner = cfg.getString(section, "inner", "");
    if (inner.empty()) {
      throw ConfigError("scaled potential '" + name + "' needs an inner name");
    }
    result = Potential::scaled(cfg.getDouble(section, "coupling", 1.0),
                               buildPotential(cfg, inner, inProgress));
  } else {
    throw ConfigError("unknown potential kind '" + kind + "' in [" + section + "]");
  }
  inProgress.erase(name);
  return result;
}

ProfileOptions profileOptions(const RunConfig& cfg, const std::string& section) {
  ProfileOptions opt;
  opt.rMax = cfg.getDouble(section, "r_max", 1e6);
  opt.tol = cfg.getDouble(section, "tol", 1e-3);
  return opt;
}

void writeSummary(const std::string& outDir, const std::string& text) {
  const std::filesystem::path p = std::filesystem::path(outDir) / "summary.txt";
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::string artifactPath(const std::string& outDir, const std::string& name) {
  return (std::filesystem::path(outDir) / name).string();
}

CommandOutcome cmdGeomInfo(const RunConfig& cfg, const std::string& outDir,
                           std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const double decades = cfg.getDouble("geometry", "grid.decades", 6.0);
  const int perDecade = cfg.getInt("geometry", "grid.per_decade", 64);
  const auto radii = logSpacedGrid(1e-2, std::pow(10.0, decades), perDecade);

  CsvTable table({"r", "V", "H"});
  for (double r : radii) {
    table.addRow({r, geom.volume(r), bigH(geom, r)});
  }
  emitCSV(table, artifactPath(outDir, "geometry.csv"), seed);

  const auto para = isParabolic(geom);
  const auto doubling = doublingExponentCheck(geom, 0.5);
  std::ostringstream os;
  os << "geometry: " << geom.label() << "\n";
  os << "dimension: " << geom.dimension() << "\n";
  os << "parabolic: "
     << (para.parabolic() ? "yes"
                          : (para.nonParabolic() ? "no" : "undetermined"))
     << "\n";
  os << "H(10^" << decades << ") = " << bigH(geom, std::pow(10.0, decades)) << "\n";
  os << "doubling check (delta=0.5): " << (doubling.pass ? "pass" : "fail")
     << ", worst ratio " << doubling.worstRatio << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdProfile(const RunConfig& cfg, const std::string& outDir,
                          std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const std::string wName = cfg.getString("profile", "potential", "main");
  const Potential w = buildPotentialByName(cfg, wName);
  const Profile profile = solveProfileIVP(geom, w, profileOptions(cfg, "profile"));

  CsvTable table({"r", "h", "flux"});
  for (std::size_t i = 0; i < profile.h.size(); ++i) {
    table.addRow({profile.h.radius(i), profile.h.value(i), profile.flux.value(i)});
  }
  emitCSV(table, artifactPath(outDir, "profile.csv"), seed);

  std::ostringstream os;
  os << "potential: " << w.describe() << "\n";
  os << "terminal flux: " << profile.terminalFlux << "\n";
  os << "residual norm: " << profile.residualNorm << "\n";
  if (profile.nodeRadius) {
    os << "node radius: " << *profile.nodeRadius << "\n";
  }
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdClassify(const RunConfig& cfg, const std::string& outDir,
                           std::uint64_t seed) {
  (void)seed;
  const auto geom = buildGeometry(cfg);
  const std::string wName = cfg.getString("classify", "potential", "main");
  const Potential w = buildPotentialByName(cfg, wName);
  ClassifyOptions opt;
  opt.profile = profileOptions(cfg, "classify");
  opt.fluxThreshold = cfg.getDouble("classify", "flux_threshold", 1e-6);
  opt.growthThreshold = cfg.getDouble("classify", "growth_threshold", 3.0);
  const Classification cls = classify(geom, w, opt);

  std::ostringstream os;
  os << criticalityName(cls.tag) << "\n";
  os << "terminal flux: " << cls.terminalFlux << "\n";
  os << "growth ratio: " << cls.growthRatio << "\n";
  if (cls.nodeRadius) {
    os << "node radius: " << *cls.nodeRadius
       << (cls.nodeExtrapolated ? " (extrapolated)" : "") << "\n";
  }
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdCriticalCoupling(const RunConfig& cfg, const std::string& outDir,
                                   std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential w1 = buildPotentialByName(cfg, cfg.getString("coupling", "w1", "w1"));
  const Potential w2 = buildPotentialByName(cfg, cfg.getString("coupling", "w2", "w2"));
  const Potential q = buildPotentialByName(cfg, cfg.getString("coupling", "q", "q"));
  CouplingOptions opt;
  opt.tol = cfg.getDouble("coupling", "tol", 1e-3);
  const CouplingResult res =
      criticalCoupling(geom, w1, w2, q, cfg.getDouble("coupling", "c_lo", 0.0),
                       cfg.getDouble("coupling", "c_hi", 2.0), opt);

  CsvTable table({"c_lo", "c_hi", "c_star", "iterations", "class_lo", "class_hi"});
  table.addRow({res.bracketLo, res.bracketHi, res.coupling,
                static_cast<std::int64_t>(res.iterations),
                std::string(criticalityName(res.atLo.tag)),
                std::string(criticalityName(res.atHi.tag))});
  emitCSV(table, artifactPath(outDir, "coupling.csv"), seed);

  std::ostringstream os;
  os << "critical coupling: " << res.coupling << " +/- "
     << 0.5 * (res.bracketHi - res.bracketLo) << "\n";
  os << "bracket: [" << res.bracketLo << ", " << res.bracketHi << "]\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdGreen(const RunConfig& cfg, const std::string& outDir,
                        std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential q = buildPotentialByName(cfg, cfg.getString("green", "q", "q"));
  const Profile profile = solveProfileIVP(geom, q);
  const TransformedGeometry tg = hTransform(geom, q, profile);
  const auto radii = logSpacedGrid(cfg.getDouble("green", "r_min", 1.0),
                                   cfg.getDouble("green", "r_max", 1e3),
                                   cfg.getInt("green", "per_decade", 16));
  const auto green = greenAtPole(tg, radii);

  CsvTable table({"r", "G", "GH"});
  for (std::size_t i = 0; i < green.g.size(); ++i) {
    const double r = green.g.radius(i);
    table.addRow({r, green.g.value(i), green.g.value(i) * bigH(geom, r)});
  }
  emitCSV(table, artifactPath(outDir, "green.csv"), seed);

  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < green.g.size(); ++i) {
    const double gh = green.g.value(i) * bigH(geom, green.g.radius(i));
    if (i == 0 || gh < lo) lo = gh;
    if (i == 0 || gh > hi) hi = gh;
  }
  std::ostringstream os;
  os << "pole Green function over [" << radii.front() << ", " << radii.back()
     << "]\n";
  os << "G*H band: [" << lo << ", " << hi << "], ratio " << (lo > 0 ? hi / lo : 0.0)
     << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdKato(const RunConfig& cfg, const std::string& outDir,
                       std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential w =
      buildPotentialByName(cfg, cfg.getString("kato", "potential", "main"));
  KatoOptions opt;
  opt.rMax = cfg.getDouble("kato", "r_max", 1e8);
  const KatoReport report = katoIntegral(geom, w, opt);

  CsvTable table({"R", "I", "increment"});
  for (const auto& s : report.samples) {
    table.addRow({s.radius, s.integral, s.increment});
  }
  emitCSV(table, artifactPath(outDir, "kato.csv"), seed);

  std::ostringstream os;
  os << "verdict: "
     << (report.verdict == KatoReport::Verdict::Convergent
             ? "convergent"
             : report.verdict == KatoReport::Verdict::Divergent ? "divergent"
                                                                : "undetermined")
     << "\n";
  os << "I(" << report.samples.back().radius
     << ") = " << report.samples.back().integral << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

HeatRunConfig heatConfig(const RunConfig& cfg) {
  HeatRunConfig hc;
  hc.rMin = cfg.getDouble("heat", "r_min", 1e-2);
  hc.rMax = cfg.getDouble("heat", "r_max", 100.0);
  hc.perDecade = cfg.getInt("heat", "per_decade", 64);
  hc.tMax = cfg.getDouble("heat", "t_max", 100.0);
  hc.theta = cfg.getDouble("heat", "theta", 0.5);
  hc.dt = cfg.getDouble("heat", "dt", 0.0);
  hc.accuracyGuardMultiple = cfg.getDouble("heat", "guard_multiple", 8.0);
  hc.deltaWidthCells = cfg.getDouble("heat", "delta_width_cells", 3.0);
  hc.recordCount = cfg.getInt("heat", "record_count", 33);
  hc.recordTMin = cfg.getDouble("heat", "record_t_min", 1e-2);
  return hc;
}

Potential heatPotential(const RunConfig& cfg) {
  const std::string name = cfg.getString("heat", "potential", "");
  if (name.empty()) return Potential();
  return buildPotentialByName(cfg, name);
}

CommandOutcome cmdHeat(const RunConfig& cfg, const std::string& outDir,
                       std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential w = heatPotential(cfg);
  const KernelSlice kernel = heatKernelAtPole(geom, w, heatConfig(cfg));

  CsvTable table({"t", "r", "p"});
  for (std::size_t ti = 0; ti < kernel.times.size(); ++ti) {
    for (std::size_t ri = 0; ri < kernel.radii.size(); ++ri) {
      table.addRow({kernel.times[ti], kernel.radii[ri], kernel.values[ti][ri]});
    }
  }
  emitCSV(table, artifactPath(outDir, "kernel.csv"), seed);

  CsvTable mass({"t", "mass", "boundary_loss", "potential_loss"});
  for (std::size_t ti = 0; ti < kernel.times.size(); ++ti) {
    mass.addRow({kernel.times[ti], kernel.massHistory[ti], kernel.boundaryLoss[ti],
                 kernel.potentialLoss[ti]});
  }
  emitCSV(mass, artifactPath(outDir, "mass.csv"), seed);

  std::ostringstream os;
  os << "kernel slices: " << kernel.times.size() << " times x "
     << kernel.radii.size() << " radii\n";
  os << "final mass: " << kernel.massHistory.back() << " (boundary loss "
     << kernel.boundaryLoss.back() << ", potential loss "
     << kernel.potentialLoss.back() << ")\n";
  os << "clipped undershoots: " << kernel.clippedCount << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdCheckBounds(const RunConfig& cfg, const std::string& outDir,
                              std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential w = heatPotential(cfg);
  const HeatRunConfig hc = heatConfig(cfg);
  const KernelSlice kernel = heatKernelAtPole(geom, w, hc);

  BoundCheckConfig bc;
  const std::string kind = cfg.getString("bounds", "envelope", "critical");
  if (kind == "subcritical") bc.kind = EnvelopeKind::Subcritical;
  else if (kind == "critical") bc.kind = EnvelopeKind::Critical;
  else throw ConfigError("unknown envelope kind '" + kind + "'");
  bc.bandLimit = cfg.getDouble("bounds", "band_limit", 50.0);
  bc.exponentLo = cfg.getDouble("bounds", "exponent_lo", 0.125);
  bc.exponentHi = cfg.getDouble("bounds", "exponent_hi", 0.5);
  bc.rFactor = cfg.getDouble("bounds", "r_factor", 3.0);
  bc.tMin = cfg.getDouble("bounds", "t_min", 1.0);
  bc.tMax = cfg.getDouble("bounds", "t_max", hc.tMax);
  const BoundCheckReport report = boundCheck(kernel, geom, bc.kind, bc);

  CsvTable ratios({"t", "r", "ratio"});
  for (const auto& s : report.ratios) {
    ratios.addRow({s.t, s.r, s.ratio});
  }
  emitCSV(ratios, artifactPath(outDir, "report.csv"), seed);

  CsvTable summary({"band_min", "band_max", "band", "gauss_param",
                    "exponent_median", "pass"});
  summary.addRow({report.bandMin, report.bandMax, report.band(),
                  report.bestGaussParam, report.exponentMedian,
                  static_cast<std::int64_t>(report.pass ? 1 : 0)});
  emitCSV(summary, artifactPath(outDir, "bounds_summary.csv"), seed);

  std::ostringstream os;
  os << "band: " << report.band() << " (limit " << bc.bandLimit << ") at gauss "
     << report.bestGaussParam << "\n";
  os << "exponent median: " << report.exponentMedian << "\n";
  os << (report.pass ? "PASS" : "FAIL") << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

CommandOutcome cmdGauge(const RunConfig& cfg, const std::string& outDir,
                        std::uint64_t seed) {
  const auto geom = buildGeometry(cfg);
  const Potential q = buildPotentialByName(cfg, cfg.getString("montecarlo", "q", "q"));
  const Potential w =
      buildPotentialByName(cfg, cfg.getString("montecarlo", "potential", "main"));
  const Profile profile = solveProfileIVP(geom, q);
  const TransformedGeometry tg = hTransform(geom, q, profile);

  PathSimOptions opt;
  opt.horizon = cfg.getDouble("montecarlo", "horizon", 100.0);
  opt.dt = cfg.getDouble("montecarlo", "dt", 1e-3);
  opt.pathCount = cfg.getInt("montecarlo", "paths", 10000);
  opt.seed = seed;
  const double x0 = cfg.getDouble("montecarlo", "x0", 0.0);

  const PathEnsemble ens = simulatePaths(tg, w, x0, opt);
  const MonteCarloEstimate gauge = gaugeEstimate(ens, w);
  const MonteCarloEstimate occupation = occupationNorm(ens, w);

  {
    const std::vector<double> sampleRadii = {0.0, 1.0, 2.0, 3.0, 5.0, 10.0, 30.0};
    const GreenBoundEstimate norm = greenBoundNorm(tg, w, sampleRadii);
    CsvTable normTable({"x", "integral", "bound"});
    for (const auto& s : norm.samples) {
      normTable.addRow({s.x, s.integral, s.integral + s.localTerm});
    }
    emitCSV(normTable, artifactPath(outDir, "norm.csv"), seed);
  }

  CsvTable table({"x0", "T", "dt", "npaths", "seed", "gauge", "gauge_se",
                  "gauge_ci_lo", "gauge_ci_hi", "gauge_truncation", "occupation",
                  "occupation_se"});
  table.addRow({x0, opt.horizon, opt.dt, static_cast<std::int64_t>(opt.pathCount),
                static_cast<std::int64_t>(seed), gauge.mean, gauge.standardError,
                gauge.ciLow, gauge.ciHigh, gauge.truncationBound, occupation.mean,
                occupation.standardError});
  emitCSV(table, artifactPath(outDir, "montecarlo.csv"), seed);

  std::ostringstream os;
  os << "gauge: " << gauge.mean << " +/- " << gauge.standardError
     << " (truncation bound " << gauge.truncationBound << ")\n";
  os << "occupation: " << occupation.mean << " +/- " << occupation.standardError
     << "\n";
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

}  // namespace

bool isKnownCommand(const std::string& command) {
  static const std::set<std::string> known = {
      "geom-info", "profile",      "classify", "critical-coupling", "green",
      "kato",      "heat",         "check-bounds", "gauge",         "reproduce"};
  return known.count(command) > 0;
}

std::string usageText() {
  return "usage: parakernel <command> --config <path> [--out <dir>] [--seed <u64>]\n"
         "                  [--set section.key=value ...]\n"
         "commands: geom-info profile classify critical-coupling green kato heat\n"
         "          check-bounds gauge reproduce "
         "{plane|half-cylinder|model|log-plane}\n";
}

CommandOutcome runCommand(const std::string& command, const RunConfig& cfg,
                          const std::string& outDir, std::uint64_t seed) {
  if (command == "geom-info") return cmdGeomInfo(cfg, outDir, seed);
  if (command == "profile") return cmdProfile(cfg, outDir, seed);
  if (command == "classify") return cmdClassify(cfg, outDir, seed);
  if (command == "critical-coupling") return cmdCriticalCoupling(cfg, outDir, seed);
  if (command == "green") return cmdGreen(cfg, outDir, seed);
  if (command == "kato") return cmdKato(cfg, outDir, seed);
  if (command == "heat") return cmdHeat(cfg, outDir, seed);
  if (command == "check-bounds") return cmdCheckBounds(cfg, outDir, seed);
  if (command == "gauge") return cmdGauge(cfg, outDir, seed);
  throw ConfigError("unknown command '" + command + "'");
}

std::string cannedConfig(const std::string& exampleName) {
  const std::string common =
      "[potential.q]\n"
      "kind = bump\n"
      "center = 2.0\n"
      "width = 1.0\n"
      "amplitude = 0.25\n"
      "\n"
      "[potential.wtail]\n"
      "kind = power\n"
      "amplitude = 1.0\n"
      "exponent = 4.0\n"
      "\n"
      "[profile]\n"
      "potential = q\n"
      "\n"
      "[green]\n"
      "q = q\n"
      "r_min = 1.0\n"
      "r_max = 1000.0\n"
      "\n"
      "[kato]\n"
      "potential = wtail\n"
      "\n"
      "[heat]\n"
      "potential = q\n"
      "r_min = 0.01\n"
      "r_max = 100.0\n"
      "t_max = 100.0\n"
      "\n"
      "[bounds]\n"
      "envelope = subcritical\n"
      "t_min = 1.0\n"
      "t_max = 100.0\n";
  if (exampleName == "plane") {
    return "[geometry]\nkind = flat-plane\n\n" + common +
           "\n[montecarlo]\n"
           "potential = q\n"
           "q = q\n"
           "x0 = 0.0\n"
           "horizon = 200.0\n"
           "dt = 0.002\n"
           "paths = 20000\n";
  }
  if (exampleName == "half-cylinder") {
    return "[geometry]\nkind = half-cylinder\nN = 3\n\n" + common;
  }
  if (exampleName == "model") {
    return "[geometry]\nkind = model\nN = 3\nbeta = 0.5\n\n" + common;
  }
  if (exampleName == "log-plane") {
    return "[geometry]\nkind = log-plane\n\n" + common;
  }
  throw ConfigError("unknown example '" + exampleName +
                    "' (expected plane, half-cylinder, model or log-plane)");
}

CommandOutcome reproduceExample(const std::string& exampleName,
                                const std::string& outDir, std::uint64_t seed) {
  const RunConfig cfg = parseConfig(cannedConfig(exampleName));
  std::ostringstream os;
  os << "reproduce " << exampleName << "\n";
  std::vector<std::string> commands = {"profile", "green", "kato", "check-bounds"};
  if (exampleName == "plane") commands.push_back("gauge");
  for (const auto& cmd : commands) {
    const std::string dir =
        (std::filesystem::path(outDir) / cmd).string();
    const CommandOutcome sub = runCommand(cmd, cfg, dir, seed);
    os << "-- " << cmd << " --\n" << sub.summary;
  }
  writeSummary(outDir, os.str());
  return {0, os.str()};
}

}  // namespace parakernel
