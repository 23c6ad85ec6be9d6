#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parakernel/commands.hpp"
#include "parakernel/config.hpp"

namespace {

struct Args {
  std::string command;
  std::string example;
  std::string configPath;
  std::string outDir;
  std::uint64_t seed = 0;
  bool seedGiven = false;
  std::vector<std::string> overrides;
};

int dispatch(const Args& args) {
  using namespace parakernel;

  if (args.command == "reproduce") {
    const std::string out =
        args.outDir.empty() ? "out-" + args.example : args.outDir;
    const auto outcome = reproduceExample(args.example, out, args.seed);
    std::fputs(outcome.summary.c_str(), stdout);
    return outcome.exitCode;
  }

  RunConfig cfg;
  if (!args.configPath.empty()) cfg = parseConfigFile(args.configPath);
  for (const auto& ov : args.overrides) applyOverride(cfg, ov);

  const std::string out =
      !args.outDir.empty() ? args.outDir : cfg.getString("run", "out_dir", ".");
  const std::uint64_t seed =
      args.seedGiven ? args.seed : cfg.getUInt64("run", "seed", 0);

  const auto outcome = runCommand(args.command, cfg, out, seed);
  std::fputs(outcome.summary.c_str(), stdout);
  return outcome.exitCode;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace parakernel;

  CLI::App app{"Numerical toolkit for radial Schrodinger heat kernels on "
               "parabolic weighted geometries"};
  app.require_subcommand(1);

  Args args;
  const std::vector<std::string> names = {
      "geom-info", "profile", "classify", "critical-coupling", "green",
      "kato",      "heat",    "check-bounds", "gauge"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.configPath, "config file path");
    sub->add_option("--out", args.outDir, "artifact output directory");
    sub->add_option("--seed", args.seed, "top-level seed")
        ->each([&args](const std::string&) { args.seedGiven = true; });
    sub->add_option("--set", args.overrides, "section.key=value override");
    sub->callback([&args, name]() { args.command = name; });
  }
  {
    auto* sub = app.add_subcommand("reproduce");
    sub->add_option("example", args.example, "plane, half-cylinder, model or log-plane")
        ->required();
    sub->add_option("--out", args.outDir, "artifact output directory");
    sub->add_option("--seed", args.seed, "top-level seed")
        ->each([&args](const std::string&) { args.seedGiven = true; });
    sub->callback([&args]() { args.command = "reproduce"; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fputs(usageText().c_str(), stderr);
    return 2;
  }

  try {
    return dispatch(args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
