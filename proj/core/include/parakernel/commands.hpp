#pragma once

#include <cstdint>
#include <string>

#include "parakernel/config.hpp"

namespace parakernel {

struct CommandOutcome {
  int exitCode = 0;
  std::string summary;
};

/// Known commands: geom-info, profile, classify, critical-coupling, green,
/// kato, heat, check-bounds, gauge. `reproduce` is handled separately because
/// it selects a canned configuration by example name.
bool isKnownCommand(const std::string& command);

std::string usageText();

/// Dispatches one batch command: writes CSV artifacts plus summary.txt under
/// outDir and returns the summary text. Throws ConfigError for configuration
/// problems (CLI exit 2) and other exceptions for computation errors (exit 1).
CommandOutcome runCommand(const std::string& command, const RunConfig& cfg,
                          const std::string& outDir, std::uint64_t seed);

/// Canned configuration reproducing one worked example; name is one of
/// plane, half-cylinder, model, log-plane.
std::string cannedConfig(const std::string& exampleName);

/// Runs the canned configuration: profile, green, kato, heat and check-bounds
/// artifacts (plus gauge for the plane) under outDir.
CommandOutcome reproduceExample(const std::string& exampleName,
                                const std::string& outDir, std::uint64_t seed);

}  // namespace parakernel
