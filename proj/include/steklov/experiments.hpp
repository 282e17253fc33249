#pragma once

#include <string>
#include <vector>

#include "steklov/config.hpp"
#include "steklov/mesh.hpp"

namespace steklov {

/// One tolerance gate evaluated by an experiment.
struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  ///< pass iff |value - expected| <= tolerance (or as noted)
  bool pass = false;
};

struct RunManifest {
  std::vector<std::pair<std::string, std::string>> config;  ///< effective key=value echo
  std::string version;
  double wall_clock_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> files;  ///< (relative path, fnv1a64)
  std::vector<Check> checks;
  bool pass = false;
};

/// Executes the configured experiment, writing all artifacts plus
/// `summary.json` and `manifest.json` into config.out_dir. The manifest
/// lists every emitted file with its checksum. `pass` is false iff any
/// tolerance gate failed.
RunManifest run(const RunConfig& config);

// Geometry builders shared by experiments and tests.
MeasuredBoundary build_gamma(const RunConfig& c);
MeasuredBoundary build_truncation(const RunConfig& c, double size);

}  // namespace steklov
