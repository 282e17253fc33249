#pragma once

#include <string>
#include <vector>

#include "steklov/geometry.hpp"

namespace steklov {

enum class ExperimentKind {
  Mesh,
  DsetCheck,
  Steklov,
  SpectrumCompare,
  Mu0Decay,
  TruncationConvergence,
  FluxCompare,
  Monotonicity,
};

std::string experiment_name(ExperimentKind k);

enum class BoundaryKind { Circle, Koch, Square };

/// Flat key=value experiment configuration. Unknown keys are parse errors;
/// defaults are documented per key in the README and echoed into the
/// manifest.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Steklov;

  // Gamma geometry
  BoundaryKind boundary = BoundaryKind::Circle;
  double radius = 1.0;     ///< circle radius / square inradius
  int segments = 256;      ///< circle segments / 4x square segments per side
  int generation = 3;      ///< koch generation
  double side = 1.0;       ///< koch base triangle side
  BoundaryMeasure measure = BoundaryMeasure::SelfSimilar;

  // Truncation geometry
  BoundaryKind truncation = BoundaryKind::Circle;
  std::vector<double> truncation_sizes;  ///< circle radius / square or koch inradius
  int trunc_segments = 256;
  int trunc_generation = 2;

  // Discretization and physics
  double h = 0.05;
  double h_far = 0.4;  ///< bulk size target for truncated meshes (graded from Gamma)
  std::vector<double> lambdas;
  std::vector<double> radii;  ///< dset-check ball radii
  int centers = 16;
  std::vector<Point2> probes;
  int k_max = 0;  ///< 0 = full spectrum

  // Run control
  std::string out_dir = "out";
  unsigned long long seed = 0;
  int threads = 1;
};

/// Parses the strict flat key=value format. Lines starting with '#' and
/// blank lines are ignored. Unknown keys, malformed values and out-of-range
/// entries raise ConfigError naming the key and line.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Effective configuration as ordered key=value lines (defaults filled in).
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c);

}  // namespace steklov
