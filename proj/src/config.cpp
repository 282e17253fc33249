#include "steklov/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steklov/errors.hpp"
#include "steklov/util.hpp"

namespace steklov {

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Mesh: return "mesh";
    case ExperimentKind::DsetCheck: return "dset-check";
    case ExperimentKind::Steklov: return "steklov";
    case ExperimentKind::SpectrumCompare: return "spectrum-compare";
    case ExperimentKind::Mu0Decay: return "mu0-decay";
    case ExperimentKind::TruncationConvergence: return "truncation-convergence";
    case ExperimentKind::FluxCompare: return "flux-compare";
    case ExperimentKind::Monotonicity: return "monotonicity";
  }
  return "?";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v, int line) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "' (line " +
                          std::to_string(line) + ")",
                      key, line);
  }
}

long long parse_int(const std::string& key, const std::string& v, int line) {
  try {
    size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "' (line " +
                          std::to_string(line) + ")",
                      key, line);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  for (const std::string& part : split(v, ','))
    out.push_back(parse_double(key, trim(part), line));
  return out;
}

BoundaryKind parse_boundary_kind(const std::string& key, const std::string& v, int line) {
  if (v == "circle") return BoundaryKind::Circle;
  if (v == "koch") return BoundaryKind::Koch;
  if (v == "square") return BoundaryKind::Square;
  throw ConfigError("key '" + key + "' expects circle|koch|square, got '" + v + "' (line " +
                        std::to_string(line) + ")",
                    key, line);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  bool have_experiment = false;
  bool have_lambda = false, have_L = false, have_radii = false, have_probes = false;
  bool have_h = false;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value (line " + std::to_string(lineno) + ")", line, lineno);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (key == "experiment") {
      have_experiment = true;
      if (val == "mesh") c.experiment = ExperimentKind::Mesh;
      else if (val == "dset-check") c.experiment = ExperimentKind::DsetCheck;
      else if (val == "steklov") c.experiment = ExperimentKind::Steklov;
      else if (val == "spectrum-compare") c.experiment = ExperimentKind::SpectrumCompare;
      else if (val == "mu0-decay") c.experiment = ExperimentKind::Mu0Decay;
      else if (val == "truncation-convergence") c.experiment = ExperimentKind::TruncationConvergence;
      else if (val == "flux-compare") c.experiment = ExperimentKind::FluxCompare;
      else if (val == "monotonicity") c.experiment = ExperimentKind::Monotonicity;
      else
        throw ConfigError("unknown experiment '" + val + "' (line " + std::to_string(lineno) + ")",
                          key, lineno);
    } else if (key == "boundary") {
      c.boundary = parse_boundary_kind(key, val, lineno);
    } else if (key == "truncation") {
      c.truncation = parse_boundary_kind(key, val, lineno);
    } else if (key == "radius") {
      c.radius = parse_double(key, val, lineno);
      if (!(c.radius > 0))
        throw ConfigError("radius must be positive (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "segments") {
      c.segments = static_cast<int>(parse_int(key, val, lineno));
      if (c.segments < 8)
        throw ConfigError("segments must be at least 8 (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "generation") {
      c.generation = static_cast<int>(parse_int(key, val, lineno));
      if (c.generation < 0 || c.generation > 8)
        throw ConfigError("generation must be in [0, 8] (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "side") {
      c.side = parse_double(key, val, lineno);
      if (!(c.side > 0))
        throw ConfigError("side must be positive (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "measure") {
      if (val == "self-similar") c.measure = BoundaryMeasure::SelfSimilar;
      else if (val == "arclength") c.measure = BoundaryMeasure::Arclength;
      else
        throw ConfigError("measure expects self-similar|arclength (line " +
                              std::to_string(lineno) + ")",
                          key, lineno);
    } else if (key == "L") {
      have_L = true;
      c.truncation_sizes = parse_list(key, val, lineno);
      for (double l : c.truncation_sizes)
        if (!(l > 0))
          throw ConfigError("L entries must be positive (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "trunc_segments") {
      c.trunc_segments = static_cast<int>(parse_int(key, val, lineno));
      if (c.trunc_segments < 8)
        throw ConfigError("trunc_segments must be at least 8 (line " + std::to_string(lineno) + ")",
                          key, lineno);
    } else if (key == "trunc_generation") {
      c.trunc_generation = static_cast<int>(parse_int(key, val, lineno));
      if (c.trunc_generation < 0 || c.trunc_generation > 8)
        throw ConfigError("trunc_generation must be in [0, 8] (line " + std::to_string(lineno) + ")",
                          key, lineno);
    } else if (key == "h") {
      have_h = true;
      c.h = parse_double(key, val, lineno);
      if (!(c.h > 0))
        throw ConfigError("h must be positive (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "h_far") {
      c.h_far = parse_double(key, val, lineno);
      if (!(c.h_far > 0))
        throw ConfigError("h_far must be positive (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "lambda") {
      have_lambda = true;
      c.lambdas = parse_list(key, val, lineno);
      for (double l : c.lambdas)
        if (l < 0)
          throw ConfigError("lambda entries must be non-negative (line " +
                                std::to_string(lineno) + ")",
                            key, lineno);
    } else if (key == "radii") {
      have_radii = true;
      c.radii = parse_list(key, val, lineno);
    } else if (key == "centers") {
      c.centers = static_cast<int>(parse_int(key, val, lineno));
      if (c.centers < 8)
        throw ConfigError("centers must be at least 8 (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "probes") {
      have_probes = true;
      c.probes.clear();
      for (const std::string& pair : split(val, ';')) {
        auto xy = split(trim(pair), ':');
        if (xy.size() != 2)
          throw ConfigError("probes expects x:y pairs separated by ';' (line " +
                                std::to_string(lineno) + ")",
                            key, lineno);
        c.probes.push_back({parse_double(key, trim(xy[0]), lineno),
                            parse_double(key, trim(xy[1]), lineno)});
      }
    } else if (key == "k_max") {
      c.k_max = static_cast<int>(parse_int(key, val, lineno));
      if (c.k_max < 0)
        throw ConfigError("k_max must be non-negative (line " + std::to_string(lineno) + ")", key, lineno);
    } else if (key == "out") {
      c.out_dir = val;
    } else if (key == "seed") {
      c.seed = static_cast<unsigned long long>(parse_int(key, val, lineno));
    } else if (key == "threads") {
      c.threads = static_cast<int>(parse_int(key, val, lineno));
      if (c.threads < 1)
        throw ConfigError("threads must be at least 1 (line " + std::to_string(lineno) + ")", key, lineno);
    } else {
      throw ConfigError("unknown key '" + key + "' (line " + std::to_string(lineno) + ")", key,
                        lineno);
    }
  }
  if (!have_experiment) throw ConfigError("missing required key 'experiment'", "experiment", 0);

  // Documented per-experiment defaults.
  if (!have_h && c.experiment == ExperimentKind::Steklov) c.h = 0.05;
  if (!have_L) {
    switch (c.experiment) {
      case ExperimentKind::SpectrumCompare: c.truncation_sizes = {4, 8, 16}; break;
      case ExperimentKind::Mu0Decay:
      case ExperimentKind::TruncationConvergence: c.truncation_sizes = {2, 4, 8, 16}; break;
      case ExperimentKind::FluxCompare: c.truncation_sizes = {std::exp(1.0)}; break;
      case ExperimentKind::Monotonicity: c.truncation_sizes = {2, 4, 8}; break;
      default: break;
    }
  }
  if (!have_lambda) {
    switch (c.experiment) {
      case ExperimentKind::FluxCompare: c.lambdas = {0.1, 1.0, 10.0}; break;
      case ExperimentKind::Monotonicity: c.lambdas = {0.5, 1.0, 2.0}; break;
      default: c.lambdas = {1.0}; break;
    }
  }
  if (!have_radii) {
    if (c.boundary == BoundaryKind::Koch)
      c.radii = {1.0 / 3, 1.0 / 9, 1.0 / 27, 1.0 / 81};
    else
      c.radii = {0.5, 0.25, 0.125};
  }
  if (!have_probes) c.probes = {{1.5, 0.0}, {0.0, 1.5}};
  return c;
}

RunConfig parse_config(const std::string& path) { return parse_config_text(read_file(path)); }

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c) {
  auto kind_name = [](BoundaryKind k) {
    return k == BoundaryKind::Circle ? "circle" : (k == BoundaryKind::Koch ? "koch" : "square");
  };
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_g17(v[i]);
    return s;
  };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("experiment", experiment_name(c.experiment));
  kv.emplace_back("boundary", kind_name(c.boundary));
  kv.emplace_back("radius", format_g17(c.radius));
  kv.emplace_back("segments", std::to_string(c.segments));
  kv.emplace_back("generation", std::to_string(c.generation));
  kv.emplace_back("side", format_g17(c.side));
  kv.emplace_back("measure",
                  c.measure == BoundaryMeasure::SelfSimilar ? "self-similar" : "arclength");
  kv.emplace_back("truncation", kind_name(c.truncation));
  kv.emplace_back("L", join(c.truncation_sizes));
  kv.emplace_back("trunc_segments", std::to_string(c.trunc_segments));
  kv.emplace_back("trunc_generation", std::to_string(c.trunc_generation));
  kv.emplace_back("h", format_g17(c.h));
  kv.emplace_back("h_far", format_g17(c.h_far));
  kv.emplace_back("lambda", join(c.lambdas));
  kv.emplace_back("radii", join(c.radii));
  kv.emplace_back("centers", std::to_string(c.centers));
  std::string probes;
  for (size_t i = 0; i < c.probes.size(); ++i)
    probes += (i ? ";" : "") + format_g17(c.probes[i].x) + ":" + format_g17(c.probes[i].y);
  kv.emplace_back("probes", probes);
  kv.emplace_back("k_max", std::to_string(c.k_max));
  kv.emplace_back("out", c.out_dir);
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("threads", std::to_string(c.threads));
  return kv;
}

}  // namespace steklov
