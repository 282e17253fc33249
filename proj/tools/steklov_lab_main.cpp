#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "steklov/config.hpp"
#include "steklov/errors.hpp"
#include "steklov/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"steklov-lab: Poincare-Steklov operators on polygonal and prefractal boundaries"};

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
  app.add_option("config", config_path, "experiment config file (key=value lines)")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config's `out`)");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--threads", threads, "worker threads for the Schur column solves");
  CLI11_PARSE(app, argc, argv);

  try {
    steklov::RunConfig config = steklov::parse_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed >= 0) config.seed = static_cast<unsigned long long>(seed);
    if (threads > 0) config.threads = threads;

    steklov::RunManifest manifest = steklov::run(config);
    for (const auto& check : manifest.checks)
      std::printf("%s  %s (value %.10g, expected %.10g, tol %.3g)\n",
                  check.pass ? "PASS" : "FAIL", check.name.c_str(), check.value, check.expected,
                  check.tolerance);
    std::printf("%s: %s in %.2fs, %zu file(s) -> %s\n", manifest.pass ? "OK" : "FAILED",
                steklov::experiment_name(config.experiment).c_str(),
                manifest.wall_clock_seconds, manifest.files.size(), config.out_dir.c_str());
    return manifest.pass ? 0 : 1;
  } catch (const steklov::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
