#include "steklov/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steklov/dtn.hpp"
#include "steklov/errors.hpp"
#include "steklov/fem.hpp"
#include "steklov/transport.hpp"
#include "steklov/util.hpp"

namespace steklov {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "steklov-lab 0.1.0";

struct Emitter {
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> files;

  void emit(const std::string& name, const std::string& contents) {
    write_file((std::filesystem::path(out_dir) / name).string(), contents);
    files.emplace_back(name, fnv1a64_hex(contents));
  }
};

Check make_check(const std::string& name, double value, double expected, double tol) {
  Check c{name, value, expected, tol, std::abs(value - expected) <= tol};
  return c;
}

Check make_flag(const std::string& name, bool ok) {
  Check c{name, ok ? 1.0 : 0.0, 1.0, 0.0, ok};
  return c;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
    out << "\n";
  }
  return out.str();
}

Mesh mesh_interior(const MeasuredBoundary& gamma, double h) {
  return triangulate(make_domain(DomainKind::Interior, gamma), h);
}

Mesh mesh_truncated(const MeasuredBoundary& gamma, const MeasuredBoundary& s, double h) {
  return triangulate(make_domain(DomainKind::Truncated, gamma, s), h);
}

double annulus_mu0_oracle(double r, double l) { return 1.0 / (r * std::log(l / r)); }

// ---------------------------------------------------------------------------

void run_mesh(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  Mesh mesh;
  if (!c.truncation_sizes.empty()) {
    MeasuredBoundary s = build_truncation(c, c.truncation_sizes.front());
    DomainSpec dom = make_domain(DomainKind::Truncated, gamma, s);
    mesh = triangulate(dom, std::min(c.h_far, dom.clearance / 2));
  } else {
    mesh = mesh_interior(gamma, c.h);
  }
  MeshQuality q = validate_mesh(mesh);
  em.emit("mesh.txt", write_mesh_text(mesh));
  checks.push_back(make_flag("mesh_valid", true));
  Check angle{"min_angle_deg", q.min_angle_deg, 20.0, 0.0, q.min_angle_deg >= 20.0 - 1e-9};
  checks.push_back(angle);

  std::vector<std::vector<double>> rows{{q.min_angle_deg, q.max_aspect, q.h_max,
                                         static_cast<double>(q.n_vertices),
                                         static_cast<double>(q.n_triangles), mesh.total_area()}};
  em.emit("quality.csv",
          csv_table({"min_angle_deg", "max_aspect", "h_max", "n_vertices", "n_triangles", "area"},
                    rows));
}

void run_dset_check(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  std::vector<double> radii = c.radii;
  DsetEstimate est = dset_dimension_estimate(gamma, radii, c.centers);

  double expected = c.boundary == BoundaryKind::Koch ? std::log(4.0) / std::log(3.0) : 1.0;
  double tol = c.boundary == BoundaryKind::Koch ? 0.05 : 0.02;
  checks.push_back(make_check("dset_slope", est.slope, expected, tol));
  checks.push_back(make_flag("dset_bounds_positive", est.c1_hat > 0 && est.c2_hat >= est.c1_hat));

  std::vector<std::vector<double>> rows;
  std::vector<Point2> centers = dset_centers(gamma, c.centers);
  for (int ci = 0; ci < c.centers; ++ci) {
    for (double r : radii)
      rows.push_back({static_cast<double>(ci), r, gamma.mass_in_ball(centers[ci], r)});
  }
  em.emit("dset_samples.csv", csv_table({"center", "r", "mass"}, rows));
  em.emit("dset_fit.csv", csv_table({"slope", "c1_hat", "c2_hat", "expected", "tolerance"},
                                    {{est.slope, est.c1_hat, est.c2_hat, expected, tol}}));
}

void run_steklov(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  Mesh mesh = mesh_interior(gamma, c.h);
  DtnMatrix a = schur_dtn(mesh, c.threads);
  BoundaryMassMatrix m = assemble_boundary_mass(mesh, BoundaryName::Gamma);
  SteklovSpectrum s = steklov_spectrum(a, m, c.k_max > 0 ? std::optional<int>(c.k_max)
                                                         : std::nullopt);
  em.emit("spectrum.csv", write_spectrum_csv(s));

  checks.push_back(make_check("mu0_zero", s.eigenvalues.front(), 0.0, 1e-9));
  if (c.boundary == BoundaryKind::Circle) {
    // Separation-of-variables oracle: mu_k = k/R with multiplicity two.
    const int oracle_modes[7] = {1, 1, 2, 2, 3, 3, 4};
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= 7 && k < static_cast<int>(s.eigenvalues.size()); ++k) {
      double want = oracle_modes[k - 1] / c.radius;
      double got = s.eigenvalues[k];
      checks.push_back(make_check("mu" + std::to_string(k) + "_vs_oracle", got, want, 0.02 * want));
      rows.push_back({static_cast<double>(k), got, want, std::abs(got - want) / want});
    }
    em.emit("oracle.csv", csv_table({"k", "mu", "oracle", "rel_err"}, rows));
  } else {
    checks.push_back(make_flag("mu1_positive", s.eigenvalues.size() > 1 && s.eigenvalues[1] > 0));
  }
}

void run_spectrum_compare(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  Mesh interior = mesh_interior(gamma, c.h);
  DtnMatrix a_int = schur_dtn(interior, c.threads);
  BoundaryMassMatrix m_int = assemble_boundary_mass(interior, BoundaryName::Gamma);
  SteklovSpectrum s_int = steklov_spectrum(a_int, m_int);

  std::vector<std::vector<double>> rows;
  std::vector<double> gaps;
  for (double l : c.truncation_sizes) {
    MeasuredBoundary s_bnd = build_truncation(c, l);
    Mesh trunc = mesh_truncated(gamma, s_bnd, c.h_far);
    DtnMatrix a_tr = schur_dtn(trunc, c.threads);
    BoundaryMassMatrix m_tr = assemble_boundary_mass(trunc, BoundaryName::Gamma);
    SteklovSpectrum s_tr = steklov_spectrum(a_tr, m_tr, 8);
    double gap = 0;
    std::vector<double> row{l};
    for (int k = 1; k <= 5; ++k) {
      double gi = s_int.eigenvalues[k];
      double gt = s_tr.eigenvalues[k];
      gap = std::max(gap, std::abs(gi - gt) / gi);
      row.push_back(gt);
    }
    for (int k = 1; k <= 5; ++k) row.push_back(s_int.eigenvalues[k]);
    row.push_back(gap);
    rows.push_back(row);
    gaps.push_back(gap);
  }
  em.emit("spectrum_compare.csv",
          csv_table({"L", "mu1_trunc", "mu2_trunc", "mu3_trunc", "mu4_trunc", "mu5_trunc",
                     "mu1_int", "mu2_int", "mu3_int", "mu4_int", "mu5_int", "max_gap"},
                    rows));

  bool monotone = true;
  for (size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] >= gaps[i - 1]) monotone = false;
  checks.push_back(make_flag("gap_monotone_decreasing", monotone));
  Check final_gap{"final_gap", gaps.back(), 0.0, 0.05, gaps.back() <= 0.05};
  checks.push_back(final_gap);
}

void run_mu0_decay(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  std::vector<std::vector<double>> rows;
  std::vector<double> mu0s;
  for (double l : c.truncation_sizes) {
    MeasuredBoundary s_bnd = build_truncation(c, l);
    Mesh trunc = mesh_truncated(gamma, s_bnd, c.h_far);
    DtnMatrix a = schur_dtn(trunc, c.threads);
    BoundaryMassMatrix m = assemble_boundary_mass(trunc, BoundaryName::Gamma);
    SteklovSpectrum s = steklov_spectrum(a, m, 2);
    double mu0 = s.eigenvalues.front();
    double oracle = annulus_mu0_oracle(c.radius, l);
    mu0s.push_back(mu0);
    rows.push_back({l, mu0, oracle, std::abs(mu0 - oracle) / oracle});
    checks.push_back(make_check("mu0_L" + format_g17(l), mu0, oracle, 0.05 * oracle));
  }
  em.emit("mu0_decay.csv", csv_table({"L", "mu0", "oracle", "rel_err"}, rows));
  bool decreasing = true;
  for (size_t i = 1; i < mu0s.size(); ++i)
    if (mu0s[i] >= mu0s[i - 1]) decreasing = false;
  checks.push_back(make_flag("mu0_strictly_decreasing", decreasing));
}

void run_truncation_convergence(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  std::vector<DtnMatrix> ops;
  std::vector<BoundaryMassMatrix> masses;
  for (double l : c.truncation_sizes) {
    MeasuredBoundary s_bnd = build_truncation(c, l);
    Mesh trunc = mesh_truncated(gamma, s_bnd, c.h_far);
    ops.push_back(schur_dtn(trunc, c.threads));
    masses.push_back(assemble_boundary_mass(trunc, BoundaryName::Gamma));
  }
  const DtnMatrix& ref = ops.back();
  double lref = c.truncation_sizes.back();
  std::vector<std::vector<double>> rows;
  std::vector<double> dists;
  for (size_t i = 0; i + 1 < ops.size(); ++i) {
    double d = operator_distance(ops[i], ref, masses.back(), 0.0);
    double d_res = operator_distance(ops[i], ref, masses.back(), c.lambdas.front());
    double oracle = c.radius * std::log(lref / c.truncation_sizes[i]);
    dists.push_back(d);
    rows.push_back({c.truncation_sizes[i], d, oracle, d_res});
    checks.push_back(
        make_check("opdist_L" + format_g17(c.truncation_sizes[i]), d, oracle, 0.10 * oracle));
  }
  em.emit("truncation_convergence.csv",
          csv_table({"L", "op_distance_to_ref", "oracle", "resolvent_distance_lambda0"}, rows));
  bool decreasing = true;
  for (size_t i = 1; i < dists.size(); ++i)
    if (dists[i] >= dists[i - 1]) decreasing = false;
  checks.push_back(make_flag("distance_decreasing", decreasing));
}

void run_flux_compare(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  double l = c.truncation_sizes.front();
  MeasuredBoundary s_bnd = build_truncation(c, l);
  Mesh mesh = mesh_truncated(gamma, s_bnd, c.h_far);
  DtnMatrix a = schur_dtn(mesh, c.threads);
  BoundaryMassMatrix m = assemble_boundary_mass(mesh, BoundaryName::Gamma);
  SteklovSpectrum spec = steklov_spectrum(a, m);

  DeterministicRng rng(c.seed + 1);
  std::vector<double> psi_random(m.size());
  for (double& v : psi_random) v = rng.uniform(-1.0, 1.0);

  for (double lambda : c.lambdas) {
    std::vector<double> psi(m.size(), lambda);
    double phi_d = flux_direct(mesh, lambda, psi);
    FluxReport r = flux_spectral(spec, m, lambda, phi_d);
    em.emit("flux_lambda_" + format_g17(lambda) + ".csv", write_flux_csv(r));
    double scale = std::max(std::abs(phi_d), 1e-12 * lambda * m.total_mass());
    checks.push_back(make_check("flux_identity_lambda_" + format_g17(lambda),
                                r.phi_spectral_full, phi_d, 1e-8 * scale));

    double phi_d_rand = flux_direct(mesh, lambda, psi_random);
    double phi_s_rand = flux_spectral_general(spec, m, lambda, psi_random);
    double scale_r = std::max(std::abs(phi_d_rand), 1e-12);
    checks.push_back(make_check("flux_identity_random_psi_lambda_" + format_g17(lambda),
                                phi_s_rand, phi_d_rand, 1e-8 * scale_r));
  }

  // Oracle on the annulus at lambda = 1, psi = lambda 1: Phi = 2 pi lambda R /
  // (1 + lambda R ln(L/R)).
  if (c.boundary == BoundaryKind::Circle && c.truncation == BoundaryKind::Circle) {
    double lambda = 1.0;
    std::vector<double> psi(m.size(), lambda);
    double phi = flux_direct(mesh, lambda, psi);
    double oracle =
        2.0 * M_PI * lambda * c.radius / (1.0 + lambda * c.radius * std::log(l / c.radius));
    checks.push_back(make_check("flux_oracle", phi, oracle, 0.02 * oracle));
  }
}

void run_monotonicity(const RunConfig& c, Emitter& em, std::vector<Check>& checks) {
  MeasuredBoundary gamma = build_gamma(c);
  std::vector<Mesh> meshes;
  for (double l : c.truncation_sizes)
    meshes.push_back(mesh_truncated(gamma, build_truncation(c, l), c.h_far));

  double lambda = c.lambdas.size() > 1 ? c.lambdas[1] : c.lambdas.front();
  auto table = domain_monotonicity_probe(meshes, lambda, 1.0, c.probes);
  std::vector<std::vector<double>> rows;
  bool nondecreasing = true;
  for (size_t p = 0; p < table.size(); ++p) {
    std::vector<double> row{c.probes[p].x, c.probes[p].y};
    for (double v : table[p]) row.push_back(v);
    rows.push_back(row);
    for (size_t i = 1; i < table[p].size(); ++i)
      if (table[p][i] < table[p][i - 1] - 1e-6) nondecreasing = false;
  }
  std::vector<std::string> header{"probe_x", "probe_y"};
  for (double l : c.truncation_sizes) header.push_back("u_L" + format_g17(l));
  em.emit("probe_table.csv", csv_table(header, rows));
  checks.push_back(make_flag("solution_monotone_in_L", nondecreasing));

  // Monotonicity in lambda and the 1/lambda bound on the smallest domain,
  // asserted on meshes whose stiffness is an M-matrix.
  const Mesh& mesh = meshes.front();
  if (is_m_matrix_mesh(mesh)) {
    std::vector<double> lam = c.lambdas;
    std::sort(lam.begin(), lam.end());
    std::vector<int> gdofs = gamma_dof_order(mesh);
    std::vector<double> psi(gdofs.size(), 1.0);
    std::vector<RobinSolution> sols;
    for (double l : lam) sols.push_back(robin_solve(mesh, l, psi));
    bool mono_lambda = true;
    for (size_t i = 1; i < sols.size(); ++i)
      for (size_t j = 0; j < sols[i].u.size(); ++j)
        if (sols[i].u[j] > sols[i - 1].u[j] + 1e-10) mono_lambda = false;
    checks.push_back(make_flag("solution_monotone_in_lambda", mono_lambda));
    bool bounded = true;
    for (size_t i = 0; i < sols.size(); ++i) {
      if (lam[i] <= 0) continue;
      double umax = *std::max_element(sols[i].u.begin(), sols[i].u.end());
      double umin = *std::min_element(sols[i].u.begin(), sols[i].u.end());
      if (umax > 1.0 / lam[i] + 1e-10 || umin < -1e-10) bounded = false;
    }
    checks.push_back(make_flag("solution_bounded_by_inverse_lambda", bounded));
  } else {
    checks.push_back(make_flag("warning_mesh_not_m_matrix_lambda_probes_skipped", true));
  }
}

}  // namespace

MeasuredBoundary build_gamma(const RunConfig& c) {
  switch (c.boundary) {
    case BoundaryKind::Circle: return circle_polygon(c.radius, c.segments);
    case BoundaryKind::Square: return square_boundary(c.radius, std::max(1, c.segments / 4));
    case BoundaryKind::Koch: {
      // Equilateral base triangle of side `side`, centroid at the origin.
      double a = c.side;
      std::vector<Point2> tri{{0.0, a / std::sqrt(3.0)},
                              {-a / 2.0, -a / (2.0 * std::sqrt(3.0))},
                              {a / 2.0, -a / (2.0 * std::sqrt(3.0))}};
      return koch_prefractal(Polygon(tri), c.generation, c.measure);
    }
  }
  throw ParameterError("unknown boundary kind");
}

MeasuredBoundary build_truncation(const RunConfig& c, double size) {
  switch (c.truncation) {
    case BoundaryKind::Circle: return circle_polygon(size, c.trunc_segments);
    case BoundaryKind::Square: return square_boundary(size, std::max(1, c.trunc_segments / 4));
    case BoundaryKind::Koch: {
      // Equilateral base triangle of inradius `size`, centered at the origin;
      // the prefractal keeps that inradius (bumps point outward).
      double rc = 2.0 * size;  // circumradius
      std::vector<Point2> tri{{0.0, rc},
                              {-rc * std::sqrt(3.0) / 2.0, -rc / 2.0},
                              {rc * std::sqrt(3.0) / 2.0, -rc / 2.0}};
      return koch_prefractal(Polygon(tri), c.trunc_generation, BoundaryMeasure::Arclength);
    }
  }
  throw ParameterError("unknown truncation kind");
}

RunManifest run(const RunConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  Emitter em;
  em.out_dir = config.out_dir;
  std::filesystem::create_directories(config.out_dir);

  std::vector<Check> checks;
  switch (config.experiment) {
    case ExperimentKind::Mesh: run_mesh(config, em, checks); break;
    case ExperimentKind::DsetCheck: run_dset_check(config, em, checks); break;
    case ExperimentKind::Steklov: run_steklov(config, em, checks); break;
    case ExperimentKind::SpectrumCompare: run_spectrum_compare(config, em, checks); break;
    case ExperimentKind::Mu0Decay: run_mu0_decay(config, em, checks); break;
    case ExperimentKind::TruncationConvergence:
      run_truncation_convergence(config, em, checks);
      break;
    case ExperimentKind::FluxCompare: run_flux_compare(config, em, checks); break;
    case ExperimentKind::Monotonicity: run_monotonicity(config, em, checks); break;
  }

  RunManifest manifest;
  manifest.config = config_echo(config);
  manifest.version = kVersion;
  manifest.checks = checks;
  manifest.pass = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });

  ordered_json summary;
  summary["experiment"] = experiment_name(config.experiment);
  summary["pass"] = manifest.pass;
  summary["checks"] = ordered_json::array();
  for (const Check& c : checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["expected"] = c.expected;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    summary["checks"].push_back(jc);
  }
  em.emit("summary.json", summary.dump(2) + "\n");

  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.files = em.files;

  ordered_json jm;
  jm["version"] = manifest.version;
  jm["config"] = ordered_json::object();
  for (const auto& [k, v] : manifest.config) jm["config"][k] = v;
  jm["wall_clock_seconds"] = manifest.wall_clock_seconds;
  jm["pass"] = manifest.pass;
  jm["files"] = ordered_json::array();
  for (const auto& [path, checksum] : manifest.files) {
    ordered_json jf;
    jf["path"] = path;
    jf["fnv1a64"] = checksum;
    jm["files"].push_back(jf);
  }
  write_file((std::filesystem::path(config.out_dir) / "manifest.json").string(),
             jm.dump(2) + "\n");
  return manifest;
}

}  // namespace steklov
