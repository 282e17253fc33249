#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "steklov/config.hpp"
#include "steklov/dtn.hpp"
#include "steklov/experiments.hpp"
#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/mesh.hpp"
#include "steklov/transport.hpp"

namespace py = pybind11;
using namespace steklov;

namespace {

std::vector<std::vector<double>> dense_rows(const DenseMatrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_steklov, m) {
  m.doc() = "Poincare-Steklov (Dirichlet-to-Neumann) laboratory on polygonal and "
            "Koch-prefractal boundaries";

  py::register_exception<Error>(m, "SteklovError");

  py::class_<Point2>(m, "Point2")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readonly("x", &Point2::x)
      .def_readonly("y", &Point2::y)
      .def("__repr__", [](Point2 p) {
        return "Point2(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<Polygon>(m, "Polygon")
      .def(py::init([](const std::vector<std::pair<double, double>>& pts) {
             std::vector<Point2> v;
             for (auto [x, y] : pts) v.push_back({x, y});
             return Polygon(std::move(v));
           }),
           py::arg("vertices"))
      .def_property_readonly("vertices",
                             [](const Polygon& p) {
                               std::vector<std::pair<double, double>> out;
                               for (Point2 q : p.vertices()) out.emplace_back(q.x, q.y);
                               return out;
                             })
      .def_property_readonly("edge_count", &Polygon::edge_count)
      .def_property_readonly("signed_area", &Polygon::signed_area)
      .def_property_readonly("counterclockwise", &Polygon::counterclockwise)
      .def("perimeter", &Polygon::perimeter)
      .def("diameter", &Polygon::diameter)
      .def("contains", [](const Polygon& p, double x, double y) { return p.contains({x, y}); });

  py::enum_<BoundaryMeasure>(m, "BoundaryMeasure")
      .value("SelfSimilar", BoundaryMeasure::SelfSimilar)
      .value("Arclength", BoundaryMeasure::Arclength);

  py::class_<MeasuredBoundary>(m, "MeasuredBoundary")
      .def_property_readonly("polygon", &MeasuredBoundary::polygon)
      .def_property_readonly("segment_masses", &MeasuredBoundary::segment_masses)
      .def_property_readonly("d", &MeasuredBoundary::dimension)
      .def_property_readonly("total_mass", &MeasuredBoundary::total_mass)
      .def_property_readonly("segment_count", &MeasuredBoundary::segment_count)
      .def("mass_in_ball",
           [](const MeasuredBoundary& b, double x, double y, double r) {
             return b.mass_in_ball({x, y}, r);
           })
      .def("write", &write_boundary_file, py::arg("path"));

  py::enum_<DomainKind>(m, "DomainKind")
      .value("Interior", DomainKind::Interior)
      .value("Truncated", DomainKind::Truncated);

  py::class_<DomainSpec>(m, "DomainSpec")
      .def_readonly("kind", &DomainSpec::kind)
      .def_readonly("clearance", &DomainSpec::clearance);

  m.def("koch_prefractal", &koch_prefractal, py::arg("base"), py::arg("generation"),
        py::arg("measure") = BoundaryMeasure::SelfSimilar);
  m.def("circle_polygon",
        [](double radius, int n, double cx, double cy) {
          return circle_polygon(radius, n, {cx, cy});
        },
        py::arg("radius"), py::arg("n_segments"), py::arg("cx") = 0.0, py::arg("cy") = 0.0);
  m.def("square_boundary",
        [](double inradius, int per_side, double cx, double cy) {
          return square_boundary(inradius, per_side, {cx, cy});
        },
        py::arg("inradius"), py::arg("segments_per_side"), py::arg("cx") = 0.0,
        py::arg("cy") = 0.0);
  m.def("make_domain", &make_domain, py::arg("kind"), py::arg("gamma"),
        py::arg("s") = std::nullopt);
  m.def("read_boundary_file", &read_boundary_file, py::arg("path"));

  py::class_<DsetEstimate>(m, "DsetEstimate")
      .def_readonly("slope", &DsetEstimate::slope)
      .def_readonly("c1_hat", &DsetEstimate::c1_hat)
      .def_readonly("c2_hat", &DsetEstimate::c2_hat);
  m.def("dset_dimension_estimate", &dset_dimension_estimate, py::arg("boundary"),
        py::arg("radii"), py::arg("n_centers"));

  py::class_<MeshQuality>(m, "MeshQuality")
      .def_readonly("min_angle_deg", &MeshQuality::min_angle_deg)
      .def_readonly("max_aspect", &MeshQuality::max_aspect)
      .def_readonly("h_max", &MeshQuality::h_max)
      .def_readonly("n_vertices", &MeshQuality::n_vertices)
      .def_readonly("n_triangles", &MeshQuality::n_triangles);

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("n_vertices", &Mesh::vertex_count)
      .def_property_readonly("n_triangles", &Mesh::triangle_count)
      .def_property_readonly("vertices",
                             [](const Mesh& mesh) {
                               std::vector<std::pair<double, double>> out;
                               for (Point2 p : mesh.vertices) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_property_readonly("triangles", [](const Mesh& mesh) { return mesh.triangles; })
      .def("total_area", &Mesh::total_area)
      .def("write", &write_mesh_file, py::arg("path"));

  m.def("triangulate", &triangulate, py::arg("domain"), py::arg("h_target"));
  m.def("refine", &refine, py::arg("mesh"));
  m.def("validate_mesh", &validate_mesh, py::arg("mesh"));
  m.def("is_m_matrix_mesh", &is_m_matrix_mesh, py::arg("mesh"), py::arg("tol") = 1e-12);
  m.def("read_mesh_file", &read_mesh_file, py::arg("path"));

  py::class_<BoundaryMassMatrix>(m, "BoundaryMassMatrix")
      .def_property_readonly("gamma_dofs",
                             [](const BoundaryMassMatrix& b) { return b.gamma_dofs; })
      .def_property_readonly("size", &BoundaryMassMatrix::size)
      .def("total_mass", &BoundaryMassMatrix::total_mass)
      .def("dense", [](const BoundaryMassMatrix& b) { return dense_rows(b.to_dense()); });

  py::enum_<BoundaryName>(m, "BoundaryName")
      .value("Gamma", BoundaryName::Gamma)
      .value("S", BoundaryName::S);

  m.def("assemble_boundary_mass", &assemble_boundary_mass, py::arg("mesh"),
        py::arg("which") = BoundaryName::Gamma);

  py::class_<RobinSolution>(m, "RobinSolution")
      .def_readonly("u", &RobinSolution::u)
      .def_readonly("u_mesh", &RobinSolution::u_mesh)
      .def_readonly("lambda_", &RobinSolution::lambda)
      .def_readonly("psi", &RobinSolution::psi)
      .def_readonly("trace_on_gamma", &RobinSolution::trace_on_gamma)
      .def_readonly("total_flux", &RobinSolution::total_flux)
      .def_readonly("gamma_dofs", &RobinSolution::gamma_dofs);

  m.def("robin_solve",
        [](const Mesh& mesh, double lambda, const std::vector<double>& psi) {
          return robin_solve(mesh, lambda, psi);
        },
        py::arg("mesh"), py::arg("lambda_"), py::arg("psi"));
  m.def("harmonic_extend",
        [](const Mesh& mesh, const std::vector<double>& g) { return harmonic_extend(mesh, g); },
        py::arg("mesh"), py::arg("gamma_values"));
  m.def("discrete_green_check",
        [](const Mesh& mesh, const std::vector<double>& u, const std::vector<double>& v) {
          return discrete_green_check(mesh, u, v);
        },
        py::arg("mesh"), py::arg("u"), py::arg("v"));
  m.def("gamma_dof_order", &gamma_dof_order, py::arg("mesh"),
        py::arg("which") = BoundaryName::Gamma);

  py::class_<DtnMatrix>(m, "DtnMatrix")
      .def_property_readonly("size", &DtnMatrix::size)
      .def_readonly("gamma_dofs", &DtnMatrix::gamma_dofs)
      .def_readonly("domain_kind", &DtnMatrix::domain_kind)
      .def_readonly("asymmetry_defect", &DtnMatrix::asymmetry_defect)
      .def("dense", [](const DtnMatrix& d) { return dense_rows(d.a); });

  py::class_<SteklovSpectrum>(m, "SteklovSpectrum")
      .def_readonly("eigenvalues", &SteklovSpectrum::eigenvalues)
      .def_readonly("residuals", &SteklovSpectrum::residuals)
      .def("eigenvector",
           [](const SteklovSpectrum& s, int k) {
             std::vector<double> v(s.eigenvectors.rows());
             for (int i = 0; i < s.eigenvectors.rows(); ++i) v[i] = s.eigenvectors(i, k);
             return v;
           },
           py::arg("k"));

  m.def("schur_dtn", &schur_dtn, py::arg("mesh"), py::arg("threads") = 1);
  m.def("steklov_spectrum",
        [](const DtnMatrix& a, const BoundaryMassMatrix& mm, int k_max) {
          return steklov_spectrum(a, mm, k_max > 0 ? std::optional<int>(k_max) : std::nullopt);
        },
        py::arg("a"), py::arg("m"), py::arg("k_max") = 0);
  m.def("resolvent_apply",
        [](const DtnMatrix& a, const BoundaryMassMatrix& mm, double lambda,
           const std::vector<double>& psi) { return resolvent_apply(a, mm, lambda, psi); },
        py::arg("a"), py::arg("m"), py::arg("lambda_"), py::arg("psi"));
  m.def("operator_distance", &operator_distance, py::arg("a1"), py::arg("a2"), py::arg("m"),
        py::arg("lambda_") = 0.0);
  m.def("poincare_constant", &poincare_constant, py::arg("mesh"));

  py::class_<FluxReport>(m, "FluxReport")
      .def_readonly("lambda_", &FluxReport::lambda)
      .def_readonly("phi_direct", &FluxReport::phi_direct)
      .def_readonly("phi_spectral_full", &FluxReport::phi_spectral_full)
      .def_readonly("phi_partial", &FluxReport::phi_partial)
      .def_readonly("coefficients", &FluxReport::coefficients)
      .def_readonly("complete_spectrum", &FluxReport::complete_spectrum);

  m.def("flux_direct",
        [](const Mesh& mesh, double lambda, const std::vector<double>& psi) {
          return flux_direct(mesh, lambda, psi);
        },
        py::arg("mesh"), py::arg("lambda_"), py::arg("psi"));
  m.def("flux_spectral", &flux_spectral, py::arg("spectrum"), py::arg("m"), py::arg("lambda_"),
        py::arg("phi_direct"));
  m.def("flux_spectral_general",
        [](const SteklovSpectrum& s, const BoundaryMassMatrix& mm, double lambda,
           const std::vector<double>& psi) { return flux_spectral_general(s, mm, lambda, psi); },
        py::arg("spectrum"), py::arg("m"), py::arg("lambda_"), py::arg("psi"));
  m.def("one_gamma_in_domain_check", &one_gamma_in_domain_check, py::arg("spectrum"),
        py::arg("m"));

  py::class_<Check>(m, "Check")
      .def_readonly("name", &Check::name)
      .def_readonly("value", &Check::value)
      .def_readonly("expected", &Check::expected)
      .def_readonly("tolerance", &Check::tolerance)
      .def_readonly("pass_", &Check::pass);

  py::class_<RunManifest>(m, "RunManifest")
      .def_readonly("version", &RunManifest::version)
      .def_readonly("wall_clock_seconds", &RunManifest::wall_clock_seconds)
      .def_readonly("files", &RunManifest::files)
      .def_readonly("checks", &RunManifest::checks)
      .def_readonly("pass_", &RunManifest::pass);

  m.def("run",
        [](const std::string& config_text, const std::string& out_dir, long long seed) {
          RunConfig c = parse_config_text(config_text);
          if (!out_dir.empty()) c.out_dir = out_dir;
          if (seed >= 0) c.seed = static_cast<unsigned long long>(seed);
          return run(c);
        },
        py::arg("config_text"), py::arg("out_dir") = "", py::arg("seed") = -1);
}
