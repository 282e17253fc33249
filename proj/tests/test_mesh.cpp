#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "steklov/fem.hpp"
#include "steklov/mesh.hpp"

using namespace steklov;

namespace {

Polygon unit_triangle() {
  return Polygon({{0.0, 1.0 / std::sqrt(3.0)},
                  {-0.5, -0.5 / std::sqrt(3.0)},
                  {0.5, -0.5 / std::sqrt(3.0)}});
}

MeasuredBoundary unit_square_boundary() { return square_boundary(0.5, 1, {0.5, 0.5}); }

int euler_characteristic(const Mesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tr : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tr[k], v = tr[(k + 1) % 3];
      edges.insert({std::min(u, v), std::max(u, v)});
    }
  return m.vertex_count() - static_cast<int>(edges.size()) + m.triangle_count();
}

std::map<int, double> per_edge_mass_sums(const Mesh& m, BoundaryName which) {
  std::map<int, double> sums;
  for (const auto& be : m.boundary_edges)
    if (be.boundary == which) sums[be.polygon_edge] += be.mass_share;
  return sums;
}

}  // namespace

TEST_CASE("unit square interior mesh") {
  DomainSpec dom = make_domain(DomainKind::Interior, unit_square_boundary());
  Mesh mesh = triangulate(dom, 0.5);
  MeshQuality q = validate_mesh(mesh);
  CHECK(mesh.triangle_count() >= 2);
  CHECK(q.min_angle_deg >= 20.0 - 1e-9);
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(euler_characteristic(mesh) == 1);
}

TEST_CASE("annulus mesh between circles") {
  MeasuredBoundary gamma = circle_polygon(1.0, 64);
  MeasuredBoundary s = circle_polygon(3.0, 64);
  DomainSpec dom = make_domain(DomainKind::Truncated, gamma, s);
  Mesh mesh = triangulate(dom, 0.2);
  MeshQuality q = validate_mesh(mesh);
  CHECK(q.min_angle_deg >= 20.0 - 1e-9);
  CHECK(euler_characteristic(mesh) == 0);  // one hole
  // Area equals the exact polygon annulus area (shoelace), within rounding.
  double exact = s.polygon().signed_area() - gamma.polygon().signed_area();
  CHECK(mesh.total_area() == doctest::Approx(exact).epsilon(1e-10));
  // And the pi(9-1) disk value within the polygonal defect.
  CHECK(mesh.total_area() == doctest::Approx(M_PI * 8.0).epsilon(0.01));
}

TEST_CASE("koch interior mesh conforms to every polygon edge") {
  MeasuredBoundary gamma = koch_prefractal(unit_triangle(), 3);
  DomainSpec dom = make_domain(DomainKind::Interior, gamma);
  Mesh mesh = triangulate(dom, std::pow(3.0, -3.0));
  validate_mesh(mesh);
  auto sums = per_edge_mass_sums(mesh, BoundaryName::Gamma);
  CHECK(static_cast<int>(sums.size()) == gamma.segment_count());
  for (int e = 0; e < gamma.segment_count(); ++e) {
    REQUIRE(sums.count(e) == 1);
    CHECK(sums[e] == doctest::Approx(gamma.segment_masses()[e]).epsilon(1e-12));
  }
}

TEST_CASE("graded truncated mesh stays small") {
  MeasuredBoundary gamma = circle_polygon(1.0, 256);
  MeasuredBoundary s = circle_polygon(16.0, 256);
  DomainSpec dom = make_domain(DomainKind::Truncated, gamma, s);
  Mesh mesh = triangulate(dom, 0.4);
  MeshQuality q = validate_mesh(mesh);
  CHECK(q.min_angle_deg >= 20.0 - 1e-9);
  CHECK(mesh.triangle_count() < 80000);
  // Gamma keeps its native 256 subdivision (edges shorter than h_target).
  int n_gamma = 0;
  for (const auto& be : mesh.boundary_edges)
    if (be.boundary == BoundaryName::Gamma) ++n_gamma;
  CHECK(n_gamma == 256);
}

TEST_CASE("h_target validation") {
  MeasuredBoundary gamma = circle_polygon(1.0, 64);
  MeasuredBoundary s = circle_polygon(2.0, 64);
  DomainSpec dom = make_domain(DomainKind::Truncated, gamma, s);
  CHECK_THROWS_AS(triangulate(dom, 0.9), ParameterError);  // > clearance/2
  CHECK_THROWS_AS(triangulate(dom, -0.1), ParameterError);
  DomainSpec interior = make_domain(DomainKind::Interior, gamma);
  CHECK_THROWS_AS(triangulate(interior, 5.0), ParameterError);  // > diameter
}

TEST_CASE("refine splits each triangle in four and preserves measure") {
  MeasuredBoundary gamma = circle_polygon(1.0, 32);
  DomainSpec dom = make_domain(DomainKind::Interior, gamma);
  Mesh mesh = triangulate(dom, 0.35);
  Mesh fine = refine(mesh);
  validate_mesh(fine);
  CHECK(fine.triangle_count() == 4 * mesh.triangle_count());
  CHECK(fine.total_area() == doctest::Approx(mesh.total_area()).epsilon(1e-12));

  MeshQuality q0 = validate_mesh(mesh);
  MeshQuality q1 = validate_mesh(fine);
  CHECK(q1.min_angle_deg == doctest::Approx(q0.min_angle_deg).epsilon(1e-9));

  auto sums0 = per_edge_mass_sums(mesh, BoundaryName::Gamma);
  auto sums1 = per_edge_mass_sums(fine, BoundaryName::Gamma);
  for (auto& [e, m0] : sums0) CHECK(sums1[e] == doctest::Approx(m0).epsilon(1e-12));

  // Twice refined: sums still invariant.
  auto sums2 = per_edge_mass_sums(refine(fine), BoundaryName::Gamma);
  for (auto& [e, m0] : sums0) CHECK(sums2[e] == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("boundary vertices sit on their polygon edges") {
  MeasuredBoundary gamma = koch_prefractal(unit_triangle(), 2);
  DomainSpec dom = make_domain(DomainKind::Interior, gamma);
  Mesh mesh = triangulate(dom, 1.0 / 9.0);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const VertexInfo& vi = mesh.vertex_info[v];
    if (vi.tag != VertexTag::OnGamma) continue;
    Point2 p = gamma.polygon().point_on_edge(vi.polygon_edge, vi.param);
    CHECK(distance(p, mesh.vertices[v]) <= 1e-12);
  }
}

TEST_CASE("validate_mesh reports specific violations") {
  // Hand-built 2-triangle unit square.
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.vertex_info = {{VertexTag::OnGamma, 0, 0.0},
                   {VertexTag::OnGamma, 1, 0.0},
                   {VertexTag::OnGamma, 2, 0.0},
                   {VertexTag::OnGamma, 3, 0.0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_edges = {{0, 1, BoundaryName::Gamma, 0, 1.0},
                      {1, 2, BoundaryName::Gamma, 1, 1.0},
                      {2, 3, BoundaryName::Gamma, 2, 1.0},
                      {3, 0, BoundaryName::Gamma, 3, 1.0}};
  MeshQuality q = validate_mesh(m);
  CHECK(q.min_angle_deg == doctest::Approx(45.0));
  CHECK(q.h_max == doctest::Approx(std::sqrt(2.0)));

  SUBCASE("flipped triangle is reported") {
    Mesh bad = m;
    std::swap(bad.triangles[0][0], bad.triangles[0][1]);
    CHECK_THROWS_AS(validate_mesh(bad), MeshValidationError);
    try {
      validate_mesh(bad);
    } catch (const MeshValidationError& e) {
      bool found = false;
      for (const auto& v : e.violations)
        if (v.find("triangle 0") != std::string::npos) found = true;
      CHECK(found);
    }
  }
  SUBCASE("wrong mass partition is reported when the domain is attached") {
    Mesh bad = m;
    bad.domain = make_domain(DomainKind::Interior, unit_square_boundary());
    bad.boundary_edges[0].mass_share = 0.9;
    CHECK_THROWS_AS(validate_mesh(bad), MeshValidationError);
  }
}

TEST_CASE("mesh file round-trip") {
  MeasuredBoundary gamma = circle_polygon(1.0, 32);
  DomainSpec dom = make_domain(DomainKind::Interior, gamma);
  Mesh mesh = triangulate(dom, 0.3);
  std::string text = write_mesh_text(mesh);
  Mesh back = read_mesh_text(text);
  CHECK(back.vertex_count() == mesh.vertex_count());
  CHECK(back.triangle_count() == mesh.triangle_count());
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    CHECK(back.vertices[v].x == mesh.vertices[v].x);  // 17-digit round-trip is exact
    CHECK(back.vertices[v].y == mesh.vertices[v].y);
  }
  CHECK(write_mesh_text(back) == text);
}

TEST_CASE("delaunay meshes certify the M-matrix property") {
  MeasuredBoundary gamma = circle_polygon(1.0, 64);
  MeasuredBoundary s = circle_polygon(3.0, 64);
  Mesh mesh = triangulate(make_domain(DomainKind::Truncated, gamma, s), 0.25);
  CHECK(is_m_matrix_mesh(mesh, 1e-9));
}
