#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "steklov/errors.hpp"
#include "steklov/mesh.hpp"
#include "steklov/util.hpp"

namespace steklov {

namespace {

double signed_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

const MeasuredBoundary& boundary_of(const DomainSpec& d, BoundaryName name) {
  return name == BoundaryName::Gamma ? d.gamma : *d.s;
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double Mesh::total_area() const {
  double s = 0;
  for (int t = 0; t < triangle_count(); ++t) s += triangle_area(t);
  return s;
}

Mesh refine(const Mesh& mesh) {
  Mesh out;
  out.domain = mesh.domain;
  out.vertices = mesh.vertices;
  out.vertex_info = mesh.vertex_info;

  // Boundary edge midpoints must land on their polygon edge, so they are
  // keyed first and placed from the polygon parameterization when possible.
  std::map<std::pair<int, int>, int> midpoint;
  auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

  for (const BoundaryEdge& be : mesh.boundary_edges) {
    VertexInfo i0 = mesh.vertex_info[be.v0];
    VertexInfo i1 = mesh.vertex_info[be.v1];
    double t0 = (i0.polygon_edge == be.polygon_edge) ? i0.param : 1.0;
    double t1 = (i1.polygon_edge == be.polygon_edge) ? i1.param : 1.0;
    double tm = 0.5 * (t0 + t1);
    Point2 p;
    if (mesh.domain)
      p = boundary_of(*mesh.domain, be.boundary).polygon().point_on_edge(be.polygon_edge, tm);
    else
      p = (mesh.vertices[be.v0] + mesh.vertices[be.v1]) * 0.5;
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    out.vertex_info.push_back(
        {be.boundary == BoundaryName::Gamma ? VertexTag::OnGamma : VertexTag::OnS,
         be.polygon_edge, tm});
    midpoint[edge_key(be.v0, be.v1)] = id;

    BoundaryEdge h1 = be, h2 = be;
    h1.v1 = id;
    h1.mass_share = be.mass_share / 2;
    h2.v0 = id;
    h2.mass_share = be.mass_share / 2;
    out.boundary_edges.push_back(h1);
    out.boundary_edges.push_back(h2);
  }

  auto get_midpoint = [&](int a, int b) {
    auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
    out.vertex_info.push_back({VertexTag::Interior, -1, 0.0});
    midpoint[key] = id;
    return id;
  };

  for (const auto& tr : mesh.triangles) {
    int m01 = get_midpoint(tr[0], tr[1]);
    int m12 = get_midpoint(tr[1], tr[2]);
    int m20 = get_midpoint(tr[2], tr[0]);
    out.triangles.push_back({tr[0], m01, m20});
    out.triangles.push_back({m01, tr[1], m12});
    out.triangles.push_back({m20, m12, tr[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  return out;
}

MeshQuality validate_mesh(const Mesh& mesh) {
  std::vector<std::string> bad;
  MeshQuality q;
  q.n_vertices = mesh.vertex_count();
  q.n_triangles = mesh.triangle_count();
  q.min_angle_deg = 180.0;

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    double area = mesh.triangle_area(t);
    if (!(area > 0)) {
      bad.push_back("triangle " + std::to_string(t) + " has non-positive area");
      continue;
    }
    Point2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
    double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    double longest = std::max({la, lb, lc});
    double shortest = std::min({la, lb, lc});
    q.h_max = std::max(q.h_max, longest);
    q.max_aspect = std::max(q.max_aspect, longest / shortest);
    auto angle = [](double opp, double s1, double s2) {
      return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
    };
    double amin = std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
    q.min_angle_deg = std::min(q.min_angle_deg, amin * 180.0 / M_PI);
  }

  // Conformity: every edge in exactly two triangles, or one if it is listed
  // as a boundary edge.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& tr : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      int u = tr[k], v = tr[(k + 1) % 3];
      edge_use[{std::min(u, v), std::max(u, v)}]++;
    }
  std::map<std::pair<int, int>, int> boundary_use;
  for (const auto& be : mesh.boundary_edges)
    boundary_use[{std::min(be.v0, be.v1), std::max(be.v0, be.v1)}]++;
  for (const auto& [e, n] : edge_use) {
    bool is_bnd = boundary_use.count(e) > 0;
    if (is_bnd && n != 1)
      bad.push_back("boundary edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                    ") used by " + std::to_string(n) + " triangles");
    if (!is_bnd && n != 2)
      bad.push_back("interior edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                    ") used by " + std::to_string(n) + " triangles");
  }
  for (const auto& [e, n] : boundary_use) {
    if (n != 1)
      bad.push_back("boundary edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                    ") listed " + std::to_string(n) + " times");
    if (!edge_use.count(e))
      bad.push_back("boundary edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                    ") is not a mesh edge");
  }

  // Tag consistency and mass partition against the domain, when known.
  for (const auto& be : mesh.boundary_edges) {
    VertexTag want = be.boundary == BoundaryName::Gamma ? VertexTag::OnGamma : VertexTag::OnS;
    if (mesh.vertex_info[be.v0].tag != want || mesh.vertex_info[be.v1].tag != want)
      bad.push_back("boundary edge endpoints are not tagged on their boundary (" +
                    std::to_string(be.v0) + "," + std::to_string(be.v1) + ")");
  }
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const VertexInfo& vi = mesh.vertex_info[v];
    if (vi.tag == VertexTag::Interior) continue;
    if (!mesh.domain) continue;
    const MeasuredBoundary& mb = boundary_of(
        *mesh.domain, vi.tag == VertexTag::OnGamma ? BoundaryName::Gamma : BoundaryName::S);
    Point2 p = mb.polygon().point_on_edge(vi.polygon_edge, vi.param);
    if (distance(p, mesh.vertices[v]) > 1e-12)
      bad.push_back("vertex " + std::to_string(v) + " is off its recorded polygon edge");
  }
  if (mesh.domain) {
    auto check_masses = [&](BoundaryName name) {
      const MeasuredBoundary& mb = boundary_of(*mesh.domain, name);
      std::vector<double> sums(mb.segment_count(), 0.0);
      for (const auto& be : mesh.boundary_edges)
        if (be.boundary == name) sums[be.polygon_edge] += be.mass_share;
      for (int e = 0; e < mb.segment_count(); ++e) {
        double want = mb.segment_masses()[e];
        if (std::abs(sums[e] - want) > 1e-12 * want)
          bad.push_back(std::string("mass partition violated on ") +
                        (name == BoundaryName::Gamma ? "Gamma" : "S") + " edge " +
                        std::to_string(e));
      }
    };
    check_masses(BoundaryName::Gamma);
    if (mesh.domain->kind == DomainKind::Truncated) check_masses(BoundaryName::S);
  }

  if (!bad.empty())
    throw MeshValidationError("mesh validation failed with " + std::to_string(bad.size()) +
                                  " violation(s); first: " + bad.front(),
                              bad);
  return q;
}

bool is_m_matrix_mesh(const Mesh& mesh, double tol) {
  // P1 stiffness off-diagonals are -(cot a + cot b)/2 over the edge's
  // opposite angles; accumulate per edge and check the sign.
  std::map<std::pair<int, int>, double> offdiag;
  for (const auto& tr : mesh.triangles) {
    Point2 p[3] = {mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]};
    double area = signed_area(p[0], p[1], p[2]);
    double bco[3], cco[3];
    for (int k = 0; k < 3; ++k) {
      bco[k] = p[(k + 1) % 3].y - p[(k + 2) % 3].y;
      cco[k] = p[(k + 2) % 3].x - p[(k + 1) % 3].x;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        double kij = (bco[i] * bco[j] + cco[i] * cco[j]) / (4.0 * area);
        int u = std::min(tr[i], tr[j]), v = std::max(tr[i], tr[j]);
        offdiag[{u, v}] += kij;
      }
  }
  for (const auto& [e, v] : offdiag)
    if (v > tol) return false;
  return true;
}

std::string write_mesh_text(const Mesh& mesh) {
  std::ostringstream out;
  out << "MESH2 " << mesh.vertex_count() << " " << mesh.triangle_count() << " "
      << mesh.boundary_edges.size() << "\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const VertexInfo& vi = mesh.vertex_info[v];
    out << format_g17(mesh.vertices[v].x) << " " << format_g17(mesh.vertices[v].y);
    if (vi.tag == VertexTag::Interior)
      out << " 0";
    else
      out << " " << (vi.tag == VertexTag::OnGamma ? 1 : 2) << " " << vi.polygon_edge << " "
          << format_g17(vi.param);
    out << "\n";
  }
  for (const auto& tr : mesh.triangles)
    out << tr[0] << " " << tr[1] << " " << tr[2] << "\n";
  for (const auto& be : mesh.boundary_edges)
    out << be.v0 << " " << be.v1 << " " << (be.boundary == BoundaryName::Gamma ? 1 : 2) << " "
        << be.polygon_edge << " " << format_g17(be.mass_share) << "\n";
  return out.str();
}

Mesh read_mesh_text(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int nv = 0, nt = 0, nbe = 0;
  if (!(in >> magic >> nv >> nt >> nbe) || magic != "MESH2")
    throw ParameterError("not a mesh file: expected 'MESH2 <nv> <nt> <nbe>' header");
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.vertex_info.resize(nv);
  for (int v = 0; v < nv; ++v) {
    int tag;
    if (!(in >> mesh.vertices[v].x >> mesh.vertices[v].y >> tag))
      throw ParameterError("truncated mesh file (vertices)");
    if (tag == 0) {
      mesh.vertex_info[v] = {VertexTag::Interior, -1, 0.0};
    } else {
      int edge;
      double param;
      if (!(in >> edge >> param)) throw ParameterError("truncated mesh file (vertex tags)");
      mesh.vertex_info[v] = {tag == 1 ? VertexTag::OnGamma : VertexTag::OnS, edge, param};
    }
  }
  mesh.triangles.resize(nt);
  for (int t = 0; t < nt; ++t)
    if (!(in >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2]))
      throw ParameterError("truncated mesh file (triangles)");
  mesh.boundary_edges.resize(nbe);
  for (int e = 0; e < nbe; ++e) {
    BoundaryEdge& be = mesh.boundary_edges[e];
    int tag;
    if (!(in >> be.v0 >> be.v1 >> tag >> be.polygon_edge >> be.mass_share))
      throw ParameterError("truncated mesh file (boundary edges)");
    be.boundary = tag == 1 ? BoundaryName::Gamma : BoundaryName::S;
  }
  return mesh;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  write_file(path, write_mesh_text(mesh));
}

Mesh read_mesh_file(const std::string& path) { return read_mesh_text(read_file(path)); }

}  // namespace steklov
