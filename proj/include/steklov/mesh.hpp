#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "steklov/geometry.hpp"

namespace steklov {

enum class VertexTag { Interior, OnGamma, OnS };
enum class BoundaryName { Gamma, S };

/// Per-vertex location record. Boundary vertices remember which polygon edge
/// they sit on and the barycentric parameter in [0,1] along it, so measure
/// bookkeeping never drifts.
struct VertexInfo {
  VertexTag tag = VertexTag::Interior;
  int polygon_edge = -1;
  double param = 0.0;
};

/// One mesh edge lying on a boundary polygon edge. The d-mass shares of all
/// mesh edges on one polygon edge sum to that edge's segment mass.
struct BoundaryEdge {
  int v0 = -1;  ///< vertex at the smaller parameter
  int v1 = -1;
  BoundaryName boundary = BoundaryName::Gamma;
  int polygon_edge = -1;
  double mass_share = 0.0;
};

/// Conforming triangulation of an interior domain Omega_0 or a truncated
/// domain Omega_S (one hole). Triangles are counterclockwise. Immutable
/// after construction; safe to share across threads.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<VertexInfo> vertex_info;
  std::vector<BoundaryEdge> boundary_edges;
  /// The domain this mesh discretizes; absent for meshes read from files.
  std::optional<DomainSpec> domain;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double total_area() const;
};

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;  ///< max over triangles of longest/shortest edge
  double h_max = 0.0;       ///< longest edge in the mesh
  int n_vertices = 0;
  int n_triangles = 0;
};

/// Constrained Delaunay triangulation with Ruppert-style refinement to a
/// 20-degree minimum angle. Boundary polygon edges longer than h_target are
/// subdivided uniformly; shorter ones are kept as-is (never merged). Interior
/// spacing is graded from the local boundary size toward h_target.
Mesh triangulate(const DomainSpec& domain, double h_target);

/// Uniform refinement: each triangle is split in 4 by edge midpoints.
/// Boundary midpoints are placed on their polygon edge; per-polygon-edge
/// mass sums are preserved exactly.
Mesh refine(const Mesh& mesh);

/// Computes quality metrics; throws MeshValidationError listing every
/// violated invariant (orientation, conformity, tags, mass partition).
MeshQuality validate_mesh(const Mesh& mesh);

/// True if the P1 stiffness matrix of this mesh is an M-matrix (all
/// off-diagonal entries <= tol), the discrete-maximum-principle condition
/// under which positivity/monotonicity of the Robin solver are asserted.
bool is_m_matrix_mesh(const Mesh& mesh, double tol = 1e-12);

/// Text format: `MESH2 <nv> <nt> <nbe>` header, vertex lines `x y tag
/// [edge param]`, triangle lines `i j k`, boundary-edge lines `i j tag mass`.
/// Output ordering is deterministic so files are diffable.
std::string write_mesh_text(const Mesh& mesh);
Mesh read_mesh_text(const std::string& text);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

}  // namespace steklov
