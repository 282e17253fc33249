#include "steklov/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "steklov/errors.hpp"
#include "steklov/util.hpp"

namespace steklov {

namespace {
thread_local int g_last_cg_iterations = 0;
}

int last_cg_iterations() { return g_last_cg_iterations; }

SparseSymmetricMatrix SparseSymmetricMatrix::from_triplets(int dimension,
                                                           std::vector<Triplet> entries) {
  SparseSymmetricMatrix m;
  m.n_ = dimension;
  for (auto& t : entries)
    if (t.col > t.row) std::swap(t.row, t.col);
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  m.row_offsets_.assign(dimension + 1, 0);
  for (size_t i = 0; i < entries.size();) {
    size_t j = i;
    double sum = 0;
    while (j < entries.size() && entries[j].row == entries[i].row &&
           entries[j].col == entries[i].col)
      sum += entries[j++].value;
    m.cols_.push_back(entries[i].col);
    m.vals_.push_back(sum);
    m.row_offsets_[entries[i].row + 1]++;
    i = j;
  }
  for (int r = 0; r < dimension; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
  return m;
}

void SparseSymmetricMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      int j = cols_[k];
      double v = vals_[k];
      y[i] += v * x[j];
      if (j != i) y[j] += v * x[i];
    }
  }
}

std::vector<double> SparseSymmetricMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  multiply(x, y);
  return y;
}

double SparseSymmetricMatrix::value_at(int i, int j) const {
  if (j > i) std::swap(i, j);
  for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    if (cols_[k] == j) return vals_[k];
  return 0.0;
}

std::vector<double> SparseSymmetricMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      if (cols_[k] == i) d[i] = vals_[k];
  return d;
}

double SparseSymmetricMatrix::max_offdiagonal() const {
  double m = 0;
  for (int i = 0; i < n_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      if (cols_[k] != i) m = std::max(m, vals_[k]);
  return m;
}

DenseMatrix SparseSymmetricMatrix::to_dense() const {
  DenseMatrix d(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      d(i, cols_[k]) = vals_[k];
      d(cols_[k], i) = vals_[k];
    }
  return d;
}

double BoundaryMassMatrix::total_mass() const {
  std::vector<double> ones(size(), 1.0);
  std::vector<double> m = matrix.multiply(ones);
  return std::accumulate(m.begin(), m.end(), 0.0);
}

SparseSymmetricMatrix assemble_stiffness(const Mesh& mesh) {
  std::vector<SparseSymmetricMatrix::Triplet> trip;
  trip.reserve(mesh.triangle_count() * 6);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    Point2 p[3] = {mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]};
    double area = mesh.triangle_area(t);
    double la = (p[1] - p[2]).norm(), lb = (p[2] - p[0]).norm(), lc = (p[0] - p[1]).norm();
    double h = std::max({la, lb, lc});
    if (!(area > 1e-14 * h * h))
      throw AssemblyError("degenerate triangle " + std::to_string(t) + " (area " +
                          format_g17(area) + ")");
    double bco[3], cco[3];
    for (int k = 0; k < 3; ++k) {
      bco[k] = p[(k + 1) % 3].y - p[(k + 2) % 3].y;
      cco[k] = p[(k + 2) % 3].x - p[(k + 1) % 3].x;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j)
        trip.push_back({tr[i], tr[j], (bco[i] * bco[j] + cco[i] * cco[j]) / (4.0 * area)});
  }
  return SparseSymmetricMatrix::from_triplets(mesh.vertex_count(), std::move(trip));
}

SparseSymmetricMatrix assemble_domain_mass(const Mesh& mesh) {
  std::vector<SparseSymmetricMatrix::Triplet> trip;
  trip.reserve(mesh.triangle_count() * 6);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    double w = mesh.triangle_area(t) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) trip.push_back({tr[i], tr[j], (i == j ? 2.0 : 1.0) * w});
  }
  return SparseSymmetricMatrix::from_triplets(mesh.vertex_count(), std::move(trip));
}

std::vector<int> gamma_dof_order(const Mesh& mesh, BoundaryName which) {
  VertexTag want = which == BoundaryName::Gamma ? VertexTag::OnGamma : VertexTag::OnS;
  std::vector<int> dofs;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_info[v].tag == want) dofs.push_back(v);
  std::sort(dofs.begin(), dofs.end(), [&](int a, int b) {
    const VertexInfo& ia = mesh.vertex_info[a];
    const VertexInfo& ib = mesh.vertex_info[b];
    if (ia.polygon_edge != ib.polygon_edge) return ia.polygon_edge < ib.polygon_edge;
    return ia.param < ib.param;
  });
  return dofs;
}

BoundaryMassMatrix assemble_boundary_mass(const Mesh& mesh, BoundaryName which) {
  BoundaryMassMatrix bm;
  bm.gamma_dofs = gamma_dof_order(mesh, which);
  if (bm.gamma_dofs.empty())
    throw ParameterError("mesh has no boundary edges with the requested tag");
  std::vector<int> mesh_to_local(mesh.vertex_count(), -1);
  for (size_t i = 0; i < bm.gamma_dofs.size(); ++i) mesh_to_local[bm.gamma_dofs[i]] = static_cast<int>(i);

  std::vector<SparseSymmetricMatrix::Triplet> trip;
  for (const auto& be : mesh.boundary_edges) {
    if (be.boundary != which) continue;
    int a = mesh_to_local[be.v0], b = mesh_to_local[be.v1];
    double m = be.mass_share / 6.0;
    trip.push_back({a, a, 2.0 * m});
    trip.push_back({b, b, 2.0 * m});
    trip.push_back({a, b, m});
  }
  bm.matrix = SparseSymmetricMatrix::from_triplets(static_cast<int>(bm.gamma_dofs.size()),
                                                   std::move(trip));
  return bm;
}

DirichletReduction apply_dirichlet(const SparseSymmetricMatrix& k, const Mesh& mesh) {
  DirichletReduction red;
  red.mesh_to_free.assign(mesh.vertex_count(), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.vertex_info[v].tag != VertexTag::OnS) {
      red.mesh_to_free[v] = static_cast<int>(red.free_to_mesh.size());
      red.free_to_mesh.push_back(v);
    }
  }
  if (red.free_to_mesh.empty())
    throw ParameterError("all vertices carry Dirichlet data; the system is zero-dimensional");
  if (static_cast<int>(red.free_to_mesh.size()) == mesh.vertex_count()) {
    red.k_ff = k;
    return red;
  }
  std::vector<SparseSymmetricMatrix::Triplet> trip;
  for (int i = 0; i < k.dimension(); ++i) {
    int fi = red.mesh_to_free[i];
    if (fi == -1) continue;
    for (int p = k.row_offsets()[i]; p < k.row_offsets()[i + 1]; ++p) {
      int fj = red.mesh_to_free[k.col_indices()[p]];
      if (fj == -1) continue;
      trip.push_back({fi, fj, k.values()[p]});
    }
  }
  red.k_ff = SparseSymmetricMatrix::from_triplets(static_cast<int>(red.free_to_mesh.size()),
                                                  std::move(trip));
  return red;
}

std::vector<double> solve_spd(const SparseSymmetricMatrix& k, std::span<const double> b,
                              double tol, int max_iter) {
  int n = k.dimension();
  if (static_cast<int>(b.size()) != n) throw MatrixError("solve_spd: rhs size mismatch");
  if (max_iter < 0) max_iter = 20 * n;
  std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), kp(n);
  std::vector<double> diag = k.diagonal();
  for (double& d : diag) d = (d > 0.0) ? 1.0 / d : 1.0;

  double bnorm = norm2(b);
  if (bnorm == 0.0) return x;
  std::vector<double> history;
  double rz = 0;
  for (int i = 0; i < n; ++i) {
    z[i] = diag[i] * r[i];
    p[i] = z[i];
    rz += r[i] * z[i];
  }
  for (int it = 0; it < max_iter; ++it) {
    k.multiply(p, kp);
    double pkp = dot(p, kp);
    if (!(pkp > 0.0))
      throw SolverError("conjugate gradients met a non-positive curvature direction", history);
    double alpha = rz / pkp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * kp[i];
    }
    double rel = norm2(r) / bnorm;
    history.push_back(rel);
    if (rel <= tol) {
      g_last_cg_iterations = it + 1;
      return x;
    }
    double rz_new = 0;
    for (int i = 0; i < n; ++i) {
      z[i] = diag[i] * r[i];
      rz_new += r[i] * z[i];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("conjugate gradients did not converge in " + std::to_string(max_iter) +
                        " iterations (relative residual " + format_g17(history.back()) + ")",
                    history);
}

namespace {

bool mesh_has_s(const Mesh& mesh) {
  for (const auto& vi : mesh.vertex_info)
    if (vi.tag == VertexTag::OnS) return true;
  return false;
}

}  // namespace

RobinSolution robin_solve(const Mesh& mesh, double lambda, std::span<const double> psi_gamma) {
  if (lambda < 0.0) throw ParameterError("lambda must be non-negative");
  bool truncated = mesh_has_s(mesh);
  if (!truncated && lambda == 0.0)
    throw SingularityError(
        "lambda = 0 on an interior mesh is a pure-Neumann problem; the constants are in the "
        "kernel");

  SparseSymmetricMatrix k = assemble_stiffness(mesh);
  DirichletReduction red = apply_dirichlet(k, mesh);
  BoundaryMassMatrix mg = assemble_boundary_mass(mesh, BoundaryName::Gamma);
  int ng = mg.size();
  if (static_cast<int>(psi_gamma.size()) != ng)
    throw ParameterError("psi has wrong length for the Gamma trace space");

  // System matrix K_ff + lambda R M R^T, assembled sparsely.
  std::vector<SparseSymmetricMatrix::Triplet> trip;
  const auto& ro = red.k_ff.row_offsets();
  for (int i = 0; i < red.k_ff.dimension(); ++i)
    for (int p = ro[i]; p < ro[i + 1]; ++p)
      trip.push_back({i, red.k_ff.col_indices()[p], red.k_ff.values()[p]});
  if (lambda > 0.0) {
    const auto& mro = mg.matrix.row_offsets();
    for (int i = 0; i < ng; ++i) {
      int fi = red.mesh_to_free[mg.gamma_dofs[i]];
      for (int p = mro[i]; p < mro[i + 1]; ++p) {
        int fj = red.mesh_to_free[mg.gamma_dofs[mg.matrix.col_indices()[p]]];
        trip.push_back({fi, fj, lambda * mg.matrix.values()[p]});
      }
    }
  }
  SparseSymmetricMatrix sys =
      SparseSymmetricMatrix::from_triplets(red.k_ff.dimension(), std::move(trip));

  std::vector<double> mpsi = mg.matrix.multiply(psi_gamma);
  std::vector<double> rhs(red.k_ff.dimension(), 0.0);
  for (int i = 0; i < ng; ++i) rhs[red.mesh_to_free[mg.gamma_dofs[i]]] = mpsi[i];

  RobinSolution sol;
  sol.lambda = lambda;
  sol.psi.assign(psi_gamma.begin(), psi_gamma.end());
  sol.gamma_dofs = mg.gamma_dofs;
  sol.u = solve_spd(sys, rhs);
  sol.u_mesh.assign(mesh.vertex_count(), 0.0);
  for (size_t f = 0; f < red.free_to_mesh.size(); ++f) sol.u_mesh[red.free_to_mesh[f]] = sol.u[f];
  sol.trace_on_gamma.resize(ng);
  for (int i = 0; i < ng; ++i) sol.trace_on_gamma[i] = sol.u_mesh[mg.gamma_dofs[i]];

  std::vector<double> integrand(ng);
  for (int i = 0; i < ng; ++i) integrand[i] = sol.psi[i] - lambda * sol.trace_on_gamma[i];
  std::vector<double> mi = mg.matrix.multiply(integrand);
  sol.total_flux = std::accumulate(mi.begin(), mi.end(), 0.0);
  return sol;
}

RobinSolution robin_solve(const Mesh& mesh, double lambda,
                          const std::function<double(Point2)>& psi) {
  // Nodal interpolation of psi at the Gamma vertices.
  std::vector<int> dofs = gamma_dof_order(mesh, BoundaryName::Gamma);
  std::vector<double> vals(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) vals[i] = psi(mesh.vertices[dofs[i]]);
  return robin_solve(mesh, lambda, vals);
}

std::vector<double> harmonic_extend(const Mesh& mesh, std::span<const double> gamma_values) {
  SparseSymmetricMatrix k = assemble_stiffness(mesh);
  std::vector<int> gdofs = gamma_dof_order(mesh, BoundaryName::Gamma);
  if (gamma_values.size() != gdofs.size())
    throw ParameterError("gamma_values has wrong length for the Gamma trace space");

  // Fixed dofs: Gamma (given data) and S (zero). Interior dofs are solved.
  std::vector<double> full(mesh.vertex_count(), 0.0);
  std::vector<char> fixed(mesh.vertex_count(), 0);
  for (size_t i = 0; i < gdofs.size(); ++i) {
    full[gdofs[i]] = gamma_values[i];
    fixed[gdofs[i]] = 1;
  }
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_info[v].tag == VertexTag::OnS) fixed[v] = 1;

  std::vector<int> interior_to_mesh;
  std::vector<int> mesh_to_interior(mesh.vertex_count(), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!fixed[v]) {
      mesh_to_interior[v] = static_cast<int>(interior_to_mesh.size());
      interior_to_mesh.push_back(v);
    }
  if (interior_to_mesh.empty()) return full;

  std::vector<SparseSymmetricMatrix::Triplet> trip;
  std::vector<double> rhs(interior_to_mesh.size(), 0.0);
  for (int i = 0; i < k.dimension(); ++i) {
    for (int p = k.row_offsets()[i]; p < k.row_offsets()[i + 1]; ++p) {
      int j = k.col_indices()[p];
      double v = k.values()[p];
      int fi = mesh_to_interior[i], fj = mesh_to_interior[j];
      if (fi != -1 && fj != -1) {
        trip.push_back({fi, fj, v});
      } else if (fi != -1) {
        rhs[fi] -= v * full[j];
      } else if (fj != -1) {
        rhs[fj] -= v * full[i];
      }
    }
  }
  SparseSymmetricMatrix kii = SparseSymmetricMatrix::from_triplets(
      static_cast<int>(interior_to_mesh.size()), std::move(trip));
  std::vector<double> ui = solve_spd(kii, rhs, 1e-13);
  for (size_t i = 0; i < interior_to_mesh.size(); ++i) full[interior_to_mesh[i]] = ui[i];
  return full;
}

double discrete_green_check(const Mesh& mesh, std::span<const double> u_mesh,
                            std::span<const double> v_mesh) {
  if (static_cast<int>(u_mesh.size()) != mesh.vertex_count() ||
      static_cast<int>(v_mesh.size()) != mesh.vertex_count())
    throw ParameterError("discrete_green_check expects full nodal vectors");
  SparseSymmetricMatrix k = assemble_stiffness(mesh);
  std::vector<double> ku = k.multiply(u_mesh);

  double unorm = norm2(u_mesh), kscale = 0;
  for (double v : k.values()) kscale = std::max(kscale, std::abs(v));
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.vertex_info[v].tag == VertexTag::Interior &&
        std::abs(ku[v]) > 1e-8 * kscale * (unorm + 1.0))
      throw PreconditionError("u is not discrete-harmonic (interior residual at vertex " +
                              std::to_string(v) + ")");
  }

  double vku = dot(v_mesh, std::span<const double>(ku));
  double trv_g = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.vertex_info[v].tag != VertexTag::Interior) trv_g += v_mesh[v] * ku[v];
  return std::abs(vku - trv_g);
}

std::string write_nodal_csv(std::span<const double> values) {
  std::ostringstream out;
  out << "vertex_index,value\n";
  for (size_t i = 0; i < values.size(); ++i) out << i << "," << format_g17(values[i]) << "\n";
  return out.str();
}

std::vector<double> read_nodal_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError("malformed nodal CSV line: " + line);
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  return vals;
}

}  // namespace steklov
