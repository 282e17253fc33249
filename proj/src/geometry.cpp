#include "steklov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "steklov/util.hpp"

namespace steklov {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double orient(Point2 a, Point2 b, Point2 c) {
  long double acx = static_cast<long double>(a.x) - c.x;
  long double acy = static_cast<long double>(a.y) - c.y;
  long double bcx = static_cast<long double>(b.x) - c.x;
  long double bcy = static_cast<long double>(b.y) - c.y;
  return static_cast<double>(acx * bcy - acy * bcx);
}

int orient_sign(Point2 a, Point2 b, Point2 c) {
  long double acx = static_cast<long double>(a.x) - c.x;
  long double acy = static_cast<long double>(a.y) - c.y;
  long double bcx = static_cast<long double>(b.x) - c.x;
  long double bcy = static_cast<long double>(b.y) - c.y;
  long double det = acx * bcy - acy * bcx;
  long double perm = std::abs(acx * bcy) + std::abs(acy * bcx);
  if (std::abs(det) <= perm * 1e-18L) return 0;
  return det > 0 ? 1 : -1;
}

bool on_segment_collinear(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) - 1e-300 <= p.x && p.x <= std::max(a.x, b.x) + 1e-300 &&
         std::min(a.y, b.y) - 1e-300 <= p.y && p.y <= std::max(a.y, b.y) + 1e-300;
}

/// True if segments [a,b] and [c,d] intersect (including touching).
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  int o1 = orient_sign(a, b, c);
  int o2 = orient_sign(a, b, d);
  int o3 = orient_sign(c, d, a);
  int o4 = orient_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(c, a, b)) return true;
  if (o2 == 0 && on_segment_collinear(d, a, b)) return true;
  if (o3 == 0 && on_segment_collinear(a, c, d)) return true;
  if (o4 == 0 && on_segment_collinear(b, c, d)) return true;
  return false;
}

struct SegmentGrid {
  // Uniform grid over segment bounding boxes for near-linear pair pruning.
  double x0, y0, cell;
  int nx, ny;
  std::unordered_map<long long, std::vector<int>> cells;

  long long key(int ix, int iy) const { return static_cast<long long>(ix) * 1000003LL + iy; }

  SegmentGrid(const std::vector<Point2>& v, double target_cell) {
    double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
    for (Point2 p : v) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    x0 = xmin;
    y0 = ymin;
    cell = std::max(target_cell, 1e-12);
    nx = static_cast<int>((xmax - xmin) / cell) + 1;
    ny = static_cast<int>((ymax - ymin) / cell) + 1;
  }

  template <typename F>
  void for_each_cell(Point2 a, Point2 b, F&& f) {
    int ix0 = static_cast<int>(std::floor((std::min(a.x, b.x) - x0) / cell));
    int ix1 = static_cast<int>(std::floor((std::max(a.x, b.x) - x0) / cell));
    int iy0 = static_cast<int>(std::floor((std::min(a.y, b.y) - y0) / cell));
    int iy1 = static_cast<int>(std::floor((std::max(a.y, b.y) - y0) / cell));
    for (int ix = ix0; ix <= ix1; ++ix)
      for (int iy = iy0; iy <= iy1; ++iy) f(key(ix, iy));
  }
};

/// Checks pairwise intersection of non-adjacent edges of a closed chain.
bool chain_is_simple(const std::vector<Point2>& v) {
  int n = static_cast<int>(v.size());
  double mean_len = 0.0;
  for (int i = 0; i < n; ++i) mean_len += distance(v[i], v[(i + 1) % n]);
  mean_len /= n;
  SegmentGrid grid(v, 2.0 * mean_len);
  for (int i = 0; i < n; ++i) {
    Point2 a = v[i], b = v[(i + 1) % n];
    bool bad = false;
    grid.for_each_cell(a, b, [&](long long k) {
      if (bad) return;
      auto it = grid.cells.find(k);
      if (it == grid.cells.end()) return;
      for (int j : it->second) {
        int gap = std::abs(i - j);
        if (gap <= 1 || gap == n - 1) continue;  // same or adjacent edge
        if (segments_intersect(a, b, v[j], v[(j + 1) % n])) {
          bad = true;
          return;
        }
      }
    });
    if (bad) return false;
    grid.for_each_cell(a, b, [&](long long k) { grid.cells[k].push_back(i); });
  }
  return true;
}

double chain_signed_area(const std::vector<Point2>& v) {
  long double a = 0;
  int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    Point2 p = v[i], q = v[(i + 1) % n];
    a += static_cast<long double>(p.x) * q.y - static_cast<long double>(q.x) * p.y;
  }
  return static_cast<double>(a / 2);
}

}  // namespace

double distance(Point2 a, Point2 b) { return (a - b).norm(); }

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  Point2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  int n = static_cast<int>(vertices_.size());
  for (int i = 0; i < n; ++i) {
    if (!finite(vertices_[i])) throw GeometryError("polygon vertex is not finite");
    if (distance(vertices_[i], vertices_[(i + 1) % n]) == 0.0)
      throw GeometryError("consecutive polygon vertices coincide");
  }
  if (!chain_is_simple(vertices_)) throw GeometryError("polygon is not simple");
  signed_area_ = chain_signed_area(vertices_);
  if (signed_area_ == 0.0) throw GeometryError("polygon has zero area");
}

Point2 Polygon::point_on_edge(int e, double t) const {
  Point2 a = edge_start(e), b = edge_end(e);
  return a + (b - a) * t;
}

Polygon Polygon::reversed() const {
  std::vector<Point2> v(vertices_.rbegin(), vertices_.rend());
  return Polygon(std::move(v));
}

double Polygon::perimeter() const {
  double s = 0;
  for (int e = 0; e < edge_count(); ++e) s += edge_length(e);
  return s;
}

double Polygon::diameter() const {
  // Andrew monotone chain hull, then rotating calipers.
  std::vector<Point2> pts = vertices_;
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  std::vector<Point2> hull(2 * pts.size());
  int k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  int lower = k + 1;
  for (int i = static_cast<int>(pts.size()) - 2; i >= 0; --i) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  int h = static_cast<int>(hull.size());
  if (h == 1) return 0.0;
  if (h == 2) return distance(hull[0], hull[1]);
  double best = 0.0;
  int j = 1;
  for (int i = 0; i < h; ++i) {
    Point2 a = hull[i], b = hull[(i + 1) % h];
    while (std::abs(orient(a, b, hull[(j + 1) % h])) > std::abs(orient(a, b, hull[j])))
      j = (j + 1) % h;
    best = std::max({best, distance(a, hull[j]), distance(b, hull[j])});
  }
  return best;
}

bool Polygon::contains(Point2 p) const {
  bool inside = false;
  int n = edge_count();
  for (int i = 0; i < n; ++i) {
    Point2 a = vertices_[i], b = vertices_[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

MeasuredBoundary::MeasuredBoundary(Polygon polygon, std::vector<double> segment_masses, double d)
    : polygon_(std::move(polygon)), segment_masses_(std::move(segment_masses)), d_(d) {
  if (static_cast<int>(segment_masses_.size()) != polygon_.edge_count())
    throw ParameterError("segment_masses length must equal the edge count");
  if (!(d_ > 0.0 && d_ < 2.0)) throw ParameterError("dimension d must lie in (0, 2)");
  cumulative_mass_.resize(segment_masses_.size() + 1, 0.0);
  for (size_t i = 0; i < segment_masses_.size(); ++i) {
    if (!(segment_masses_[i] > 0.0)) throw ParameterError("segment masses must be positive");
    cumulative_mass_[i + 1] = cumulative_mass_[i] + segment_masses_[i];
  }
  total_mass_ = cumulative_mass_.back();
}

Point2 MeasuredBoundary::point_at_mass_fraction(double s) const {
  double target = s * total_mass_;
  auto it = std::upper_bound(cumulative_mass_.begin(), cumulative_mass_.end(), target);
  int e = std::clamp(static_cast<int>(it - cumulative_mass_.begin()) - 1, 0, segment_count() - 1);
  double t = (target - cumulative_mass_[e]) / segment_masses_[e];
  return polygon_.point_on_edge(e, std::clamp(t, 0.0, 1.0));
}

double MeasuredBoundary::mass_in_ball(Point2 center, double r) const {
  // Clip each segment against the circle; mass is proportional to the
  // Euclidean length fraction inside (uniform density per segment).
  double total = 0.0;
  double r2 = r * r;
  for (int e = 0; e < segment_count(); ++e) {
    Point2 a = polygon_.edge_start(e);
    Point2 d = polygon_.edge_end(e) - a;
    Point2 ca = a - center;
    double qa = d.norm2();
    double qb = 2.0 * ca.dot(d);
    double qc = ca.norm2() - r2;
    if (qa == 0.0) continue;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) {
      if (qc < 0.0) total += segment_masses_[e];  // fully inside
      continue;
    }
    double sq = std::sqrt(disc);
    double t0 = std::clamp((-qb - sq) / (2.0 * qa), 0.0, 1.0);
    double t1 = std::clamp((-qb + sq) / (2.0 * qa), 0.0, 1.0);
    if (t1 > t0) total += segment_masses_[e] * (t1 - t0);
  }
  return total;
}

MeasuredBoundary koch_prefractal(const Polygon& base, int generation, BoundaryMeasure measure) {
  if (generation < 0) throw ParameterError("generation must be non-negative");
  if (generation > 8) throw ParameterError("generation must be at most 8");

  // Work in counterclockwise orientation so "outward" is well-defined.
  std::vector<Point2> verts =
      base.counterclockwise() ? base.vertices() : base.reversed().vertices();
  std::vector<double> masses(verts.size());
  for (size_t e = 0; e < verts.size(); ++e)
    masses[e] = distance(verts[e], verts[(e + 1) % verts.size()]);

  const double c60 = 0.5, s60 = std::sqrt(3.0) / 2.0;
  for (int g = 0; g < generation; ++g) {
    std::vector<Point2> next;
    std::vector<double> next_masses;
    next.reserve(verts.size() * 4);
    next_masses.reserve(verts.size() * 4);
    int n = static_cast<int>(verts.size());
    for (int e = 0; e < n; ++e) {
      Point2 a = verts[e], b = verts[(e + 1) % n];
      Point2 third = (b - a) * (1.0 / 3.0);
      Point2 p1 = a + third;
      Point2 p3 = a + third * 2.0;
      // Outward bump: rotate the middle third clockwise (interior is on
      // the left of a CCW chain, so the apex lands outside).
      Point2 apex = {p1.x + third.x * c60 + third.y * s60,
                     p1.y - third.x * s60 + third.y * c60};
      next.insert(next.end(), {a, p1, apex, p3});
      double m = masses[e] / 4.0;
      next_masses.insert(next_masses.end(), {m, m, m, m});
    }
    verts = std::move(next);
    masses = std::move(next_masses);
  }

  Polygon poly = [&] {
    try {
      return Polygon(verts);
    } catch (const GeometryError& e) {
      throw GeometryError(std::string("koch_prefractal produced invalid geometry: ") + e.what());
    }
  }();

  if (measure == BoundaryMeasure::Arclength) {
    for (int e = 0; e < poly.edge_count(); ++e) masses[e] = poly.edge_length(e);
  }
  return MeasuredBoundary(std::move(poly), std::move(masses), std::log(4.0) / std::log(3.0));
}

MeasuredBoundary circle_polygon(double radius, int n_segments, Point2 center) {
  if (!(radius > 0.0)) throw ParameterError("radius must be positive");
  if (n_segments < 8) throw ParameterError("circle_polygon needs at least 8 segments");
  std::vector<Point2> verts(n_segments);
  for (int k = 0; k < n_segments; ++k) {
    double th = 2.0 * kPi * k / n_segments;
    verts[k] = {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
  }
  Polygon poly(std::move(verts));
  std::vector<double> masses(n_segments);
  for (int e = 0; e < n_segments; ++e) masses[e] = poly.edge_length(e);
  return MeasuredBoundary(std::move(poly), std::move(masses), 1.0);
}

MeasuredBoundary square_boundary(double inradius, int segments_per_side, Point2 center) {
  if (!(inradius > 0.0)) throw ParameterError("inradius must be positive");
  if (segments_per_side < 1) throw ParameterError("segments_per_side must be at least 1");
  const double a = inradius;
  const Point2 corners[4] = {{center.x - a, center.y - a},
                             {center.x + a, center.y - a},
                             {center.x + a, center.y + a},
                             {center.x - a, center.y + a}};
  std::vector<Point2> verts;
  for (int side = 0; side < 4; ++side) {
    Point2 p = corners[side], q = corners[(side + 1) % 4];
    for (int k = 0; k < segments_per_side; ++k)
      verts.push_back(p + (q - p) * (static_cast<double>(k) / segments_per_side));
  }
  Polygon poly(std::move(verts));
  std::vector<double> masses(poly.edge_count());
  for (int e = 0; e < poly.edge_count(); ++e) masses[e] = poly.edge_length(e);
  return MeasuredBoundary(std::move(poly), std::move(masses), 1.0);
}

DomainSpec make_domain(DomainKind kind, MeasuredBoundary gamma, std::optional<MeasuredBoundary> s) {
  DomainSpec spec{kind, std::move(gamma), std::nullopt, 0.0};
  if (kind == DomainKind::Interior) {
    if (s.has_value()) throw ParameterError("interior domain takes no truncation boundary");
    return spec;
  }
  if (!s.has_value()) throw ParameterError("truncated domain requires a truncation boundary S");
  const Polygon& pg = spec.gamma.polygon();
  const Polygon& ps = s->polygon();
  for (Point2 v : pg.vertices())
    if (!ps.contains(v))
      throw GeometryError("Gamma is not strictly inside S");
  for (int i = 0; i < pg.edge_count(); ++i)
    for (int j = 0; j < ps.edge_count(); ++j)
      if (segments_intersect(pg.edge_start(i), pg.edge_end(i), ps.edge_start(j), ps.edge_end(j)))
        throw GeometryError("Gamma and S intersect");
  double clearance = std::numeric_limits<double>::infinity();
  for (Point2 v : pg.vertices())
    for (int j = 0; j < ps.edge_count(); ++j)
      clearance = std::min(clearance, point_segment_distance(v, ps.edge_start(j), ps.edge_end(j)));
  for (Point2 v : ps.vertices())
    for (int i = 0; i < pg.edge_count(); ++i)
      clearance = std::min(clearance, point_segment_distance(v, pg.edge_start(i), pg.edge_end(i)));
  if (!(clearance > 0.0)) throw GeometryError("Gamma and S have zero clearance");
  spec.s = std::move(s);
  spec.clearance = clearance;
  return spec;
}

std::vector<Point2> dset_centers(const MeasuredBoundary& b, int n_centers) {
  // Golden-ratio stride in the mass coordinate: deterministic, uniform in
  // mass (hence proportional to segment mass), and free of the structural
  // aliasing plain quantiles suffer on self-similar measures.
  const double golden = 0.61803398874989484820;
  std::vector<Point2> centers(n_centers);
  for (int c = 0; c < n_centers; ++c)
    centers[c] = b.point_at_mass_fraction(std::fmod((c + 0.5) * golden, 1.0));
  return centers;
}

DsetEstimate dset_dimension_estimate(const MeasuredBoundary& b, const std::vector<double>& radii,
                                     int n_centers) {
  if (n_centers < 8) throw ParameterError("dset_dimension_estimate needs at least 8 centers");
  if (radii.empty()) throw ParameterError("dset_dimension_estimate needs at least one radius");
  double diam = b.polygon().diameter();
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] <= 1.0))
      throw ParameterError("radii must lie in (0, 1]");
    if (radii[i] > diam) throw ParameterError("radius exceeds the boundary diameter");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw ParameterError("radii must be strictly decreasing");
  }

  std::vector<Point2> centers = dset_centers(b, n_centers);
  std::vector<double> logs_r, logs_m, ms, rs;
  for (int c = 0; c < n_centers; ++c) {
    Point2 x = centers[c];
    for (double r : radii) {
      double m = b.mass_in_ball(x, r);
      if (m <= 0.0) continue;  // cannot happen for centers on the boundary
      logs_r.push_back(std::log(r));
      logs_m.push_back(std::log(m));
      rs.push_back(r);
      ms.push_back(m);
    }
  }
  double mr = 0, mm = 0;
  for (size_t i = 0; i < logs_r.size(); ++i) {
    mr += logs_r[i];
    mm += logs_m[i];
  }
  mr /= logs_r.size();
  mm /= logs_m.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < logs_r.size(); ++i) {
    num += (logs_r[i] - mr) * (logs_m[i] - mm);
    den += (logs_r[i] - mr) * (logs_r[i] - mr);
  }
  if (den == 0.0) throw ParameterError("need at least two distinct radii for a slope");
  DsetEstimate est;
  est.slope = num / den;
  est.c1_hat = std::numeric_limits<double>::infinity();
  est.c2_hat = 0.0;
  for (size_t i = 0; i < ms.size(); ++i) {
    double c = ms[i] / std::pow(rs[i], est.slope);
    est.c1_hat = std::min(est.c1_hat, c);
    est.c2_hat = std::max(est.c2_hat, c);
  }
  return est;
}

std::string write_boundary_text(const MeasuredBoundary& b) {
  std::ostringstream out;
  out << "MB " << format_g17(b.dimension()) << " " << b.polygon().edge_count() << "\n";
  for (Point2 p : b.polygon().vertices())
    out << format_g17(p.x) << " " << format_g17(p.y) << "\n";
  for (double m : b.segment_masses()) out << format_g17(m) << "\n";
  return out.str();
}

MeasuredBoundary read_boundary_text(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  double d = 0;
  int n = 0;
  if (!(in >> magic >> d >> n) || magic != "MB")
    throw ParameterError("not a boundary file: expected 'MB <d> <n_vertices>' header");
  std::vector<Point2> verts(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> verts[i].x >> verts[i].y)) throw ParameterError("truncated boundary file (vertices)");
  std::vector<double> masses(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> masses[i])) throw ParameterError("truncated boundary file (masses)");
  return MeasuredBoundary(Polygon(std::move(verts)), std::move(masses), d);
}

void write_boundary_file(const MeasuredBoundary& b, const std::string& path) {
  write_file(path, write_boundary_text(b));
}

MeasuredBoundary read_boundary_file(const std::string& path) {
  return read_boundary_text(read_file(path));
}

}  // namespace steklov
