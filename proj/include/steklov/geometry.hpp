#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

/// A point (or vector) in the plane. Coordinates must be finite.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Point2 o) const { return x * o.x + y * o.y; }
  double cross(Point2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

double distance(Point2 a, Point2 b);
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Closed simple polygonal chain. Vertices are stored in input order;
/// `counterclockwise()` reports the orientation (signed area > 0).
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  int edge_count() const { return static_cast<int>(vertices_.size()); }
  Point2 edge_start(int e) const { return vertices_[e]; }
  Point2 edge_end(int e) const { return vertices_[(e + 1) % vertices_.size()]; }
  double edge_length(int e) const { return distance(edge_start(e), edge_end(e)); }
  /// Point at barycentric parameter t in [0,1] along edge e.
  Point2 point_on_edge(int e, double t) const;

  double signed_area() const { return signed_area_; }
  bool counterclockwise() const { return signed_area_ > 0.0; }
  /// Copy with reversed vertex order (flips orientation).
  Polygon reversed() const;

  double perimeter() const;
  /// Exact diameter (max pairwise vertex distance) via convex hull + rotating calipers.
  double diameter() const;
  /// Strict interior test by crossing number; points on the boundary are unspecified.
  bool contains(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
  double signed_area_ = 0.0;
};

/// Measure carried by a prefractal boundary: equal mass per generation-g
/// segment (the weak-* approximant of the d-dimensional Hausdorff measure),
/// or plain Euclidean arclength.
enum class BoundaryMeasure { SelfSimilar, Arclength };

/// A polygon together with a per-segment mass and a Hausdorff dimension d.
/// This is the discrete stand-in for (Gamma, m_d).
class MeasuredBoundary {
 public:
  MeasuredBoundary(Polygon polygon, std::vector<double> segment_masses, double d);

  const Polygon& polygon() const { return polygon_; }
  const std::vector<double>& segment_masses() const { return segment_masses_; }
  double dimension() const { return d_; }
  double total_mass() const { return total_mass_; }
  int segment_count() const { return polygon_.edge_count(); }

  /// Point at cumulative-mass fraction s in [0,1) along the chain.
  Point2 point_at_mass_fraction(double s) const;

  /// Mass of the intersection of the boundary with the open ball B_r(center),
  /// by exact proportional clipping of each segment.
  double mass_in_ball(Point2 center, double r) const;

 private:
  Polygon polygon_;
  std::vector<double> segment_masses_;
  double d_ = 1.0;
  double total_mass_ = 0.0;
  std::vector<double> cumulative_mass_;
};

enum class DomainKind { Interior, Truncated };

/// The computational domain: either the interior of Gamma (Omega_0) or the
/// region between Gamma and an enclosing truncation boundary S (Omega_S).
struct DomainSpec {
  DomainKind kind = DomainKind::Interior;
  MeasuredBoundary gamma;
  std::optional<MeasuredBoundary> s;
  /// Minimum Gamma-S distance; 0 for interior domains.
  double clearance = 0.0;
};

// -- constructors -----------------------------------------------------------

/// Von Koch prefractal of the given base polygon: every edge of the previous
/// generation is replaced by the 4-segment generator (middle third removed,
/// outward equilateral bump). d = log4/log3. Masses are seeded from the base
/// edges' Euclidean lengths and split 4-ways per generation (SelfSimilar), or
/// set to the final segments' Euclidean lengths (Arclength).
MeasuredBoundary koch_prefractal(const Polygon& base, int generation,
                                 BoundaryMeasure measure = BoundaryMeasure::SelfSimilar);

/// Regular n-gon inscribed in the circle; d = 1, masses = edge lengths.
MeasuredBoundary circle_polygon(double radius, int n_segments, Point2 center = {});

/// Axis-aligned square of the given inradius (half side), each side split
/// into `segments_per_side` equal edges; d = 1, masses = edge lengths.
MeasuredBoundary square_boundary(double inradius, int segments_per_side, Point2 center = {});

/// Validated domain. For Truncated, Gamma must lie strictly inside S with
/// positive clearance and no boundary intersections.
DomainSpec make_domain(DomainKind kind, MeasuredBoundary gamma,
                       std::optional<MeasuredBoundary> s = std::nullopt);

// -- d-set diagnostics -------------------------------------------------------

struct DsetEstimate {
  double slope = 0.0;   ///< pooled least-squares slope of log m(B_r) vs log r
  double c1_hat = 0.0;  ///< empirical min of m(B_r)/r^slope
  double c2_hat = 0.0;  ///< empirical max of m(B_r)/r^slope
};

/// Empirical check of the d-set property: centers are placed on the boundary
/// deterministically and proportionally to segment mass (golden-ratio stride
/// in the mass coordinate), ball masses are computed by exact segment
/// clipping, and a single slope is fit over all (center, radius) samples.
DsetEstimate dset_dimension_estimate(const MeasuredBoundary& b,
                                     const std::vector<double>& radii, int n_centers);

/// The center points dset_dimension_estimate uses for a given count.
std::vector<Point2> dset_centers(const MeasuredBoundary& b, int n_centers);

// -- boundary file format ----------------------------------------------------

/// Text format: header `MB <d> <n_vertices>`, one `x y` line per vertex,
/// then one mass per edge; 17-significant-digit decimals round-trip exactly.
std::string write_boundary_text(const MeasuredBoundary& b);
MeasuredBoundary read_boundary_text(const std::string& text);
void write_boundary_file(const MeasuredBoundary& b, const std::string& path);
MeasuredBoundary read_boundary_file(const std::string& path);

}  // namespace steklov
