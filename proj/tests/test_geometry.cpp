#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "steklov/geometry.hpp"
#include "steklov/util.hpp"

using namespace steklov;

namespace {
const double kKochD = std::log(4.0) / std::log(3.0);

Polygon unit_triangle() {
  return Polygon({{0.0, 1.0 / std::sqrt(3.0)},
                  {-0.5, -0.5 / std::sqrt(3.0)},
                  {0.5, -0.5 / std::sqrt(3.0)}});
}
}  // namespace

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(Polygon({{0, 0}, {0, 0}, {1, 1}}), GeometryError);
  // Self-intersecting bowtie.
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);
  Polygon square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(square.counterclockwise());
  CHECK(square.signed_area() == doctest::Approx(1.0));
  CHECK(square.reversed().signed_area() == doctest::Approx(-1.0));
  CHECK(square.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(square.contains({0.5, 0.5}));
  CHECK(!square.contains({1.5, 0.5}));
}

TEST_CASE("koch generation 0 keeps the base triangle") {
  MeasuredBoundary b = koch_prefractal(unit_triangle(), 0);
  CHECK(b.segment_count() == 3);
  CHECK(b.total_mass() == doctest::Approx(3.0));
  CHECK(b.dimension() == doctest::Approx(kKochD));
}

TEST_CASE("koch generation 2 lengths and masses") {
  MeasuredBoundary b = koch_prefractal(unit_triangle(), 2);
  CHECK(b.segment_count() == 48);
  double arclength = b.polygon().perimeter();
  CHECK(arclength == doctest::Approx(16.0 / 3.0));  // 3 (4/3)^2
  // Self-similar measure: every segment carries 4^-g per unit base mass.
  for (double m : b.segment_masses()) CHECK(m == doctest::Approx(1.0 / 16.0));
  for (int e = 0; e < b.segment_count(); ++e)
    CHECK(b.polygon().edge_length(e) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("koch mass is conserved across generations") {
  for (int g = 0; g < 5; ++g) {
    MeasuredBoundary a = koch_prefractal(unit_triangle(), g);
    MeasuredBoundary b = koch_prefractal(unit_triangle(), g + 1);
    CHECK(b.segment_count() == 4 * a.segment_count());
    CHECK(b.total_mass() == doctest::Approx(a.total_mass()).epsilon(1e-12));
  }
}

TEST_CASE("koch bumps point outward") {
  // The snowflake contains the base triangle, so its area must exceed it.
  MeasuredBoundary b = koch_prefractal(unit_triangle(), 3);
  double base_area = unit_triangle().signed_area();
  CHECK(b.polygon().signed_area() > base_area * 1.3);
  // Limit area is 8/5 of the base triangle.
  CHECK(b.polygon().signed_area() < base_area * 8.0 / 5.0 + 1e-12);
}

TEST_CASE("koch arclength measure option") {
  MeasuredBoundary b = koch_prefractal(unit_triangle(), 2, BoundaryMeasure::Arclength);
  CHECK(b.total_mass() == doctest::Approx(16.0 / 3.0));
}

TEST_CASE("circle polygon basics") {
  CHECK_THROWS_AS(circle_polygon(1.0, 4), ParameterError);
  CHECK_THROWS_AS(circle_polygon(-1.0, 64), ParameterError);
  MeasuredBoundary c64 = circle_polygon(2.0, 64);
  for (double m : c64.segment_masses())
    CHECK(m == doctest::Approx(2.0 * 2.0 * std::sin(M_PI / 64)));
  MeasuredBoundary big = circle_polygon(1.0, 4096);
  CHECK(big.total_mass() == doctest::Approx(2 * M_PI).epsilon(1e-5));
}

TEST_CASE("square boundary realizes the inscribed square") {
  // Inradius 1/sqrt(2) gives the square inscribed in the unit circle:
  // side sqrt(2), total mass 4 sqrt(2).
  MeasuredBoundary sq = square_boundary(std::sqrt(2.0) / 2.0, 1);
  CHECK(sq.segment_count() == 4);
  CHECK(sq.total_mass() == doctest::Approx(4.0 * std::sqrt(2.0)));
  for (double m : sq.segment_masses()) CHECK(m == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("make_domain containment rules") {
  MeasuredBoundary gamma = circle_polygon(1.0, 64);
  MeasuredBoundary s = circle_polygon(3.0, 64);
  DomainSpec dom = make_domain(DomainKind::Truncated, gamma, s);
  CHECK(dom.clearance > 1.9);
  CHECK(dom.clearance < 2.0);  // 2 minus the outer sagitta

  CHECK_THROWS_AS(make_domain(DomainKind::Truncated, circle_polygon(3.0, 64),
                              circle_polygon(1.0, 64)),
                  GeometryError);
  CHECK_THROWS_AS(make_domain(DomainKind::Truncated, gamma, std::nullopt), ParameterError);
  DomainSpec interior = make_domain(DomainKind::Interior, koch_prefractal(unit_triangle(), 3));
  CHECK(interior.kind == DomainKind::Interior);
}

TEST_CASE("mass_in_ball matches dense sampling") {
  MeasuredBoundary koch = koch_prefractal(unit_triangle(), 4);
  Point2 c = koch.point_at_mass_fraction(0.37);
  for (double r : {0.3, 0.1, 1.0 / 27}) {
    double exact = koch.mass_in_ball(c, r);
    double sampled = oracles::mass_in_ball_sampled(koch, c, r, 400);
    CHECK(exact == doctest::Approx(sampled).epsilon(0.02));
  }
}

TEST_CASE("dset slope: straight-dominated boundary gives 1") {
  // Large square, fine subdivision; radii well below the side length so the
  // centers sit on straight runs: m(B_r) = 2r there.
  MeasuredBoundary sq = square_boundary(8.0, 64);
  DsetEstimate est = dset_dimension_estimate(sq, {0.5, 0.25, 0.125}, 16);
  CHECK(std::abs(est.slope - 1.0) < 0.01);
  CHECK(est.c1_hat > 0);
  CHECK(est.c2_hat >= est.c1_hat);
}

TEST_CASE("dset slope: fine circle gives 1") {
  MeasuredBoundary c = circle_polygon(1.0, 1024);
  DsetEstimate est = dset_dimension_estimate(c, {0.5, 0.25, 0.125}, 16);
  CHECK(std::abs(est.slope - 1.0) < 0.02);
}

TEST_CASE("dset slope: koch prefractal gives log4/log3") {
  MeasuredBoundary koch = koch_prefractal(unit_triangle(), 6);
  DsetEstimate est =
      dset_dimension_estimate(koch, {1.0 / 3, 1.0 / 9, 1.0 / 27, 1.0 / 81}, 32);
  CHECK(std::abs(est.slope - kKochD) < 0.05);
}

TEST_CASE("dset estimate parameter errors") {
  MeasuredBoundary c = circle_polygon(1.0, 64);
  CHECK_THROWS_AS(dset_dimension_estimate(c, {0.5, 0.25}, 4), ParameterError);
  CHECK_THROWS_AS(dset_dimension_estimate(c, {0.25, 0.5}, 16), ParameterError);
  CHECK_THROWS_AS(dset_dimension_estimate(circle_polygon(0.1, 64), {0.5, 0.25}, 16),
                  ParameterError);
}

TEST_CASE("boundary file round-trip") {
  MeasuredBoundary koch = koch_prefractal(unit_triangle(), 3);
  std::string text = write_boundary_text(koch);
  MeasuredBoundary back = read_boundary_text(text);
  CHECK(back.segment_count() == koch.segment_count());
  CHECK(back.dimension() == koch.dimension());
  for (int e = 0; e < koch.segment_count(); ++e) {
    CHECK(back.segment_masses()[e] == koch.segment_masses()[e]);  // bit-exact
    CHECK(back.polygon().vertices()[e].x == koch.polygon().vertices()[e].x);
    CHECK(back.polygon().vertices()[e].y == koch.polygon().vertices()[e].y);
  }
}
