#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parlab/field.hpp"

using namespace parlab;

TEST_CASE("checkerboard and striped fields") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 8, 1, 0.25);
  auto f = checkerboard_field(g, 5.0, 0.25, "a");
  CHECK(f.at(0, 0) == 1.0);
  CHECK(f.at(1, 0) == 1.0);
  CHECK(f.at(2, 0) == 5.0);
  CHECK(f.at(3, 0) == 5.0);
  CHECK(f.at(4, 0) == 1.0);
  CHECK(f.min_value() == 1.0);
  CHECK(f.max_value() == 5.0);

  auto g2 = SpaceTimeGrid::make(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 8, 1, 0.25);
  auto cb = checkerboard_field(g2, 3.0, 0.5, "a");
  // opposite parities across one block boundary in each axis
  const long c00 = g2.nearest_cell({{0.25, 0.25, 0}});
  const long c10 = g2.nearest_cell({{0.75, 0.25, 0}});
  const long c11 = g2.nearest_cell({{0.75, 0.75, 0}});
  CHECK(cb.at(c00, 0) == 1.0);
  CHECK(cb.at(c10, 0) == 3.0);
  CHECK(cb.at(c11, 0) == 1.0);

  auto s = striped_field(g2, 3.0, 0.5, "a");
  CHECK(s.at(c10, 0) == 3.0);
  CHECK(s.at(c11, 0) == 3.0);  // stripes vary along axis 0 only
}

TEST_CASE("random piecewise field is reproducible and resolution independent") {
  auto coarse = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 8, 1, 0.25);
  auto fine = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 32, 1, 0.25);
  auto fc = random_piecewise_field(coarse, 42, 10.0, 1.0 / 8, "a");
  auto ff = random_piecewise_field(fine, 42, 10.0, 1.0 / 8, "a");
  for (long c = 0; c < coarse.total_cells(); ++c) {
    CHECK(fc.at(c, 0) >= 1.0);
    CHECK(fc.at(c, 0) <= 10.0);
    // the fine grid samples the same block values
    const long cf = fine.nearest_cell(coarse.cell_center(c));
    CHECK(ff.at(cf, 0) == doctest::Approx(fc.at(c, 0)));
  }
  auto fc2 = random_piecewise_field(coarse, 42, 10.0, 1.0 / 8, "a");
  CHECK(fc.hash() == fc2.hash());
  auto other_seed = random_piecewise_field(coarse, 43, 10.0, 1.0 / 8, "a");
  CHECK(fc.hash() != other_seed.hash());
}

TEST_CASE("field validation") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 8, 1, 0.25);
  auto f = CoefficientField::constant(g, -1.0, "a");
  CHECK_NOTHROW(f.validate(false));
  CHECK_THROWS_AS(f.validate(true), validation_error);
  f.data()[3] = std::nan("");
  CHECK_THROWS_AS(f.validate(false), validation_error);
}

TEST_CASE("solution field extrema over a region") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 1, 0.25);
  auto u = SolutionField::from_function(
      g, [](const SpacePoint& p, double t) { return p.x[0] + t; });
  Cylinder q{{{0.5, 0, 0}, 1.0}, 0.25, CylinderKind::standard};
  auto region = materialize(q, g);
  // cells in (0.375, 0.625), levels t in (0.9375, 1]
  CHECK(u.max_over(region) == doctest::Approx(0.59375 + 1.0));
  CHECK(u.min_over(region) == doctest::Approx(0.40625 + 1.0));
  CHECK(u.max_abs() == doctest::Approx(0.96875 + 1.0));
}
