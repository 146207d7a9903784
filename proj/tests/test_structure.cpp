#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parlab/structure.hpp"

using namespace parlab;

TEST_CASE("exponent pair admissibility") {
  ExponentPair inf_pair;  // p = q = infinity, first order
  auto chk = check_exponent_pair(inf_pair, 3);
  CHECK(chk.pass);
  CHECK(chk.margin == doctest::Approx(0.5));

  ExponentPair border{2.0, kInfExponent, ExponentPair::Kind::first_order};
  CHECK(!check_exponent_pair(border, 1).pass);

  ExponentPair z{1.5, kInfExponent, ExponentPair::Kind::zero_order};
  auto zc = check_exponent_pair(z, 1);
  CHECK(zc.pass);
  CHECK(zc.margin == doctest::Approx(2.0 / 3));

  ExponentPair tight{4.0, 4.0, ExponentPair::Kind::first_order};
  // n=2: 2/(2*4) + 1/4 = 1/2, not strictly below
  CHECK(!check_exponent_pair(tight, 2).pass);
  CHECK(check_exponent_pair(tight, 1).pass);
}

TEST_CASE("theta computation") {
  std::vector<std::pair<std::string, ExponentPair>> pairs{
      {"b", {kInfExponent, kInfExponent, ExponentPair::Kind::first_order}}};
  CHECK(compute_theta(pairs, 3) == doctest::Approx(0.99));

  pairs.push_back({"c", {4.0, kInfExponent, ExponentPair::Kind::first_order}});
  // n=1: theta limited by min(1 - 2/4, 1 - 2*(1/8)) = 1/2
  CHECK(compute_theta(pairs, 1) == doctest::Approx(0.5));

  pairs.push_back({"d", {2.0, kInfExponent, ExponentPair::Kind::first_order}});
  CHECK_THROWS_WITH_AS(compute_theta(pairs, 1), doctest::Contains("'d'"), structure_error);
}

TEST_CASE("bochner norms") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 1, 0.25);
  auto c3 = CoefficientField::constant(g, 3.0, "w");
  CHECK(bochner_norm(c3, 2, 2) == doctest::Approx(3.0));
  CHECK(bochner_norm(c3, kInfExponent, kInfExponent) == doctest::Approx(3.0));
  CHECK(bochner_norm(c3, 4, 1) == doctest::Approx(3.0));

  auto cb = checkerboard_field(g, 2.0, 0.5, "w");
  CHECK(bochner_norm(cb, 2, kInfExponent) == doctest::Approx(std::sqrt(2.5)));

  auto u = SolutionField::from_function(g, [](const SpacePoint&, double) { return 2.0; });
  Cylinder q{{{0.5, 0, 0}, 1.0}, 0.5, CylinderKind::standard};
  auto region = materialize(q, g);
  // 8 cells of width 1/16, one level in (0.75, 1]
  CHECK(bochner_norm(u, 2, 2, region) == doctest::Approx(2.0 * std::sqrt(0.5 * 0.25)));
}

TEST_CASE("sup norm over the strip surrogate") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {2, 0, 0}, 1.0 / 8, 1, 0.25);
  auto c2 = CoefficientField::constant(g, 2.0, "w");
  // sigma = 1; R(1) is open, so a cell center landing exactly on a face is
  // excluded and the spatial measure of Q(1) on this lattice is 7/8
  CHECK(sup_norm_over_S(c2, 2, 2) == doctest::Approx(2.0 * std::sqrt(7.0 / 8)));
}

TEST_CASE("ellipticity check") {
  auto g = SpaceTimeGrid::make(2, {0, 0, 0}, {1, 1, 0}, 0.25, 1, 0.25);
  LinearCoefficients lc;
  lc.diag[0] = CoefficientField::constant(g, 2.0, "a11");
  lc.diag[1] = CoefficientField::constant(g, 3.0, "a22");
  lc.offdiag.push_back({0, 1, CoefficientField::constant(g, 1.0, "a12")});
  // symmetrized [[2, 1/2], [1/2, 3]], smallest eigenvalue (5 - sqrt(2))/2
  CHECK(ellipticity_check(lc, 2) == doctest::Approx((5 - std::sqrt(2.0)) / 2));

  lc.offdiag[0].field = CoefficientField::constant(g, -6.0, "a12");
  CHECK_THROWS_AS(ellipticity_check(lc, 2), structure_error);
}

TEST_CASE("structure bounds validation and constants") {
  StructureBounds sb;
  sb.a = 0.5;
  sb.a_bar = 1.5;
  sb.n = 2;
  sb.b.norm = 2.0;
  sb.d.norm = 1.0;
  sb.d.pair.kind = ExponentPair::Kind::zero_order;
  sb.f.norm = 0.5;
  sb.g.norm = 0.25;
  sb.g.pair.kind = ExponentPair::Kind::zero_order;
  sb.h.norm = 0.75;
  CHECK_NOTHROW(sb.validate());
  CHECK(sb.k_max_principle(2.0) == doctest::Approx(3.0 * 2.0 + 0.75));
  CHECK(sb.k_local() == doctest::Approx(1.5));

  sb.theta = 0.8;
  sb.b.pair = {8.0, kInfExponent, ExponentPair::Kind::first_order};
  // p = 8 < 2/(1 - 0.8) = 10
  CHECK_THROWS_AS(sb.validate(), structure_error);
}

TEST_CASE("linear coefficients wrapped as structure functions") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 1, 0.25);
  auto lc = LinearCoefficients::identity(g);
  lc.drift_adv[0] = CoefficientField::constant(g, 0.5, "B1");
  lc.reaction = CoefficientField::constant(g, -1.0, "C");
  auto sf = structure_from_linear(lc, g);
  CHECK(sf.bounds.a == doctest::Approx(0.5));
  CHECK(sf.bounds.a_bar == doctest::Approx(1.0));
  CHECK(sf.bounds.c.norm == doctest::Approx(0.5));
  CHECK(sf.bounds.d.norm == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::vector<StructureSample> samples;
  for (int i = 0; i < 200; ++i) {
    StructureSample s;
    s.x.x[0] = 0.5 * (un(rng) + 1);
    s.t = 0.5 * (un(rng) + 1);
    s.u = 3 * un(rng);
    s.p[0] = 5 * un(rng);
    samples.push_back(s);
  }
  auto report = verify_structure(sf, samples);
  CHECK(report.pass());
  CHECK(report.samples_checked == 200);
}

TEST_CASE("bounded nonlinearity satisfies the structure inequalities") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 1, 0.25);
  auto c = CoefficientField::constant(g, 2.0, "c");
  auto sf = bounded_nonlinearity(g, c, 10.0);
  CHECK(sf.bounds.a == doctest::Approx(0.5));
  CHECK(sf.bounds.a_bar == doctest::Approx(1.5));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::vector<StructureSample> samples;
  for (int i = 0; i < 200; ++i) {
    StructureSample s;
    s.x.x[0] = 0.5 * (un(rng) + 1);
    s.t = 0.5 * (un(rng) + 1);
    s.u = 10 * un(rng);
    s.p[0] = 20 * un(rng);
    samples.push_back(s);
  }
  auto report = verify_structure(sf, samples);
  CHECK(report.pass());

  // negative control: an uncapped drift breaks the |B| growth inequality
  auto bad = sf;
  bad.lower = [](const SpacePoint&, double, double, const double* p) {
    return 10.0 * std::abs(p[0]) * std::abs(p[0]);
  };
  auto bad_report = verify_structure(bad, samples);
  CHECK(!bad_report.pass());
  CHECK(bad_report.violations.front().inequality == 1);
}
