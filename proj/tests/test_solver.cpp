#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parlab/solver.hpp"

using namespace parlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double heat_mode_error(int ncells, int nsteps, double w) {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / ncells, 0.25, 0.25 / nsteps);
  ProblemSpec prob;
  prob.linear = LinearCoefficients::identity(g);
  prob.initial = [](const SpacePoint& p) { return std::sin(kPi * p.x[0]); };
  SolverConfig cfg;
  cfg.time_weight = w;
  auto u = solve(g, prob, cfg);
  double err = 0;
  const double decay = std::exp(-kPi * kPi * 0.25);
  for (long c = 0; c < g.total_cells(); ++c) {
    const double exact = decay * std::sin(kPi * g.cell_center(c).x[0]);
    err = std::max(err, std::abs(u.at(c, g.steps()) - exact));
  }
  return err;
}

}  // namespace

TEST_CASE("heat equation converges under refinement (trapezoidal)") {
  const double coarse = heat_mode_error(64, 256, 0.5);
  const double fine = heat_mode_error(128, 512, 0.5);
  CHECK(coarse < 1e-3);
  CHECK(fine < 0.35 * coarse);  // second order in space dominates
}

TEST_CASE("linear steady profile is reproduced exactly") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 32, 0.5, 1.0 / 64);
  ProblemSpec prob;
  prob.linear = LinearCoefficients::identity(g);
  prob.initial = [](const SpacePoint& p) { return p.x[0]; };
  prob.boundary_value = [](const SpacePoint& p, double) { return p.x[0]; };
  auto u = solve(g, prob);
  for (long c = 0; c < g.total_cells(); ++c)
    CHECK(u.at(c, g.steps()) == doctest::Approx(g.cell_center(c).x[0]).epsilon(1e-11));
}

TEST_CASE("constants are preserved with full coefficient set") {
  auto g2 = SpaceTimeGrid::make(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 16, 0.25, 1.0 / 64);
  ProblemSpec prob;
  prob.linear = LinearCoefficients::isotropic(g2, checkerboard_field(g2, 8.0, 0.25, "a"));
  prob.linear.offdiag.push_back({0, 1, CoefficientField::constant(g2, 0.3, "a12")});
  prob.linear.offdiag.push_back({1, 0, CoefficientField::constant(g2, 0.3, "a21")});
  prob.initial = [](const SpacePoint&) { return 1.0; };
  prob.boundary_value = [](const SpacePoint&, double) { return 1.0; };
  auto u = solve(g2, prob);
  for (long c = 0; c < g2.total_cells(); ++c)
    CHECK(u.at(c, g2.steps()) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("discrete maximum principle with rough coefficients") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 128, 0.25, 1.0 / 256);
  ProblemSpec prob;
  prob.linear = LinearCoefficients::isotropic(g, random_piecewise_field(g, 3, 50.0, 1.0 / 8, "a"));
  prob.initial = [](const SpacePoint& p) {
    return std::sin(7 * kPi * p.x[0]) + 0.5 * std::cos(3 * kPi * p.x[0]);
  };
  auto u = solve(g, prob);  // implicit Euler, homogeneous Dirichlet
  double lo = 0, hi = 0;
  for (long c = 0; c < g.total_cells(); ++c) {
    lo = std::min(lo, u.at(c, 0));
    hi = std::max(hi, u.at(c, 0));
  }
  for (int k = 1; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c) {
      CHECK(u.at(c, k) >= lo - 1e-12);
      CHECK(u.at(c, k) <= hi + 1e-12);
    }
}

TEST_CASE("no-flux conservation form conserves mass to roundoff") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.25, 1.0 / 128);
  ProblemSpec prob;
  prob.boundary = BoundaryKind::no_flux;
  prob.linear = LinearCoefficients::isotropic(g, checkerboard_field(g, 20.0, 1.0 / 8, "a"));
  prob.initial = [](const SpacePoint& p) { return p.x[0] < 0.5 ? 1.0 : 0.0; };
  auto u = solve(g, prob);
  CHECK(mass_drift(u) < 1e-12);
}

TEST_CASE("weak-form residual shrinks under refinement") {
  auto run = [](int ncells) {
    auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / ncells, 0.25, 0.25 / (4 * ncells));
    ProblemSpec prob;
    prob.linear = LinearCoefficients::isotropic(g, striped_field(g, 4.0, 0.25, "a"));
    prob.initial = [](const SpacePoint& p) { return std::sin(kPi * p.x[0]); };
    SolverConfig cfg;
    cfg.time_weight = 0.5;
    auto u = solve(g, prob, cfg);
    TestBump phi;
    phi.center = {{0.5, 0, 0}};
    phi.t_center = 0.125;
    phi.radius = 0.3;
    phi.t_radius = 0.1;
    return weak_residual(u, prob, phi);
  };
  const double coarse = run(64);
  const double fine = run(128);
  CHECK(coarse < 2e-3);
  CHECK(fine < 0.65 * coarse);
}

TEST_CASE("test bump support validation") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 0.25, 1.0 / 64);
  TestBump phi;
  phi.center = {{0.5, 0, 0}};
  phi.t_center = 0.125;
  phi.radius = 0.49;  // touches the one-cell margin
  phi.t_radius = 0.1;
  CHECK_THROWS_AS(phi.check_support(g), validation_error);
  phi.radius = 0.3;
  phi.t_radius = 0.13;
  CHECK_THROWS_AS(phi.check_support(g), validation_error);
  phi.t_radius = 0.1;
  CHECK_NOTHROW(phi.check_support(g));
}

TEST_CASE("quasilinear picard solve respects the maximum principle") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.125, 1.0 / 256);
  ProblemSpec prob;
  prob.kind = ProblemSpec::Kind::quasilinear;
  prob.quasi = bounded_nonlinearity(g, CoefficientField::constant(g, 0.0, "c"), 5.0);
  prob.initial = [](const SpacePoint& p) { return std::sin(kPi * p.x[0]); };
  auto u = solve(g, prob);
  for (int k = 1; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c) {
      CHECK(u.at(c, k) >= -1e-12);
      CHECK(u.at(c, k) <= 1.0 + 1e-12);
    }
  // the nonlinear diffusivity 1 + sin(u)/2 exceeds 1 for u in (0, pi):
  // decay should be at least as fast as the linear heat equation
  double peak = 0;
  for (long c = 0; c < g.total_cells(); ++c) peak = std::max(peak, u.at(c, g.steps()));
  CHECK(peak < std::exp(-kPi * kPi * 0.125) + 0.01);
}

TEST_CASE("quasilinear drift term moves the profile") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.125, 1.0 / 256);
  ProblemSpec prob;
  prob.kind = ProblemSpec::Kind::quasilinear;
  prob.quasi = bounded_nonlinearity(g, CoefficientField::constant(g, 3.0, "c"), 50.0);
  prob.initial = [](const SpacePoint& p) { return std::sin(kPi * p.x[0]); };
  auto with_drift = solve(g, prob);
  prob.quasi = bounded_nonlinearity(g, CoefficientField::constant(g, 0.0, "c"), 50.0);
  auto without = solve(g, prob);
  double diff = 0;
  for (long c = 0; c < g.total_cells(); ++c)
    diff = std::max(diff, std::abs(with_drift.at(c, g.steps()) - without.at(c, g.steps())));
  CHECK(diff > 1e-3);
}

TEST_CASE("solver validation and hashes") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 16, 0.25, 1.0 / 64);
  ProblemSpec prob;
  CHECK_THROWS_AS(solve(g, prob), validation_error);  // missing principal coefficient
  prob.linear = LinearCoefficients::identity(g);
  SolverConfig cfg;
  cfg.time_weight = 0.3;
  CHECK_THROWS_AS(solve(g, prob, cfg), validation_error);
  cfg.time_weight = 1.0;
  auto u = solve(g, prob, cfg);
  CHECK(u.problem_hash == prob.hash(g));
  CHECK(u.config_hash == cfg.hash());
}
