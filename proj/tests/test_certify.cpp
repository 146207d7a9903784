#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parlab/certify.hpp"
#include "parlab/kernel.hpp"

using namespace parlab;

namespace {

SolutionField heat_mode(const SpaceTimeGrid& g) {
  return SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return std::sin(M_PI * p.x[0]) * std::exp(-M_PI * M_PI * t);
  });
}

}  // namespace

TEST_CASE("maximum principle for the homogeneous heat equation") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.25, 1.0 / 128);
  auto u = heat_mode(g);
  StructureBounds sb;  // all lower-order norms zero -> k = 0

  auto cert = certify_max_principle(u, 1.0, sb);
  CHECK(cert.pass);
  CHECK(cert.constants.at("k") == 0.0);
  CHECK(cert.constants.at("excess") == 0.0);

  // a growing profile is not a solution: the interior maximum exceeds the
  // boundary data and the k = 0 certificate fails
  auto grow = SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return std::sin(M_PI * p.x[0]) * (1 + 2 * t * (0.25 - t));
  });
  auto tight = certify_max_principle(grow, 1.0, sb);
  CHECK(!tight.pass);
  CHECK(tight.constants.at("excess") > 0.01);

  // boundary precondition: initial data above M
  CHECK_THROWS_AS(certify_max_principle(u, 0.05, sb), validation_error);

  // mirrored minimum principle: u >= 0 on the boundary and in Q
  auto mini = certify_max_principle(u, 0.0, sb, true);
  CHECK(mini.pass);
}

TEST_CASE("maximum principle with a d-term reports a finite constant") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.25, 1.0 / 128);
  // growth against constant boundary data M = 1 driven by reaction C = +d
  ProblemSpec prob;
  prob.linear = LinearCoefficients::identity(g);
  prob.linear.reaction = CoefficientField::constant(g, 0.5, "C");
  prob.boundary_value = [](const SpacePoint&, double) { return 1.0; };
  prob.initial = [](const SpacePoint&) { return 1.0; };
  auto u = solve(g, prob);

  StructureBounds sb;
  sb.d.norm = 0.5;
  sb.d.pair.kind = ExponentPair::Kind::zero_order;
  // the boundary trace itself grows with the reaction term; certify against
  // its grid maximum
  const double M = u.max_over(parabolic_boundary(g));
  auto cert = certify_max_principle(u, M, sb);
  CHECK(cert.pass);
  CHECK(cert.constants.at("k") == doctest::Approx(0.5 * M));
  CHECK(cert.constants.at("C_emp") >= 0);
  CHECK(cert.constants.at("C_emp") < 1.0);
}

TEST_CASE("local boundedness constant for the constant solution") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 32, 1.0, 1.0 / 64);
  auto u = SolutionField::from_function(g, [](const SpacePoint&, double) { return 1.0; });
  StructureBounds sb;
  const double rho = 0.25;
  auto cert = certify_local_bound(u, {{0.5, 0, 0}, 0.75}, rho, sb);
  CHECK(cert.pass);
  // denominator rho^{-3/2} * sqrt(vol Q(3 rho)) = 8 sqrt(27/64)
  CHECK(cert.constants.at("C_emp") ==
        doctest::Approx(1.0 / (8 * std::sqrt(27.0 / 64))).epsilon(1e-10));

  // containment failure when Q(3 rho) reaches below t = 0
  CHECK_THROWS_AS(certify_local_bound(u, {{0.5, 0, 0}, 0.25}, rho, sb),
                  validation_error);
}

TEST_CASE("local boundedness stays stable under refinement") {
  StructureBounds sb;
  double prev = 0;
  for (int cells : {64, 128}) {
    auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / cells, 1.0,
                                 0.5 / cells);
    auto cert = certify_local_bound(heat_mode(g), {{0.5, 0, 0}, 0.75}, 0.25, sb);
    CHECK(cert.pass);
    if (prev > 0) CHECK(cert.constants.at("C_emp") == doctest::Approx(prev).epsilon(0.1));
    prev = cert.constants.at("C_emp");
  }
}

TEST_CASE("harnack constant: constants, scaling, and the gaussian ratio") {
  const double rho = 0.125, tp = 9 * rho * rho;  // 144/1024
  auto g = SpaceTimeGrid::make(1, {-0.5, 0, 0}, {0.5, 0, 0}, 1.0 / 256, 150.0 / 1024,
                               1.0 / 1024);
  StructureBounds sb;

  auto ones = SolutionField::from_function(g, [](const SpacePoint&, double) { return 2.0; });
  auto c1 = certify_harnack(ones, {{0, 0, 0}, tp}, rho, sb, 0);
  CHECK(c1.pass);
  CHECK(c1.constants.at("C_emp") == doctest::Approx(1.0).epsilon(1e-10));

  auto kernel = SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return heat_kernel(1, 1.0, p.x[0] * p.x[0], t);
  });
  auto ck = certify_harnack(kernel, {{0, 0, 0}, tp}, rho, sb, 0);
  CHECK(ck.pass);
  // closed-form extremes: max g(0, rho^2) = 1/(2 rho sqrt(pi)), min at
  // (rho/2, 9 rho^2)
  const double cmax = 1.0 / (2 * rho * std::sqrt(M_PI));
  const double cmin = heat_kernel(1, 1.0, rho * rho / 4, 9 * rho * rho);
  CHECK(ck.constants.at("C_emp") == doctest::Approx(cmax / cmin).epsilon(0.05));

  // ratio invariance under scaling (k = 0)
  auto scaled = kernel;
  for (auto& v : scaled.data()) v *= 7.5;
  auto cs = certify_harnack(scaled, {{0, 0, 0}, tp}, rho, sb, 0);
  CHECK(cs.constants.at("C_emp") == doctest::Approx(ck.constants.at("C_emp")));

  // negativity guard
  auto neg = kernel;
  neg.data()[5] = -1.0;
  CHECK_THROWS_AS(certify_harnack(neg, {{0, 0, 0}, tp}, rho, sb, 0), validation_error);
}

TEST_CASE("harnack constant finite for a rough-coefficient kernel") {
  const double rho = 0.125, tp = 9 * rho * rho;
  auto g = SpaceTimeGrid::make(1, {-0.5, 0, 0}, {0.5, 0, 0}, 1.0 / 128, 150.0 / 1024,
                               1.0 / 1024);
  ProblemSpec prob;
  prob.linear = LinearCoefficients::isotropic(g, checkerboard_field(g, 10.0, 0.125, "a"));
  auto est = estimate_kernel(g, prob, {{0, 0, 0}});
  StructureBounds sb;
  auto cert = certify_harnack(est.gamma, {{0, 0, 0}, tp}, rho, sb, 0);
  CHECK(cert.pass);
  CHECK(std::isfinite(cert.constants.at("C_emp")));
  CHECK(cert.constants.at("C_emp") >= 1.0);
}

TEST_CASE("pointwise harnack") {
  auto g = SpaceTimeGrid::make(1, {-0.5, 0, 0}, {0.5, 0, 0}, 1.0 / 128, 0.25, 1.0 / 256);
  auto ones = SolutionField::from_function(g, [](const SpacePoint&, double) { return 3.0; });

  std::vector<PointPair> pairs;
  for (double x : {-0.25, 0.0, 0.25})
    for (double y : {-0.25, 0.0, 0.25})
      pairs.push_back({{{x, 0, 0}, 0.2}, {{y, 0, 0}, 0.05}});

  auto c0 = certify_pointwise_harnack(ones, pairs, 0);
  CHECK(c0.pass);
  CHECK(c0.constants.at("C_emp") == doctest::Approx(0.0));

  auto kernel = SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return heat_kernel(1, 1.0, p.x[0] * p.x[0], t);
  });
  auto ck = certify_pointwise_harnack(kernel, pairs, 0);
  // replicate the maximization over the same lattice in closed form
  double expect = 0;
  for (const auto& pr : pairs) {
    const double num = std::log(heat_kernel(1, 1.0, pr.early.x[0] * pr.early.x[0],
                                            pr.early.t) /
                                heat_kernel(1, 1.0, pr.late.x[0] * pr.late.x[0],
                                            pr.late.t));
    const double dx = pr.late.x[0] - pr.early.x[0];
    expect = std::max(expect, num / (dx * dx / (pr.late.t - pr.early.t) +
                                     pr.late.t / pr.early.t));
  }
  CHECK(ck.constants.at("C_emp") == doctest::Approx(expect).epsilon(0.02));

  CHECK_THROWS_AS(
      certify_pointwise_harnack(ones, {{{{0, 0, 0}, 0.05}, {{0, 0, 0}, 0.2}}}, 0),
      validation_error);
}

TEST_CASE("hoelder exponent of a linear profile is one") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 128, 1.0, 1.0 / 64);
  auto u = SolutionField::from_function(g, [](const SpacePoint& p, double) {
    return p.x[0];
  });
  auto cert = estimate_hoelder(u, {{0.5, 0, 0}, 0.5}, {0.2, 0.14, 0.1, 0.07, 0.05});
  CHECK(cert.pass);
  CHECK(cert.constants.at("alpha_emp") == doctest::Approx(1.0).epsilon(0.05));
  CHECK(cert.constants.at("alpha_emp") >= 0.95);
  CHECK(std::isfinite(cert.constants.at("H_emp")));
  CHECK(cert.constants.at("R") == doctest::Approx(std::sqrt(0.5) / 2));

  CHECK_THROWS_AS(estimate_hoelder(u, {{0.5, 0, 0}, 0.5}, {0.9, 0.5}), validation_error);
}

TEST_CASE("hoelder estimate flags a flat field as a lower bound only") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 1.0, 1.0 / 64);
  auto u = SolutionField::from_function(g, [](const SpacePoint&, double) { return 4.0; });
  auto cert = estimate_hoelder(u, {{0.5, 0, 0}, 0.5}, {0.2, 0.1});
  CHECK(!cert.pass);
  CHECK(cert.note.find("noise floor") != std::string::npos);
}

TEST_CASE("limit behavior of the 1-d heat kernel") {
  auto g = SpaceTimeGrid::make(1, {-0.5, 0, 0}, {0.5, 0, 0}, 1.0 / 256, 0.01,
                               0.01 / 256);
  auto kernel = SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return heat_kernel(1, 1.0, p.x[0] * p.x[0], t);
  });
  auto cert = certify_limit_behavior(kernel, 1.0, 0);
  CHECK(cert.pass);
  CHECK(cert.applicable);
  // the mass over |x|^2 < t is erf(1/2) at every t
  CHECK(cert.constants.at("M") == doctest::Approx(std::erf(0.5)).epsilon(1e-3));
  CHECK(cert.constants.at("C2") == doctest::Approx(0.25).epsilon(0.02));
  CHECK(cert.constants.at("C1") ==
        doctest::Approx(1.0 / std::sqrt(4 * M_PI)).epsilon(0.05));

  auto zero = SolutionField::from_function(g, [](const SpacePoint&, double) { return 0.0; });
  auto cz = certify_limit_behavior(zero, 1.0, 0);
  CHECK(!cz.applicable);
}

TEST_CASE("caccioppoli inequality for the heat-equation suite") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 64, 0.5, 0.5 / 128);
  auto u = heat_mode(g);
  StructureFunctions sf;
  sf.bounds.a = 1.0;
  sf.bounds.a_bar = 1.0;
  auto eta = bump_cutoff({{0.5, 0, 0}}, 0.45, 0.02, 0.12);

  for (double beta : {1.0, 2.0, 3.0}) {
    auto cert = check_caccioppoli(u, eta, beta, 0.0, sf);
    CHECK(cert.pass);
    CHECK(cert.constants.at("worst_margin") > 0.1);
  }

  // zero solution with kappa > 0: only the kappa-constant terms survive
  auto zero = SolutionField::from_function(g, [](const SpacePoint&, double) { return 0.0; });
  auto cz = check_caccioppoli(zero, eta, 2.0, 0.5, sf);
  CHECK(cz.pass);

  // noise injection breaks the gradient-energy side (negative control)
  auto noisy = u;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (auto& v : noisy.data()) v += 0.2 * un(rng);
  auto cn = check_caccioppoli(noisy, eta, 1.0, 0.0, sf);
  CHECK(!cn.pass);

  // kappa = 0 demands vanishing f, g, h
  auto bad = sf;
  bad.h = CoefficientField::constant(g, 1.0, "h");
  CHECK_THROWS_AS(check_caccioppoli(u, eta, 1.0, 0.0, bad), validation_error);

  // a cutoff that does not vanish near the parabolic boundary is rejected
  CutoffField flat;
  flat.value = [](const SpacePoint&, double) { return 1.0; };
  flat.gradient = [](const SpacePoint&, double, double* out) {
    out[0] = out[1] = out[2] = 0;
  };
  flat.time_derivative = [](const SpacePoint&, double) { return 0.0; };
  CHECK_THROWS_AS(check_caccioppoli(u, flat, 1.0, 0.0, sf), validation_error);
}

TEST_CASE("caccioppoli inequality for the built-in nonlinear family") {
  auto g = SpaceTimeGrid::make(1, {0, 0, 0}, {1, 0, 0}, 1.0 / 32, 0.5, 0.5 / 64);
  auto c = CoefficientField::constant(g, 0.5, "c");
  auto sf = bounded_nonlinearity(g, c, 5.0);

  ProblemSpec prob;
  prob.kind = ProblemSpec::Kind::quasilinear;
  prob.quasi = sf;
  prob.initial = [](const SpacePoint& p) {
    return std::sin(M_PI * p.x[0]);
  };
  auto u = solve(g, prob);

  auto eta = bump_cutoff({{0.5, 0, 0}}, 0.45, 0.02, 0.12);
  auto cert = check_caccioppoli(u, eta, 1.0, 0.0, sf);
  CHECK(cert.pass);
  CHECK(cert.constants.at("worst_margin") > 0.0);
}
