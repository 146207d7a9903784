#include "parlab/widder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace parlab {

void BorelMeasure::validate() const {
  if (atoms.empty() && density.empty() && growth_family == GrowthFamily::none)
    throw validation_error("measure: neither atoms, density, nor a growth tag present");
  for (const auto& a : atoms)
    if (!(a.mass > 0)) throw validation_error("measure: atom masses must be positive");
  if (!density.empty()) density.validate(true);
  if (growth_family == GrowthFamily::gaussian_growth && !(growth_rate > 0))
    throw validation_error("measure: gaussian growth needs a positive rate");
}

uint64_t BorelMeasure::hash() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  auto mixd = [&](double v) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  };
  for (const auto& a : atoms) {
    for (double c : a.location.x) mixd(c);
    mixd(a.mass);
  }
  if (!density.empty()) mix(density.hash());
  mix(uint64_t(growth_family));
  mixd(growth_rate);
  return h;
}

GrowthCheck check_growth(const BorelMeasure& m) {
  m.validate();
  GrowthCheck chk;
  switch (m.growth_family) {
    case BorelMeasure::GrowthFamily::none:
      chk.pass = true;
      chk.sigma = 0;
      chk.note = "compactly supported; every sigma > 0 works";
      break;
    case BorelMeasure::GrowthFamily::gaussian_growth:
      chk.pass = true;
      chk.sigma = m.growth_rate;
      chk.note = "finite exactly for sigma > " + std::to_string(m.growth_rate);
      break;
    case BorelMeasure::GrowthFamily::super_gaussian:
      chk.pass = false;
      chk.note = "super-gaussian tail; no sigma makes the integral finite";
      break;
  }
  return chk;
}

SolutionField represent(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                        const BorelMeasure& m, const SolverConfig& cfg,
                        const std::vector<KernelEstimate>* kernels) {
  auto growth = check_growth(m);
  if (!growth.pass) throw validation_error("represent: growth condition fails: " + growth.note);

  SolutionField u(grid);
  std::fill(u.data().begin(), u.data().end(), 0.0);

  for (const auto& atom : m.atoms) {
    const long snapped = grid.nearest_cell(atom.location);
    const KernelEstimate* est = nullptr;
    KernelEstimate own;
    if (kernels) {
      for (const auto& k : *kernels)
        if (k.source_cell == snapped) est = &k;
      if (!est)
        throw validation_error("represent: no kernel estimate for the source at cell " +
                               std::to_string(snapped));
    } else {
      own = estimate_kernel(grid, prob, atom.location, cfg);
      est = &own;
    }
    const double* src = est->gamma.data().data();
    double* dst = u.data().data();
    for (std::size_t i = 0; i < u.data().size(); ++i) dst[i] += atom.mass * src[i];
  }

  if (!m.density.empty()) {
    // by linearity the evolution of the density equals the cell quadrature
    // of the kernel superposition, without one solve per source cell
    ProblemSpec p = prob;
    p.boundary = BoundaryKind::no_flux;
    p.boundary_value = nullptr;
    const CoefficientField& mu = m.density;
    p.initial = [&grid, &mu](const SpacePoint& x) {
      return mu.at(grid.nearest_cell(x), 0);
    };
    auto ud = solve(grid, p, cfg);
    for (std::size_t i = 0; i < u.data().size(); ++i) u.data()[i] += ud.data()[i];
  }

  u.problem_hash = prob.hash(grid);
  u.config_hash = m.hash();
  return u;
}

namespace {

double trace_integral(const SolutionField& u, const TraceTestFunction& psi, int step) {
  const auto& g = u.grid();
  double s = 0;
  for (long c = 0; c < g.total_cells(); ++c)
    s += u.at(c, step) * psi.psi(g.cell_center(c));
  return s * g.cell_volume();
}

void validate_decay(const TraceTestFunction& psi, const SpaceTimeGrid& g) {
  if (!(psi.delta > 0) || !(psi.K > 0))
    throw validation_error("trace test function: decay certificate needs K, delta > 0");
  for (long c = 0; c < g.total_cells(); ++c) {
    const SpacePoint p = g.cell_center(c);
    double r2 = 0;
    for (int a = 0; a < g.dim(); ++a) r2 += p.x[a] * p.x[a];
    if (std::abs(psi.psi(p)) > psi.K * std::exp(-psi.delta * r2) + 1e-12)
      throw validation_error("trace test function: sampled value exceeds its decay bound");
  }
}

}  // namespace

std::vector<TraceValue> initial_trace(const SolutionField& u,
                                      const std::vector<TraceTestFunction>& psis,
                                      int t0_steps) {
  const auto& g = u.grid();
  if (t0_steps < 16 || t0_steps % 16 != 0)
    throw validation_error("initial trace: t0 must be a positive multiple of 16 steps");
  if (t0_steps > g.steps())
    throw validation_error("initial trace: ladder top exceeds the horizon");
  for (const auto& psi : psis) validate_decay(psi, g);

  std::vector<TraceValue> out;
  for (const auto& psi : psis) {
    TraceValue tv;
    for (int j = 0; j <= 4; ++j) tv.ladder.push_back(trace_integral(u, psi, t0_steps >> j));
    // v(t) = v0 + c1 t + c2 t^2 on the halving ladder: 2 v_{j+1} - v_j kills
    // the linear term, a 4/3-weighted second difference kills the quadratic
    std::vector<double> r1, r2;
    for (int j = 0; j + 1 <= 4; ++j) r1.push_back(2 * tv.ladder[j + 1] - tv.ladder[j]);
    for (std::size_t j = 0; j + 1 < r1.size(); ++j)
      r2.push_back((4 * r1[j + 1] - r1[j]) / 3);
    tv.value = r2.back();
    tv.error = std::max(std::abs(r2.back() - r2[r2.size() - 2]),
                        std::abs(r2.back() - r1.back()) / 8);
    out.push_back(std::move(tv));
  }
  return out;
}

std::vector<RecoveredAtom> recover_atoms(const SolutionField& u, int count,
                                         double bump_radius, int t0_steps) {
  const auto& g = u.grid();
  if (count < 1) throw validation_error("atom recovery: need a positive atom count");
  if (bump_radius <= 0) bump_radius = 4 * g.h();

  // shifted-bump family on the cell-center lattice, one bump per cell whose
  // support clears the walls
  auto bump = [bump_radius](const SpacePoint& x, const SpacePoint& c, int dim) {
    double s2 = 0;
    for (int a = 0; a < dim; ++a) {
      const double d = (x.x[a] - c.x[a]) / bump_radius;
      s2 += d * d;
    }
    return s2 >= 1 ? 0.0 : std::pow(1 - s2, 3);
  };
  std::vector<long> centers;
  for (long c = 0; c < g.total_cells(); ++c) {
    const SpacePoint p = g.cell_center(c);
    bool clear = true;
    for (int a = 0; a < g.dim(); ++a)
      if (p.x[a] - g.lo(a) < bump_radius || g.hi(a) - p.x[a] < bump_radius) clear = false;
    if (clear) centers.push_back(c);
  }
  if (long(centers.size()) < count)
    throw validation_error("atom recovery: bump lattice smaller than the atom count");

  std::vector<TraceTestFunction> psis;
  for (long c : centers) {
    TraceTestFunction psi;
    const SpacePoint ctr = g.cell_center(c);
    const int dim = g.dim();
    psi.psi = [bump, ctr, dim](const SpacePoint& x) { return bump(x, ctr, dim); };
    // loose but valid certificate: the bump is <= 1 and supported in the box
    double far2 = 0;
    for (int a = 0; a < dim; ++a)
      far2 += std::max(std::abs(g.lo(a)), std::abs(g.hi(a))) *
              std::max(std::abs(g.lo(a)), std::abs(g.hi(a)));
    psi.delta = 1e-3;
    psi.K = std::exp(1e-3 * far2) + 1;
    psis.push_back(std::move(psi));
  }
  auto traces = initial_trace(u, psis, t0_steps);

  // greedy peak picking with a separation of two bump radii
  std::vector<double> score(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) score[i] = traces[i].value;
  std::vector<long> picked;
  for (int a = 0; a < count; ++a) {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i)
      if (score[i] > best_v) {
        best_v = score[i];
        best = i;
      }
    picked.push_back(centers[best]);
    const SpacePoint pc = g.cell_center(centers[best]);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const SpacePoint pi = g.cell_center(centers[i]);
      double d2 = 0;
      for (int ax = 0; ax < g.dim(); ++ax) {
        const double d = pi.x[ax] - pc.x[ax];
        d2 += d * d;
      }
      if (d2 < 4 * bump_radius * bump_radius)
        score[i] = -std::numeric_limits<double>::infinity();
    }
  }

  // masses from the trace of the Voronoi window around each peak: the
  // integrand is flat at the atom and the inter-atom leakage vanishes to
  // all orders as t -> 0, so the extrapolation is far more accurate than a
  // fit against the narrow bumps (whose width the kernel outruns at t0)
  std::vector<int> owner(std::size_t(g.total_cells()), 0);
  for (long c = 0; c < g.total_cells(); ++c) {
    const SpacePoint p = g.cell_center(c);
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < count; ++a) {
      const SpacePoint q = g.cell_center(picked[std::size_t(a)]);
      double d2 = 0;
      for (int ax = 0; ax < g.dim(); ++ax) {
        const double d = p.x[ax] - q.x[ax];
        d2 += d * d;
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        owner[std::size_t(c)] = a;
      }
    }
  }
  std::vector<RecoveredAtom> out;
  for (int a = 0; a < count; ++a) {
    std::vector<double> ladder;
    for (int j = 0; j <= 4; ++j) {
      double s = 0;
      for (long c = 0; c < g.total_cells(); ++c)
        if (owner[std::size_t(c)] == a) s += u.at(c, t0_steps >> j);
      ladder.push_back(s * g.cell_volume());
    }
    std::vector<double> r1;
    for (int j = 0; j + 1 <= 4; ++j) r1.push_back(2 * ladder[j + 1] - ladder[j]);
    double mass = (4 * r1.back() - r1[r1.size() - 2]) / 3;
    out.push_back({g.cell_center(picked[std::size_t(a)]), mass});
  }
  std::sort(out.begin(), out.end(), [](const RecoveredAtom& l, const RecoveredAtom& r) {
    return l.location.x < r.location.x;
  });
  return out;
}

Certificate trace_roundtrip(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                            const BorelMeasure& m,
                            const std::vector<TraceTestFunction>& psis,
                            const SolverConfig& cfg) {
  Certificate cert;
  cert.theorem = "widder_representation";
  auto u = represent(grid, prob, m, cfg);
  cert.problem_hash = u.problem_hash;
  cert.grid_hash = grid.hash();

  auto traces = initial_trace(u, psis);
  bool pass = true;
  for (std::size_t i = 0; i < psis.size(); ++i) {
    double expected = 0;
    for (const auto& atom : m.atoms)
      expected += atom.mass * psis[i].psi(grid.cell_center(grid.nearest_cell(atom.location)));
    if (!m.density.empty())
      for (long c = 0; c < grid.total_cells(); ++c)
        expected += m.density.at(c, 0) * psis[i].psi(grid.cell_center(c)) *
                    grid.cell_volume();
    const double diff = std::abs(traces[i].value - expected);
    const double tol = std::max(traces[i].error, 0.02 * std::abs(expected)) + 1e-12;
    cert.constants["trace_" + std::to_string(i)] = traces[i].value;
    cert.constants["expected_" + std::to_string(i)] = expected;
    cert.constants["error_" + std::to_string(i)] = traces[i].error;
    if (diff > tol) {
      pass = false;
      cert.witnesses.push_back({"psi_" + std::to_string(i),
                                {grid.cell_center(0).x, 0.0},
                                traces[i].value - expected});
    }
  }

  // the converse direction claims u is a weak solution
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  double worst = 0;
  for (int b = 0; b < 3; ++b) {
    TestBump phi;
    for (int a = 0; a < grid.dim(); ++a) {
      const double span = grid.hi(a) - grid.lo(a);
      phi.center.x[a] = grid.lo(a) + span * (0.35 + 0.3 * un(rng));
      phi.radius = 0.2 * span;
    }
    phi.t_center = grid.T() * (0.4 + 0.2 * un(rng));
    phi.t_radius = 0.25 * grid.T();
    phi.check_support(grid);
    worst = std::max(worst, weak_residual(u, prob, phi));
  }
  cert.constants["weak_residual"] = worst;
  if (worst > 5e-2) pass = false;

  cert.constants["psis"] = double(psis.size());
  cert.pass = pass;
  return cert;
}

}  // namespace parlab
