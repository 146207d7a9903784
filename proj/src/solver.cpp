#include "parlab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace parlab {

namespace {

uint64_t fnv1a(const void* data, std::size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::array<long, 3> strides(const SpaceTimeGrid& grid) {
  std::array<long, 3> s{0, 0, 0};
  long acc = 1;
  for (int a = grid.dim() - 1; a >= 0; --a) {
    s[a] = acc;
    acc *= grid.cells(a);
  }
  return s;
}

double harmonic(double a, double b) { return 2 * a * b / (a + b); }

/// du/dt = L u + r_coef + (boundary terms). Boundary terms are linear in the
/// Dirichlet data g: r_bc[cell] = sum of coef * g(x_face, t).
struct StepOp {
  Eigen::SparseMatrix<double> L;
  Eigen::VectorXd r_coef;
  struct BcTerm {
    long cell;
    SpacePoint x;
    double coef;
  };
  std::vector<BcTerm> bc;

  Eigen::VectorXd rhs_bc(const std::function<double(const SpacePoint&, double)>& g, double t,
                         long n) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    if (g)
      for (const auto& term : bc) r[term.cell] += term.coef * g(term.x, t);
    return r;
  }
};

SpacePoint face_point(const SpaceTimeGrid& grid, long cell, int axis, int dir) {
  SpacePoint p = grid.cell_center(cell);
  p.x[axis] += dir * 0.5 * grid.h();
  return p;
}

StepOp assemble(const SpaceTimeGrid& grid, const LinearCoefficients& lc, int slab,
                BoundaryKind boundary) {
  const int dim = grid.dim();
  const long n = grid.total_cells();
  const double h = grid.h();
  const auto st = strides(grid);
  const bool dirichlet = boundary == BoundaryKind::dirichlet;

  StepOp op;
  op.r_coef = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(std::size_t(n) * (2 * dim + 1));

  auto at = [slab](const CoefficientField& f, long c) {
    return f.empty() ? 0.0 : f.at(c, f.time_dependent() ? slab : 0);
  };
  auto trip = [&](long r, long c, double v) {
    if (v != 0) trips.emplace_back(int(r), int(c), v);
  };
  // w * (centered d/dx_j at cell m) accumulated into row `row`; Dirichlet
  // ghosts are mirrored about the face (2g - u_m), no_flux ghosts copied.
  auto add_deriv = [&](long row, long m, const std::array<int, 3>& midx, int j, double w) {
    const double c2 = w / (2 * h);
    if (midx[j] < grid.cells(j) - 1)
      trip(row, m + st[j], c2);
    else if (dirichlet) {
      trip(row, m, -c2);
      op.bc.push_back({row, face_point(grid, m, j, +1), 2 * c2});
    } else
      trip(row, m, c2);
    if (midx[j] > 0)
      trip(row, m - st[j], -c2);
    else if (dirichlet) {
      trip(row, m, c2);
      op.bc.push_back({row, face_point(grid, m, j, -1), -2 * c2});
    } else
      trip(row, m, -c2);
  };

  for (long c = 0; c < n; ++c) {
    const auto idx = grid.unflatten(c);
    for (int ax = 0; ax < dim; ++ax) {
      const double ac = at(lc.diag[ax], c);
      // interior face between c and its + neighbor
      if (idx[ax] < grid.cells(ax) - 1) {
        const long nb = c + st[ax];
        const double T = harmonic(ac, at(lc.diag[ax], nb)) / (h * h);
        trip(c, nb, T);
        trip(c, c, -T);
        trip(nb, c, T);
        trip(nb, nb, -T);
        const double Ac = at(lc.drift_div[ax], c), Anb = at(lc.drift_div[ax], nb);
        if (Ac != 0 || Anb != 0) {
          trip(c, c, 0.5 * Ac / h);
          trip(c, nb, 0.5 * Anb / h);
          trip(nb, c, -0.5 * Ac / h);
          trip(nb, nb, -0.5 * Anb / h);
        }
        const double F = 0.5 * (at(lc.flux_source[ax], c) + at(lc.flux_source[ax], nb));
        op.r_coef[c] += F / h;
        op.r_coef[nb] -= F / h;
        for (const auto& od : lc.offdiag) {
          if (od.row != ax) continue;
          const double Aij = 0.5 * (at(od.field, c) + at(od.field, nb));
          if (Aij == 0) continue;
          auto nidx = idx;
          ++nidx[ax];
          // face derivative = mean of the centered derivatives at c and nb
          add_deriv(c, c, idx, od.col, 0.5 * Aij / h);
          add_deriv(c, nb, nidx, od.col, 0.5 * Aij / h);
          add_deriv(nb, c, idx, od.col, -0.5 * Aij / h);
          add_deriv(nb, nb, nidx, od.col, -0.5 * Aij / h);
        }
      }
      // boundary faces: no_flux blocks the whole flux, Dirichlet uses ghosts
      if (dirichlet) {
        for (int dir : {-1, +1}) {
          const bool on = dir < 0 ? idx[ax] == 0 : idx[ax] == grid.cells(ax) - 1;
          if (!on) continue;
          trip(c, c, -2 * ac / (h * h));
          op.bc.push_back({c, face_point(grid, c, ax, dir), 2 * ac / (h * h)});
          const double Ac = at(lc.drift_div[ax], c);
          if (Ac != 0) op.bc.push_back({c, face_point(grid, c, ax, dir), double(dir) * Ac / h});
          op.r_coef[c] += dir * at(lc.flux_source[ax], c) / h;
          for (const auto& od : lc.offdiag) {
            if (od.row != ax) continue;
            const double Aij = at(od.field, c);
            if (Aij != 0) add_deriv(c, c, idx, od.col, dir * Aij / h);
          }
        }
      }
      // advective drift B_ax du/dx_ax via face values of u
      const double Bc = at(lc.drift_adv[ax], c);
      if (Bc != 0) {
        for (int dir : {-1, +1}) {
          const double w = dir * Bc / h;  // weight of the face value u_f
          const bool interior = dir < 0 ? idx[ax] > 0 : idx[ax] < grid.cells(ax) - 1;
          if (interior) {
            trip(c, c, 0.5 * w);
            trip(c, c + dir * st[ax], 0.5 * w);
          } else if (dirichlet) {
            op.bc.push_back({c, face_point(grid, c, ax, dir), w});
          } else {
            trip(c, c, w);  // u_f = u_c
          }
        }
      }
    }
    const double C = at(lc.reaction, c);
    if (C != 0) trip(c, c, C);
    op.r_coef[c] += at(lc.source, c);
  }

  op.L.resize(int(n), int(n));
  op.L.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/// Centered gradient of a cell-centered level with the same ghost conventions
/// as the assembly, evaluated at time t (for the Dirichlet data).
void cell_gradient(const SpaceTimeGrid& grid, const double* v, long c,
                   const std::array<int, 3>& idx, BoundaryKind boundary,
                   const std::function<double(const SpacePoint&, double)>& g, double t,
                   double* out) {
  const double h = grid.h();
  const auto st = strides(grid);
  for (int ax = 0; ax < grid.dim(); ++ax) {
    double vp, vm;
    if (idx[ax] < grid.cells(ax) - 1)
      vp = v[c + st[ax]];
    else if (boundary == BoundaryKind::dirichlet)
      vp = 2 * (g ? g(face_point(grid, c, ax, +1), t) : 0.0) - v[c];
    else
      vp = v[c];
    if (idx[ax] > 0)
      vm = v[c - st[ax]];
    else if (boundary == BoundaryKind::dirichlet)
      vm = 2 * (g ? g(face_point(grid, c, ax, -1), t) : 0.0) - v[c];
    else
      vm = v[c];
    out[ax] = (vp - vm) / (2 * h);
  }
  for (int ax = grid.dim(); ax < 3; ++ax) out[ax] = 0;
}

SolutionField solve_linear(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                           const SolverConfig& cfg) {
  const long n = grid.total_cells();
  const double dt = grid.dt();
  const double w = cfg.time_weight;
  const bool td = prob.linear.time_dependent();

  for (int ax = 0; ax < grid.dim(); ++ax) {
    if (prob.linear.diag[ax].empty())
      throw validation_error("solver: missing principal coefficient on axis " +
                             std::to_string(ax));
    if (prob.linear.diag[ax].min_value() <= 0)
      throw validation_error("solver: principal coefficient must be positive on axis " +
                             std::to_string(ax));
  }

  SolutionField u(grid);
  for (long c = 0; c < n; ++c)
    u.at(c, 0) = prob.initial ? prob.initial(grid.cell_center(c)) : 0.0;

  Eigen::SparseMatrix<double> eye{Eigen::Index(n), Eigen::Index(n)};
  eye.setIdentity();

  StepOp op = assemble(grid, prob.linear, 0, prob.boundary);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  auto factor = [&]() {
    Eigen::SparseMatrix<double> A = eye - (w * dt) * op.L;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw solver_error("solver: sparse factorization failed");
  };
  factor();

  Eigen::Map<const Eigen::VectorXd> u0map(u.level(0), n);
  for (int k = 0; k < grid.steps(); ++k) {
    if (td && k > 0) {
      op = assemble(grid, prob.linear, k, prob.boundary);
      factor();
    }
    Eigen::Map<const Eigen::VectorXd> uk(u.level(k), n);
    Eigen::VectorXd rhs = uk + (w * dt) * (op.r_coef +
                                           op.rhs_bc(prob.boundary_value, grid.time(k + 1), n));
    if (w < 1)
      rhs += ((1 - w) * dt) *
             (op.L * uk + op.r_coef + op.rhs_bc(prob.boundary_value, grid.time(k), n));
    Eigen::VectorXd next = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw solver_error("solver: back-substitution failed");
    std::copy(next.data(), next.data() + n, u.level(k + 1));
  }
  return u;
}

SolutionField solve_quasilinear(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                                const SolverConfig& cfg) {
  const auto& sf = prob.quasi;
  if (!sf.flux || !sf.lower)
    throw validation_error("solver: quasilinear problem needs flux and lower-order callbacks");
  const long n = grid.total_cells();
  const double dt = grid.dt();
  const double a_lo = std::max(1e-10, sf.bounds.a);
  const double a_hi = std::max(sf.bounds.a_bar, sf.bounds.a);
  const auto st = strides(grid);
  const double h = grid.h();
  const bool dirichlet = prob.boundary == BoundaryKind::dirichlet;

  SolutionField u(grid);
  for (long c = 0; c < n; ++c)
    u.at(c, 0) = prob.initial ? prob.initial(grid.cell_center(c)) : 0.0;

  const auto un = static_cast<std::size_t>(n);
  std::vector<double> v(un, 0.0), a_eff(un, 0.0), Bv(un, 0.0);
  std::vector<std::array<double, 3>> R(un);
  CoefficientField a_field = CoefficientField::constant(grid, 1.0, "a_eff");

  for (int k = 0; k < grid.steps(); ++k) {
    const double t1 = grid.time(k + 1);
    std::copy(u.level(k), u.level(k) + n, v.data());
    bool converged = false;
    for (int it = 0; it < cfg.picard_max_iters; ++it) {
      for (long c = 0; c < n; ++c) {
        const auto idx = grid.unflatten(c);
        const SpacePoint x = grid.cell_center(c);
        std::array<double, 3> p{0, 0, 0}, A{0, 0, 0};
        cell_gradient(grid, v.data(), c, idx, prob.boundary, prob.boundary_value, t1, p.data());
        double p2 = 0;
        for (int a = 0; a < grid.dim(); ++a) p2 += p[a] * p[a];
        std::array<double, 3> probe = p;
        if (p2 < 1e-24) {
          probe = {1e-6, 0, 0};
          sf.flux(x, t1, v[c], probe.data(), A.data());
          a_eff[c] = std::clamp(A[0] / 1e-6, a_lo, a_hi);
          sf.flux(x, t1, v[c], p.data(), A.data());
        } else {
          sf.flux(x, t1, v[c], p.data(), A.data());
          double pA = 0;
          for (int a = 0; a < grid.dim(); ++a) pA += p[a] * A[a];
          a_eff[c] = std::clamp(pA / p2, a_lo, a_hi);
        }
        for (int a = 0; a < grid.dim(); ++a) R[c][a] = A[a] - a_eff[c] * p[a];
        Bv[c] = sf.lower(x, t1, v[c], p.data());
      }
      std::copy(a_eff.begin(), a_eff.end(), a_field.data().begin());
      LinearCoefficients lc;
      for (int a = 0; a < grid.dim(); ++a) lc.diag[a] = a_field;
      StepOp op = assemble(grid, lc, 0, prob.boundary);

      Eigen::VectorXd rhs(n);
      Eigen::Map<const Eigen::VectorXd> uk(u.level(k), n);
      for (long c = 0; c < n; ++c) {
        const auto idx = grid.unflatten(c);
        double divR = 0;
        for (int ax = 0; ax < grid.dim(); ++ax) {
          double fp, fm;
          if (idx[ax] < grid.cells(ax) - 1)
            fp = 0.5 * (R[c][ax] + R[c + st[ax]][ax]);
          else
            fp = dirichlet ? R[c][ax] : 0.0;
          if (idx[ax] > 0)
            fm = 0.5 * (R[c][ax] + R[c - st[ax]][ax]);
          else
            fm = dirichlet ? R[c][ax] : 0.0;
          divR += (fp - fm) / h;
        }
        rhs[c] = uk[c] + dt * (divR + Bv[c]);
      }
      rhs += dt * op.rhs_bc(prob.boundary_value, t1, n);

      Eigen::SparseMatrix<double> eye{Eigen::Index(n), Eigen::Index(n)};
      eye.setIdentity();
      Eigen::SparseMatrix<double> A = eye - dt * op.L;
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success)
        throw solver_error("solver: sparse factorization failed (picard)");
      Eigen::VectorXd next = lu.solve(rhs);

      double delta = 0, scale = 1;
      for (long c = 0; c < n; ++c) {
        delta = std::max(delta, std::abs(next[c] - v[c]));
        scale = std::max(scale, std::abs(next[c]));
      }
      for (long c = 0; c < n; ++c)
        v[c] = cfg.picard_damping * next[c] + (1 - cfg.picard_damping) * v[c];
      if (delta < cfg.picard_tol * scale) {
        std::copy(next.data(), next.data() + n, v.data());
        converged = true;
        break;
      }
    }
    if (!converged)
      throw solver_error("solver: picard iteration did not converge at step " +
                         std::to_string(k + 1));
    std::copy(v.data(), v.data() + n, u.level(k + 1));
  }
  return u;
}

}  // namespace

uint64_t ProblemSpec::hash(const SpaceTimeGrid& grid) const {
  uint64_t h = grid.hash();
  const int ki = int(kind), bi = int(boundary);
  h = fnv1a(&ki, sizeof ki, h);
  h = fnv1a(&bi, sizeof bi, h);
  const uint64_t ch = kind == Kind::linear ? linear.hash() : quasi.tag;
  h = fnv1a(&ch, sizeof ch, h);
  if (initial)
    for (long c = 0; c < grid.total_cells(); ++c) {
      const double v = initial(grid.cell_center(c));
      h = fnv1a(&v, sizeof v, h);
    }
  if (boundary_value)
    for (long c = 0; c < grid.total_cells(); ++c)
      if (grid.boundary_adjacent(c))
        for (double t : {0.0, grid.T() / 2, grid.T()}) {
          const double v = boundary_value(grid.cell_center(c), t);
          h = fnv1a(&v, sizeof v, h);
        }
  return h;
}

uint64_t SolverConfig::hash() const {
  uint64_t h = fnv1a(&time_weight, sizeof time_weight);
  h = fnv1a(&picard_tol, sizeof picard_tol, h);
  h = fnv1a(&picard_max_iters, sizeof picard_max_iters, h);
  h = fnv1a(&picard_damping, sizeof picard_damping, h);
  return h;
}

SolutionField solve(const SpaceTimeGrid& grid, const ProblemSpec& prob, const SolverConfig& cfg) {
  if (cfg.time_weight < 0.5 || cfg.time_weight > 1.0)
    throw validation_error("solver: time_weight must lie in [1/2, 1]");
  SolutionField u = prob.kind == ProblemSpec::Kind::linear ? solve_linear(grid, prob, cfg)
                                                           : solve_quasilinear(grid, prob, cfg);
  u.problem_hash = prob.hash(grid);
  u.config_hash = cfg.hash();
  return u;
}

namespace {

double bump(double s) {
  const double r = 1 - s * s;
  return r > 0 ? r * r * r : 0.0;
}

double bump_deriv(double s) {
  const double r = 1 - s * s;
  return r > 0 ? -6 * s * r * r : 0.0;
}

}  // namespace

double TestBump::value(const SpacePoint& x, double t, int dim) const {
  double v = bump((t - t_center) / t_radius);
  for (int a = 0; a < dim; ++a) v *= bump((x.x[a] - center.x[a]) / radius);
  return v;
}

double TestBump::time_derivative(const SpacePoint& x, double t, int dim) const {
  double v = bump_deriv((t - t_center) / t_radius) / t_radius;
  for (int a = 0; a < dim; ++a) v *= bump((x.x[a] - center.x[a]) / radius);
  return v;
}

void TestBump::gradient(const SpacePoint& x, double t, int dim, double* out) const {
  const double tau = bump((t - t_center) / t_radius);
  for (int a = 0; a < dim; ++a) {
    double v = tau * bump_deriv((x.x[a] - center.x[a]) / radius) / radius;
    for (int b = 0; b < dim; ++b)
      if (b != a) v *= bump((x.x[b] - center.x[b]) / radius);
    out[a] = v;
  }
}

void TestBump::check_support(const SpaceTimeGrid& grid) const {
  if (radius <= 0 || t_radius <= 0)
    throw validation_error("test bump: radii must be positive");
  for (int a = 0; a < grid.dim(); ++a) {
    if (center.x[a] - radius < grid.lo(a) + grid.h() - 1e-12 ||
        center.x[a] + radius > grid.hi(a) - grid.h() + 1e-12)
      throw validation_error("test bump: support touches the lateral boundary on axis " +
                             std::to_string(a));
  }
  if (t_center - t_radius < grid.dt() - 1e-12 ||
      t_center + t_radius > grid.T() - grid.dt() + 1e-12)
    throw validation_error("test bump: support touches a time face");
}

void evaluate_fluxes(const ProblemSpec& prob, const SpaceTimeGrid& grid, long cell, int slab,
                     double t, double u, const double* p, double* A_out, double* B_out) {
  const int dim = grid.dim();
  if (prob.kind == ProblemSpec::Kind::quasilinear) {
    const SpacePoint x = grid.cell_center(cell);
    prob.quasi.flux(x, t, u, p, A_out);
    *B_out = prob.quasi.lower(x, t, u, p);
    return;
  }
  const auto& lc = prob.linear;
  auto at = [slab, cell](const CoefficientField& f) {
    return f.empty() ? 0.0 : f.at(cell, f.time_dependent() ? slab : 0);
  };
  for (int i = 0; i < dim; ++i)
    A_out[i] = at(lc.diag[i]) * p[i] + at(lc.drift_div[i]) * u + at(lc.flux_source[i]);
  for (const auto& od : lc.offdiag) A_out[od.row] += at(od.field) * p[od.col];
  double B = at(lc.reaction) * u + at(lc.source);
  for (int j = 0; j < dim; ++j) B += at(lc.drift_adv[j]) * p[j];
  *B_out = B;
}

double weak_residual(const SolutionField& u, const ProblemSpec& prob, const TestBump& phi) {
  const auto& grid = u.grid();
  phi.check_support(grid);
  const int dim = grid.dim();
  const long n = grid.total_cells();
  const double vol = grid.cell_volume(), dt = grid.dt();
  const double sup_u = std::max(u.max_abs(), 1e-300);

  std::vector<double> uh(static_cast<std::size_t>(n), 0.0);
  double res = 0, norm = 0;
  for (int k = 0; k < grid.steps(); ++k) {
    const double th = (k + 0.5) * dt;
    for (long c = 0; c < n; ++c) uh[c] = 0.5 * (u.at(c, k) + u.at(c, k + 1));
    for (long c = 0; c < n; ++c) {
      const SpacePoint x = grid.cell_center(c);
      const double pv = phi.value(x, th, dim);
      const double pt = phi.time_derivative(x, th, dim);
      std::array<double, 3> pg{0, 0, 0};
      phi.gradient(x, th, dim, pg.data());
      double gnorm = 0;
      for (int a = 0; a < dim; ++a) gnorm += pg[a] * pg[a];
      gnorm = std::sqrt(gnorm);
      norm += vol * dt * (std::abs(pt) + gnorm + std::abs(pv));
      if (pv == 0 && pt == 0 && gnorm == 0) continue;

      const auto idx = grid.unflatten(c);
      std::array<double, 3> du{0, 0, 0}, A{0, 0, 0};
      cell_gradient(grid, uh.data(), c, idx, prob.boundary, prob.boundary_value, th, du.data());
      double B = 0;
      evaluate_fluxes(prob, grid, c, k, th, uh[c], du.data(), A.data(), &B);
      double term = -uh[c] * pt - pv * B;
      for (int a = 0; a < dim; ++a) term += pg[a] * A[a];
      res += vol * dt * term;
    }
  }
  return std::abs(res) / (sup_u * norm);
}

double mass_drift(const SolutionField& u) {
  const auto& grid = u.grid();
  const double vol = grid.cell_volume();
  double m0 = 0;
  for (long c = 0; c < grid.total_cells(); ++c) m0 += u.at(c, 0);
  m0 *= vol;
  double drift = 0;
  for (int k = 1; k <= grid.steps(); ++k) {
    double m = 0;
    for (long c = 0; c < grid.total_cells(); ++c) m += u.at(c, k);
    drift = std::max(drift, std::abs(m * vol - m0));
  }
  return drift;
}

}  // namespace parlab
