#include "parlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parlab {

namespace {

Certificate::Witness witness(const std::string& role, const SpaceTimeGrid& grid,
                             long cell, int step, double value) {
  Certificate::Witness w;
  w.role = role;
  const SpacePoint p = grid.cell_center(cell);
  w.where = {p.x, grid.time(step)};
  w.value = value;
  return w;
}

void stamp(Certificate& cert, const SolutionField& u) {
  cert.problem_hash = u.problem_hash;
  cert.grid_hash = u.grid().hash();
}

struct Extreme {
  double value = 0;
  long cell = 0;
  int step = 0;
};

Extreme max_on(const SolutionField& u, const CellSet& region) {
  Extreme e{-std::numeric_limits<double>::infinity(), 0, 0};
  const auto& g = u.grid();
  for (int k = 0; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c)
      if (region.contains(c, k) && u.at(c, k) > e.value) e = {u.at(c, k), c, k};
  return e;
}

Extreme min_on(const SolutionField& u, const CellSet& region) {
  Extreme e{std::numeric_limits<double>::infinity(), 0, 0};
  const auto& g = u.grid();
  for (int k = 0; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c)
      if (region.contains(c, k) && u.at(c, k) < e.value) e = {u.at(c, k), c, k};
  return e;
}

}  // namespace

Certificate certify_max_principle(const SolutionField& u, double M,
                                  const StructureBounds& bounds, bool minimum,
                                  double tol) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = minimum ? "minimum_principle" : "maximum_principle";
  stamp(cert, u);
  const double sgn = minimum ? -1.0 : 1.0;

  // precondition: sgn*u <= sgn*M on the parabolic boundary
  auto gamma = parabolic_boundary(g);
  for (int k = 0; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c)
      if (gamma.contains(c, k) && sgn * (u.at(c, k) - M) > tol)
        throw validation_error("max principle: boundary datum exceeds M at cell " +
                               std::to_string(c) + ", step " + std::to_string(k));

  Extreme ext{-std::numeric_limits<double>::infinity(), 0, 0};
  for (int k = 0; k <= g.steps(); ++k)
    for (long c = 0; c < g.total_cells(); ++c)
      if (sgn * u.at(c, k) > ext.value) ext = {sgn * u.at(c, k), c, k};
  cert.witnesses.push_back(witness("extremum", g, ext.cell, ext.step, sgn * ext.value));

  const double k_bound = bounds.k_max_principle(M);
  const double excess = std::max(0.0, ext.value - sgn * M);
  cert.constants["M"] = M;
  cert.constants["k"] = k_bound;
  cert.constants["excess"] = excess;
  if (k_bound > 0) {
    cert.constants["C_emp"] = excess / k_bound;
    cert.pass = true;  // the theorem asserts a finite C
  } else {
    cert.constants["C_emp"] = 0;
    cert.pass = excess <= tol;
  }
  return cert;
}

Certificate certify_local_bound(const SolutionField& u, const SpaceTimePoint& center,
                                double rho, const StructureBounds& bounds) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "local_boundedness";
  stamp(cert, u);

  auto tripled = materialize({center, rho, CylinderKind::tripled}, g);
  auto inner = materialize({center, rho, CylinderKind::standard}, g);

  Extreme hi = max_on(u, inner), lo = min_on(u, inner);
  const double sup_abs = std::max(std::abs(hi.value), std::abs(lo.value));
  const Extreme& arg = std::abs(hi.value) >= std::abs(lo.value) ? hi : lo;
  cert.witnesses.push_back(witness("sup_abs", g, arg.cell, arg.step, arg.value));

  const int n = g.dim();
  const double k = bounds.k_local();
  const double norm = bochner_norm(u, 2, 2, tripled);
  const double denom =
      std::pow(rho, -0.5 * (n + 2)) * norm + std::pow(rho, bounds.theta) * k;
  cert.constants["rho"] = rho;
  cert.constants["k"] = k;
  cert.constants["norm_223rho"] = norm;
  cert.constants["sup_abs"] = sup_abs;
  cert.constants["C_emp"] = denom > 0 ? sup_abs / denom
                                      : std::numeric_limits<double>::infinity();
  cert.pass = denom > 0 && std::isfinite(cert.constants["C_emp"]);
  return cert;
}

Certificate certify_harnack(const SolutionField& u, const SpaceTimePoint& center,
                            double rho, const StructureBounds& bounds, double k,
                            double tol) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "harnack";
  stamp(cert, u);

  check_containment({center, rho, CylinderKind::tripled}, g);
  double u_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= g.steps(); ++s)
    for (long c = 0; c < g.total_cells(); ++c) u_min = std::min(u_min, u.at(c, s));
  if (u_min < -tol)
    throw validation_error("harnack: solution negative beyond tolerance (min " +
                           std::to_string(u_min) + ")");

  auto shifted = materialize({center, rho, CylinderKind::harnack_shifted}, g);
  auto standard = materialize({center, rho, CylinderKind::standard}, g);
  Extreme num = max_on(u, shifted);
  Extreme den = min_on(u, standard);
  const double shift = std::pow(rho, bounds.theta) * k;
  cert.witnesses.push_back(witness("max_Qstar", g, num.cell, num.step, num.value));
  cert.witnesses.push_back(witness("min_Q", g, den.cell, den.step, den.value));

  const double denom = den.value + shift;
  cert.constants["rho"] = rho;
  cert.constants["k"] = k;
  cert.constants["max_Qstar"] = num.value;
  cert.constants["min_Q_shifted"] = denom;
  cert.constants["C_emp"] =
      denom > 0 ? num.value / denom : std::numeric_limits<double>::infinity();
  cert.pass = denom > 0;
  return cert;
}

Certificate certify_pointwise_harnack(const SolutionField& u,
                                      const std::vector<PointPair>& pairs, double k) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "pointwise_harnack";
  stamp(cert, u);

  auto sample = [&](const SpaceTimePoint& p) {
    const int step = std::clamp(int(std::lround(p.t / g.dt())), 0, g.steps());
    return u.at(g.nearest_cell({p.x}), step);
  };

  double worst = 0;
  for (const auto& pr : pairs) {
    if (!(0 < pr.early.t && pr.early.t < pr.late.t && pr.late.t <= g.T()))
      throw validation_error("pointwise harnack: pairs must satisfy 0 < s < t <= T");
    double d2 = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = pr.late.x[a] - pr.early.x[a];
      d2 += d * d;
    }
    const double denom = d2 / (pr.late.t - pr.early.t) + pr.late.t / pr.early.t;
    const double ratio = (sample(pr.early) + k) / (sample(pr.late) + k);
    const double c = std::log(ratio) / denom;
    if (c > worst) {
      worst = c;
      cert.witnesses.clear();
      cert.witnesses.push_back({"early", pr.early, sample(pr.early)});
      cert.witnesses.push_back({"late", pr.late, sample(pr.late)});
    }
  }
  cert.constants["k"] = k;
  cert.constants["C_emp"] = std::max(0.0, worst);
  cert.constants["pairs"] = double(pairs.size());
  cert.pass = true;
  return cert;
}

namespace {

/// Cells and levels of the pseudo-distance ball of radius r at X:
/// max_i |x_i - X_i| <= r and X.t - 4 r^2 <= t <= X.t.
CellSet pseudo_ball(const SpaceTimeGrid& g, const SpaceTimePoint& X, double r) {
  CellSet set(g);
  const double t_lo = X.t - 4 * r * r;
  for (int k = 0; k <= g.steps(); ++k) {
    const double t = g.time(k);
    if (t < t_lo - 1e-14 || t > X.t + 1e-14) continue;
    for (long c = 0; c < g.total_cells(); ++c) {
      const SpacePoint p = g.cell_center(c);
      bool in = true;
      for (int a = 0; a < g.dim(); ++a)
        if (std::abs(p.x[a] - X.x[a]) > r + 1e-14) in = false;
      if (in) set.set(c, k, true);
    }
  }
  return set;
}

}  // namespace

Certificate estimate_hoelder(const SolutionField& u, const SpaceTimePoint& X,
                             const std::vector<double>& radii, double k) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "hoelder_continuity";
  stamp(cert, u);
  if (radii.size() < 2)
    throw validation_error("hoelder estimate: need at least two ladder radii");

  // R: pseudo-distance from X to the boundary of Q, capped at 1
  double R = std::sqrt(X.t) / 2;
  for (int a = 0; a < g.dim(); ++a)
    R = std::min({R, X.x[a] - g.lo(a), g.hi(a) - X.x[a]});
  R = std::min(R, 1.0);
  if (R <= 0) throw validation_error("hoelder estimate: X not interior to Q");

  std::vector<double> log_r, log_osc;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (r > R) throw validation_error("hoelder estimate: ladder radius exceeds R");
    auto ball = pseudo_ball(g, X, r);
    if (ball.empty())
      throw validation_error("hoelder estimate: ball too small for the grid");
    const double osc = u.max_over(ball) - u.min_over(ball);
    cert.constants["osc_r" + std::to_string(i)] = osc;
    if (osc <= 0) continue;  // below the noise floor; drop from the fit
    log_r.push_back(std::log(r));
    log_osc.push_back(std::log(osc));
  }
  const double L = u.max_abs();
  cert.constants["L"] = L;
  cert.constants["R"] = R;
  if (log_r.size() < 2) {
    cert.pass = false;
    cert.note = "oscillation below the noise floor; alpha is a lower bound only";
    cert.constants["alpha_emp"] = 1;
    return cert;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(log_r.size());
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    sx += log_r[i];
    sy += log_osc[i];
    sxx += log_r[i] * log_r[i];
    sxy += log_r[i] * log_osc[i];
  }
  const double alpha = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  cert.constants["alpha_emp"] = alpha;

  // smallest H closing |u(Y) - u(X)| <= H (L + k)(|Y - X|/R)^alpha over the
  // largest ball
  const double r_max = *std::max_element(radii.begin(), radii.end());
  const int step_X = std::clamp(int(std::lround(X.t / g.dt())), 0, g.steps());
  const long cell_X = g.nearest_cell({X.x});
  const double uX = u.at(cell_X, step_X);
  auto ball = pseudo_ball(g, X, r_max);
  double H = 0;
  for (int s = 0; s <= g.steps(); ++s)
    for (long c = 0; c < g.total_cells(); ++c) {
      if (!ball.contains(c, s)) continue;
      const SpacePoint p = g.cell_center(c);
      const double dist = pseudo_distance(X, {p.x, g.time(s)}, g.dim());
      if (!(dist > 0) || !std::isfinite(dist)) continue;
      const double bound = (L + k) * std::pow(dist / R, alpha);
      if (bound > 0) H = std::max(H, std::abs(u.at(c, s) - uX) / bound);
    }
  cert.constants["H_emp"] = H;
  cert.pass = alpha > 0 && std::isfinite(H);
  return cert;
}

namespace {

/// Measure of the intersection of a grid cell with the ball |x - x0|^2 < r2:
/// exact interval overlap in 1-D, 3^n midpoint subcells otherwise.
double ball_overlap(const SpaceTimeGrid& g, long cell, const SpacePoint& x0,
                    double r2) {
  const SpacePoint c = g.cell_center(cell);
  const double h = g.h();
  if (g.dim() == 1) {
    const double r = std::sqrt(r2);
    const double lo = std::max(c.x[0] - h / 2, x0.x[0] - r);
    const double hi = std::min(c.x[0] + h / 2, x0.x[0] + r);
    return std::max(0.0, hi - lo);
  }
  const double off[3] = {-h / 3, 0.0, h / 3};
  long inside = 0, total = 0;
  const int nsub = g.dim() == 2 ? 9 : 27;
  for (int s = 0; s < nsub; ++s) {
    double d2 = 0;
    int q = s;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = c.x[a] + off[q % 3] - x0.x[a];
      d2 += d * d;
      q /= 3;
    }
    ++total;
    if (d2 < r2) ++inside;
  }
  return g.cell_volume() * double(inside) / double(total);
}

}  // namespace

Certificate certify_limit_behavior(const SolutionField& u, double alpha, double k,
                                   int exclude_steps) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "limit_behavior";
  stamp(cert, u);
  if (!(alpha > 0)) throw validation_error("limit behavior: alpha must be positive");

  SpacePoint x0;
  for (int a = 0; a < g.dim(); ++a) x0.x[a] = 0.5 * (g.lo(a) + g.hi(a));

  double mass = std::numeric_limits<double>::infinity();
  int arg_step = 0;
  for (int s = exclude_steps + 1; s <= g.steps(); ++s) {
    const double r2 = alpha * g.time(s);
    double m = 0;
    for (long c = 0; c < g.total_cells(); ++c) {
      const double w = ball_overlap(g, c, x0, r2);
      if (w > 0) m += w * u.at(c, s);
    }
    if (m < mass) {
      mass = m;
      arg_step = s;
    }
  }
  cert.constants["M"] = mass;
  cert.constants["alpha"] = alpha;
  cert.witnesses.push_back({"inf_mass", {x0.x, g.time(arg_step)}, mass});
  if (!(mass > 0)) {
    cert.applicable = false;
    cert.pass = false;
    cert.note = "hypothesis M > 0 fails; lower bound not applicable";
    return cert;
  }

  // lower envelope u + k >= C1 t^{-n/2} exp(-C2 |x - x0|^2 / t), fitted on
  // the window |x - x0|^2 <= 16 alpha t
  const int n = g.dim();
  struct Sample {
    double s, w;
  };
  std::vector<Sample> samples;
  for (int s = exclude_steps + 1; s <= g.steps(); ++s) {
    const double t = g.time(s);
    for (long c = 0; c < g.total_cells(); ++c) {
      const SpacePoint p = g.cell_center(c);
      double d2 = 0;
      for (int a = 0; a < n; ++a) {
        const double d = p.x[a] - x0.x[a];
        d2 += d * d;
      }
      if (d2 > 16 * alpha * t) continue;
      const double v = u.at(c, s) + k;
      if (!(v > 0)) continue;
      samples.push_back({d2 / t, std::log(v) + 0.5 * n * std::log(t)});
    }
  }
  if (samples.size() < 2)
    throw validation_error("limit behavior: too few positive samples for the fit");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& sm : samples) {
    sx += sm.s;
    sy += sm.w;
    sxx += sm.s * sm.s;
    sxy += sm.s * sm.w;
  }
  const double m = double(samples.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double C2 = std::max(0.0, -slope);
  double logC1 = std::numeric_limits<double>::infinity();
  for (const auto& sm : samples) logC1 = std::min(logC1, sm.w + C2 * sm.s);
  cert.constants["C1"] = std::exp(logC1);
  cert.constants["C2"] = C2;
  cert.constants["fit_samples"] = m;
  cert.pass = true;  // the envelope holds at every sample by construction
  return cert;
}

CutoffField bump_cutoff(const SpacePoint& center, double radius, double t_on,
                        double t_full) {
  if (!(0 <= t_on && t_on < t_full))
    throw validation_error("bump cutoff: need 0 <= t_on < t_full");
  auto bump = [center, radius](const SpacePoint& p) {
    double s2 = 0;
    for (int a = 0; a < 3; ++a) {
      const double d = (p.x[a] - center.x[a]) / radius;
      s2 += d * d;
    }
    return s2 >= 1 ? 0.0 : std::pow(1 - s2, 3);
  };
  auto ramp = [t_on, t_full](double t) {
    if (t <= t_on) return 0.0;
    if (t >= t_full) return 1.0;
    const double s = (t - t_on) / (t_full - t_on);
    return s * s * (3 - 2 * s);
  };
  CutoffField eta;
  eta.value = [bump, ramp](const SpacePoint& p, double t) { return bump(p) * ramp(t); };
  eta.gradient = [center, radius, ramp](const SpacePoint& p, double t, double* out) {
    double s2 = 0;
    for (int a = 0; a < 3; ++a) {
      const double d = (p.x[a] - center.x[a]) / radius;
      s2 += d * d;
    }
    for (int a = 0; a < 3; ++a) {
      out[a] = s2 >= 1 ? 0.0
                       : -6 * std::pow(1 - s2, 2) * (p.x[a] - center.x[a]) /
                             (radius * radius) * ramp(t);
    }
  };
  eta.time_derivative = [bump, t_on, t_full](const SpacePoint& p, double t) {
    if (t <= t_on || t >= t_full) return 0.0;
    const double s = (t - t_on) / (t_full - t_on);
    return bump(p) * 6 * s * (1 - s) / (t_full - t_on);
  };
  return eta;
}

namespace {

/// Discrete gradient of one level: central differences in the interior,
/// one-sided at the walls.
void level_gradient(const SpaceTimeGrid& g, const double* v, std::vector<double>& out) {
  const int n = g.dim();
  out.assign(std::size_t(g.total_cells()) * 3, 0.0);
  for (long c = 0; c < g.total_cells(); ++c) {
    const auto idx = g.unflatten(c);
    for (int a = 0; a < n; ++a) {
      auto lo = idx, hi = idx;
      double span = 2 * g.h();
      if (idx[a] > 0)
        --lo[a];
      else
        span -= g.h();
      if (idx[a] < g.cells(a) - 1)
        ++hi[a];
      else
        span -= g.h();
      out[std::size_t(c) * 3 + a] = (v[g.flatten(hi)] - v[g.flatten(lo)]) / span;
    }
  }
}

double coef_at(const CoefficientField& f, long cell, int slab) {
  return f.empty() ? 0.0 : f.at(cell, slab);
}

}  // namespace

Certificate check_caccioppoli(const SolutionField& u, const CutoffField& eta,
                              double beta, double kappa, const StructureFunctions& sf,
                              int tau_samples, double tol) {
  const auto& g = u.grid();
  Certificate cert;
  cert.theorem = "caccioppoli";
  stamp(cert, u);
  if (beta < 1) throw validation_error("caccioppoli: beta >= 1 required");
  if (kappa == 0 && !(sf.f.empty() && sf.g.empty() && sf.h.empty()))
    throw validation_error("caccioppoli: kappa = 0 requires f, g, h to vanish");
  if (kappa < 0) throw validation_error("caccioppoli: kappa must be non-negative");

  // eta must vanish in a neighborhood of the parabolic boundary
  for (long c = 0; c < g.total_cells(); ++c)
    if (std::abs(eta.value(g.cell_center(c), 0.0)) > 1e-12)
      throw validation_error("caccioppoli: cutoff nonzero at the initial level");
  for (int s = 0; s <= g.steps(); ++s)
    for (long c = 0; c < g.total_cells(); ++c)
      if (g.boundary_adjacent(c) &&
          std::abs(eta.value(g.cell_center(c), g.time(s))) > 1e-12)
        throw validation_error("caccioppoli: cutoff nonzero near the lateral boundary");

  const int n = g.dim();
  const double vol = g.cell_volume(), dt = g.dt();
  const double a = sf.bounds.a, abar = sf.bounds.a_bar;
  const double H = 4 * abar * abar / a;

  // running space-time integrals over Omega x (0, t_k)
  double grad_term = 0, rhs_F = 0, rhs_F_literal_G = 0, rhs_time = 0;
  std::vector<double> ubar(std::size_t(g.total_cells()), 0.0), grad;
  std::vector<int> taus;
  for (int j = 1; j <= tau_samples; ++j)
    taus.push_back(std::max(1, int(std::lround(double(j) * g.steps() / tau_samples))));
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_tau = taus.front();
  bool pass = true;
  std::size_t next_tau = 0;

  for (int s = 1; s <= g.steps() && next_tau < taus.size(); ++s) {
    const double t = g.time(s);
    const int slab = s - 1;
    for (long c = 0; c < g.total_cells(); ++c)
      ubar[std::size_t(c)] = std::max(0.0, u.at(c, s)) + kappa;
    level_gradient(g, ubar.data(), grad);

    for (long c = 0; c < g.total_cells(); ++c) {
      const SpacePoint p = g.cell_center(c);
      const double e = eta.value(p, t);
      double ex[3];
      eta.gradient(p, t, ex);
      double ex2 = 0;
      for (int axis = 0; axis < n; ++axis) ex2 += ex[axis] * ex[axis];
      const double exn = std::sqrt(ex2);
      const double et = eta.time_derivative(p, t);
      const double ub = ubar[std::size_t(c)];
      double g2 = 0;
      for (int axis = 0; axis < n; ++axis) {
        const double d = grad[std::size_t(c) * 3 + axis];
        g2 += d * d;
      }

      const double bb = coef_at(sf.b, c, slab), cc = coef_at(sf.c, c, slab);
      const double dd = coef_at(sf.d, c, slab), ee = coef_at(sf.e, c, slab);
      const double ff = coef_at(sf.f, c, slab), gg = coef_at(sf.g, c, slab);
      const double hh = coef_at(sf.h, c, slab);
      const double F = beta * (bb * bb + (kappa > 0 ? ff * ff / (kappa * kappa) : 0)) +
                       (dd + (kappa > 0 ? gg / kappa : 0)) + cc * cc / a;
      const double G_corr = ee + (kappa > 0 ? hh / kappa : 0);
      const double G_lit = kappa > 0 ? ee * hh / kappa : 0.0;
      const double ub_pow = std::pow(ub, beta + 1);

      grad_term += dt * vol * e * e * std::pow(ub, beta - 1) * g2;
      rhs_F += dt * vol *
               (F * e * e + 2 * std::max(G_corr, G_lit) * e * exn + H * ex2) * ub_pow;
      rhs_F_literal_G += dt * vol * (F * e * e + 2 * G_lit * e * exn + H * ex2) * ub_pow;
      rhs_time += dt * vol * e * std::abs(et) * ub_pow;
    }

    if (s == taus[next_tau]) {
      double bracket = 0, bracket_literal = 0;
      for (long c = 0; c < g.total_cells(); ++c) {
        const double e = eta.value(g.cell_center(c), t);
        const double ub = ubar[std::size_t(c)];
        const double bb = coef_at(sf.b, c, slab);
        bracket += vol * e * e *
                   (std::pow(ub, beta + 1) - (beta + 1) * std::pow(kappa, beta) * ub +
                    beta * std::pow(kappa, beta + 1));
        bracket_literal += vol * e * e *
                           (std::pow(ub, beta - 1) -
                            (bb + 1) * std::pow(kappa, beta) * ub +
                            beta * std::pow(kappa, beta + 1));
      }
      const double lhs = bracket / (beta + 1) + 0.5 * a * beta * grad_term;
      const double rhs = rhs_F + 2.0 / (beta + 1) * rhs_time;
      const double margin = (rhs - lhs) / std::max(rhs, 1e-300);
      if (margin < worst_margin) {
        worst_margin = margin;
        worst_tau = s;
        cert.constants["lhs_time_bracket"] = bracket / (beta + 1);
        cert.constants["lhs_time_bracket_literal"] = bracket_literal / (beta + 1);
        cert.constants["lhs_gradient"] = 0.5 * a * beta * grad_term;
        cert.constants["rhs_F"] = rhs_F;
        cert.constants["rhs_F_literal_G"] = rhs_F_literal_G;
        cert.constants["rhs_cutoff_time"] = 2.0 / (beta + 1) * rhs_time;
      }
      if (lhs > rhs * (1 + tol) + 1e-300) pass = false;
      ++next_tau;
    }
  }

  cert.constants["beta"] = beta;
  cert.constants["kappa"] = kappa;
  cert.constants["worst_margin"] = worst_margin;
  cert.constants["tau_samples"] = double(taus.size());
  cert.witnesses.push_back(
      {"worst_tau", {{0, 0, 0}, g.time(worst_tau)}, worst_margin});
  cert.pass = pass;
  return cert;
}

}  // namespace parlab
