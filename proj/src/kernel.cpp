#include "parlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace parlab {

double heat_kernel(int n, double alpha, double r2, double t) {
  if (t <= 0) return 0;
  const double denom = 4 * M_PI * alpha * t;
  return std::pow(denom, -0.5 * n) * std::exp(-r2 / (4 * alpha * t));
}

KernelEstimate estimate_kernel(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                               const SpacePoint& source, const SolverConfig& cfg,
                               double tail_tol) {
  KernelEstimate est;
  est.tail_tol = tail_tol;
  est.source_cell = grid.nearest_cell(source);
  est.source = grid.cell_center(est.source_cell);

  ProblemSpec p = prob;
  p.boundary = BoundaryKind::no_flux;
  p.boundary_value = nullptr;
  const long src = est.source_cell;
  const double height = 1.0 / grid.cell_volume();
  p.initial = [&grid, src, height](const SpacePoint& x) {
    return grid.nearest_cell(x) == src ? height : 0.0;
  };
  est.gamma = solve(grid, p, cfg);

  est.step_effective.assign(std::size_t(grid.steps()) + 1, 0);
  for (int k = 0; k <= grid.steps(); ++k) {
    double total = 0, near_boundary = 0;
    for (long c = 0; c < grid.total_cells(); ++c) {
      const double m = est.gamma.at(c, k);
      total += m;
      if (grid.boundary_adjacent(c)) near_boundary += m;
    }
    const double frac = total > 0 ? near_boundary / total : 1.0;
    est.step_effective[k] = frac <= tail_tol ? 1 : 0;
    if (k == grid.steps()) est.boundary_mass = frac;
  }
  est.effective_box = est.step_effective[grid.steps()] != 0;
  return est;
}

namespace {

double r2_to_source(const SpaceTimeGrid& grid, long cell, const SpacePoint& xi) {
  const SpacePoint x = grid.cell_center(cell);
  double r2 = 0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double d = x.x[a] - xi.x[a];
    r2 += d * d;
  }
  return r2;
}

}  // namespace

GaussianFit fit_gaussian_bounds(const KernelEstimate& est, const FitRegion& region) {
  const auto& grid = est.gamma.grid();
  const int n = grid.dim();
  const double vol = grid.cell_volume();
  GaussianFit fit;

  // estimates built by hand (e.g. sampled analytic kernels) may omit the
  // per-step flags; treat every step as effective then
  auto effective = [&est](int k) {
    return est.step_effective.empty() || est.step_effective[std::size_t(k)] != 0;
  };

  // pilot diffusivity from the second moment at the last effective level
  int pilot_step = grid.steps();
  for (int k = grid.steps(); k > 0; --k)
    if (effective(k)) {
      pilot_step = k;
      break;
    }
  double m0 = 0, m2 = 0;
  for (long c = 0; c < grid.total_cells(); ++c) {
    const double g = est.gamma.at(c, pilot_step);
    m0 += g * vol;
    m2 += g * r2_to_source(grid, c, est.source) * vol;
  }
  if (m0 <= 0) throw validation_error("gaussian fit: kernel estimate carries no mass");
  fit.alpha_ref = m2 / (2 * n * grid.time(pilot_step) * m0);
  if (!(fit.alpha_ref > 0))
    throw validation_error("gaussian fit: non-positive pilot diffusivity");

  // collect (z, y) with z = r^2/(4t) and y = ln Gamma + (n/2) ln(4 pi t);
  // a Gaussian of diffusivity alpha has y = -(n/2) ln alpha - z/alpha
  struct Sample {
    double z, y;
  };
  std::vector<Sample> samples;
  for (int k = region.exclude_steps + 1; k <= grid.steps(); ++k) {
    if (!effective(k)) continue;
    const double t = grid.time(k);
    const double r2max = region.window_sigmas * region.window_sigmas * fit.alpha_ref * t;
    for (long c = 0; c < grid.total_cells(); ++c) {
      const double r2 = r2_to_source(grid, c, est.source);
      if (r2 > r2max) continue;
      const double g = est.gamma.at(c, k);
      if (!(g > 0))
        throw validation_error("gaussian fit: non-positive kernel value at cell " +
                               std::to_string(c) + ", step " + std::to_string(k));
      samples.push_back({r2 / (4 * t), std::log(g) + 0.5 * n * std::log(4 * M_PI * t)});
    }
    ++fit.steps_used;
  }
  fit.samples = long(samples.size());
  if (fit.samples < 10)
    throw validation_error("gaussian fit: fewer than 10 usable samples in the fit region");

  double zmax = 1e-12;
  for (const auto& s : samples) zmax = std::max(zmax, s.z);
  const int nb = std::max(1, region.bins);
  std::vector<double> zsum(nb, 0), yup(nb, -std::numeric_limits<double>::infinity());
  std::vector<double> ylo(nb, std::numeric_limits<double>::infinity());
  std::vector<long> count(nb, 0);
  for (const auto& s : samples) {
    const int b = std::min(nb - 1, int(s.z / zmax * nb));
    zsum[b] += s.z;
    ++count[b];
    yup[b] = std::max(yup[b], s.y);
    ylo[b] = std::min(ylo[b], s.y);
  }

  auto ls_alpha = [&](const std::vector<double>& ys) {
    double best = std::numeric_limits<double>::infinity(), besta = 1;
    const double lga = std::log(region.alpha_lo), lgb = std::log(region.alpha_hi);
    for (int i = 0; i < region.alpha_scan; ++i) {
      const double a = std::exp(lga + (lgb - lga) * i / double(region.alpha_scan - 1));
      double v = 0;
      for (int b = 0; b < nb; ++b) {
        if (count[b] == 0) continue;
        const double zc = zsum[b] / double(count[b]);
        const double r = ys[b] + 0.5 * n * std::log(a) + zc / a;
        v += r * r;
      }
      if (v < best) {
        best = v;
        besta = a;
      }
    }
    return besta;
  };
  fit.alpha2 = ls_alpha(yup);
  fit.alpha1 = ls_alpha(ylo);
  if (fit.alpha1 > fit.alpha2) std::swap(fit.alpha1, fit.alpha2);

  // smallest constant closing both envelopes over every sample
  for (const auto& s : samples) {
    const double g2 = -0.5 * n * std::log(fit.alpha2) - s.z / fit.alpha2;
    const double g1 = -0.5 * n * std::log(fit.alpha1) - s.z / fit.alpha1;
    fit.C_upper = std::max(fit.C_upper, std::exp(s.y - g2));
    fit.C_lower = std::max(fit.C_lower, std::exp(g1 - s.y));
  }
  fit.C = std::max({1.0, fit.C_upper, fit.C_lower});
  return fit;
}

double check_chapman_kolmogorov(const KernelEstimate& est, const ProblemSpec& prob,
                                const SolverConfig& cfg, int mid_step) {
  const auto& grid = est.gamma.grid();
  if (prob.kind != ProblemSpec::Kind::linear)
    throw validation_error("chapman-kolmogorov check: linear problems only");
  if (prob.linear.time_dependent())
    throw validation_error("chapman-kolmogorov check: time-independent coefficients only");
  if (mid_step <= 0 || mid_step >= grid.steps())
    throw validation_error("chapman-kolmogorov check: mid step must split the horizon");

  const double ts = grid.time(mid_step);
  auto sub = SpaceTimeGrid::make(grid.dim(), {grid.lo(0), grid.lo(1), grid.lo(2)},
                                 {grid.hi(0), grid.hi(1), grid.hi(2)}, grid.h(),
                                 grid.T() - ts, grid.dt());
  std::vector<double> slice(est.gamma.level(mid_step),
                            est.gamma.level(mid_step) + grid.total_cells());
  ProblemSpec p = prob;
  p.boundary = BoundaryKind::no_flux;
  p.boundary_value = nullptr;
  p.initial = [&sub, &slice](const SpacePoint& x) { return slice[sub.nearest_cell(x)]; };
  auto restarted = solve(sub, p, cfg);

  double peak = 0;
  for (long c = 0; c < grid.total_cells(); ++c)
    peak = std::max(peak, std::abs(est.gamma.at(c, grid.steps())));
  double worst = 0;
  for (long c = 0; c < grid.total_cells(); ++c) {
    const double lhs = est.gamma.at(c, grid.steps());
    if (lhs < 0.01 * peak) continue;
    worst = std::max(worst,
                     std::abs(restarted.at(c, grid.steps() - mid_step) - lhs) / lhs);
  }
  return worst;
}

GreenResult elliptic_green(const KernelEstimate& est, double r_min, double r_max,
                           const FitRegion& region) {
  const auto& grid = est.gamma.grid();
  if (grid.dim() != 3)
    throw validation_error("elliptic green: three space dimensions required");
  if (!(0 < r_min && r_min < r_max))
    throw validation_error("elliptic green: need 0 < r_min < r_max");

  GreenResult res;
  res.fit = fit_gaussian_bounds(est, region);
  res.alpha_central = std::sqrt(res.fit.alpha1 * res.fit.alpha2);
  const double T = grid.T(), dt = grid.dt();
  const double C = res.fit.C;

  // int_0^T g dt = erfc(r/(2 sqrt(alpha T)))/(4 pi alpha r); the tail past
  // the horizon is the erf complement of the full Newtonian 1/(4 pi alpha r)
  auto tail = [&](double alpha, double r) {
    return std::erf(r / (2 * std::sqrt(alpha * T))) / (4 * M_PI * alpha * r);
  };

  for (long c = 0; c < grid.total_cells(); ++c) {
    const double r = std::sqrt(r2_to_source(grid, c, est.source));
    if (r < r_min || r > r_max) continue;
    double sum = 0;
    for (int k = 1; k <= grid.steps(); ++k) sum += est.gamma.at(c, k) * dt;
    const double tc = tail(res.alpha_central, r);
    const double t1 = tail(res.fit.alpha1, r), t2 = tail(res.fit.alpha2, r);
    const double lo = std::min(t1, t2) / C, hi = std::max(t1, t2) * C;
    const double G = sum + tc;
    res.radius.push_back(r);
    res.G.push_back(G);
    res.comparator.push_back(1.0 / (4 * M_PI * r));
    res.tail_fraction = std::max(res.tail_fraction, tc / G);
    res.tail_bound_fraction = std::max(res.tail_bound_fraction, C * t2 / G);
    res.bracket_halfwidth = std::max(res.bracket_halfwidth, 0.5 * (hi - lo) / G);
  }
  if (res.G.empty())
    throw validation_error("elliptic green: annulus contains no cell centers");

  std::vector<double> ratio(res.G.size());
  for (std::size_t i = 0; i < res.G.size(); ++i) ratio[i] = res.G[i] / res.comparator[i];
  std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
  res.K_fit = ratio[ratio.size() / 2];
  for (std::size_t i = 0; i < res.G.size(); ++i)
    res.max_rel_deviation =
        std::max(res.max_rel_deviation,
                 std::abs(res.G[i] - res.K_fit * res.comparator[i]) / res.G[i]);
  return res;
}

}  // namespace parlab
