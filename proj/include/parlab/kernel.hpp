#pragma once

#include <vector>

#include "parlab/solver.hpp"

namespace parlab {

/// Gaussian heat kernel (4 pi alpha t)^{-n/2} exp(-r^2 / (4 alpha t)).
double heat_kernel(int n, double alpha, double r2, double t);

/// Fundamental-solution surrogate: evolution of a discrete delta (1/cell
/// volume at the source cell) on a no-flux box standing in for the whole
/// space. A step is "effective" while the mass fraction in boundary
/// adjacent cells stays below the tail tolerance; once reflections carry
/// weight the box no longer represents free space.
struct KernelEstimate {
  SolutionField gamma;
  long source_cell = 0;
  SpacePoint source;
  std::vector<uint8_t> step_effective;  // one flag per level 0..nt
  double boundary_mass = 0;             // boundary mass fraction at the final level
  bool effective_box = true;            // final level still effective
  double tail_tol = 1e-8;
};

KernelEstimate estimate_kernel(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                               const SpacePoint& source, const SolverConfig& cfg = {},
                               double tail_tol = 1e-8);

/// Sample selection for the Gaussian envelope fit.
struct FitRegion {
  int exclude_steps = 10;      // drop the first levels (delta transient)
  double window_sigmas = 4.0;  // keep |x - xi| <= w * sqrt(alpha_ref t)
  int bins = 24;               // bins in z = r^2/(4t) for the envelopes
  int alpha_scan = 2001;       // candidate diffusivities, log-spaced
  double alpha_lo = 1e-2, alpha_hi = 1e2;
};

/// Two-sided Gaussian envelope: C^{-1} g_{alpha1} <= Gamma <= C g_{alpha2}
/// on the fit region. alpha2 is a least-squares fit of log Gamma against
/// r^2/(4t) through the binned upper envelope, alpha1 likewise through the
/// lower; C is then the smallest constant making both inequalities hold on
/// every sample, so the fit has no violation by construction.
struct GaussianFit {
  double alpha1 = 0, alpha2 = 0;
  double C = 1;
  double C_lower = 1, C_upper = 1;
  double alpha_ref = 0;  // second-moment pilot estimate
  long samples = 0;
  int steps_used = 0;
};

GaussianFit fit_gaussian_bounds(const KernelEstimate& est, const FitRegion& region = {});

/// Reproduction identity Gamma(x,t;xi,0) = integral of
/// Gamma(x,t;zeta,s) Gamma(zeta,s;xi,0) over zeta, evaluated by restarting
/// the evolution from the kernel slice at `mid_step`: by linearity the
/// restart equals the cell quadrature of the zeta family. Returns the worst
/// relative mismatch over probe cells carrying at least 1% of the peak.
/// Requires time-independent coefficients.
double check_chapman_kolmogorov(const KernelEstimate& est, const ProblemSpec& prob,
                                const SolverConfig& cfg, int mid_step);

/// Green function of the elliptic operator by time integration of the
/// kernel: G = sum of Gamma dt over the horizon plus an analytic Gaussian
/// tail at the central diffusivity sqrt(alpha1 alpha2). Samples live on the
/// annulus r_min <= |x - xi| <= r_max. n = 3 only.
struct GreenResult {
  std::vector<double> radius;      // per annulus cell
  std::vector<double> G;           // estimated Green function
  std::vector<double> comparator;  // Newtonian 1/(4 pi r)
  double K_fit = 1;                // median of G / comparator (1/alpha for a = alpha)
  double max_rel_deviation = 0;    // worst |G - K_fit * comparator| / G
  double tail_fraction = 0;        // worst central tail / G
  double tail_bound_fraction = 0;  // worst C * tail(alpha2) / G
  double bracket_halfwidth = 0;    // worst half-width of [tail/C, C*tail] / G
  double alpha_central = 0;
  GaussianFit fit;
};

GreenResult elliptic_green(const KernelEstimate& est, double r_min, double r_max,
                           const FitRegion& region = {});

}  // namespace parlab
