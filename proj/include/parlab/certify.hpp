#pragma once

#include <map>
#include <string>
#include <vector>

#include "parlab/solver.hpp"
#include "parlab/structure.hpp"

namespace parlab {

/// Outcome of one theorem certifier: the fitted constants, the worst-case
/// witnesses, and provenance. `pass` is true iff the theorem's inequality
/// holds at every checked sample with the reported constants; `applicable`
/// is false when the theorem's hypothesis itself fails (e.g. zero mass in
/// the limit-behavior statement), in which case `pass` is meaningless.
struct Certificate {
  std::string theorem;
  bool pass = false;
  bool applicable = true;
  std::map<std::string, double> constants;

  struct Witness {
    std::string role;
    SpaceTimePoint where;
    double value = 0;
  };
  std::vector<Witness> witnesses;

  uint64_t problem_hash = 0;
  uint64_t grid_hash = 0;
  std::string note;
};

/// Maximum principle: if u <= M on the parabolic boundary then
/// u <= M + C k in Q with k = (||b||+||d||)|M| + ||f|| + ||g||.
/// Throws validation_error when the boundary precondition fails. When
/// `minimum` is set the mirrored statement (u >= M on the boundary implies
/// u >= M - C k) is certified instead. With k = 0 the certificate passes
/// iff sup u <= M + tol; otherwise C_emp = max(0, sup u - M)/k is reported
/// and the certificate always passes (the theorem asserts finiteness).
Certificate certify_max_principle(const SolutionField& u, double M,
                                  const StructureBounds& bounds, bool minimum = false,
                                  double tol = 1e-10);

/// Local boundedness: sup over Q(rho) of |u| against
/// rho^{-(n+2)/2} ||u||_{2,2,Q(3rho)} + rho^theta k, k = ||f||+||g||+||h||.
/// Requires Q(3 rho) inside Q (containment errors propagate).
Certificate certify_local_bound(const SolutionField& u, const SpaceTimePoint& center,
                                double rho, const StructureBounds& bounds);

/// Harnack inequality: max over the shifted cylinder Q*(rho) of u against
/// C times the min over Q(rho) of (u + rho^theta k). Requires u >= -tol on
/// Q, containment of Q(3 rho), and a positive denominator.
Certificate certify_harnack(const SolutionField& u, const SpaceTimePoint& center,
                            double rho, const StructureBounds& bounds, double k,
                            double tol = 1e-10);

/// Pointwise Harnack: u(y,s) + k <= (u(x,t) + k) exp C(|x-y|^2/(t-s) + t/s)
/// over the supplied ordered pairs; C_emp is the smallest such constant,
/// clamped below at zero.
struct PointPair {
  SpaceTimePoint late;   // (x, t)
  SpaceTimePoint early;  // (y, s), 0 < s < t
};
Certificate certify_pointwise_harnack(const SolutionField& u,
                                      const std::vector<PointPair>& pairs, double k);

/// Hoelder continuity: oscillation of u over shrinking pseudo-distance
/// balls at X. alpha_emp is the log-log least-squares slope over the radius
/// ladder; H_emp the smallest constant closing
/// |u(Y) - u(X)| <= H (L + k)(|Y-X|/R)^alpha over the sampled pairs, with
/// L = sup|u| and R the pseudo-distance from X to the boundary capped at 1.
Certificate estimate_hoelder(const SolutionField& u, const SpaceTimePoint& X,
                             const std::vector<double>& radii, double k = 0);

/// Limit behavior on the strip surrogate (balls centered at the box
/// midpoint): M = inf over sampled t of the integral of u over |x|^2 < alpha t,
/// computed with exact 1-D interval overlaps (3^n subcell sampling for
/// n >= 2) and the first `exclude_steps` levels dropped. When M > 0 the
/// lower Gaussian envelope u + k >= C1 t^{-n/2} exp(-C2 |x|^2/t) is fitted:
/// C2 by least squares of log((u+k) t^{n/2}) against |x|^2/t, C1 as the
/// largest constant keeping the bound true at every sample.
Certificate certify_limit_behavior(const SolutionField& u, double alpha, double k,
                                   int exclude_steps = 5);

/// Piecewise-smooth cutoff eta(x,t) with its derivatives, vanishing near
/// the parabolic boundary.
struct CutoffField {
  std::function<double(const SpacePoint&, double)> value;
  std::function<void(const SpacePoint&, double, double*)> gradient;
  std::function<double(const SpacePoint&, double)> time_derivative;
};

/// Product of the (1 - s^2)^3 spatial bump at `center`/`radius` with a
/// smoothstep time ramp rising from 0 at t_on to 1 at t_full.
CutoffField bump_cutoff(const SpacePoint& center, double radius, double t_on,
                        double t_full);

/// Energy inequality for powers of a solution: for each sampled tau,
///   1/(beta+1) int eta^2 {bracket}|_{t=tau} dx
///     + (a beta / 2) iint eta^2 ubar^{beta-1} |grad ubar|^2
///   <= iint FF ubar^{beta+1} + 2/(beta+1) iint eta |eta_t| ubar^{beta+1},
/// integrals over Omega x (0, tau), ubar = max(0,u) + kappa, and
/// FF = F eta^2 + 2 G eta |eta_x| + H |eta_x|^2 with
/// F = beta(b^2 + f^2/kappa^2) + (d + g/kappa) + c^2/a and H = 4 abar^2/a.
/// Two readings of the displayed bracket and of G are computed and
/// reported; the certificate is decided under the reading
/// {ubar^{beta+1} - (beta+1) kappa^beta ubar + beta kappa^{beta+1}} with
/// G = e + h/kappa (the non-negative bracket and the larger cross term).
/// kappa = 0 is allowed only when f, g, h all vanish. Coefficient fields
/// come from `sf`; empty fields are zero.
Certificate check_caccioppoli(const SolutionField& u, const CutoffField& eta,
                              double beta, double kappa, const StructureFunctions& sf,
                              int tau_samples = 20, double tol = 1e-6);

}  // namespace parlab
