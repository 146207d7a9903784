#pragma once

#include <string>
#include <vector>

#include "parlab/certify.hpp"
#include "parlab/kernel.hpp"

namespace parlab {

/// Non-negative Borel measure on the truncated box: point atoms, an
/// optional density on the spatial grid, and an optional closed-form tail
/// tag for growth bookkeeping (no finite grid can witness divergence).
struct BorelMeasure {
  struct Atom {
    SpacePoint location;
    double mass = 0;
  };
  std::vector<Atom> atoms;
  CoefficientField density;  // empty = absent

  enum class GrowthFamily { none, gaussian_growth, super_gaussian };
  GrowthFamily growth_family = GrowthFamily::none;
  double growth_rate = 0;  // gamma of e^{gamma |x|^2} for gaussian_growth

  void validate() const;  // masses > 0, density >= 0, something present
  uint64_t hash() const;
};

/// Growth condition: int e^{-sigma |x|^2} rho(dx) < infinity for some
/// sigma > 0. Atoms and grid densities have compact support, so every
/// sigma works; gaussian_growth(gamma) needs sigma > gamma; super-Gaussian
/// tails admit no sigma (failure result, not an error).
struct GrowthCheck {
  bool pass = false;
  double sigma = 0;  // smallest workable rate (0 means "any sigma > 0")
  std::string note;
};
GrowthCheck check_growth(const BorelMeasure& m);

/// Continuous test function with its decay certificate
/// |psi(x)| <= K e^{-delta |x|^2}; the certificate is validated against the
/// sampled values on the grid.
struct TraceTestFunction {
  std::function<double(const SpacePoint&)> psi;
  double K = 1;
  double delta = 1;
};

/// Superpose fundamental-solution surrogates against the measure:
/// u(x,t) = sum of mass_i Gamma(x,t; xi_i, 0) + evolution of the density
/// (exactly the cell quadrature of the representation integral, by
/// linearity of the scheme). Atoms snap to cell centers with their mass
/// preserved. When `kernels` is supplied each atom must find an estimate
/// whose source cell matches its snapped location; otherwise the kernels
/// are computed here. The result carries the measure hash in config_hash.
SolutionField represent(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                        const BorelMeasure& m, const SolverConfig& cfg = {},
                        const std::vector<KernelEstimate>* kernels = nullptr);

/// Trace functional int u(x,t) psi(x) dx on the dyadic ladder
/// t_j = t0_steps*dt / 2^j, j = 0..4, extrapolated to t = 0 by a two-stage
/// Richardson scheme (eliminating the t and t^2 terms). t0_steps must be a
/// positive multiple of 16 so every rung lands on a grid level.
struct TraceValue {
  double value = 0;   // extrapolated limit
  double error = 0;   // extrapolation error estimate
  std::vector<double> ladder;
};
std::vector<TraceValue> initial_trace(const SolutionField& u,
                                      const std::vector<TraceTestFunction>& psis,
                                      int t0_steps = 16);

/// Atom recovery from the initial trace: evaluate the trace against shifted
/// bumps on the cell-center lattice, take the `count` strongest separated
/// peaks as locations, then least-squares the masses from the sampled
/// trace vector.
struct RecoveredAtom {
  SpacePoint location;
  double mass = 0;
};
std::vector<RecoveredAtom> recover_atoms(const SolutionField& u, int count,
                                         double bump_radius = 0, int t0_steps = 16);

/// Round trip of the representation theorem: synthesize u from the
/// measure, recover the per-psi traces, and compare against the direct
/// quadrature of int psi d rho. Each row must match within
/// max(extrapolation error, 2% of the expected value); the represented
/// field must also behave as a weak solution (worst normalized residual
/// over random interior bumps recorded and required below 5e-2).
Certificate trace_roundtrip(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                            const BorelMeasure& m,
                            const std::vector<TraceTestFunction>& psis,
                            const SolverConfig& cfg = {});

}  // namespace parlab
