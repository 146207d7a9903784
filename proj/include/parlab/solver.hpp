#pragma once

#include <functional>

#include "parlab/field.hpp"
#include "parlab/grid.hpp"
#include "parlab/structure.hpp"

namespace parlab {

class solver_error : public std::runtime_error {
public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

enum class BoundaryKind { dirichlet, no_flux };

/// One initial/boundary-value problem on a grid. Linear problems carry the
/// coefficient set; quasilinear problems carry structure functions and are
/// advanced by Picard iteration. Null callbacks mean identically zero data.
struct ProblemSpec {
  enum class Kind { linear, quasilinear };
  Kind kind = Kind::linear;
  LinearCoefficients linear;
  StructureFunctions quasi;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  std::function<double(const SpacePoint&, double)> boundary_value;
  std::function<double(const SpacePoint&)> initial;

  uint64_t hash(const SpaceTimeGrid& grid) const;
};

struct SolverConfig {
  /// theta-scheme weight on the new level; 1 = implicit Euler, 0.5 =
  /// trapezoidal. Restricted to [1/2, 1].
  double time_weight = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  double picard_damping = 0.5;

  uint64_t hash() const;
};

/// Cell-centered finite-volume theta-scheme with harmonic-mean face
/// diffusivities. Dirichlet data enters through ghost values mirrored about
/// the face; no_flux faces carry zero total flux.
SolutionField solve(const SpaceTimeGrid& grid, const ProblemSpec& prob,
                    const SolverConfig& cfg = {});

/// Smooth compactly supported product bump (1-s^2)^3 in each space direction
/// and in time, for weak-form residual checks.
struct TestBump {
  SpacePoint center;
  double t_center = 0;
  double radius = 0;    // spatial half-support, same in every axis
  double t_radius = 0;  // temporal half-support

  double value(const SpacePoint& x, double t, int dim) const;
  double time_derivative(const SpacePoint& x, double t, int dim) const;
  void gradient(const SpacePoint& x, double t, int dim, double* out) const;
  /// Support must clear the lateral boundary and both time faces by at least
  /// one cell. Throws validation_error otherwise.
  void check_support(const SpaceTimeGrid& grid) const;
};

/// |integral of -u phi_t + grad(phi).A(x,t,u,grad u) - phi B| over Q,
/// normalized by sup|u| times the integral of |phi_t| + |grad phi| + |phi|.
/// Midpoint rule in time on half levels, cell centers in space.
double weak_residual(const SolutionField& u, const ProblemSpec& prob, const TestBump& phi);

/// max_k | integral of u(.,t_k) - integral of u(.,0) |.
double mass_drift(const SolutionField& u);

/// A(x,t,u,p) and B(x,t,u,p) of a problem evaluated at one cell and slab.
void evaluate_fluxes(const ProblemSpec& prob, const SpaceTimeGrid& grid, long cell, int slab,
                     double t, double u, const double* p, double* A_out, double* B_out);

}  // namespace parlab
