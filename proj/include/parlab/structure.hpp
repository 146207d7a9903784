#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "parlab/field.hpp"
#include "parlab/grid.hpp"

namespace parlab {

class structure_error : public std::runtime_error {
public:
  explicit structure_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Integrability exponents of one coefficient. First-order pairs govern
/// b,c,e,f,h (p > 2, n/2p + 1/q < 1/2); zero-order pairs govern d,g
/// (p > 1, n/2p + 1/q < 1).
struct ExponentPair {
  enum class Kind { first_order, zero_order };
  double p = kInfExponent;
  double q = kInfExponent;
  Kind kind = Kind::first_order;
};

struct ExponentCheck {
  bool pass = false;
  double margin = 0;  // 1/2 - (n/2p + 1/q) resp. 1 - (n/2p + 1/q)
};

ExponentCheck check_exponent_pair(const ExponentPair& pair, int n);

/// Largest theta in (0,1) satisfying the relaxed inequalities for every pair
/// simultaneously, capped at 0.99. Throws structure_error (naming the
/// coefficient) when a pair fails its strict inequality.
double compute_theta(const std::vector<std::pair<std::string, ExponentPair>>& pairs, int n);

struct NormEntry {
  double norm = 0;
  ExponentPair pair;
};

/// The quantities a "constant depending on the structure" may use.
struct StructureBounds {
  double a = 1;       // ellipticity in p.A >= a|p|^2 - b^2 u^2 - f^2
  double a_bar = 1;   // gradient growth in |A| <= a_bar|p| + e|u| + h
  NormEntry b, c, d, e, f, g, h;
  double theta = 0.99;
  int n = 1;
  double T = 1;
  double omega_volume = 1;

  void validate() const;
  /// k of the maximum principle: (||b||+||d||)|M| + (||f||+||g||).
  double k_max_principle(double M) const;
  /// k of local boundedness / Harnack / Hoelder: ||f||+||g||+||h||.
  double k_local() const;
};

/// Bochner norm ||w||_{p,q} over all of Q by midpoint-rule quadrature;
/// p or q equal to infinity switch to grid suprema.
double bochner_norm(const CoefficientField& w, double p, double q);

/// Same norm restricted to a cell set (used for ||u||_{2,2,3rho}); solution
/// levels k >= 1 carry weight dt.
double bochner_norm(const SolutionField& u, double p, double q, const CellSet& region);

/// sup of ||w||_{p,q} over the cylinders Q(sigma), sigma = min(1, sqrt(T)),
/// whose centers run over the cell-center lattice and which fit inside the
/// computational box standing in for the strip S.
double sup_norm_over_S(const CoefficientField& w, double p, double q);
double sup_norm_over_S(const SolutionField& w, double p, double q);

/// Coefficients of the linear equation (divergence-form principal part plus
/// lower-order terms). Empty optional fields are identically zero.
struct OffDiagonalEntry {
  int row = 0, col = 0;
  CoefficientField field;
};

struct LinearCoefficients {
  std::array<CoefficientField, 3> diag;  // A_11 .. A_nn, required
  std::vector<OffDiagonalEntry> offdiag;
  std::array<CoefficientField, 3> drift_div;    // A_j (inside the divergence)
  std::array<CoefficientField, 3> drift_adv;    // B_j
  CoefficientField reaction;                    // C
  std::array<CoefficientField, 3> flux_source;  // F_j
  CoefficientField source;                      // G
  double nu = 1;

  bool time_dependent() const;
  bool homogeneous() const;  // F_j = G = 0
  bool conservation_form() const;  // A_j = B_j = C = 0 (and homogeneous)
  uint64_t hash() const;

  static LinearCoefficients isotropic(const SpaceTimeGrid& grid, const CoefficientField& a);
  static LinearCoefficients identity(const SpaceTimeGrid& grid);
};

/// Minimum over sample points of the smallest eigenvalue of the symmetrized
/// principal tensor. Throws structure_error when not uniformly parabolic.
double ellipticity_check(const LinearCoefficients& lc, int dim);

/// Abstract structure functions of the quasilinear equation together with
/// their declared bounds and the coefficient fields entering the structure
/// inequalities.
struct StructureFunctions {
  // flux(x, t, u, p, out): writes the n-vector A(x,t,u,p)
  std::function<void(const SpacePoint&, double, double, const double*, double*)> flux;
  // lower(x, t, u, p): the scalar B(x,t,u,p)
  std::function<double(const SpacePoint&, double, double, const double*)> lower;
  StructureBounds bounds;
  // coefficient fields b..h used when checking the structure inequalities;
  // empty fields are zero
  CoefficientField b, c, d, e, f, g, h;
  uint64_t tag = 0;  // provenance for hashing
};

struct StructureSample {
  SpacePoint x;
  double t = 0, u = 0;
  std::array<double, 3> p{0, 0, 0};
};

struct StructureViolation {
  StructureSample sample;
  int inequality = 0;  // 0: coercivity, 1: |B| growth, 2: |A| growth
  double slack = 0;    // negative = violated
};

struct StructureReport {
  long samples_checked = 0;
  double worst_slack = 0;
  std::vector<StructureViolation> violations;
  bool pass() const { return violations.empty(); }
};

StructureReport verify_structure(const StructureFunctions& sf,
                                 const std::vector<StructureSample>& samples);

/// Wrap linear coefficients as structure functions: A = A_ij p + A_j u + F_j,
/// B = B_j p_j + C u + G, with bounds derived from nu and the coefficient
/// suprema by Cauchy-Schwarz splitting (a = nu/2).
StructureFunctions structure_from_linear(const LinearCoefficients& lc, const SpaceTimeGrid& grid);

/// Built-in bounded-nonlinearity family: A = (1 + sin(u)/2) p,
/// B = c(x,t) * min(|p|, p_cap).
StructureFunctions bounded_nonlinearity(const SpaceTimeGrid& grid, const CoefficientField& c_field,
                                        double p_cap);

}  // namespace parlab
