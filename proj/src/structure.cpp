#include "parlab/structure.hpp"

#include <Eigen/Dense>
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

double frac_term(double n, double p, double q) {
  double s = 0;
  if (std::isfinite(p)) s += n / (2 * p);
  if (std::isfinite(q)) s += 1 / q;
  return s;
}

}  // namespace

ExponentCheck check_exponent_pair(const ExponentPair& pair, int n) {
  ExponentCheck r;
  const double s = frac_term(n, pair.p, pair.q);
  if (pair.kind == ExponentPair::Kind::first_order) {
    r.margin = 0.5 - s;
    r.pass = (pair.p > 2) && (s < 0.5);
  } else {
    r.margin = 1.0 - s;
    r.pass = (pair.p > 1) && (s < 1.0);
  }
  return r;
}

double compute_theta(const std::vector<std::pair<std::string, ExponentPair>>& pairs, int n) {
  double theta = 0.99;
  for (const auto& [name, pair] : pairs) {
    const auto chk = check_exponent_pair(pair, n);
    if (!chk.pass)
      throw structure_error("coefficient '" + name + "' violates its integrability condition");
    const double s = frac_term(n, pair.p, pair.q);
    double t1, t2;
    if (pair.kind == ExponentPair::Kind::first_order) {
      t1 = std::isfinite(pair.p) ? 1.0 - 2.0 / pair.p : 1.0;
      t2 = 1.0 - 2.0 * s;
    } else {
      t1 = std::isfinite(pair.p) ? 1.0 - 1.0 / pair.p : 1.0;
      t2 = 1.0 - s;
    }
    theta = std::min(theta, std::min(t1, t2));
  }
  if (theta <= 0)
    throw structure_error("theta must be positive: an exponent pair sits on the boundary");
  return theta;
}

void StructureBounds::validate() const {
  if (a <= 0 || a_bar <= 0) throw structure_error("structure bounds: a and a_bar must be positive");
  if (theta <= 0 || theta >= 1) throw structure_error("structure bounds: theta must lie in (0,1)");
  const std::array<std::pair<const char*, const NormEntry*>, 7> entries{
      {{"b", &b}, {"c", &c}, {"d", &d}, {"e", &e}, {"f", &f}, {"g", &g}, {"h", &h}}};
  for (const auto& [name, entry] : entries) {
    const double s = frac_term(n, entry->pair.p, entry->pair.q);
    const bool first = entry->pair.kind == ExponentPair::Kind::first_order;
    const double pmin = first ? 2.0 / (1 - theta) : 1.0 / (1 - theta);
    const double smax = first ? (1 - theta) / 2 : (1 - theta);
    if (std::isfinite(entry->pair.p) && entry->pair.p < pmin - 1e-12)
      throw structure_error(std::string("structure bounds: exponent p of '") + name +
                            "' too small for theta");
    if (s > smax + 1e-12)
      throw structure_error(std::string("structure bounds: exponent pair of '") + name +
                            "' too large for theta");
  }
}

double StructureBounds::k_max_principle(double M) const {
  return (b.norm + d.norm) * std::abs(M) + (f.norm + g.norm);
}

double StructureBounds::k_local() const { return f.norm + g.norm + h.norm; }

namespace {

// Iterated L^{p,q} quadrature shared by the field and region variants.
// `spatial` yields pairs (value, weight) for one time sample.
template <typename SpatialNorm>
double iterated_norm(int nsteps, double dt, double p, double q, SpatialNorm&& spatial) {
  const bool pinf = !std::isfinite(p);
  const bool qinf = !std::isfinite(q);
  double acc = 0, sup = 0;
  bool any = false;
  for (int k = 1; k <= nsteps; ++k) {
    double sp_acc = 0, sp_sup = 0;
    bool sp_any = false;
    spatial(k, [&](double v, double w) {
      sp_any = true;
      const double av = std::abs(v);
      if (pinf)
        sp_sup = std::max(sp_sup, av);
      else
        sp_acc += std::pow(av, p) * w;
    });
    if (!sp_any) continue;
    any = true;
    const double lp = pinf ? sp_sup : std::pow(sp_acc, 1.0 / p);
    if (qinf)
      sup = std::max(sup, lp);
    else
      acc += std::pow(lp, q) * dt;
  }
  if (!any) return 0;
  return qinf ? sup : std::pow(acc, 1.0 / q);
}

}  // namespace

double bochner_norm(const CoefficientField& w, double p, double q) {
  if (p < 1 || q < 1) throw validation_error("bochner_norm: exponents must be >= 1");
  const auto& grid = w.grid();
  const double vol = grid.cell_volume();
  return iterated_norm(grid.steps(), grid.dt(), p, q, [&](int step, auto&& emit) {
    const int slab = w.time_dependent() ? step - 1 : 0;
    for (long c = 0; c < grid.total_cells(); ++c) emit(w.at(c, slab), vol);
  });
}

double bochner_norm(const SolutionField& u, double p, double q, const CellSet& region) {
  if (p < 1 || q < 1) throw validation_error("bochner_norm: exponents must be >= 1");
  const auto& grid = u.grid();
  const double vol = grid.cell_volume();
  return iterated_norm(grid.steps(), grid.dt(), p, q, [&](int step, auto&& emit) {
    for (long c = 0; c < grid.total_cells(); ++c)
      if (region.contains(c, step)) emit(u.at(c, step), vol);
  });
}

namespace {

template <typename Sample>
double sup_norm_over_S_impl(const SpaceTimeGrid& grid, double p, double q, Sample&& sample) {
  const double sigma = std::min(1.0, std::sqrt(grid.T()));
  double best = 0;
  bool found = false;
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    if (t - sigma * sigma < -1e-12 || t > grid.T() + 1e-12) continue;
    for (long c = 0; c < grid.total_cells(); ++c) {
      Cylinder cyl{{grid.cell_center(c).x, t}, sigma, CylinderKind::standard};
      bool fits = true;
      for (int a = 0; a < grid.dim(); ++a) {
        if (cyl.center.x[a] - sigma / 2 < grid.lo(a) - 1e-12 ||
            cyl.center.x[a] + sigma / 2 > grid.hi(a) + 1e-12)
          fits = false;
      }
      if (!fits) continue;
      found = true;
      best = std::max(best, sample(cyl));
    }
  }
  if (!found)
    throw validation_error("sup_norm_over_S: no cylinder Q(sigma) fits inside the box");
  return best;
}

}  // namespace

double sup_norm_over_S(const CoefficientField& w, double p, double q) {
  const auto& grid = w.grid();
  const double vol = grid.cell_volume();
  return sup_norm_over_S_impl(grid, p, q, [&](const Cylinder& cyl) {
    const auto region = materialize(cyl, grid);
    return iterated_norm(grid.steps(), grid.dt(), p, q, [&](int step, auto&& emit) {
      const int slab = w.time_dependent() ? step - 1 : 0;
      for (long c = 0; c < grid.total_cells(); ++c)
        if (region.contains(c, step)) emit(w.at(c, slab), vol);
    });
  });
}

double sup_norm_over_S(const SolutionField& w, double p, double q) {
  const auto& grid = w.grid();
  return sup_norm_over_S_impl(grid, p, q, [&](const Cylinder& cyl) {
    return bochner_norm(w, p, q, materialize(cyl, grid));
  });
}

bool LinearCoefficients::time_dependent() const {
  auto td = [](const CoefficientField& f) { return !f.empty() && f.time_dependent(); };
  for (const auto& f : diag)
    if (td(f)) return true;
  for (const auto& od : offdiag)
    if (td(od.field)) return true;
  for (const auto& f : drift_div)
    if (td(f)) return true;
  for (const auto& f : drift_adv)
    if (td(f)) return true;
  for (const auto& f : flux_source)
    if (td(f)) return true;
  return td(reaction) || td(source);
}

bool LinearCoefficients::homogeneous() const {
  auto zero = [](const CoefficientField& f) {
    return f.empty() || (f.min_value() == 0 && f.max_value() == 0);
  };
  for (const auto& f : flux_source)
    if (!zero(f)) return false;
  return zero(source);
}

bool LinearCoefficients::conservation_form() const {
  auto zero = [](const CoefficientField& f) {
    return f.empty() || (f.min_value() == 0 && f.max_value() == 0);
  };
  if (!homogeneous()) return false;
  for (const auto& f : drift_div)
    if (!zero(f)) return false;
  for (const auto& f : drift_adv)
    if (!zero(f)) return false;
  return zero(reaction);
}

uint64_t LinearCoefficients::hash() const {
  uint64_t h = fnv1a(&nu, sizeof nu);
  auto mix = [&h](const CoefficientField& f) {
    if (!f.empty()) {
      const uint64_t fh = f.hash();
      h = fnv1a(&fh, sizeof fh, h);
    } else {
      h = fnv1a("0", 1, h);
    }
  };
  for (const auto& f : diag) mix(f);
  for (const auto& od : offdiag) mix(od.field);
  for (const auto& f : drift_div) mix(f);
  for (const auto& f : drift_adv) mix(f);
  mix(reaction);
  for (const auto& f : flux_source) mix(f);
  mix(source);
  return h;
}

LinearCoefficients LinearCoefficients::isotropic(const SpaceTimeGrid& grid,
                                                 const CoefficientField& a) {
  LinearCoefficients lc;
  for (int ax = 0; ax < grid.dim(); ++ax) lc.diag[ax] = a;
  lc.nu = a.min_value();
  return lc;
}

LinearCoefficients LinearCoefficients::identity(const SpaceTimeGrid& grid) {
  return isotropic(grid, CoefficientField::constant(grid, 1.0, "a"));
}

double ellipticity_check(const LinearCoefficients& lc, int dim) {
  double nu_emp = std::numeric_limits<double>::infinity();
  const auto& grid = lc.diag[0].grid();
  int nslabs = 1;
  for (int a = 0; a < dim; ++a)
    if (lc.diag[a].time_dependent()) nslabs = grid.steps();
  for (const auto& od : lc.offdiag)
    if (od.field.time_dependent()) nslabs = grid.steps();
  for (int k = 0; k < nslabs; ++k) {
    for (long c = 0; c < grid.total_cells(); ++c) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
      for (int a = 0; a < dim; ++a)
        A(a, a) = lc.diag[a].at(c, lc.diag[a].time_dependent() ? k : 0);
      for (const auto& od : lc.offdiag) {
        const double v = od.field.at(c, od.field.time_dependent() ? k : 0);
        A(od.row, od.col) += v;
      }
      const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      nu_emp = std::min(nu_emp, es.eigenvalues().minCoeff());
    }
  }
  if (nu_emp <= 0) throw structure_error("principal tensor is not uniformly parabolic");
  return nu_emp;
}

namespace {

double field_at(const CoefficientField& f, const SpaceTimeGrid& grid, const SpacePoint& x,
                double t) {
  if (f.empty()) return 0;
  const long c = grid.nearest_cell(x);
  int slab = 0;
  if (f.time_dependent()) {
    slab = std::clamp(int(std::ceil(t / grid.dt())) - 1, 0, grid.steps() - 1);
  }
  return f.at(c, slab);
}

double vec_norm(const double* v, int dim) {
  double s = 0;
  for (int a = 0; a < dim; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}

}  // namespace

StructureReport verify_structure(const StructureFunctions& sf,
                                 const std::vector<StructureSample>& samples) {
  StructureReport report;
  const auto& bounds = sf.bounds;
  const int dim = bounds.n;
  const SpaceTimeGrid* grid = sf.b.empty() ? (sf.c.empty() ? nullptr : &sf.c.grid()) : &sf.b.grid();
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    std::array<double, 3> A{0, 0, 0};
    sf.flux(s.x, s.t, s.u, s.p.data(), A.data());
    const double B = sf.lower(s.x, s.t, s.u, s.p.data());
    auto coeff = [&](const CoefficientField& f) {
      return f.empty() ? 0.0 : field_at(f, f.grid(), s.x, s.t);
    };
    (void)grid;
    const double bv = coeff(sf.b), cv = coeff(sf.c), dv = coeff(sf.d), ev = coeff(sf.e),
                 fv = coeff(sf.f), gv = coeff(sf.g), hv = coeff(sf.h);
    double pA = 0, p2 = 0;
    for (int a = 0; a < dim; ++a) {
      pA += s.p[a] * A[a];
      p2 += s.p[a] * s.p[a];
    }
    const std::array<double, 3> slacks{
        pA - (bounds.a * p2 - bv * bv * s.u * s.u - fv * fv),
        (cv * vec_norm(s.p.data(), dim) + dv * std::abs(s.u) + gv) - std::abs(B),
        (bounds.a_bar * vec_norm(s.p.data(), dim) + ev * std::abs(s.u) + hv) -
            vec_norm(A.data(), dim)};
    ++report.samples_checked;
    for (int i = 0; i < 3; ++i) {
      report.worst_slack = std::min(report.worst_slack, slacks[i]);
      if (slacks[i] < -1e-12) report.violations.push_back({s, i, slacks[i]});
    }
  }
  return report;
}

StructureFunctions structure_from_linear(const LinearCoefficients& lc,
                                         const SpaceTimeGrid& grid) {
  StructureFunctions sf;
  const int dim = grid.dim();
  const double nu = lc.nu;
  const double sqrt_nu = std::sqrt(nu);

  sf.flux = [lc, &grid, dim](const SpacePoint& x, double t, double u, const double* p,
                             double* out) {
    for (int i = 0; i < dim; ++i) {
      double v = field_at(lc.diag[i], grid, x, t) * p[i];
      v += field_at(lc.drift_div[i], grid, x, t) * u;
      v += field_at(lc.flux_source[i], grid, x, t);
      out[i] = v;
    }
    for (const auto& od : lc.offdiag) out[od.row] += field_at(od.field, grid, x, t) * p[od.col];
  };
  sf.lower = [lc, &grid, dim](const SpacePoint& x, double t, double u, const double* p) {
    double v = field_at(lc.reaction, grid, x, t) * u + field_at(lc.source, grid, x, t);
    for (int j = 0; j < dim; ++j) v += field_at(lc.drift_adv[j], grid, x, t) * p[j];
    return v;
  };

  auto sup_vec = [&](const std::array<CoefficientField, 3>& fs) {
    double s2 = 0;
    for (int a = 0; a < dim; ++a)
      if (!fs[a].empty()) {
        const double m = std::max(std::abs(fs[a].min_value()), std::abs(fs[a].max_value()));
        s2 += m * m;
      }
    return std::sqrt(s2);
  };
  auto sup_abs = [](const CoefficientField& f) {
    return f.empty() ? 0.0 : std::max(std::abs(f.min_value()), std::abs(f.max_value()));
  };

  // Cauchy-Schwarz split: p.(Ap + A_j u + F) >= (nu/2)|p|^2 - (|A_j|^2/nu)u^2 - |F|^2/nu.
  sf.bounds.a = nu / 2;
  double fro = 0;
  for (int a = 0; a < dim; ++a) {
    const double m = sup_abs(lc.diag[a]);
    fro += m * m;
  }
  for (const auto& od : lc.offdiag) {
    const double m = sup_abs(od.field);
    fro += m * m;
  }
  sf.bounds.a_bar = std::sqrt(fro);
  sf.bounds.n = dim;
  sf.bounds.T = grid.T();
  sf.bounds.omega_volume = grid.box_volume();
  sf.bounds.b.norm = sup_vec(lc.drift_div) / sqrt_nu;
  sf.bounds.f.norm = sup_vec(lc.flux_source) / sqrt_nu;
  sf.bounds.e.norm = sup_vec(lc.drift_div);
  sf.bounds.h.norm = sup_vec(lc.flux_source);
  sf.bounds.c.norm = sup_vec(lc.drift_adv);
  sf.bounds.d.norm = sup_abs(lc.reaction);
  sf.bounds.g.norm = sup_abs(lc.source);
  sf.bounds.d.pair.kind = ExponentPair::Kind::zero_order;
  sf.bounds.g.pair.kind = ExponentPair::Kind::zero_order;
  sf.bounds.theta = 0.99;

  auto make_field = [&](double (*)(double), const std::array<CoefficientField, 3>& fs,
                        double scale, const char* name) {
    if (sup_vec(fs) == 0) return CoefficientField();
    return CoefficientField::from_function(
        grid,
        [&fs, &grid, dim, scale](const SpacePoint& x, double t) {
          double s2 = 0;
          for (int a = 0; a < dim; ++a) {
            const double v = field_at(fs[a], grid, x, t);
            s2 += v * v;
          }
          return std::sqrt(s2) * scale;
        },
        name, lc.time_dependent());
  };
  sf.b = make_field(nullptr, lc.drift_div, 1 / sqrt_nu, "b");
  sf.f = make_field(nullptr, lc.flux_source, 1 / sqrt_nu, "f");
  sf.e = make_field(nullptr, lc.drift_div, 1.0, "e");
  sf.h = make_field(nullptr, lc.flux_source, 1.0, "h");
  sf.c = make_field(nullptr, lc.drift_adv, 1.0, "c");
  if (!lc.reaction.empty())
    sf.d = CoefficientField::from_function(
        grid,
        [&lc, &grid](const SpacePoint& x, double t) {
          return std::abs(field_at(lc.reaction, grid, x, t));
        },
        "d", lc.reaction.time_dependent());
  if (!lc.source.empty())
    sf.g = CoefficientField::from_function(
        grid,
        [&lc, &grid](const SpacePoint& x, double t) {
          return std::abs(field_at(lc.source, grid, x, t));
        },
        "g", lc.source.time_dependent());
  sf.tag = lc.hash();
  return sf;
}

StructureFunctions bounded_nonlinearity(const SpaceTimeGrid& grid,
                                        const CoefficientField& c_field, double p_cap) {
  StructureFunctions sf;
  const int dim = grid.dim();
  sf.flux = [dim](const SpacePoint&, double, double u, const double* p, double* out) {
    const double s = 1.0 + 0.5 * std::sin(u);
    for (int i = 0; i < dim; ++i) out[i] = s * p[i];
  };
  sf.lower = [c_field, &grid, dim, p_cap](const SpacePoint& x, double t, double,
                                          const double* p) {
    return field_at(c_field, grid, x, t) * std::min(vec_norm(p, dim), p_cap);
  };
  sf.bounds.a = 0.5;
  sf.bounds.a_bar = 1.5;
  sf.bounds.n = dim;
  sf.bounds.T = grid.T();
  sf.bounds.omega_volume = grid.box_volume();
  sf.bounds.c.norm = bochner_norm(c_field, kInfExponent, kInfExponent);
  sf.bounds.theta = 0.99;
  sf.c = c_field;
  sf.tag = fnv1a("bounded_nonlinearity", 20, c_field.hash());
  return sf;
}

}  // namespace parlab
