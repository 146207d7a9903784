#include "parlab/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace parlab {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::array<double, 3> triple(const json& j, const char* what) {
  std::array<double, 3> out{0, 0, 0};
  if (!j.is_array() || j.size() > 3)
    throw validation_error(std::string("config: ") + what +
                           " must be an array of up to three numbers");
  for (std::size_t i = 0; i < j.size(); ++i) out[i] = j[i].get<double>();
  return out;
}

CoefficientField make_family(const SpaceTimeGrid& grid, const json& spec,
                             const std::string& name) {
  const std::string family = spec.value("family", "constant");
  if (family == "constant")
    return CoefficientField::constant(grid, spec.value("value", 1.0), name);
  if (family == "checkerboard")
    return checkerboard_field(grid, spec.at("contrast").get<double>(),
                              spec.at("period").get<double>(), name);
  if (family == "striped")
    return striped_field(grid, spec.at("contrast").get<double>(),
                         spec.at("period").get<double>(), name);
  if (family == "random_piecewise")
    return random_piecewise_field(grid, spec.value("seed", uint64_t(0)),
                                  spec.at("contrast").get<double>(),
                                  spec.at("period").get<double>(), name);
  throw validation_error("config: unknown coefficient family '" + family + "'");
}

std::function<double(const SpacePoint&)> make_initial(const SpaceTimeGrid& grid,
                                                      const json& spec) {
  const std::string type = spec.value("type", "zero");
  if (type == "zero") return nullptr;
  if (type == "constant") {
    const double v = spec.value("value", 0.0);
    return [v](const SpacePoint&) { return v; };
  }
  if (type == "sin_mode") {
    const double lo = grid.lo(0), span = grid.hi(0) - grid.lo(0);
    return [lo, span](const SpacePoint& p) {
      return std::sin(M_PI * (p.x[0] - lo) / span);
    };
  }
  if (type == "bump") {
    const auto center = triple(spec.at("center"), "initial.center");
    const double radius = spec.at("radius").get<double>();
    const double height = spec.value("height", 1.0);
    const int dim = grid.dim();
    return [center, radius, height, dim](const SpacePoint& p) {
      double s2 = 0;
      for (int a = 0; a < dim; ++a) {
        const double d = (p.x[a] - center[a]) / radius;
        s2 += d * d;
      }
      return s2 >= 1 ? 0.0 : height * std::pow(1 - s2, 3);
    };
  }
  throw validation_error("config: unknown initial data type '" + type + "'");
}

std::function<double(const SpacePoint&, double)> make_boundary(const json& spec) {
  const std::string type = spec.value("type", "zero");
  if (type == "zero") return nullptr;
  if (type == "constant") {
    const double v = spec.value("value", 0.0);
    return [v](const SpacePoint&, double) { return v; };
  }
  if (type == "coordinate") {
    const int axis = spec.value("axis", 0);
    return [axis](const SpacePoint& p, double) { return p.x[std::size_t(axis)]; };
  }
  throw validation_error("config: unknown boundary data type '" + type + "'");
}

ExponentPair parse_pair(const json& j) {
  ExponentPair pair;
  auto expo = [](const json& v) {
    if (v.is_string()) {
      if (v.get<std::string>() == "inf") return kInfExponent;
      throw validation_error("config: exponents are numbers or \"inf\"");
    }
    return v.get<double>();
  };
  if (j.contains("p")) pair.p = expo(j.at("p"));
  if (j.contains("q")) pair.q = expo(j.at("q"));
  if (j.value("kind", "first_order") == "zero_order")
    pair.kind = ExponentPair::Kind::zero_order;
  return pair;
}

SpaceTimePoint parse_center(const json& j) {
  SpaceTimePoint c;
  c.x = triple(j.at("x"), "center.x");
  c.t = j.at("t").get<double>();
  return c;
}

}  // namespace

uint64_t ExperimentConfig::hash() const { return fnv1a(raw.dump()); }

ExperimentConfig ExperimentConfig::parse(const json& doc) {
  ExperimentConfig cfg;
  cfg.raw = doc;
  if (doc.value("schema", 1) != 1)
    throw validation_error("config: unsupported schema version");

  const json& g = doc.at("grid");
  cfg.grid = std::make_unique<SpaceTimeGrid>(SpaceTimeGrid::make(
      g.at("dim").get<int>(), triple(g.at("lo"), "grid.lo"),
      triple(g.at("hi"), "grid.hi"), g.at("h").get<double>(),
      g.at("T").get<double>(), g.at("dt").get<double>()));

  const json prob = doc.value("problem", json::object());
  if (prob.value("kind", "linear") == "quasilinear") {
    cfg.problem.kind = ProblemSpec::Kind::quasilinear;
    const json q = prob.value("quasilinear", json::object());
    if (q.value("family", "bounded_nonlinearity") != "bounded_nonlinearity")
      throw validation_error("config: unknown quasilinear family");
    auto c = CoefficientField::constant(*cfg.grid, q.value("c", 0.5), "c");
    cfg.problem.quasi = bounded_nonlinearity(*cfg.grid, c, q.value("p_cap", 5.0));
  } else {
    cfg.problem.linear = LinearCoefficients::isotropic(
        *cfg.grid,
        make_family(*cfg.grid, prob.value("diffusion", json::object()), "a"));
    if (prob.contains("reaction"))
      cfg.problem.linear.reaction =
          CoefficientField::constant(*cfg.grid, prob.at("reaction").get<double>(), "C");
    if (prob.contains("drift")) {
      const auto d = triple(prob.at("drift"), "problem.drift");
      for (int a = 0; a < cfg.grid->dim(); ++a)
        if (d[std::size_t(a)] != 0)
          cfg.problem.linear.drift_adv[std::size_t(a)] = CoefficientField::constant(
              *cfg.grid, d[std::size_t(a)], "B" + std::to_string(a + 1));
    }
    if (prob.contains("source"))
      cfg.problem.linear.source =
          CoefficientField::constant(*cfg.grid, prob.at("source").get<double>(), "G");
  }
  cfg.problem.boundary = prob.value("boundary", "dirichlet") == "no_flux"
                             ? BoundaryKind::no_flux
                             : BoundaryKind::dirichlet;
  cfg.problem.initial = make_initial(*cfg.grid, prob.value("initial", json::object()));
  cfg.problem.boundary_value = make_boundary(prob.value("boundary_value", json::object()));

  cfg.action = doc.at("action").get<std::string>();
  cfg.params = doc.value("params", json::object());
  cfg.seed = doc.value("seed", uint64_t(0));
  if (doc.contains("tolerances"))
    for (const auto& [k, v] : doc.at("tolerances").items())
      if (!(v.get<double>() > 0))
        throw validation_error("config: tolerance '" + k + "' must be positive");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw validation_error("config: cannot open " + path);
  return parse(json::parse(is, nullptr, true));
}

namespace {

struct Ctx {
  const ExperimentConfig& cfg;
  const RunOptions& opt;
  uint64_t seed;
  std::vector<ReportRecord> records;

  ReportRecord base(const std::string& action) const {
    ReportRecord r;
    r.action = action;
    r.config_hash = cfg.hash();
    r.grid_hash = cfg.grid->hash();
    return r;
  }
};

StructureBounds bounds_of(const ExperimentConfig& cfg) {
  if (cfg.problem.kind == ProblemSpec::Kind::quasilinear)
    return cfg.problem.quasi.bounds;
  return structure_from_linear(cfg.problem.linear, *cfg.grid).bounds;
}

double residual_sweep(const SolutionField& u, const ProblemSpec& prob,
                      const SpaceTimeGrid& g, uint64_t seed, int bumps, json& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  double worst = 0;
  json rows = json::array();
  for (int b = 0; b < bumps; ++b) {
    TestBump phi;
    for (int a = 0; a < g.dim(); ++a) {
      const double span = g.hi(a) - g.lo(a);
      phi.center.x[std::size_t(a)] = g.lo(a) + span * (0.35 + 0.3 * un(rng));
      phi.radius = 0.2 * span;
    }
    phi.t_center = g.T() * (0.4 + 0.2 * un(rng));
    phi.t_radius = 0.25 * g.T();
    phi.check_support(g);
    const double r = weak_residual(u, prob, phi);
    rows.push_back(r);
    worst = std::max(worst, r);
  }
  out["residuals"] = rows;
  out["worst_residual"] = worst;
  return worst;
}

void act_validate_structure(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  json& p = r.payload;
  p["pass"] = true;

  if (ctx.cfg.raw.contains("problem") &&
      ctx.cfg.raw["problem"].contains("exponents")) {
    std::vector<std::pair<std::string, ExponentPair>> pairs;
    for (const auto& [name, spec] : ctx.cfg.raw["problem"]["exponents"].items())
      pairs.emplace_back(name, parse_pair(spec));
    json rows = json::object();
    for (const auto& [name, pair] : pairs) {
      auto chk = check_exponent_pair(pair, ctx.cfg.grid->dim());
      rows[name] = {{"pass", chk.pass}, {"margin", chk.margin}};
      if (!chk.pass) {
        p["pass"] = false;
        p["failure"] = "coefficient '" + name +
                       "' violates the admissible exponent range (first-order "
                       "pairs need p > 2 and n/2p + 1/q < 1/2; zero-order "
                       "pairs need p > 1 and n/2p + 1/q < 1)";
      }
    }
    p["exponents"] = rows;
    if (p["pass"].get<bool>()) p["theta"] = compute_theta(pairs, ctx.cfg.grid->dim());
  }

  if (p["pass"].get<bool>()) {
    StructureFunctions sf =
        ctx.cfg.problem.kind == ProblemSpec::Kind::quasilinear
            ? ctx.cfg.problem.quasi
            : structure_from_linear(ctx.cfg.problem.linear, *ctx.cfg.grid);
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    std::vector<StructureSample> samples;
    const int count = ctx.cfg.params.value("samples", 200);
    for (int i = 0; i < count; ++i) {
      StructureSample s;
      for (int a = 0; a < ctx.cfg.grid->dim(); ++a)
        s.x.x[std::size_t(a)] =
            ctx.cfg.grid->lo(a) +
            (ctx.cfg.grid->hi(a) - ctx.cfg.grid->lo(a)) * 0.5 * (un(rng) + 1);
      s.t = ctx.cfg.grid->T() * 0.5 * (un(rng) + 1);
      s.u = 3 * un(rng);
      for (int a = 0; a < ctx.cfg.grid->dim(); ++a) s.p[std::size_t(a)] = 5 * un(rng);
      samples.push_back(s);
    }
    auto report = verify_structure(sf, samples);
    p["structure_samples"] = report.samples_checked;
    p["structure_violations"] = report.violations.size();
    p["worst_slack"] = report.worst_slack;
    if (!report.pass()) p["pass"] = false;
  }
  ctx.records.push_back(std::move(r));
}

void act_solve(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  auto u = solve(*ctx.cfg.grid, ctx.cfg.problem);
  const std::string field_path = ctx.opt.out_dir + "/solution.json";
  write_field(field_path, u, "u");
  r.artifacts.push_back(field_path);
  residual_sweep(u, ctx.cfg.problem, *ctx.cfg.grid, ctx.seed,
                 ctx.cfg.params.value("bumps", 3), r.payload);
  if (ctx.cfg.problem.boundary == BoundaryKind::no_flux)
    r.payload["mass_drift"] = mass_drift(u);
  r.payload["max_abs"] = u.max_abs();
  ctx.records.push_back(std::move(r));
}

SpacePoint source_of(const Ctx& ctx) {
  if (ctx.cfg.params.contains("source"))
    return {triple(ctx.cfg.params.at("source"), "params.source")};
  SpacePoint c;
  for (int a = 0; a < ctx.cfg.grid->dim(); ++a)
    c.x[std::size_t(a)] = 0.5 * (ctx.cfg.grid->lo(a) + ctx.cfg.grid->hi(a));
  return c;
}

KernelEstimate kernel_of(const Ctx& ctx) {
  return estimate_kernel(*ctx.cfg.grid, ctx.cfg.problem, source_of(ctx), {},
                         ctx.cfg.params.value("tail_tol", 1e-8));
}

FitRegion region_of(const Ctx& ctx) {
  FitRegion region;
  region.exclude_steps = ctx.cfg.params.value("exclude_steps", region.exclude_steps);
  region.window_sigmas = ctx.cfg.params.value("window_sigmas", region.window_sigmas);
  region.bins = ctx.cfg.params.value("bins", region.bins);
  return region;
}

void act_kernel(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  auto est = kernel_of(ctx);
  const std::string field_path = ctx.opt.out_dir + "/kernel.json";
  write_field(field_path, est.gamma, "gamma");
  r.artifacts.push_back(field_path);
  r.payload["source_cell"] = est.source_cell;
  r.payload["effective_box"] = est.effective_box;
  r.payload["boundary_mass"] = est.boundary_mass;
  r.payload["mass_drift"] = mass_drift(est.gamma);
  ctx.records.push_back(std::move(r));
}

void act_gaussian_fit(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  auto est = kernel_of(ctx);
  r.payload = to_json(fit_gaussian_bounds(est, region_of(ctx)));
  r.payload["effective_box"] = est.effective_box;
  ctx.records.push_back(std::move(r));
}

void act_ck_check(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  auto est = kernel_of(ctx);
  const int mid = ctx.cfg.params.value("mid_step", ctx.cfg.grid->steps() / 2);
  r.payload["mid_step"] = mid;
  r.payload["relative_residual"] =
      check_chapman_kolmogorov(est, ctx.cfg.problem, {}, mid);
  ctx.records.push_back(std::move(r));
}

void act_green(Ctx& ctx) {
  ReportRecord r = ctx.base(ctx.cfg.action);
  auto est = kernel_of(ctx);
  auto green = elliptic_green(est, ctx.cfg.params.at("r_min").get<double>(),
                              ctx.cfg.params.at("r_max").get<double>(), region_of(ctx));
  r.payload = to_json(green);
  ctx.records.push_back(std::move(r));
}

SolutionField field_for_certifier(const Ctx& ctx) {
  if (ctx.cfg.params.contains("source")) return kernel_of(ctx).gamma;
  return solve(*ctx.cfg.grid, ctx.cfg.problem);
}

void act_certify(Ctx& ctx, const std::string& theorem) {
  const json& p = ctx.cfg.params;
  auto bounds = bounds_of(ctx.cfg);

  if (theorem == "harnack" && p.contains("contrasts")) {
    // family sweep: one certificate per checkerboard contrast plus a trend row
    json trend = json::array();
    bool all_pass = true, monotone = true;
    double prev = 0;
    for (const auto& cj : p.at("contrasts")) {
      const double contrast = cj.get<double>();
      ProblemSpec prob = ctx.cfg.problem;
      prob.linear = LinearCoefficients::isotropic(
          *ctx.cfg.grid, checkerboard_field(*ctx.cfg.grid, contrast,
                                            p.at("period").get<double>(), "a"));
      auto est = estimate_kernel(*ctx.cfg.grid, prob, source_of(ctx));
      auto cert = certify_harnack(est.gamma, parse_center(p.at("center")),
                                  p.at("rho").get<double>(), bounds, p.value("k", 0.0));
      ReportRecord r = ctx.base("certify.harnack");
      r.payload = to_json(cert);
      r.payload["contrast"] = contrast;
      ctx.records.push_back(std::move(r));
      trend.push_back({{"contrast", contrast}, {"C_emp", cert.constants.at("C_emp")}});
      if (!cert.pass) all_pass = false;
      if (cert.constants.at("C_emp") + 1e-9 < prev) monotone = false;
      prev = cert.constants.at("C_emp");
    }
    ReportRecord r = ctx.base("certify.harnack.trend");
    r.payload["rows"] = trend;
    r.payload["non_decreasing"] = monotone;
    r.payload["pass"] = all_pass;
    ctx.records.push_back(std::move(r));
    return;
  }

  Certificate cert;
  if (theorem == "max_principle") {
    auto u = field_for_certifier(ctx);
    cert = certify_max_principle(u, p.at("M").get<double>(), bounds,
                                 p.value("minimum", false));
  } else if (theorem == "local_bound") {
    auto u = field_for_certifier(ctx);
    cert = certify_local_bound(u, parse_center(p.at("center")),
                               p.at("rho").get<double>(), bounds);
  } else if (theorem == "harnack") {
    auto u = field_for_certifier(ctx);
    cert = certify_harnack(u, parse_center(p.at("center")), p.at("rho").get<double>(),
                           bounds, p.value("k", 0.0));
  } else if (theorem == "pointwise_harnack") {
    auto u = field_for_certifier(ctx);
    std::vector<PointPair> pairs;
    for (const auto& pj : p.at("pairs")) {
      PointPair pp;
      pp.late = parse_center(pj.at("late"));
      pp.early = parse_center(pj.at("early"));
      pairs.push_back(pp);
    }
    cert = certify_pointwise_harnack(u, pairs, p.value("k", 0.0));
  } else if (theorem == "hoelder") {
    auto u = field_for_certifier(ctx);
    cert = estimate_hoelder(u, parse_center(p.at("center")),
                            p.at("radii").get<std::vector<double>>(), p.value("k", 0.0));
  } else if (theorem == "limit_behavior") {
    auto u = field_for_certifier(ctx);
    cert = certify_limit_behavior(u, p.value("alpha", 1.0), p.value("k", 0.0),
                                  p.value("exclude_steps", 5));
  } else if (theorem == "caccioppoli") {
    auto u = field_for_certifier(ctx);
    StructureFunctions sf =
        ctx.cfg.problem.kind == ProblemSpec::Kind::quasilinear
            ? ctx.cfg.problem.quasi
            : structure_from_linear(ctx.cfg.problem.linear, *ctx.cfg.grid);
    const json cj = p.value("cutoff", json::object());
    SpacePoint ctr = source_of(ctx);
    if (cj.contains("center")) ctr = {triple(cj.at("center"), "cutoff.center")};
    auto eta = bump_cutoff(
        ctr, cj.value("radius", 0.45 * (ctx.cfg.grid->hi(0) - ctx.cfg.grid->lo(0))),
        cj.value("t_on", 0.04 * ctx.cfg.grid->T()),
        cj.value("t_full", 0.24 * ctx.cfg.grid->T()));
    cert = check_caccioppoli(u, eta, p.value("beta", 1.0), p.value("kappa", 0.0), sf,
                             p.value("tau_samples", 20));
  } else {
    throw validation_error("config: unknown certify action '" + theorem + "'");
  }
  ReportRecord r = ctx.base("certify." + theorem);
  r.payload = to_json(cert);
  ctx.records.push_back(std::move(r));
}

BorelMeasure measure_of(const Ctx& ctx) {
  BorelMeasure m;
  const json spec = ctx.cfg.params.value("measure", json::object());
  for (const auto& aj : spec.value("atoms", json::array()))
    m.atoms.push_back(
        {{triple(aj.at("location"), "atom.location")}, aj.at("mass").get<double>()});
  if (spec.contains("density"))
    m.density = make_family(*ctx.cfg.grid, spec.at("density"), "mu");
  const std::string tag = spec.value("growth_family", "none");
  if (tag == "gaussian_growth") {
    m.growth_family = BorelMeasure::GrowthFamily::gaussian_growth;
    m.growth_rate = spec.value("rate", 1.0);
  } else if (tag == "super_gaussian") {
    m.growth_family = BorelMeasure::GrowthFamily::super_gaussian;
  }
  return m;
}

std::vector<TraceTestFunction> psis_of(const Ctx& ctx) {
  std::vector<TraceTestFunction> psis;
  const auto& g = *ctx.cfg.grid;
  for (const auto& pj : ctx.cfg.params.value("psis", json::array())) {
    TraceTestFunction psi;
    const std::string type = pj.value("type", "gaussian");
    if (type == "gaussian") {
      const double delta = pj.value("delta", 1.0);
      psi.psi = [delta](const SpacePoint& p) {
        double r2 = 0;
        for (double c : p.x) r2 += c * c;
        return std::exp(-delta * r2);
      };
      psi.K = 1;
      psi.delta = delta;
    } else if (type == "bump") {
      const auto center = triple(pj.at("center"), "psi.center");
      const double radius = pj.at("radius").get<double>();
      const int dim = g.dim();
      psi.psi = [center, radius, dim](const SpacePoint& p) {
        double s2 = 0;
        for (int a = 0; a < dim; ++a) {
          const double d = (p.x[std::size_t(a)] - center[std::size_t(a)]) / radius;
          s2 += d * d;
        }
        return s2 >= 1 ? 0.0 : std::pow(1 - s2, 3);
      };
      double far2 = 0;
      for (int a = 0; a < dim; ++a)
        far2 += std::max(std::abs(g.lo(a)), std::abs(g.hi(a))) *
                std::max(std::abs(g.lo(a)), std::abs(g.hi(a)));
      psi.delta = 1e-3;
      psi.K = std::exp(1e-3 * far2) + 1;
    } else {
      throw validation_error("config: unknown psi type '" + type + "'");
    }
    psis.push_back(std::move(psi));
  }
  return psis;
}

void act_widder(Ctx& ctx, const std::string& op) {
  ReportRecord r = ctx.base("widder." + op);
  auto m = measure_of(ctx);
  if (op == "represent") {
    auto u = represent(*ctx.cfg.grid, ctx.cfg.problem, m);
    const std::string field_path = ctx.opt.out_dir + "/represented.json";
    write_field(field_path, u, "u");
    r.artifacts.push_back(field_path);
    r.payload["measure_hash"] = m.hash();
    r.payload["max_abs"] = u.max_abs();
  } else if (op == "trace") {
    auto u = represent(*ctx.cfg.grid, ctx.cfg.problem, m);
    auto traces =
        initial_trace(u, psis_of(ctx), ctx.cfg.params.value("t0_steps", 16));
    json rows = json::array();
    for (const auto& t : traces)
      rows.push_back({{"value", t.value}, {"error", t.error}, {"ladder", t.ladder}});
    r.payload["traces"] = rows;
  } else if (op == "roundtrip") {
    auto cert = trace_roundtrip(*ctx.cfg.grid, ctx.cfg.problem, m, psis_of(ctx));
    r.payload = to_json(cert);
  } else if (op == "growth") {
    auto chk = check_growth(m);
    r.payload["pass"] = chk.pass;
    r.payload["sigma"] = chk.sigma;
    r.payload["note"] = chk.note;
  } else {
    throw validation_error("config: unknown widder action '" + op + "'");
  }
  ctx.records.push_back(std::move(r));
}

}  // namespace

std::vector<ReportRecord> run(const ExperimentConfig& cfg, const RunOptions& opt) {
  Ctx ctx{cfg, opt, opt.has_seed_override ? opt.seed_override : cfg.seed, {}};
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.action == "validate-structure")
    act_validate_structure(ctx);
  else if (cfg.action == "solve")
    act_solve(ctx);
  else if (cfg.action == "kernel")
    act_kernel(ctx);
  else if (cfg.action == "gaussian-fit")
    act_gaussian_fit(ctx);
  else if (cfg.action == "ck-check")
    act_ck_check(ctx);
  else if (cfg.action == "green")
    act_green(ctx);
  else if (cfg.action.rfind("certify.", 0) == 0)
    act_certify(ctx, cfg.action.substr(8));
  else if (cfg.action.rfind("widder.", 0) == 0)
    act_widder(ctx, cfg.action.substr(7));
  else
    throw validation_error("config: unknown action '" + cfg.action + "'");

  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  for (auto& r : ctx.records) r.wall_ms = opt.reproducible ? 0.0 : wall;
  for (const auto& r : ctx.records) append_report(opt.out_dir + "/report.jsonl", r);
  return ctx.records;
}

}  // namespace parlab
