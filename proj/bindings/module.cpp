#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parlab/driver.hpp"

namespace py = pybind11;
using namespace parlab;

namespace {

ExperimentConfig config_from_str(const std::string& doc) {
  return ExperimentConfig::parse(json::parse(doc));
}

py::array_t<double> field_array(const SolutionField& u) {
  const auto& g = u.grid();
  std::vector<py::ssize_t> shape{py::ssize_t(g.steps() + 1)};
  for (int a = 0; a < g.dim(); ++a) shape.push_back(g.cells(a));
  py::array_t<double> out(shape);
  std::copy(u.data().begin(), u.data().end(), out.mutable_data());
  return out;
}

py::dict grid_dict(const SpaceTimeGrid& g) {
  py::dict d;
  d["dim"] = g.dim();
  py::list lo, hi, cells;
  for (int a = 0; a < g.dim(); ++a) {
    lo.append(g.lo(a));
    hi.append(g.hi(a));
    cells.append(g.cells(a));
  }
  d["lo"] = lo;
  d["hi"] = hi;
  d["cells"] = cells;
  d["h"] = g.h();
  d["T"] = g.T();
  d["dt"] = g.dt();
  d["steps"] = g.steps();
  return d;
}

RunOptions make_options(const std::string& out_dir, bool reproducible, int workers,
                        py::object seed) {
  RunOptions opt;
  opt.out_dir = out_dir;
  opt.reproducible = reproducible;
  opt.workers = workers;
  if (!seed.is_none()) {
    opt.seed_override = seed.cast<uint64_t>();
    opt.has_seed_override = true;
  }
  return opt;
}

}  // namespace

PYBIND11_MODULE(_parlab, m) {
  m.doc() = "divergence-form parabolic laboratory (native core)";

  py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<structure_error>(m, "StructureError", PyExc_ValueError);
  py::register_exception<solver_error>(m, "SolverError", PyExc_RuntimeError);

  m.def("heat_kernel", &heat_kernel, py::arg("n"), py::arg("alpha"), py::arg("r2"),
        py::arg("t"), "Gaussian heat kernel (4 pi alpha t)^{-n/2} exp(-r^2/(4 alpha t))");

  m.def(
      "run_config",
      [](const std::string& doc, const std::string& out_dir, bool reproducible,
         int workers, py::object seed) {
        auto cfg = config_from_str(doc);
        auto records = run(cfg, make_options(out_dir, reproducible, workers, seed));
        json arr = json::array();
        for (const auto& r : records) arr.push_back(r.to_json());
        return arr.dump();
      },
      py::arg("config"), py::arg("out_dir") = ".", py::arg("reproducible") = false,
      py::arg("workers") = 1, py::arg("seed") = py::none(),
      "Execute a configured action; returns the report records as a JSON string.");

  m.def(
      "solve_config",
      [](const std::string& doc, double time_weight) {
        auto cfg = config_from_str(doc);
        SolverConfig sc;
        sc.time_weight = time_weight;
        auto u = solve(*cfg.grid, cfg.problem, sc);
        return py::make_tuple(grid_dict(*cfg.grid), field_array(u));
      },
      py::arg("config"), py::arg("time_weight") = 1.0,
      "Solve the configured problem in memory; returns (grid, values) with "
      "values shaped (steps+1, cells_0, ..., cells_{n-1}).");

  m.def(
      "kernel_config",
      [](const std::string& doc, const std::vector<double>& source, double tail_tol) {
        auto cfg = config_from_str(doc);
        SpacePoint xi;
        for (std::size_t a = 0; a < source.size() && a < 3; ++a) xi.x[a] = source[a];
        auto est = estimate_kernel(*cfg.grid, cfg.problem, xi, {}, tail_tol);
        py::dict d;
        d["grid"] = grid_dict(*cfg.grid);
        d["values"] = field_array(est.gamma);
        d["source_cell"] = est.source_cell;
        d["boundary_mass"] = est.boundary_mass;
        d["effective_box"] = est.effective_box;
        auto fit = fit_gaussian_bounds(est);
        py::dict f;
        f["alpha1"] = fit.alpha1;
        f["alpha2"] = fit.alpha2;
        f["C"] = fit.C;
        f["alpha_ref"] = fit.alpha_ref;
        f["samples"] = fit.samples;
        d["gaussian_fit"] = f;
        return d;
      },
      py::arg("config"), py::arg("source"), py::arg("tail_tol") = 1e-8,
      "Fundamental-solution surrogate from a point source, with its "
      "two-sided Gaussian envelope fit.");

  m.def(
      "read_field",
      [](const std::string& path) {
        auto lf = read_field(path);
        return py::make_tuple(grid_dict(*lf.grid), field_array(lf.field));
      },
      py::arg("path"), "Load a field file; returns (grid, values).");
}
