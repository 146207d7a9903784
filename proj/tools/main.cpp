#include <CLI11.hpp>
#include <iostream>

#include "parlab/driver.hpp"

namespace {

// 0 pass, 1 certification failure, 2 validation error, 3 runtime/solver error
constexpr int kPass = 0, kCertFail = 1, kValidation = 2, kRuntime = 3;

bool record_passes(const parlab::ReportRecord& r) {
  if (r.payload.contains("pass")) return r.payload.at("pass").get<bool>();
  return true;
}

int run_action(const std::string& config_path, const std::string& action,
               const parlab::RunOptions& opt) {
  try {
    auto cfg = parlab::ExperimentConfig::load(config_path);
    if (!action.empty()) {
      cfg.action = action;
      cfg.raw["action"] = action;
    }
    auto records = parlab::run(cfg, opt);
    bool all_pass = true;
    for (const auto& r : records) {
      const bool ok = record_passes(r);
      all_pass = all_pass && ok;
      std::cout << r.action << ": " << (ok ? "pass" : "FAIL") << "\n";
    }
    return all_pass ? kPass : kCertFail;
  } catch (const parlab::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const parlab::structure_error& e) {
    std::cerr << "structure error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parlab: a laboratory for divergence-form parabolic equations "
               "with rough coefficients"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  parlab::RunOptions opt;
  uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment configuration (JSON)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--workers", opt.workers, "worker count");
  app.add_flag("--reproducible", opt.reproducible,
               "deterministic artifacts (zeroed wall times)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");

  // plain actions: the subcommand fixes the action string
  struct Plain {
    const char* name;
    const char* action;
    const char* help;
  };
  const Plain plain[] = {
      {"validate-structure", "validate-structure",
       "check structure inequalities and exponent admissibility"},
      {"solve", "solve", "run the configured problem and report weak residuals"},
      {"kernel", "kernel", "estimate the fundamental-solution surrogate"},
      {"ck-check", "ck-check", "reproduction identity residual for the kernel"},
      {"gaussian-fit", "gaussian-fit", "two-sided gaussian envelope fit"},
      {"green", "green", "elliptic green function bounds (n = 3)"},
  };
  for (const auto& p : plain) app.add_subcommand(p.name, p.help)->fallthrough();

  auto* certify = app.add_subcommand("certify", "certify one theorem");
  certify->fallthrough();
  std::string theorem;
  certify->add_option("theorem", theorem,
                      "max_principle | local_bound | harnack | pointwise_harnack | "
                      "hoelder | limit_behavior | caccioppoli")
      ->required();

  auto* widder = app.add_subcommand("widder", "representation-theorem operations");
  widder->fallthrough();
  std::string widder_op;
  widder->add_option("op", widder_op, "represent | trace | roundtrip | growth")
      ->required();

  auto* report = app.add_subcommand("report", "summarize a report file");
  report->fallthrough();
  std::string report_path;
  report->add_option("--in", report_path, "report.jsonl to summarize")->required();

  auto* baseline = app.add_subcommand("baseline", "record or compare baselines");
  baseline->fallthrough();
  std::string baseline_mode, baseline_in, baseline_file;
  double baseline_tol = 0.05;
  baseline->add_option("mode", baseline_mode, "record | compare")->required();
  baseline->add_option("--in", baseline_in, "report.jsonl with the current run")
      ->required();
  baseline->add_option("--baseline", baseline_file, "baseline store (JSON)")
      ->required();
  baseline->add_option("--tol", baseline_tol, "relative tolerance for compare")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  opt.out_dir = out_dir;
  if (seed_opt->count() > 0) {
    opt.seed_override = seed;
    opt.has_seed_override = true;
  }

  try {
    if (report->parsed()) {
      for (const auto& r : parlab::read_reports(report_path))
        std::cout << r.action << " config=" << r.config_hash
                  << " grid=" << r.grid_hash << " "
                  << (record_passes(r) ? "pass" : "FAIL") << "\n";
      return kPass;
    }
    if (baseline->parsed()) {
      if (baseline_mode != "record" && baseline_mode != "compare") {
        std::cerr << "validation error: baseline mode must be record or compare\n";
        return kValidation;
      }
      auto records = parlab::read_reports(baseline_in);
      bool all_pass = true;
      for (const auto& r : records) {
        if (baseline_mode == "record") {
          parlab::record_baseline(baseline_file, r);
          std::cout << r.action << ": recorded\n";
        } else {
          auto diff = parlab::compare_baseline(baseline_file, r, baseline_tol);
          all_pass = all_pass && diff.pass;
          std::cout << r.action << ": " << diff.message << "\n";
          for (const auto& row : diff.rows) std::cout << "  " << row << "\n";
        }
      }
      return all_pass ? kPass : kCertFail;
    }
  } catch (const parlab::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }

  if (config_path.empty()) {
    std::cerr << "validation error: this subcommand needs --config\n";
    return kValidation;
  }
  for (const auto& p : plain)
    if (app.get_subcommand(p.name)->parsed()) return run_action(config_path, p.action, opt);
  if (certify->parsed()) return run_action(config_path, "certify." + theorem, opt);
  if (widder->parsed()) return run_action(config_path, "widder." + widder_op, opt);

  std::cerr << "validation error: no subcommand matched\n";
  return kValidation;
}
