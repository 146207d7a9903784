#pragma once

#include <memory>
#include <string>
#include <vector>

#include "parlab/io.hpp"
#include "parlab/widder.hpp"

namespace parlab {

struct RunOptions {
  bool reproducible = false;
  int workers = 1;
  uint64_t seed_override = 0;
  bool has_seed_override = false;
  std::string out_dir = ".";
};

/// One experiment: a grid, a problem, an action with its parameters, and a
/// seed. Parsed from a single JSON document; the grid is heap allocated so
/// the coefficient fields inside the problem stay valid across moves.
struct ExperimentConfig {
  json raw;
  std::unique_ptr<SpaceTimeGrid> grid;
  ProblemSpec problem;
  std::string action;
  json params;
  uint64_t seed = 0;

  uint64_t hash() const;

  static ExperimentConfig parse(const json& doc);
  static ExperimentConfig load(const std::string& path);
};

/// Execute the configured action, write artifacts into `opt.out_dir`, and
/// return the report records (also appended to <out_dir>/report.jsonl).
std::vector<ReportRecord> run(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace parlab
