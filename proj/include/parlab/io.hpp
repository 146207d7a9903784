#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "parlab/certify.hpp"
#include "parlab/kernel.hpp"

namespace parlab {

using json = nlohmann::ordered_json;

/// Field files: a JSON header carrying the schema version, the grid
/// descriptor, the name and the hashes, next to a sibling ".bin" file of
/// 64-bit little-endian values in row-major cell order, one time level
/// after another.
void write_field(const std::string& header_path, const SolutionField& u,
                 const std::string& name = "u");

/// A solution read back together with its owning grid (the field keeps a
/// pointer into `grid`; the struct is movable because the grid is heap
/// allocated).
struct LoadedField {
  std::unique_ptr<SpaceTimeGrid> grid;
  SolutionField field;
};
LoadedField read_field(const std::string& header_path);

json to_json(const Certificate& cert);
json to_json(const GaussianFit& fit);
json to_json(const GreenResult& green);

/// One report line: action tag, input hashes, payload, wall time (zeroed
/// in reproducible mode), artifact references. Appends to a JSONL file.
struct ReportRecord {
  std::string action;
  uint64_t config_hash = 0;
  uint64_t grid_hash = 0;
  json payload;
  double wall_ms = 0;
  std::vector<std::string> artifacts;

  json to_json() const;
};
void append_report(const std::string& path, const ReportRecord& record);
std::vector<ReportRecord> read_reports(const std::string& path);

/// Baselines: stored constants per inputs hash, compared entry by entry
/// with a relative tolerance.
void record_baseline(const std::string& path, const ReportRecord& record);

struct BaselineDiff {
  bool pass = false;
  std::string message;
  std::vector<std::string> rows;  // "key stored current rel_diff"
};
BaselineDiff compare_baseline(const std::string& path, const ReportRecord& record,
                              double rel_tol = 0.05);

}  // namespace parlab
