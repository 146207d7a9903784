#include "parlab/io.hpp"

#include <cmath>
#include <fstream>

namespace parlab {

namespace {

std::string bin_path(const std::string& header_path) {
  const auto dot = header_path.rfind('.');
  const std::string stem =
      dot == std::string::npos ? header_path : header_path.substr(0, dot);
  return stem + ".bin";
}

std::string bin_name(const std::string& header_path) {
  const std::string full = bin_path(header_path);
  const auto slash = full.find_last_of("/\\");
  return slash == std::string::npos ? full : full.substr(slash + 1);
}

}  // namespace

void write_field(const std::string& header_path, const SolutionField& u,
                 const std::string& name) {
  const auto& g = u.grid();
  json header;
  header["schema"] = 1;
  header["name"] = name;
  header["dim"] = g.dim();
  header["lo"] = {g.lo(0), g.lo(1), g.lo(2)};
  header["hi"] = {g.hi(0), g.hi(1), g.hi(2)};
  header["h"] = g.h();
  header["T"] = g.T();
  header["dt"] = g.dt();
  header["cells"] = {g.cells(0), g.cells(1), g.cells(2)};
  header["steps"] = g.steps();
  header["count"] = u.data().size();
  header["problem_hash"] = u.problem_hash;
  header["config_hash"] = u.config_hash;
  header["field_hash"] = u.hash();
  header["data"] = bin_name(header_path);

  std::ofstream hs(header_path);
  if (!hs) throw validation_error("field write: cannot open " + header_path);
  hs << header.dump(2) << "\n";

  std::ofstream bs(bin_path(header_path), std::ios::binary);
  if (!bs) throw validation_error("field write: cannot open " + bin_path(header_path));
  static_assert(sizeof(double) == 8);
  bs.write(reinterpret_cast<const char*>(u.data().data()),
           std::streamsize(u.data().size() * sizeof(double)));
}

LoadedField read_field(const std::string& header_path) {
  std::ifstream hs(header_path);
  if (!hs) throw validation_error("field read: cannot open " + header_path);
  json header = json::parse(hs, nullptr, true);
  if (header.value("schema", 0) != 1)
    throw validation_error("field read: unsupported schema in " + header_path);

  LoadedField out;
  out.grid = std::make_unique<SpaceTimeGrid>(SpaceTimeGrid::make(
      header.at("dim").get<int>(),
      {header.at("lo")[0], header.at("lo")[1], header.at("lo")[2]},
      {header.at("hi")[0], header.at("hi")[1], header.at("hi")[2]},
      header.at("h").get<double>(), header.at("T").get<double>(),
      header.at("dt").get<double>()));
  out.field = SolutionField(*out.grid);
  const std::size_t count = header.at("count").get<std::size_t>();
  if (count != out.field.data().size())
    throw validation_error("field read: element count does not match the grid");

  const auto slash = header_path.find_last_of("/\\");
  const std::string dir =
      slash == std::string::npos ? "" : header_path.substr(0, slash + 1);
  std::ifstream bs(dir + header.at("data").get<std::string>(), std::ios::binary);
  if (!bs) throw validation_error("field read: missing data file for " + header_path);
  bs.read(reinterpret_cast<char*>(out.field.data().data()),
          std::streamsize(count * sizeof(double)));
  if (std::size_t(bs.gcount()) != count * sizeof(double))
    throw validation_error("field read: truncated data file for " + header_path);

  out.field.problem_hash = header.value("problem_hash", uint64_t(0));
  out.field.config_hash = header.value("config_hash", uint64_t(0));
  if (header.contains("field_hash") &&
      header.at("field_hash").get<uint64_t>() != out.field.hash())
    throw validation_error("field read: data hash mismatch for " + header_path);
  return out;
}

json to_json(const Certificate& cert) {
  json j;
  j["theorem"] = cert.theorem;
  j["pass"] = cert.pass;
  j["applicable"] = cert.applicable;
  j["constants"] = json::object();
  for (const auto& [k, v] : cert.constants) j["constants"][k] = v;
  j["witnesses"] = json::array();
  for (const auto& w : cert.witnesses)
    j["witnesses"].push_back({{"role", w.role},
                              {"x", {w.where.x[0], w.where.x[1], w.where.x[2]}},
                              {"t", w.where.t},
                              {"value", w.value}});
  j["problem_hash"] = cert.problem_hash;
  j["grid_hash"] = cert.grid_hash;
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

json to_json(const GaussianFit& fit) {
  json j;
  j["alpha1"] = fit.alpha1;
  j["alpha2"] = fit.alpha2;
  j["C"] = fit.C;
  j["C_lower"] = fit.C_lower;
  j["C_upper"] = fit.C_upper;
  j["alpha_ref"] = fit.alpha_ref;
  j["samples"] = fit.samples;
  j["steps_used"] = fit.steps_used;
  return j;
}

json to_json(const GreenResult& green) {
  json j;
  j["K_fit"] = green.K_fit;
  j["max_rel_deviation"] = green.max_rel_deviation;
  j["tail_fraction"] = green.tail_fraction;
  j["tail_bound_fraction"] = green.tail_bound_fraction;
  j["bracket_halfwidth"] = green.bracket_halfwidth;
  j["alpha_central"] = green.alpha_central;
  j["annulus_cells"] = green.G.size();
  j["fit"] = to_json(green.fit);
  return j;
}

json ReportRecord::to_json() const {
  json j;
  j["action"] = action;
  j["config_hash"] = config_hash;
  j["grid_hash"] = grid_hash;
  j["payload"] = payload;
  j["wall_ms"] = wall_ms;
  j["artifacts"] = artifacts;
  return j;
}

void append_report(const std::string& path, const ReportRecord& record) {
  std::ofstream os(path, std::ios::app);
  if (!os) throw validation_error("report write: cannot open " + path);
  os << record.to_json().dump() << "\n";
}

std::vector<ReportRecord> read_reports(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw validation_error("report read: cannot open " + path);
  std::vector<ReportRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ReportRecord r;
    r.action = j.at("action").get<std::string>();
    r.config_hash = j.at("config_hash").get<uint64_t>();
    r.grid_hash = j.at("grid_hash").get<uint64_t>();
    r.payload = j.at("payload");
    r.wall_ms = j.at("wall_ms").get<double>();
    for (const auto& a : j.at("artifacts")) r.artifacts.push_back(a.get<std::string>());
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string baseline_key(const ReportRecord& r) {
  return r.action + "-" + std::to_string(r.config_hash) + "-" +
         std::to_string(r.grid_hash);
}

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, double>>& out) {
  if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  }
  // arrays and strings are provenance, not fitted constants
}

json load_baselines(const std::string& path) {
  std::ifstream is(path);
  if (!is) return json::object();
  return json::parse(is, nullptr, true);
}

}  // namespace

void record_baseline(const std::string& path, const ReportRecord& record) {
  json all = load_baselines(path);
  std::vector<std::pair<std::string, double>> flat;
  flatten(record.payload, "", flat);
  json entry;
  entry["action"] = record.action;
  for (const auto& [k, v] : flat) entry["constants"][k] = v;
  all[baseline_key(record)] = entry;
  std::ofstream os(path);
  if (!os) throw validation_error("baseline write: cannot open " + path);
  os << all.dump(2) << "\n";
}

BaselineDiff compare_baseline(const std::string& path, const ReportRecord& record,
                              double rel_tol) {
  BaselineDiff diff;
  json all = load_baselines(path);
  const std::string key = baseline_key(record);
  if (!all.contains(key)) {
    diff.pass = false;
    diff.message = "no baseline for " + key +
                   "; record one with `baseline record` on this report first";
    return diff;
  }
  std::vector<std::pair<std::string, double>> flat;
  flatten(record.payload, "", flat);
  const json& stored = all[key]["constants"];
  diff.pass = true;
  for (const auto& [k, v] : flat) {
    if (!stored.contains(k)) {
      diff.pass = false;
      diff.rows.push_back(k + " missing-from-baseline");
      continue;
    }
    const double s = stored[k].get<double>();
    const double rel = std::abs(v - s) / std::max({std::abs(s), std::abs(v), 1e-12});
    diff.rows.push_back(k + " " + std::to_string(s) + " " + std::to_string(v) + " " +
                        std::to_string(rel));
    if (rel > rel_tol) diff.pass = false;
  }
  diff.message = diff.pass ? "all entries within tolerance" : "baseline mismatch";
  return diff;
}

}  // namespace parlab
