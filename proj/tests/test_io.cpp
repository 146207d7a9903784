#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parlab/io.hpp"

using namespace parlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("parlab_io_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("field files round trip bit exactly") {
  TempDir tmp;
  auto g = SpaceTimeGrid::make(2, {0, 0, 0}, {1, 0.5, 0}, 1.0 / 16, 0.25, 1.0 / 32);
  auto u = SolutionField::from_function(g, [](const SpacePoint& p, double t) {
    return std::sin(3 * p.x[0]) * std::cos(2 * p.x[1]) + t;
  });
  u.problem_hash = 42;
  u.config_hash = 7;

  const std::string path = tmp.file("field.json");
  write_field(path, u, "test");
  auto loaded = read_field(path);
  CHECK(loaded.grid->hash() == g.hash());
  CHECK(loaded.field.problem_hash == 42);
  CHECK(loaded.field.config_hash == 7);
  REQUIRE(loaded.field.data().size() == u.data().size());
  for (std::size_t i = 0; i < u.data().size(); ++i)
    CHECK(loaded.field.data()[i] == u.data()[i]);

  // corrupting the payload trips the hash check
  {
    std::fstream bs(tmp.file("field.bin"),
                    std::ios::in | std::ios::out | std::ios::binary);
    bs.seekp(16);
    const double evil = 1e9;
    bs.write(reinterpret_cast<const char*>(&evil), sizeof(evil));
  }
  CHECK_THROWS_AS(read_field(path), validation_error);
  CHECK_THROWS_AS(read_field(tmp.file("missing.json")), validation_error);
}

TEST_CASE("report records append and read back") {
  TempDir tmp;
  const std::string path = tmp.file("report.jsonl");
  ReportRecord r1;
  r1.action = "solve";
  r1.config_hash = 11;
  r1.grid_hash = 22;
  r1.payload = {{"worst_residual", 0.01}};
  r1.artifacts = {"solution.json"};
  append_report(path, r1);

  ReportRecord r2 = r1;
  r2.action = "gaussian-fit";
  r2.payload = {{"alpha1", 0.9}, {"alpha2", 1.1}};
  append_report(path, r2);

  auto rows = read_reports(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].action == "solve");
  CHECK(rows[0].payload.at("worst_residual").get<double>() == 0.01);
  CHECK(rows[0].artifacts == std::vector<std::string>{"solution.json"});
  CHECK(rows[1].payload.at("alpha2").get<double>() == 1.1);
}

TEST_CASE("baseline record and compare") {
  TempDir tmp;
  const std::string path = tmp.file("baseline.json");
  ReportRecord r;
  r.action = "certify.harnack";
  r.config_hash = 5;
  r.grid_hash = 6;
  r.payload = {{"constants", {{"C_emp", 3.0}, {"k", 0.0}}}};

  auto missing = compare_baseline(path, r);
  CHECK(!missing.pass);
  CHECK(missing.message.find("record") != std::string::npos);

  record_baseline(path, r);
  auto same = compare_baseline(path, r);
  CHECK(same.pass);

  ReportRecord drift = r;
  drift.payload["constants"]["C_emp"] = 3.05;
  CHECK(compare_baseline(path, drift, 0.05).pass);
  drift.payload["constants"]["C_emp"] = 4.5;
  CHECK(!compare_baseline(path, drift, 0.05).pass);
}
