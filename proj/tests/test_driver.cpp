#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "parlab/driver.hpp"

using namespace parlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("parlab_drv_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

json base_doc() {
  return json{
      {"schema", 1},
      {"grid",
       {{"dim", 1}, {"lo", {0.0}}, {"hi", {1.0}}, {"h", 1.0 / 64}, {"T", 0.25},
        {"dt", 1.0 / 128}}},
      {"problem",
       {{"kind", "linear"},
        {"boundary", "dirichlet"},
        {"diffusion", {{"family", "constant"}, {"value", 1.0}}},
        {"initial", {{"type", "sin_mode"}}}}},
      {"action", "solve"},
      {"seed", 9}};
}

}  // namespace

TEST_CASE("solve action writes the field and a residual report") {
  TempDir tmp;
  auto cfg = ExperimentConfig::parse(base_doc());
  RunOptions opt;
  opt.out_dir = tmp.path.string();
  auto records = run(cfg, opt);
  REQUIRE(records.size() == 1);
  CHECK(records[0].action == "solve");
  CHECK(records[0].payload.at("worst_residual").get<double>() < 5e-2);
  CHECK(std::filesystem::exists(tmp.path / "solution.json"));
  CHECK(std::filesystem::exists(tmp.path / "solution.bin"));
  CHECK(std::filesystem::exists(tmp.path / "report.jsonl"));
}

TEST_CASE("validate-structure flags an inadmissible exponent pair") {
  TempDir tmp;
  auto doc = base_doc();
  doc["action"] = "validate-structure";
  doc["problem"]["exponents"] = {{"b", {{"p", 2.0}, {"q", "inf"}}}};
  auto cfg = ExperimentConfig::parse(doc);
  RunOptions opt;
  opt.out_dir = tmp.path.string();
  auto records = run(cfg, opt);
  REQUIRE(records.size() == 1);
  CHECK(!records[0].payload.at("pass").get<bool>());
  CHECK(records[0].payload.at("failure").get<std::string>().find("'b'") !=
        std::string::npos);

  doc["problem"]["exponents"]["b"]["p"] = 8.0;
  auto good = run(ExperimentConfig::parse(doc), opt);
  CHECK(good[0].payload.at("pass").get<bool>());
  CHECK(good[0].payload.at("theta").get<double>() > 0);
}

TEST_CASE("harnack family sweep emits per-contrast certificates and a trend") {
  TempDir tmp;
  auto doc = base_doc();
  doc["grid"] = {{"dim", 1},     {"lo", {-0.5}},        {"hi", {0.5}},
                 {"h", 1.0 / 64}, {"T", 150.0 / 1024}, {"dt", 1.0 / 1024}};
  doc["action"] = "certify.harnack";
  doc["params"] = {{"contrasts", {1.0, 10.0}},
                   {"period", 0.125},
                   {"center", {{"x", {0.0}}, {"t", 144.0 / 1024}}},
                   {"rho", 0.125},
                   {"k", 0.0}};
  auto cfg = ExperimentConfig::parse(doc);
  RunOptions opt;
  opt.out_dir = tmp.path.string();
  auto records = run(cfg, opt);
  REQUIRE(records.size() == 3);
  CHECK(records[0].payload.at("pass").get<bool>());
  CHECK(records[1].payload.at("pass").get<bool>());
  CHECK(records[2].action == "certify.harnack.trend");
  CHECK(records[2].payload.at("pass").get<bool>());
  CHECK(records[2].payload.at("rows").size() == 2);
}

TEST_CASE("reproducible reruns are byte identical") {
  TempDir a, b;
  auto doc = base_doc();
  doc["action"] = "gaussian-fit";
  doc["grid"] = {{"dim", 1},      {"lo", {-0.5}}, {"hi", {0.5}},
                 {"h", 1.0 / 128}, {"T", 0.01},   {"dt", 0.01 / 128}};
  doc["problem"]["boundary"] = "no_flux";
  doc["problem"]["initial"] = {{"type", "zero"}};

  RunOptions opt;
  opt.reproducible = true;
  opt.out_dir = a.path.string();
  run(ExperimentConfig::parse(doc), opt);
  opt.out_dir = b.path.string();
  run(ExperimentConfig::parse(doc), opt);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  const auto ra = slurp(a.path / "report.jsonl"), rb = slurp(b.path / "report.jsonl");
  CHECK(!ra.empty());
  CHECK(ra == rb);
}

TEST_CASE("config validation errors carry field context") {
  auto doc = base_doc();
  doc["problem"]["diffusion"] = {{"family", "perlin"}};
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse(doc),
                       doctest::Contains("perlin"), validation_error);

  doc = base_doc();
  doc["tolerances"] = {{"residual", -1.0}};
  CHECK_THROWS_AS(ExperimentConfig::parse(doc), validation_error);

  doc = base_doc();
  doc["action"] = "certify.everything";
  TempDir tmp;
  RunOptions opt;
  opt.out_dir = tmp.path.string();
  CHECK_THROWS_AS(run(ExperimentConfig::parse(doc), opt), validation_error);
}

TEST_CASE("widder roundtrip action") {
  TempDir tmp;
  auto doc = base_doc();
  doc["grid"] = {{"dim", 1},      {"lo", {-0.5}}, {"hi", {0.5}},
                 {"h", 1.0 / 128}, {"T", 0.01},   {"dt", 0.01 / 64}};
  doc["action"] = "widder.roundtrip";
  doc["params"] = {
      {"measure", {{"atoms", {{{"location", {-0.2}}, {"mass", 1.0}},
                              {{"location", {0.15}}, {"mass", 2.0}}}}}},
      {"psis", {{{"type", "gaussian"}, {"delta", 1.0}},
                {{"type", "bump"}, {"center", {-0.2}}, {"radius", 0.15}}}}};
  auto cfg = ExperimentConfig::parse(doc);
  RunOptions opt;
  opt.out_dir = tmp.path.string();
  auto records = run(cfg, opt);
  REQUIRE(records.size() == 1);
  CHECK(records[0].payload.at("pass").get<bool>());
}
