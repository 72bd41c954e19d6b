#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "homdyn/catalog.hpp"
#include "homdyn/errors.hpp"
#include "homdyn/experiment.hpp"

using namespace homdyn;
using nlohmann::json;

namespace {

std::string error_of(const json& raw) {
  try {
    parse_config(raw);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("the catalog covers the worked examples") {
  CHECK(canned_examples().size() >= 6);
  CHECK(find_example("ex-reducible").expected == Case::kCase2_2);
  CHECK(find_example("ex-principal-sl3").expected == Case::kCase2_3a);
  CHECK(find_example("ex-2.3.b").expected == Case::kCase2_3b);
  CHECK(find_example("ex-case-2.1-a").expected == Case::kCase2_1);
  CHECK_THROWS_AS(find_example("ex-missing"), ConfigurationError);
  CHECK(list_examples().find("ex-reducible  Case2_2") != std::string::npos);
  for (const std::string& name : canned_measure_names()) CHECK_NOTHROW(canned_measure(name));
  CHECK_THROWS_AS(canned_measure("nope"), ConfigurationError);
}

TEST_CASE("fibre blocks and block representations") {
  CHECK(fibre_block(FlagConfig{4, {1, 2, 3}, {}}) == std::nullopt);
  CHECK(fibre_block(FlagConfig{3, {1}, {}}) == 1);
  CHECK(fibre_block(FlagConfig{4, {2}, {0}}) == 1);
  CHECK(fibre_dimension(FlagConfig{4, {3}, {}}) == 3);
  const CannedExample& ss = find_example("ex-ss");
  const Representation rho = block_representation(ss.flag, ss.embedding, 0);
  Matrix2 b;
  b << 2, 1, 0, 0.5;  // upper triangular Borel element
  CHECK(std::abs(std::abs(rho(b).determinant()) - 1.0) < 1e-12);
}

TEST_CASE("unknown and misplaced keys are named") {
  CHECK(error_of({{"kind", "lyapunov"}, {"bogus", 1}}).find("'bogus': unknown key") != std::string::npos);
  CHECK(error_of({{"kind", "lyapunov"}, {"dt", 0.1}}).find("'dt': does not apply") != std::string::npos);
  CHECK(error_of({{"kind", "nope"}}).find("'kind'") != std::string::npos);
  CHECK(error_of({{"kind", "lyapunov"}, {"steps", -3}}).find("'steps'") != std::string::npos);
  CHECK(error_of({{"kind", "lyapunov"}, {"mu", "nope"}}).find("'mu'") != std::string::npos);
  CHECK(error_of({{"kind", "classify"}}).find("'example'") != std::string::npos);
  const json atoms = {{"atoms", {{{"weight", 1.0}, {"matrix", {{2, 0}, {0, 1}}}}}}};
  CHECK(error_of({{"kind", "lyapunov"}, {"mu", atoms}}).find("'mu'") != std::string::npos);
  const json geometry = {{"flag", {{"n", 3}, {"dims", {2}}, {"extra", 1}}},
                         {"embedding", {{"e", {{0}}}, {"x", {{0}}}, {"f", {{0}}}}}};
  CHECK(error_of({{"kind", "classify"}, {"geometry", geometry}}).find("'geometry.flag.extra'") != std::string::npos);
}

TEST_CASE("defaults are resolved and round-trip") {
  for (const std::string& kind : experiment_kinds()) {
    json raw = {{"kind", kind}};
    if (kind == "classify") raw["example"] = "ex-ss";
    const ExperimentConfig c = parse_config(raw);
    const json resolved = to_json(c);
    CHECK(to_json(parse_config(resolved)) == resolved);
    CHECK(to_json(parse_config({{"config", resolved}, {"versions", versions()}})) == resolved);
  }
  const ExperimentConfig eq = parse_config({{"kind", "equidist"}});
  CHECK(eq.example == "ex-reducible");
  CHECK(eq.measure == "positive-pair");
  CHECK(eq.steps == 100000);
  CHECK(eq.trials == 200);
}

TEST_CASE("inline geometry and measures") {
  const json geometry = {
      {"flag", {{"n", 3}, {"dims", {2}}}},
      {"embedding",
       {{"e", {{0, 0, 0}, {0, 0, 1}, {0, 0, 0}}}, {"x", {{0, 0, 0}, {0, 1, 0}, {0, 0, -1}}},
        {"f", {{0, 0, 0}, {0, 0, 0}, {0, 1, 0}}}}}};
  const ExperimentConfig c = parse_config({{"kind", "classify"}, {"geometry", geometry}, {"expect", "Case2_2"}});
  const ExperimentResult r = run_experiment(c);
  CHECK(r.report["label"] == "Case2_2");
  CHECK(r.pass);
  const json atoms = {{"atoms", {{{"weight", 0.5}, {"matrix", {{2, 1}, {1, 1}}}}, {{"weight", 0.5}, {"matrix", {{1, 1}, {1, 2}}}}}}};
  const ExperimentConfig l = parse_config({{"kind", "lyapunov"}, {"mu", atoms}, {"steps", 1000}, {"trials", 10}});
  CHECK(l.step_measure().size() == 2);
  CHECK(to_json(parse_config(to_json(l))) == to_json(l));
}

TEST_CASE("classify reports the Case 2.3.b verdict") {
  const ExperimentResult r = run_experiment(parse_config({{"kind", "classify"}, {"example", "ex-2.3.b"}}));
  CHECK(r.report["label"] == "Case2_3b");
  CHECK(exit_code(r) == 0);
  const ExperimentResult wrong =
      run_experiment(parse_config({{"kind", "classify"}, {"example", "ex-2.3.b"}, {"expect", "Case2_2"}}));
  CHECK(exit_code(wrong) == 2);
}

TEST_CASE("lyapunov of the diagonal measure is log 2") {
  const ExperimentResult r = run_experiment(
      parse_config({{"kind", "lyapunov"}, {"mu", "diagonal"}, {"expect", 0.6931471805599453}}));
  CHECK(r.report["lyapunov"]["value"] == std::log(2.0));
  CHECK(r.report["lyapunov"]["deterministic"] == true);
  CHECK(exit_code(r) == 0);
}

TEST_CASE("walks without fibre dynamics are refused") {
  CHECK_THROWS_AS(run_experiment(parse_config({{"kind", "walk"}, {"example", "ex-fixed-plane"}})), ConfigurationError);
  CHECK_THROWS_AS(run_experiment(parse_config({{"kind", "decompose"}, {"example", "ex-2.3.b"}})), ConfigurationError);
  CHECK_THROWS_AS(run_experiment(parse_config({{"kind", "equidist"}, {"example", "ex-ss"}})), ConfigurationError);
}

TEST_CASE("re-running a manifest reproduces the report") {
  const ExperimentConfig c =
      parse_config({{"kind", "walk"}, {"example", "ex-ss"}, {"steps", 1000}, {"trials", 6}, {"seed", 17}});
  const ExperimentResult first = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "homdyn-unit-manifest";
  write_artifacts(dir, c, first);
  std::ifstream in(dir / "manifest.json");
  const json manifest = json::parse(in);
  CHECK(manifest.contains("wall_clock_seconds"));
  CHECK(manifest["seed"] == 17);
  const ExperimentResult second = run_experiment(parse_config(manifest));
  CHECK(first.report.dump() == second.report.dump());
  CHECK(std::filesystem::exists(dir / "series.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}
