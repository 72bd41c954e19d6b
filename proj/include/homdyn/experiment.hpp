#ifndef HOMDYN_EXPERIMENT_HPP_
#define HOMDYN_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "homdyn/boundary.hpp"
#include "homdyn/classify.hpp"

namespace homdyn {

enum class ExperimentKind { kClassify, kWalk, kLyapunov, kLdp, kRenewal, kDrift, kEquidist, kDecompose };
const char* to_string(ExperimentKind kind);
// Throws ConfigurationError for an unknown name.
ExperimentKind kind_from_string(const std::string& name);
std::vector<std::string> experiment_kinds();

// A resolved experiment: every knob that applies to the kind holds a
// concrete value. Optional knobs left empty are derived at run time from
// the seed (eps1 = drift / 4, k_max = 8 t / drift, theta and lattice from
// the geometry), so the configuration alone reproduces the run.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kClassify;
  std::uint64_t seed = 1;

  std::string example;  // canned geometry, or empty for inline geometry
  std::optional<FlagConfig> flag;
  std::optional<EmbeddingSpec> embedding;

  std::string measure;  // canned measure name, or empty for `atoms`
  std::vector<Atom> atoms;

  std::size_t steps = 0;
  std::size_t trials = 0;
  std::size_t samples = 0;
  std::size_t burn_in = 0;
  std::size_t stride = 0;
  std::size_t word_length = 0;
  std::size_t lyapunov_steps = 0;
  std::size_t lyapunov_trials = 0;
  std::optional<std::size_t> k_max;
  std::vector<std::size_t> n_grid;
  std::optional<double> eps1;
  double t = 0.0;
  double dt = 0.0;
  double cap = 1.0;
  double tolerance = 0.0;
  std::optional<double> theta;
  std::optional<Matrix> lattice;
  std::string observable;
  bool refinement = true;
  std::optional<Case> expect_case;
  std::optional<double> expect_value;

  StepMeasure step_measure() const;
};

// Validates a raw configuration and fills every default. Accepts either a
// configuration object or a manifest (an object holding "config" and
// "versions"). Unknown keys, keys that do not apply to the kind, and badly
// typed values raise ConfigurationError naming the key.
ExperimentConfig parse_config(const nlohmann::json& raw);

// The resolved configuration, restricted to the keys of its kind.
nlohmann::json to_json(const ExperimentConfig& config);

struct ExperimentResult {
  bool pass = true;
  nlohmann::json report;  // no wall-clock entries, so reruns compare equal
  std::vector<std::string> series_columns;
  std::vector<std::vector<double>> series;
  double wall_clock_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// 0 on pass, 2 on a tolerance failure.
inline int exit_code(const ExperimentResult& result) { return result.pass ? 0 : 2; }

// Library, compiler and dependency versions recorded in manifests.
nlohmann::json versions();

// Writes report.json, series.csv and manifest.json into `dir`, creating it
// when missing. The manifest holds the resolved config, versions, seed,
// wall-clock time and thread count.
void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result);

// JSON for a lattice basis as a list of rows.
nlohmann::json lattice_to_json(const Matrix& basis);

}  // namespace homdyn

#endif  // HOMDYN_EXPERIMENT_HPP_
