#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "homdyn/catalog.hpp"
#include "homdyn/errors.hpp"
#include "homdyn/experiment.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::string example;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> trials;
  std::optional<double> eps1;
  std::optional<double> t;
  std::optional<double> dt;
  std::optional<double> tolerance;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config or manifest file");
  cmd->add_option("--example", o.example, "canned example name (see list-examples)");
  cmd->add_option("--seed", o.seed, "64-bit seed");
  cmd->add_option("--out", o.out, "output directory (default: homdyn-<kind>)");
  cmd->add_option("--steps", o.steps, "walk length");
  cmd->add_option("--trials", o.trials, "independent trials");
  cmd->add_option("--eps1", o.eps1, "large-deviation threshold in cocycle units");
  cmd->add_option("--t", o.t, "renewal time");
  cmd->add_option("--dt", o.dt, "diagonal-orbit step");
  cmd->add_option("--tolerance", o.tolerance, "pass/fail tolerance");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw homdyn::ConfigurationError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw homdyn::ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

int run(const std::string& kind, const Overrides& o) {
  json raw = json::object();
  if (!o.config.empty()) {
    raw = load_json(o.config);
    if (raw.is_object() && raw.contains("config") && raw.contains("versions")) raw = raw["config"];
    if (!raw.is_object()) throw homdyn::ConfigurationError("config: expected a JSON object");
  }
  if (!kind.empty()) {
    if (raw.contains("kind") && raw["kind"] != kind) {
      throw homdyn::ConfigurationError("config key 'kind': file says " + raw["kind"].dump() + " but the command is '" +
                                       kind + "'");
    }
    raw["kind"] = kind;
  }
  if (!o.example.empty()) {
    raw.erase("geometry");
    raw["example"] = o.example;
  }
  if (o.seed) raw["seed"] = *o.seed;
  if (o.steps) raw["steps"] = *o.steps;
  if (o.trials) raw["trials"] = *o.trials;
  if (o.eps1) raw["eps1"] = *o.eps1;
  if (o.t) raw["t"] = *o.t;
  if (o.dt) raw["dt"] = *o.dt;
  if (o.tolerance) raw["tolerance"] = *o.tolerance;

  const homdyn::ExperimentConfig config = homdyn::parse_config(raw);
  const homdyn::ExperimentResult result = homdyn::run_experiment(config);
  const std::string out = o.out.empty() ? "homdyn-" + std::string(homdyn::to_string(config.kind)) : o.out;
  homdyn::write_artifacts(out, config, result);
  std::cout << result.report.dump(2) << '\n';
  return homdyn::exit_code(result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on homogeneous bundles over SL2 boundaries: classifier and experiment harness"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string chosen;
  for (const std::string& kind : homdyn::experiment_kinds()) {
    CLI::App* cmd = app.add_subcommand(kind, "run the " + kind + " experiment");
    add_common(cmd, overrides);
    cmd->callback([&chosen, kind] { chosen = kind; });
  }
  CLI::App* generic = app.add_subcommand("run", "run the experiment named by the config's \"kind\"");
  add_common(generic, overrides);
  generic->callback([&chosen] { chosen = ""; });
  CLI::App* list = app.add_subcommand("list-examples", "print the canned example catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      std::cout << homdyn::list_examples();
      return 0;
    }
    if (generic->parsed() && overrides.config.empty()) {
      throw homdyn::ConfigurationError("run: --config is required");
    }
    return run(chosen, overrides);
  } catch (const homdyn::Error& e) {
    std::cerr << "homdyn: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "homdyn: " << e.what() << '\n';
    return 1;
  }
}
