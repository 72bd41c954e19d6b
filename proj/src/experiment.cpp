#include "homdyn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/version.hpp>

#include "homdyn/catalog.hpp"
#include "homdyn/errors.hpp"
#include "homdyn/parallel.hpp"
#include "homdyn/rng.hpp"
#include "homdyn/walk.hpp"

#ifndef HOMDYN_VERSION
#define HOMDYN_VERSION "0.0.0"
#endif

namespace homdyn {

using nlohmann::json;

namespace {

constexpr ExperimentKind kAllKinds[] = {ExperimentKind::kClassify, ExperimentKind::kWalk,     ExperimentKind::kLyapunov,
                                        ExperimentKind::kLdp,      ExperimentKind::kRenewal,  ExperimentKind::kDrift,
                                        ExperimentKind::kEquidist, ExperimentKind::kDecompose};

// Keys accepted by each kind besides "kind" and "seed".
const std::vector<std::string>& kind_keys(ExperimentKind kind) {
  static const std::map<ExperimentKind, std::vector<std::string>> table = {
      {ExperimentKind::kClassify, {"example", "geometry", "expect"}},
      {ExperimentKind::kWalk, {"example", "geometry", "mu", "steps", "trials", "theta", "lattice", "cap", "stride"}},
      {ExperimentKind::kLyapunov, {"mu", "steps", "trials", "expect", "tolerance"}},
      {ExperimentKind::kLdp,
       {"mu", "eps1", "n_grid", "trials", "theta", "lyapunov_steps", "lyapunov_trials", "tolerance"}},
      {ExperimentKind::kRenewal,
       {"mu", "t", "k_max", "trials", "theta", "tolerance", "samples", "burn_in", "n_grid", "eps1", "lyapunov_steps",
        "lyapunov_trials", "observable"}},
      {ExperimentKind::kDrift, {"mu", "samples", "steps", "word_length", "tolerance"}},
      {ExperimentKind::kEquidist,
       {"example", "geometry", "mu", "steps", "trials", "dt", "cap", "tolerance", "lyapunov_steps", "lyapunov_trials",
        "stride", "refinement", "theta", "lattice"}},
      {ExperimentKind::kDecompose, {"example", "geometry", "mu", "steps", "trials", "tolerance", "theta", "lattice"}},
  };
  return table.at(kind);
}

bool has_key(ExperimentKind kind, const std::string& key) {
  const auto& keys = kind_keys(kind);
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

bool uses_geometry(ExperimentKind kind) { return has_key(kind, "geometry"); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (tag * 0x9e3779b97f4a7c15ULL));
}

// ---- JSON readers; every error names the offending key ----

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigurationError("config key '" + key + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (allowed.count(key) == 0) bad(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double read_double(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(key, "expected a finite number");
  return d;
}

std::size_t read_count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::size_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e18) return static_cast<std::size_t>(d);
  }
  bad(key, "expected a non-negative integer");
}

bool is_auto(const json& v) { return v.is_string() && v.get<std::string>() == "auto"; }

Matrix read_matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) bad(key, "expected a non-empty list of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
  if (cols == 0) bad(key, "expected a non-empty list of rows");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) bad(key, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          read_double(v[i][j], key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> read_int_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected a list of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad(key, "expected a list of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

void read_geometry(const json& v, ExperimentConfig& cfg) {
  if (!v.is_object()) bad("geometry", "expected an object with 'flag' and 'embedding'");
  reject_unknown(v, "geometry", {"flag", "embedding"});
  if (!v.contains("flag") || !v.contains("embedding")) bad("geometry", "needs both 'flag' and 'embedding'");

  const json& f = v["flag"];
  if (!f.is_object()) bad("geometry.flag", "expected an object");
  reject_unknown(f, "geometry.flag", {"n", "dims", "r0_blocks"});
  FlagConfig flag;
  if (!f.contains("n") || !f["n"].is_number_integer()) bad("geometry.flag.n", "expected an integer");
  flag.n = f["n"].get<int>();
  if (!f.contains("dims")) bad("geometry.flag.dims", "missing");
  flag.dims = read_int_list(f["dims"], "geometry.flag.dims");
  if (f.contains("r0_blocks")) flag.r0_blocks = read_int_list(f["r0_blocks"], "geometry.flag.r0_blocks");
  try {
    flag.validate();
  } catch (const ConfigurationError& e) {
    bad("geometry.flag", e.what());
  }

  const json& e = v["embedding"];
  if (!e.is_object()) bad("geometry.embedding", "expected an object");
  reject_unknown(e, "geometry.embedding", {"e", "x", "f", "group"});
  EmbeddingSpec emb;
  for (const char* name : {"e", "x", "f"}) {
    if (!e.contains(name)) bad(std::string("geometry.embedding.") + name, "missing");
  }
  emb.triple.e = read_matrix(e["e"], "geometry.embedding.e");
  emb.triple.x = read_matrix(e["x"], "geometry.embedding.x");
  emb.triple.f = read_matrix(e["f"], "geometry.embedding.f");
  if (e.contains("group")) {
    const json& g = e["group"];
    if (g == "SL2") {
      emb.group = AmbientGroup::kSL2;
    } else if (g == "PGL2") {
      emb.group = AmbientGroup::kPGL2;
    } else {
      bad("geometry.embedding.group", "expected \"SL2\" or \"PGL2\"");
    }
  }
  for (const Matrix* m : {&emb.triple.e, &emb.triple.x, &emb.triple.f}) {
    if (m->rows() != flag.n || m->cols() != flag.n) bad("geometry.embedding", "matrices must be n x n");
  }
  try {
    emb.validate();
  } catch (const ConfigurationError& err) {
    bad("geometry.embedding", err.what());
  }
  cfg.flag = flag;
  cfg.embedding = emb;
}

void read_measure(const json& v, ExperimentConfig& cfg) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    const auto names = canned_measure_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) bad("mu", "unknown canned measure '" + name + "'");
    cfg.measure = name;
    cfg.atoms.clear();
    return;
  }
  if (!v.is_object()) bad("mu", "expected a canned measure name or {\"atoms\": [...]}");
  reject_unknown(v, "mu", {"atoms"});
  if (!v.contains("atoms") || !v["atoms"].is_array() || v["atoms"].empty()) bad("mu.atoms", "expected a non-empty list");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < v["atoms"].size(); ++i) {
    const json& a = v["atoms"][i];
    const std::string key = "mu.atoms[" + std::to_string(i) + "]";
    if (!a.is_object()) bad(key, "expected {\"weight\", \"matrix\"}");
    reject_unknown(a, key, {"weight", "matrix"});
    if (!a.contains("weight") || !a.contains("matrix")) bad(key, "needs 'weight' and 'matrix'");
    const Matrix m = read_matrix(a["matrix"], key + ".matrix");
    if (m.rows() != 2 || m.cols() != 2) bad(key + ".matrix", "expected a 2 x 2 matrix");
    atoms.push_back({read_double(a["weight"], key + ".weight"), Matrix2(m)});
  }
  try {
    StepMeasure check(atoms);
  } catch (const Error& err) {
    bad("mu", err.what());
  }
  cfg.measure.clear();
  cfg.atoms = std::move(atoms);
}

std::vector<std::size_t> grid(std::size_t from, std::size_t to, std::size_t by) {
  std::vector<std::size_t> out;
  for (std::size_t n = from; n <= to; n += by) out.push_back(n);
  return out;
}

// Kind-specific defaults, applied before the user's values.
void apply_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kClassify:
      break;
    case ExperimentKind::kWalk:
      c.example = "ex-reducible";
      c.steps = 10000;
      c.trials = 100;
      c.cap = 1.0;
      c.stride = 100;
      break;
    case ExperimentKind::kLyapunov:
      c.measure = "positive-pair";
      c.steps = 10000;
      c.trials = 1000;
      c.tolerance = 1e-12;
      break;
    case ExperimentKind::kLdp:
      c.measure = "rotation-diagonal";
      c.n_grid = grid(200, 2000, 200);
      c.trials = 100000;
      c.theta = 0.0;
      c.lyapunov_steps = 10000;
      c.lyapunov_trials = 1000;
      c.tolerance = 0.9;
      break;
    case ExperimentKind::kRenewal:
      c.measure = "unipotent-pair";
      c.t = 25.0;
      c.trials = 20000;
      c.theta = 0.7;
      c.tolerance = 0.05;
      c.samples = 20000;
      c.burn_in = 200;
      c.n_grid = grid(10, 70, 10);
      c.lyapunov_steps = 10000;
      c.lyapunov_trials = 1000;
      c.observable = "bump";
      break;
    case ExperimentKind::kDrift:
      c.measure = "positive-pair";
      c.samples = 50;
      c.steps = 60;
      c.word_length = 200;
      c.tolerance = 1e-2;
      break;
    case ExperimentKind::kEquidist:
      c.example = "ex-reducible";
      c.steps = 100000;
      c.trials = 200;
      c.dt = 0.05;
      c.cap = 1.0;
      c.tolerance = 0.05;
      c.lyapunov_steps = 10000;
      c.lyapunov_trials = 200;
      c.stride = 100;
      c.refinement = true;
      break;
    case ExperimentKind::kDecompose:
      c.example = "ex-principal-sl3";
      c.steps = 100000;
      c.trials = 40;
      c.tolerance = 0.05;
      break;
  }
}

// ---- geometry helpers ----

struct Geometry {
  FlagConfig flag;
  EmbeddingSpec embedding;
};

Geometry geometry_of(const ExperimentConfig& c) {
  if (!c.example.empty()) {
    const CannedExample& ex = find_example(c.example);
    return {ex.flag, ex.embedding};
  }
  if (c.flag && c.embedding) return {*c.flag, *c.embedding};
  throw ConfigurationError("config key 'example': an example name or a 'geometry' object is required");
}

FibreAction action_for(Case label) {
  switch (label) {
    case Case::kCase1:
      throw ConfigurationError("Case1: the H-orbit on G/Q is compact and carries no fibre walk");
    case Case::kCase2_1:
      return FibreAction::kTrivial;
    case Case::kCase2_2:
      return FibreAction::kIwasawaSign;
    case Case::kCase2_3a:
    case Case::kCase2_3b:
      break;
  }
  return FibreAction::kSectionedMorphism;
}

// A lattice in general position: upper unitriangular with irrational entries.
LatticePoint generic_lattice(int k) {
  if (k == 2) return homdyn::generic_lattice();
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  Matrix b = Matrix::Identity(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) b(i, j) = std::fmod(golden * (i + 2 * j + 1), 1.0);
  return reduce(b);
}

// Attracting eigendirection of the first hyperbolic atom, oriented into the
// cone when there is one; angle 0.7 when no atom is hyperbolic.
Vector2 default_start(const StepMeasure& mu, const ConeDetection& cone) {
  for (const Atom& atom : mu.atoms()) {
    Eigen::EigenSolver<Matrix2> es(atom.g);
    const auto ev = es.eigenvalues();
    if (std::abs(ev(0).imag()) > 0.0 || std::abs(std::abs(ev(0).real()) - std::abs(ev(1).real())) < 1e-9) continue;
    const int top = std::abs(ev(0).real()) > std::abs(ev(1).real()) ? 0 : 1;
    Vector2 v = es.eigenvectors().col(top).real().normalized();
    if (cone.verdict == Tristate::kTrue && v.dot(unit_at(cone.cone.center())) < 0.0) v = -v;
    return v;
  }
  return unit_at(0.7);
}

BundlePoint start_point(const ExperimentConfig& c, const StepMeasure& mu, int fibre_dim) {
  const ConeDetection cone = detect_cone(mu);
  const Vector2 theta = c.theta ? unit_at(*c.theta) : default_start(mu, cone);
  if (c.lattice) {
    if (c.lattice->rows() != fibre_dim || c.lattice->cols() != fibre_dim) {
      bad("lattice", "expected a " + std::to_string(fibre_dim) + " x " + std::to_string(fibre_dim) + " basis");
    }
    try {
      return {theta, reduce(*c.lattice)};
    } catch (const PreconditionError& e) {
      bad("lattice", e.what());
    }
  }
  return {theta, generic_lattice(fibre_dim)};
}

// ---- report helpers ----

json estimate(double value, double standard_error) { return {{"value", value}, {"standard_error", standard_error}}; }
json exact(double value) { return {{"value", value}, {"deterministic", true}}; }
json statistic(double value, double tolerance) { return {{"value", value}, {"tolerance", tolerance}}; }

json walk_estimate(const WalkReport& r) {
  json j = {{"estimator", r.estimator}, {"value", r.estimate}, {"trials", r.trials}, {"steps", r.steps}};
  if (r.deterministic) {
    j["deterministic"] = true;
  } else {
    j["standard_error"] = r.standard_error;
  }
  return j;
}

json diagnostics_json(const CaseLabel& label) {
  const ClassifierDiagnostics& d = label.diagnostics;
  json blocks = json::array();
  for (const BlockExtension& b : d.blocks) {
    blocks.push_back({{"block", b.block},
                      {"offset", b.offset},
                      {"size", b.size},
                      {"absorbed", b.absorbed},
                      {"extendable", b.extendable},
                      {"residual", b.residual}});
  }
  return {{"dim_h_cap_q", d.dim_h_cap_q},
          {"dim_qh_cap_r0", d.dim_qh_cap_r0},
          {"irreducible_components", d.irreducible_components},
          {"intersection_nilpotent", d.intersection_nilpotent},
          {"blocks", blocks},
          {"max_extension_residual", d.max_extension_residual},
          {"exact", d.exact},
          {"ill_conditioned", d.ill_conditioned},
          {"warnings", d.warnings}};
}

void quantile_series(ExperimentResult& out, const std::string& a, const std::vector<double>& qa, const std::string& b,
                     const std::vector<double>& qb) {
  out.series_columns = {"quantile", a, b};
  for (std::size_t i = 0; i < qa.size(); ++i) {
    out.series.push_back({static_cast<double>(i) / static_cast<double>(qa.size() - 1), qa[i], qb[i]});
  }
}

// ---- experiments ----

ExperimentResult run_classify(const ExperimentConfig& c) {
  const Geometry g = geometry_of(c);
  const CaseLabel label = classify(g.flag, g.embedding);
  ExperimentResult out;
  out.report["label"] = to_string(label.label);
  out.report["diagnostics"] = diagnostics_json(label);
  out.report["deterministic"] = true;
  std::optional<Case> expected = c.expect_case;
  if (!expected && !c.example.empty()) expected = find_example(c.example).expected;
  if (expected) {
    out.report["expected"] = to_string(*expected);
    out.pass = label.label == *expected;
  }
  out.series_columns = {"block", "offset", "size", "absorbed", "extendable", "residual"};
  for (const BlockExtension& b : label.diagnostics.blocks) {
    out.series.push_back({double(b.block), double(b.offset), double(b.size), double(b.absorbed), double(b.extendable),
                          b.residual});
  }
  return out;
}

ExperimentResult run_walk(const ExperimentConfig& c) {
  const Geometry g = geometry_of(c);
  const StepMeasure mu = c.step_measure();
  const CaseLabel label = classify(g.flag, g.embedding);
  const FibreAction action = action_for(label.label);
  const CircleSection section = default_section(mu, g.embedding.group == AmbientGroup::kPGL2);
  const CocycleHandle alpha = bundle_cocycle(g.flag, g.embedding, action, section);
  const BundlePoint x0 = start_point(c, mu, alpha.fibre_dim());
  CesaroOptions options;
  options.stride = c.stride;
  options.fibre_range = c.cap;
  const CesaroResult r = cesaro_distribution(mu, x0, c.steps, c.trials, capped_shortest_vector(c.cap), alpha, c.seed, options);

  ExperimentResult out;
  out.report["label"] = to_string(label.label);
  out.report["fibre_action"] = to_string(action);
  out.report["section"] = to_string(section.mode());
  out.report["theta0"] = exact(circle_angle(x0.theta));
  out.report["lattice0"] = lattice_to_json(x0.z.basis());
  out.report["cesaro_mean"] = estimate(r.mean, r.standard_error);
  out.report["product_diagnostic"] = {{"value", r.product_diagnostic}, {"statistic", "cramers_v"}};
  out.report["fibre_constant"] = r.fibre_constant;
  out.series_columns = {"sample", "base_angle", "fibre_value"};
  for (std::size_t i = 0; i < r.fibre.size(); ++i) {
    out.series.push_back({static_cast<double>(i), r.base.values()[i], r.fibre.values()[i]});
  }
  return out;
}

ExperimentResult run_lyapunov(const ExperimentConfig& c) {
  const WalkReport r = lyapunov(c.step_measure(), c.steps, c.trials, c.seed);
  ExperimentResult out;
  out.report["lyapunov"] = walk_estimate(r);
  out.report["cocycle_drift"] = r.deterministic ? exact(cocycle_drift(r)) : estimate(cocycle_drift(r), 2.0 * r.standard_error);
  if (c.expect_value) {
    const double allowed = c.tolerance + 3.0 * (r.deterministic ? 0.0 : r.standard_error);
    out.report["expected"] = *c.expect_value;
    out.report["allowed_deviation"] = allowed;
    out.pass = std::abs(r.estimate - *c.expect_value) <= allowed;
  }
  out.series_columns = {"steps", "estimate", "standard_error"};
  out.series.push_back({static_cast<double>(r.steps), r.estimate, r.standard_error});
  return out;
}

json ldp_json(const LdpTable& t) {
  json rows = json::array();
  for (const LdpRow& r : t.rows) {
    const double p = r.tail;
    rows.push_back({{"n", r.n},
                    {"events", r.events},
                    {"tail", estimate(p, std::sqrt(p * (1.0 - p) / static_cast<double>(t.trials)))},
                    {"upper_bound", r.upper_bound}});
  }
  return {{"drift", t.drift},     {"eps1", t.eps1}, {"trials", t.trials},         {"rows", rows},
          {"slope", t.slope},     {"intercept", t.intercept}, {"r_squared", t.r_squared},
          {"fit_valid", t.fit_valid}};
}

ExperimentResult run_ldp(const ExperimentConfig& c) {
  const StepMeasure mu = c.step_measure();
  const WalkReport lyap = lyapunov(mu, c.lyapunov_steps, c.lyapunov_trials, derive_seed(c.seed, 1));
  const double drift = cocycle_drift(lyap);
  const double eps1 = c.eps1.value_or(drift / 4.0);
  const LdpTable table = ldp_tail(mu, drift, eps1, c.n_grid, c.trials, derive_seed(c.seed, 2), unit_at(*c.theta));
  ExperimentResult out;
  out.report["lyapunov"] = walk_estimate(lyap);
  out.report["table"] = ldp_json(table);
  out.report["min_r_squared"] = c.tolerance;
  out.pass = table.fit_valid && table.slope < 0.0 && table.r_squared >= c.tolerance;
  out.series_columns = {"n", "events", "tail", "upper_bound"};
  for (const LdpRow& r : table.rows) {
    out.series.push_back({static_cast<double>(r.n), static_cast<double>(r.events), r.tail, r.upper_bound});
  }
  return out;
}

RenewalObservable renewal_observable(const std::string& name) {
  if (name == "zero") return {[](const Vector2&, double) { return 0.0; }, 1.0, 0.0};
  // (1 + y_1^2) (1 - u^2)^4 on |u| < 1.
  return {[](const Vector2& y, double u) {
            if (std::abs(u) >= 1.0) return 0.0;
            const double s = 1.0 - u * u;
            return (1.0 + y(0) * y(0)) * s * s * s * s;
          },
          1.0, 2.0};
}

ExperimentResult run_renewal(const ExperimentConfig& c) {
  const StepMeasure mu = c.step_measure();
  const WalkReport lyap = lyapunov(mu, c.lyapunov_steps, c.lyapunov_trials, derive_seed(c.seed, 1));
  const double drift = cocycle_drift(lyap);
  if (!(drift > 0.0)) throw ConfigurationError("renewal: the measure has no positive drift");
  const Vector2 w = unit_at(*c.theta);
  const double eps1 = c.eps1.value_or(drift / 4.0);
  const LdpTable tail = ldp_tail(mu, drift, eps1, c.n_grid, c.trials, derive_seed(c.seed, 2), w);
  const std::size_t k_max = c.k_max.value_or(static_cast<std::size_t>(std::ceil(8.0 * c.t / drift)));
  const RenewalObservable obs = renewal_observable(c.observable);
  const RenewalEstimate r = renewal_sum(mu, obs, w, c.t, k_max, c.trials, derive_seed(c.seed, 3), drift, &tail);
  const EmpiricalMeasure nu = sample_hitting_measure(mu, w, c.burn_in, c.samples, derive_seed(c.seed, 4));
  const double limit = renewal_limit(obs, nu, drift);
  const double error = std::abs(r.estimate - limit);
  const double relative = limit != 0.0 ? error / std::abs(limit) : error;

  ExperimentResult out;
  out.report["lyapunov"] = walk_estimate(lyap);
  out.report["renewal_sum"] = estimate(r.estimate, r.standard_error);
  out.report["k_max"] = r.k_max;
  out.report["truncation"] = {{"bound", r.truncation_bound},
                              {"method", r.truncation_method},
                              {"warning", r.truncation_warning}};
  out.report["tail_model"] = ldp_json(tail);
  out.report["limit"] = {{"value", limit}, {"samples", nu.size()}, {"monte_carlo", true}};
  out.report["relative_error"] = statistic(relative, c.tolerance);
  out.pass = relative <= c.tolerance && !r.truncation_warning;
  out.series_columns = {"t", "estimate", "standard_error", "limit"};
  out.series.push_back({c.t, r.estimate, r.standard_error, limit});
  return out;
}

ExperimentResult run_drift(const ExperimentConfig& c) {
  const StepMeasure mu = c.step_measure();
  if (c.steps == 0 || c.steps > c.word_length) bad("steps", "must lie in [1, word_length]");
  struct Row {
    double value = 0.0, limit = 0.0;
    bool degenerate_zero = true, ill_conditioned = false;
  };
  std::vector<Row> rows(c.samples);
  parallel_for(c.samples, [&](std::size_t i) {
    Engine rng = substream(c.seed, i);
    const Word a = mu.sample_word(c.word_length, rng);
    const Word a2 = mu.sample_word(c.word_length, rng);
    const Word b = mu.sample_word(c.word_length, rng);
    const Word b2 = mu.sample_word(c.word_length, rng);
    Row& row = rows[i];
    row.value = cross_ratio(a, a2, b, b2, c.steps, c.steps).value;
    const CrossRatio lim = cross_ratio_limit(a, a2, b, b2);
    row.limit = lim.value;
    row.ill_conditioned = lim.ill_conditioned;
    row.degenerate_zero =
        cross_ratio(a, a2, b, b, c.steps, c.steps).value == 0.0 && cross_ratio(a, a, b, b2, c.steps, c.steps).value == 0.0;
  });
  double max_diff = 0.0;
  bool degenerate_zero = true;
  std::size_t ill = 0;
  ExperimentResult out;
  out.series_columns = {"sample", "cross_ratio", "limit", "abs_diff"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = std::abs(rows[i].value - rows[i].limit);
    max_diff = std::max(max_diff, d);
    degenerate_zero = degenerate_zero && rows[i].degenerate_zero;
    ill += rows[i].ill_conditioned ? 1 : 0;
    out.series.push_back({static_cast<double>(i), rows[i].value, rows[i].limit, d});
  }
  out.report["samples"] = c.samples;
  out.report["n"] = c.steps;
  out.report["max_abs_diff"] = statistic(max_diff, c.tolerance);
  out.report["degenerate_exact_zero"] = degenerate_zero;
  out.report["ill_conditioned_limits"] = ill;
  out.report["deterministic"] = true;
  out.pass = max_diff <= c.tolerance && degenerate_zero;
  return out;
}

ExperimentResult run_equidist(const ExperimentConfig& c) {
  const Geometry g = geometry_of(c);
  const StepMeasure mu = c.step_measure();
  const CaseLabel label = classify(g.flag, g.embedding);
  const FibreAction action = action_for(label.label);
  if (action == FibreAction::kSectionedMorphism) {
    throw ConfigurationError("equidist: " + std::string(to_string(label.label)) +
                             " has no diagonal fibre flow; use decompose for Case2_3a");
  }
  const CircleSection section = default_section(mu, g.embedding.group == AmbientGroup::kPGL2);
  const CocycleHandle alpha = bundle_cocycle(g.flag, g.embedding, action, section);
  const BundlePoint x0 = start_point(c, mu, alpha.fibre_dim());
  ExperimentResult out;
  out.report["label"] = to_string(label.label);
  out.report["fibre_action"] = to_string(action);
  out.report["theta0"] = exact(circle_angle(x0.theta));
  out.report["lattice0"] = lattice_to_json(x0.z.basis());
  const Observable f = capped_shortest_vector(c.cap);

  if (action == FibreAction::kTrivial) {
    // The fibre never moves: compare against the orbit "average" at T = 0.
    CesaroOptions options;
    options.stride = c.stride;
    options.fibre_range = c.cap;
    const CesaroResult r = cesaro_distribution(mu, x0, c.steps, c.trials, f, alpha, c.seed, options);
    const double ks = ks_statistic(r.fibre.values(), {f(x0.z)});
    out.report["ks"] = statistic(ks, c.tolerance);
    out.report["fibre_constant"] = r.fibre_constant;
    out.report["cesaro_mean"] = estimate(r.mean, r.standard_error);
    out.pass = ks <= c.tolerance && r.fibre_constant;
    const EmpiricalMeasure dirac(MetricSpace::kLine, {f(x0.z)});
    quantile_series(out, "cesaro", r.fibre.quantile_table(), "orbit", dirac.quantile_table());
    return out;
  }

  EquidistConfig ec;
  ec.steps = c.steps;
  ec.trials = c.trials;
  ec.seed = c.seed;
  ec.dt = c.dt;
  ec.cap = c.cap;
  ec.ks_tolerance = c.tolerance;
  ec.product_tolerance = c.tolerance;
  ec.lyapunov_steps = c.lyapunov_steps;
  ec.lyapunov_trials = c.lyapunov_trials;
  ec.stride = c.stride;
  ec.check_refinement = c.refinement;
  const EquidistReport r = equidist_experiment(mu, alpha, x0, ec);
  out.report["lyapunov"] = walk_estimate(r.lyapunov);
  out.report["cone"] = to_string(r.cone);
  out.report["signed_orbit"] = r.signed_orbit;
  out.report["horizon"] = r.horizon;
  out.report["ks"] = statistic(r.ks, c.tolerance);
  out.report["product_diagnostic"] = statistic(r.product_diagnostic, c.tolerance);
  out.report["cesaro_mean"] = estimate(r.cesaro_mean, r.cesaro_standard_error);
  out.report["orbit_mean"] = exact(r.orbit_mean);
  if (r.ks_quarter) out.report["ks_quarter_steps"] = *r.ks_quarter;
  out.report["monotone"] = r.monotone;
  out.pass = r.pass;
  quantile_series(out, "cesaro", r.cesaro_quantiles, "orbit", r.orbit_quantiles);
  return out;
}

ExperimentResult run_decompose(const ExperimentConfig& c) {
  const Geometry g = geometry_of(c);
  const StepMeasure mu = c.step_measure();
  const CaseLabel label = classify(g.flag, g.embedding);
  if (label.label != Case::kCase2_3a && label.label != Case::kCase2_1) {
    throw ConfigurationError("decompose: " + std::string(to_string(label.label)) +
                             " has no morphism H -> S to compare against");
  }
  const FibreAction action = action_for(label.label);
  const CircleSection section = default_section(mu, g.embedding.group == AmbientGroup::kPGL2);
  const CocycleHandle bundle = bundle_cocycle(g.flag, g.embedding, action, section);
  const CocycleHandle direct =
      action == FibreAction::kTrivial
          ? bundle
          : morphism_cocycle(extended_block_morphism(g.flag, g.embedding, *fibre_block(g.flag)), std::nullopt);
  const BundlePoint x0 = start_point(c, mu, bundle.fibre_dim());
  const DecomposeReport r = decompose_experiment(mu, bundle, direct, x0, c.steps, c.trials, c.seed, c.tolerance);
  ExperimentResult out;
  out.report["label"] = to_string(label.label);
  out.report["fibre_action"] = to_string(action);
  out.report["theta0"] = exact(circle_angle(x0.theta));
  out.report["lattice0"] = lattice_to_json(x0.z.basis());
  out.report["ks"] = statistic(r.ks, c.tolerance);
  out.report["bundle_mean"] = r.bundle_mean;
  out.report["direct_mean"] = r.direct_mean;
  out.report["trivial_fibre_constant"] = r.trivial_fibre_constant;
  out.pass = r.pass;
  quantile_series(out, "bundle", r.bundle_quantiles, "direct", r.direct_quantiles);
  return out;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kClassify:
      return "classify";
    case ExperimentKind::kWalk:
      return "walk";
    case ExperimentKind::kLyapunov:
      return "lyapunov";
    case ExperimentKind::kLdp:
      return "ldp";
    case ExperimentKind::kRenewal:
      return "renewal";
    case ExperimentKind::kDrift:
      return "drift";
    case ExperimentKind::kEquidist:
      return "equidist";
    case ExperimentKind::kDecompose:
      break;
  }
  return "decompose";
}

ExperimentKind kind_from_string(const std::string& name) {
  for (ExperimentKind k : kAllKinds)
    if (name == to_string(k)) return k;
  throw ConfigurationError("config key 'kind': unknown experiment '" + name + "'");
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (ExperimentKind k : kAllKinds) out.emplace_back(to_string(k));
  return out;
}

StepMeasure ExperimentConfig::step_measure() const {
  if (!measure.empty()) return canned_measure(measure);
  if (atoms.empty()) throw ConfigurationError("config key 'mu': no step measure given");
  return StepMeasure(atoms);
}

ExperimentConfig parse_config(const json& input) {
  json raw = input;
  if (raw.is_object() && raw.contains("config") && raw.contains("versions")) raw = raw["config"];
  if (!raw.is_object()) throw ConfigurationError("config: expected a JSON object");
  if (!raw.contains("kind") || !raw["kind"].is_string()) bad("kind", "expected one of the experiment names");

  ExperimentConfig c;
  c.kind = kind_from_string(raw["kind"].get<std::string>());
  apply_defaults(c);

  for (const auto& [key, value] : raw.items()) {
    if (key == "kind") continue;
    if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        bad("seed", "expected an unsigned 64-bit integer");
      }
      c.seed = value.get<std::uint64_t>();
      continue;
    }
    if (!has_key(c.kind, key)) {
      bool known = false;
      for (ExperimentKind k : kAllKinds) known = known || has_key(k, key);
      bad(key, known ? std::string("does not apply to experiment '") + to_string(c.kind) + "'" : "unknown key");
    }
    if (key == "example") {
      if (!value.is_string()) bad(key, "expected an example name");
      find_example(value.get<std::string>());
      c.example = value.get<std::string>();
    } else if (key == "geometry") {
      read_geometry(value, c);
    } else if (key == "mu") {
      read_measure(value, c);
    } else if (key == "expect") {
      if (c.kind == ExperimentKind::kClassify) {
        if (!value.is_string()) bad(key, "expected a case label such as \"Case2_2\"");
        try {
          c.expect_case = case_from_string(value.get<std::string>());
        } catch (const Error& e) {
          bad(key, e.what());
        }
      } else {
        c.expect_value = read_double(value, key);
      }
    } else if (key == "steps") {
      c.steps = read_count(value, key);
    } else if (key == "trials") {
      c.trials = read_count(value, key);
    } else if (key == "samples") {
      c.samples = read_count(value, key);
    } else if (key == "burn_in") {
      c.burn_in = read_count(value, key);
    } else if (key == "stride") {
      c.stride = read_count(value, key);
    } else if (key == "word_length") {
      c.word_length = read_count(value, key);
    } else if (key == "lyapunov_steps") {
      c.lyapunov_steps = read_count(value, key);
    } else if (key == "lyapunov_trials") {
      c.lyapunov_trials = read_count(value, key);
    } else if (key == "k_max") {
      c.k_max = is_auto(value) ? std::nullopt : std::optional<std::size_t>(read_count(value, key));
    } else if (key == "n_grid") {
      if (!value.is_array() || value.empty()) bad(key, "expected a non-empty list of step counts");
      c.n_grid.clear();
      for (const auto& n : value) c.n_grid.push_back(read_count(n, key));
      if (!std::is_sorted(c.n_grid.begin(), c.n_grid.end())) bad(key, "must be increasing");
    } else if (key == "eps1") {
      c.eps1 = is_auto(value) ? std::nullopt : std::optional<double>(read_double(value, key));
      if (c.eps1 && !(*c.eps1 > 0.0)) bad(key, "must be positive");
    } else if (key == "t") {
      c.t = read_double(value, key);
    } else if (key == "dt") {
      c.dt = read_double(value, key);
    } else if (key == "cap") {
      c.cap = read_double(value, key);
      if (!(c.cap > 0.0)) bad(key, "must be positive");
    } else if (key == "tolerance") {
      c.tolerance = read_double(value, key);
      if (c.tolerance < 0.0) bad(key, "must be non-negative");
    } else if (key == "theta") {
      c.theta = is_auto(value) ? std::nullopt : std::optional<double>(read_double(value, key));
    } else if (key == "lattice") {
      c.lattice = is_auto(value) ? std::nullopt : std::optional<Matrix>(read_matrix(value, key));
    } else if (key == "observable") {
      if (value != "bump" && value != "zero") bad(key, "expected \"bump\" or \"zero\"");
      c.observable = value.get<std::string>();
    } else if (key == "refinement") {
      if (!value.is_boolean()) bad(key, "expected true or false");
      c.refinement = value.get<bool>();
    }
  }

  if (raw.contains("geometry")) {
    if (raw.contains("example")) bad("geometry", "give either 'example' or 'geometry', not both");
    c.example.clear();
  }
  if (uses_geometry(c.kind)) {
    if (c.example.empty() && !c.flag) bad("example", "an example name or a 'geometry' object is required");
    if (has_key(c.kind, "mu") && !raw.contains("mu")) {
      c.measure = c.example.empty() ? "positive-pair" : find_example(c.example).default_measure;
    }
  }
  if (has_key(c.kind, "steps") && c.steps == 0) bad("steps", "must be positive");
  if (has_key(c.kind, "trials") && c.trials == 0) bad("trials", "must be positive");
  if (has_key(c.kind, "samples") && c.samples == 0) bad("samples", "must be positive");
  if (has_key(c.kind, "stride") && c.stride == 0) bad("stride", "must be positive");
  if (has_key(c.kind, "lyapunov_trials") && c.lyapunov_trials == 0) bad("lyapunov_trials", "must be positive");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["seed"] = c.seed;
  auto put = [&](const std::string& key, json value) {
    if (has_key(c.kind, key)) j[key] = std::move(value);
  };
  if (!c.example.empty()) {
    put("example", c.example);
  } else if (c.flag && c.embedding) {
    put("geometry", {{"flag", {{"n", c.flag->n}, {"dims", c.flag->dims}, {"r0_blocks", c.flag->r0_blocks}}},
                     {"embedding",
                      {{"e", matrix_to_json(c.embedding->triple.e)},
                       {"x", matrix_to_json(c.embedding->triple.x)},
                       {"f", matrix_to_json(c.embedding->triple.f)},
                       {"group", to_string(c.embedding->group)}}}});
  }
  if (!c.measure.empty()) {
    put("mu", c.measure);
  } else {
    json atoms = json::array();
    for (const Atom& a : c.atoms) atoms.push_back({{"weight", a.weight}, {"matrix", matrix_to_json(a.g)}});
    put("mu", {{"atoms", atoms}});
  }
  if (c.kind == ExperimentKind::kClassify) {
    if (c.expect_case) j["expect"] = to_string(*c.expect_case);
  } else if (c.expect_value) {
    put("expect", *c.expect_value);
  }
  put("steps", c.steps);
  put("trials", c.trials);
  put("samples", c.samples);
  put("burn_in", c.burn_in);
  put("stride", c.stride);
  put("word_length", c.word_length);
  put("lyapunov_steps", c.lyapunov_steps);
  put("lyapunov_trials", c.lyapunov_trials);
  put("k_max", c.k_max ? json(*c.k_max) : json("auto"));
  put("n_grid", c.n_grid);
  put("eps1", c.eps1 ? json(*c.eps1) : json("auto"));
  put("t", c.t);
  put("dt", c.dt);
  put("cap", c.cap);
  put("tolerance", c.tolerance);
  put("theta", c.theta ? json(*c.theta) : json("auto"));
  put("lattice", c.lattice ? matrix_to_json(*c.lattice) : json("auto"));
  put("observable", c.observable);
  put("refinement", c.refinement);
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  switch (config.kind) {
    case ExperimentKind::kClassify:
      out = run_classify(config);
      break;
    case ExperimentKind::kWalk:
      out = run_walk(config);
      break;
    case ExperimentKind::kLyapunov:
      out = run_lyapunov(config);
      break;
    case ExperimentKind::kLdp:
      out = run_ldp(config);
      break;
    case ExperimentKind::kRenewal:
      out = run_renewal(config);
      break;
    case ExperimentKind::kDrift:
      out = run_drift(config);
      break;
    case ExperimentKind::kEquidist:
      out = run_equidist(config);
      break;
    case ExperimentKind::kDecompose:
      out = run_decompose(config);
      break;
  }
  json report = {{"kind", to_string(config.kind)}, {"seed", config.seed}, {"pass", out.pass}};
  report.update(out.report);
  out.report = std::move(report);
  out.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

json versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  std::ostringstream boost;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  std::ostringstream njson;
  njson << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
  return {{"homdyn", HOMDYN_VERSION},
          {"compiler", __VERSION__},
          {"cplusplus", __cplusplus},
          {"eigen", eigen.str()},
          {"boost", boost.str()},
          {"nlohmann_json", njson.str()}};
}

json lattice_to_json(const Matrix& basis) { return matrix_to_json(basis); }

void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out.precision(17);
    return out;
  };
  {
    std::ofstream out = open("report.json");
    out << result.report.dump(2) << '\n';
  }
  {
    std::ofstream out = open("series.csv");
    for (std::size_t i = 0; i < result.series_columns.size(); ++i) {
      out << (i ? "," : "") << result.series_columns[i];
    }
    out << '\n';
    for (const auto& row : result.series) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }
  {
    std::ofstream out = open("manifest.json");
    const json manifest = {{"config", to_json(config)},
                           {"versions", versions()},
                           {"seed", config.seed},
                           {"wall_clock_seconds", result.wall_clock_seconds},
                           {"threads", thread_count()}};
    out << manifest.dump(2) << '\n';
  }
}

}  // namespace homdyn
