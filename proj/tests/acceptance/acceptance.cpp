// Runs the fifteen acceptance criteria and prints one PASS/FAIL line each.
// Usage: acceptance [criterion numbers...]; no arguments runs all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "homdyn/boundary.hpp"
#include "homdyn/catalog.hpp"
#include "homdyn/classify.hpp"
#include "homdyn/cocycle.hpp"
#include "homdyn/experiment.hpp"
#include "homdyn/group.hpp"
#include "homdyn/walk.hpp"
#include "oracles.hpp"

using namespace homdyn;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

Vector2 random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  return unit_at(angle(rng));
}

ExperimentResult run(const json& raw) { return run_experiment(parse_config(raw)); }

Outcome iwasawa_reconstruction() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (int i = 0; i < 10000; ++i) {
      const Matrix g = oracle::random_sl(n, rng);
      const IwasawaFactors f = iwasawa_decompose(g);
      worst = std::max(worst, (g - f.k * f.a * f.nu).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt("max |g - k a n| = %.2e over 2 x 10^4 elements", worst)};
}

Outcome cocycle_identity() {
  const StepMeasure mu = canned_measure("positive-pair");
  const CircleSection cone = default_section(mu, false);
  const CannedExample& ss = find_example("ex-ss");
  const CocycleHandle iwasawa = iwasawa_sign_cocycle(cone);
  const std::vector<CocycleHandle> handles = {
      iwasawa,
      morphism_cocycle(Representation::symmetric_power(3)),
      bundle_cocycle(ss.flag, ss.embedding, FibreAction::kSectionedMorphism, cone),
      conjugate_cocycle(iwasawa, [](const Vector2& eta) {
        Matrix m(2, 2);
        m << 1.0, eta.x() * eta.y(), 0.0, 1.0;
        return m;
      }),
  };
  std::mt19937_64 rng(102);
  double worst = 0.0;
  std::set<std::string> kinds;
  for (const CocycleHandle& alpha : handles) {
    kinds.insert(to_string(alpha.kind()));
    for (int i = 0; i < 10000; ++i) {
      const Matrix2 g1 = oracle::random_sl2(rng), g2 = oracle::random_sl2(rng);
      worst = std::max(worst, cocycle_residual(alpha, g1, g2, random_direction(rng)));
    }
  }
  return {worst <= 1e-9 && kinds.size() == 3,
          fmt("max residual %.2e over 10^4 triples per handle, %.0f kinds", worst, static_cast<double>(kinds.size()))};
}

Outcome highest_weight_identity() {
  std::mt19937_64 rng(103);
  const Representation standard = Representation::standard();
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Matrix2 h = oracle::random_sl2(rng);
    const Vector2 xi = random_direction(rng);
    worst = std::max(worst, std::abs(iwasawa_cocycle(h, xi) - sigma_chi(h, xi, standard)));
  }
  return {worst <= 1e-10, fmt("max |sigma - sigma_chi| = %.2e over 10^4 samples", worst)};
}

using IntMatrix = std::vector<std::vector<long long>>;

IntMatrix to_integer(const Matrix& m, bool& integral) {
  IntMatrix out(m.rows(), std::vector<long long>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      out[i][j] = std::llround(m(i, j));
      integral = integral && static_cast<double>(out[i][j]) == m(i, j);
    }
  }
  return out;
}

IntMatrix int_bracket(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size();
  IntMatrix out(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
  return out;
}

IntMatrix scaled(const IntMatrix& a, long long s) {
  IntMatrix out = a;
  for (auto& row : out)
    for (auto& v : row) v *= s;
  return out;
}

Outcome principal_triple_exact() {
  bool ok = true;
  double worst_extension = 0.0;
  for (int m = 2; m <= 8; ++m) {
    const Sl2Triple t = principal_triple(m);
    bool integral = true;
    const IntMatrix e = to_integer(t.e, integral), x = to_integer(t.x, integral), f = to_integer(t.f, integral);
    ok = ok && integral;
    ok = ok && int_bracket(x, e) == scaled(e, 2) && int_bracket(x, f) == scaled(f, -2) && int_bracket(e, f) == x;
    const Sl2Extension ext = extend_sl2_triple(t.x, t.e);
    ok = ok && ext.f.has_value();
    if (ext.f) worst_extension = std::max(worst_extension, (*ext.f - t.f).cwiseAbs().maxCoeff());
    worst_extension = std::max(worst_extension, ext.residual);
  }
  return {ok && worst_extension == 0.0,
          fmt("integer brackets exact for m <= 8, extension residual %.1e", worst_extension)};
}

Outcome non_extendability() {
  const CannedExample& ex = find_example("ex-2.3.b");
  const std::vector<InducedBlock> blocks = induced_morphism(ex.flag, ex.embedding);
  const InducedBlock* block = nullptr;
  for (const InducedBlock& b : blocks)
    if (b.size == 3) block = &b;
  if (block == nullptr) return {false, "no induced 3 x 3 block"};
  const Sl2Extension ext = extend_sl2_triple(block->xbar, block->ebar);
  // Least-squares oracle over the stacked system [x, f] = -2 f, [e, f] = x.
  const int m = 3;
  Matrix a = Matrix::Zero(2 * m * m, m * m);
  Vector rhs = Vector::Zero(2 * m * m);
  for (int k = 0; k < m * m; ++k) {
    Matrix f = Matrix::Zero(m, m);
    f(k / m, k % m) = 1.0;
    const Matrix c1 = block->xbar * f - f * block->xbar + 2.0 * f;
    const Matrix c2 = block->ebar * f - f * block->ebar;
    for (int i = 0; i < m * m; ++i) {
      a(i, k) = c1(i / m, i % m);
      a(m * m + i, k) = c2(i / m, i % m);
    }
  }
  for (int i = 0; i < m * m; ++i) rhs(m * m + i) = block->xbar(i / m, i % m);
  const Vector sol = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  const double oracle_residual = (a * sol - rhs).norm();
  constexpr double kFrozen = 0.816496580927726;
  const bool pass = !ext.f && std::abs(ext.residual - oracle_residual) <= 1e-9 && std::abs(ext.residual - kFrozen) <= 1e-12;
  return {pass, fmt("no extension; residual %.15f, oracle %.15f, frozen %.15f", ext.residual, oracle_residual, kFrozen)};
}

Outcome classifier_corpus() {
  const std::vector<std::pair<std::string, Case>> expected = {{"ex-reducible", Case::kCase2_2},
                                                              {"ex-case-2.1-a", Case::kCase2_1},
                                                              {"ex-2.3.b", Case::kCase2_3b},
                                                              {"ex-principal-sl3", Case::kCase2_3a}};
  std::string detail;
  bool pass = true;
  for (const auto& [name, label] : expected) {
    const CannedExample& ex = find_example(name);
    const CaseLabel got = classify(ex.flag, ex.embedding);
    pass = pass && got.label == label && got.diagnostics.exact;
    detail += (detail.empty() ? "" : ", ") + name + " -> " + to_string(got.label);
  }
  return {pass, detail};
}

Outcome furstenberg_stationarity() {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 107;
  for (const char* name : {"positive-pair", "positive-triple"}) {
    const StepMeasure mu = canned_measure(name);
    const EmpiricalMeasure nu = sample_furstenberg(mu, 200, 100000, MetricSpace::kProjective, seed++);
    Engine rng = substream(seed++, 0);
    std::vector<double> pushed;
    pushed.reserve(nu.size());
    for (double a : nu.values()) pushed.push_back(projective_angle(mu.sample(rng) * unit_at(a)));
    const double w1 = nu.wasserstein1(EmpiricalMeasure(MetricSpace::kProjective, pushed));
    pass = pass && w1 <= 0.02;
    detail += (detail.empty() ? "" : ", ") + std::string(name) + fmt(" W1 %.4f", w1);
  }
  return {pass, detail};
}

Outcome limit_form_identity() {
  const StepMeasure mu = canned_measure("positive-pair");
  Engine rng = substream(108, 0);
  std::mt19937_64 angles(109);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Word a = mu.sample_word(60, rng);
    long scale = 0;
    const Matrix2 p = forward_product(a, 60, scale);
    const Vector2 phi = limit_form(a, 60).direction;
    const Vector2 v = random_direction(angles), w = random_direction(angles);
    const double lhs = (p * v).norm() / (p * w).norm();
    const double rhs = std::abs(phi.dot(v)) / std::abs(phi.dot(w));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-2, fmt("max deviation %.2e over 100 triples at n = 60", worst)};
}

Outcome cross_ratio_convergence() {
  const ExperimentResult r = run({{"kind", "drift"}, {"seed", 110}});
  const double diff = r.report["max_abs_diff"]["value"];
  return {r.pass && r.report["degenerate_exact_zero"] == true,
          fmt("max |cross ratio - limit| = %.2e over 50 quadruples, degenerate zeros ", diff) +
              (r.report["degenerate_exact_zero"] == true ? "exact" : "NOT exact")};
}

Outcome lyapunov_criterion() {
  const WalkReport diag = lyapunov(canned_measure("diagonal"), 10000, 1000, 111);
  const WalkReport half = lyapunov(canned_measure("half-diagonal"), 10000, 1000, 111);
  const bool exact = diag.deterministic && diag.estimate == std::log(2.0) && diag.standard_error == 0.0 &&
                     half.deterministic && std::abs(half.estimate - 0.5) <= 1e-12;
  const StepMeasure mu = canned_measure("positive-pair");
  const WalkReport a = lyapunov(mu, 10000, 1000, 112);
  const WalkReport b = lyapunov(mu, 10000, 1000, 113);
  const WalkReport again = lyapunov(mu, 10000, 1000, 112);
  const double combined = std::hypot(a.standard_error, b.standard_error);
  const double gap = std::abs(a.estimate - b.estimate);
  return {exact && gap <= 3.0 * combined && a.same_result(again),
          fmt("delta(diag 2) = %.15f; seeds 112/113: %.6f vs %.6f, gap %.2e", diag.estimate, a.estimate, b.estimate,
              gap) +
              fmt(" <= 3 x %.2e", combined)};
}

Outcome large_deviations() {
  const ExperimentResult r = run({{"kind", "ldp"}, {"seed", 114}});
  const json& t = r.report["table"];
  return {r.pass, fmt("slope %.4g, R^2 %.4f, eps1 %.4f over n = 200..2000, 10^5 trials", t["slope"].get<double>(),
                      t["r_squared"].get<double>(), t["eps1"].get<double>())};
}

Outcome renewal() {
  const ExperimentResult r = run({{"kind", "renewal"}, {"seed", 115}});
  return {r.pass, fmt("R f(w, 25) = %.5f, limit %.5f, relative error %.4f, truncation bound %.2e",
                      r.report["renewal_sum"]["value"].get<double>(), r.report["limit"]["value"].get<double>(),
                      r.report["relative_error"]["value"].get<double>(),
                      r.report["truncation"]["bound"].get<double>())};
}

Outcome equidistribution() {
  const ExperimentResult r = run({{"kind", "equidist"}, {"seed", 116}});
  const double quarter = r.report.contains("ks_quarter_steps") ? r.report["ks_quarter_steps"].get<double>() : NAN;
  return {r.pass && r.report["monotone"] == true,
          fmt("KS %.4f, product diagnostic %.4f, KS at n / 4 %.4f", r.report["ks"]["value"].get<double>(),
              r.report["product_diagnostic"]["value"].get<double>(), quarter)};
}

Outcome decomposability() {
  const ExperimentResult a = run({{"kind", "decompose"}, {"seed", 117}});
  const ExperimentResult b =
      run({{"kind", "equidist"}, {"example", "ex-case-2.1-a"}, {"seed", 118}, {"steps", 100000}, {"trials", 20}});
  return {a.pass && b.pass && b.report["fibre_constant"] == true,
          fmt("Case2_3a KS %.4f; Case2_1 fibre KS to the Dirac %.1f", a.report["ks"]["value"].get<double>(),
              b.report["ks"]["value"].get<double>()) +
              (b.report["fibre_constant"] == true ? ", constant" : ", NOT constant")};
}

Outcome harmonicity() {
  const StepMeasure mu = canned_measure("unipotent-pair");
  const ConeDetection cone = detect_cone(mu);
  if (cone.verdict != Tristate::kTrue) return {false, "no invariant cone detected"};
  const LimitSet limit(mu, cone.cone, 20000, 119);
  constexpr std::size_t kTrials = 10000, kHorizon = 2000;
  std::uint64_t seed = 120;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vector2 x = unit_at((i + 0.5) * 2.0 * kPi / 20.0);
    const double here = estimate_p1p2(mu, limit, x, kTrials, kHorizon, seed++).p1;
    double averaged = 0.0;
    for (const Atom& atom : mu.atoms()) {
      averaged += atom.weight * estimate_p1p2(mu, limit, atom.g * x, kTrials, kHorizon, seed++).p1;
    }
    worst = std::max(worst, std::abs(here - averaged));
  }
  bool boundary = true;
  const std::vector<double>& support = limit.angles();
  for (std::size_t i = 0; i < support.size(); i += support.size() / 10) {
    const AttractionProbabilities in = estimate_p1p2(mu, limit, unit_at(support[i]), 1000, kHorizon, seed++);
    const AttractionProbabilities out = estimate_p1p2(mu, limit, unit_at(support[i] + kPi), 1000, kHorizon, seed++);
    boundary = boundary && in.p1 == 1.0 && in.p2 == 0.0 && out.p1 == 0.0 && out.p2 == 1.0;
  }
  return {worst <= 0.03 && boundary, fmt("max one-step residual %.4f over 20 grid points; boundary values ", worst) +
                                         (boundary ? "(1,0)/(0,1)" : "WRONG")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Iwasawa reconstruction", 1.0, iwasawa_reconstruction},
      {2, "cocycle identity", 5.0, cocycle_identity},
      {3, "highest-weight identity", 5.0, highest_weight_identity},
      {4, "principal triple", 1.0, principal_triple_exact},
      {5, "non-extendability", 1.0, non_extendability},
      {6, "classifier corpus", 1.0, classifier_corpus},
      {7, "Furstenberg stationarity", 30.0, furstenberg_stationarity},
      {8, "limit-form identity", 10.0, limit_form_identity},
      {9, "cross-ratio convergence", 30.0, cross_ratio_convergence},
      {10, "Lyapunov", 60.0, lyapunov_criterion},
      {11, "large deviations", 300.0, large_deviations},
      {12, "renewal", 300.0, renewal},
      {13, "equidistribution", 900.0, equidistribution},
      {14, "decomposability", 600.0, decomposability},
      {15, "p1/p2 harmonicity", 300.0, harmonicity},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    try {
      selected.insert(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::fprintf(stderr, "usage: acceptance [criterion numbers 1-15...]\n");
      return 1;
    }
  }
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %-26s %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
