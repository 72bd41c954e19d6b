#ifndef HOMDYN_WALK_HPP_
#define HOMDYN_WALK_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homdyn/boundary.hpp"
#include "homdyn/cocycle.hpp"
#include "homdyn/empirical.hpp"
#include "homdyn/lattice.hpp"

namespace homdyn {

// State of the bundle walk: a unit vector on the boundary circle (its
// direction is the projective point) and a fibre lattice.
struct BundlePoint {
  Vector2 theta;
  LatticePoint z;
};

// (theta, z) -> (g theta / |g theta|, alpha(g, theta) z).
BundlePoint step(const Matrix2& g, const BundlePoint& x, const CocycleHandle& alpha);

struct WalkReport {
  std::string estimator;
  double estimate = 0.0;
  double standard_error = 0.0;
  bool deterministic = false;
  std::size_t trials = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;

  // Equality of everything except wall-clock time.
  bool same_result(const WalkReport& other) const;
};

// (1/n) log |g_n ... g_1| with power-of-two renormalization, averaged over
// trials. Requires n >= 1000. A one-atom measure runs a single trial and is
// reported as deterministic.
WalkReport lyapunov(const StepMeasure& mu, std::size_t n, std::size_t trials, std::uint64_t seed);

// Drift of the Iwasawa cocycle: sigma(g_n ... g_1, w) / n -> 2 lambda.
inline double cocycle_drift(const WalkReport& lyapunov_report) { return 2.0 * lyapunov_report.estimate; }

struct LdpRow {
  std::size_t n = 0;
  std::size_t events = 0;
  double tail = 0.0;         // events / trials
  double upper_bound = 0.0;  // 3 / trials when no event was seen
};

struct LdpTable {
  double drift = 0.0;
  double eps1 = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<LdpRow> rows;
  // Least-squares line log(tail) = intercept + slope * n over rows with at
  // least one event; valid when three or more such rows exist.
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool fit_valid = false;
};

// Empirical P(|sigma(g_n ... g_1, w) - drift n| >= eps1 n) for each n in
// the grid, where sigma is the Iwasawa cocycle.
LdpTable ldp_tail(const StepMeasure& mu, double drift, double eps1, const std::vector<std::size_t>& n_grid,
                  std::size_t trials, std::uint64_t seed, const Vector2& w = Vector2(1.0, 0.0));

// Test function f(y, u) on circle x R vanishing for |u| > support_radius.
struct RenewalObservable {
  std::function<double(const Vector2&, double)> f;
  double support_radius = 1.0;
  double sup_norm = 1.0;
};

struct RenewalEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t k_max = 0;
  std::size_t trials = 0;
  // Bound on the omitted terms k > k_max; infinite when it cannot be
  // certified.
  double truncation_bound = 0.0;
  std::string truncation_method;
  bool truncation_warning = false;
};

// Sum over k = 0..k_max of E f(g_k ... g_1 w, sigma(g_k ... g_1, w) - t).
// Requires k_max >= 3 t / drift. The truncation bound comes from continuing
// the trajectory for one-atom measures, and otherwise from the fitted
// exponential tail of `tail_model`; the warning is raised when it exceeds
// 1% of the estimate.
RenewalEstimate renewal_sum(const StepMeasure& mu, const RenewalObservable& obs, const Vector2& w, double t,
                            std::size_t k_max, std::size_t trials, std::uint64_t seed, double drift,
                            const LdpTable* tail_model = nullptr);

// (1/drift) * integral of f(y, u) du dnu(y), with nu a sampled circle
// measure and Simpson's rule on [-support_radius, support_radius].
double renewal_limit(const RenewalObservable& obs, const EmpiricalMeasure& nu, double drift,
                     std::size_t quadrature_points = 2001);

struct CesaroOptions {
  std::size_t stride = 100;  // keep every stride-th value in the samples
  std::size_t base_bins = 8;
  std::size_t fibre_bins = 8;
  double fibre_range = 1.0;  // fibre bins split [0, fibre_range]
};

struct CesaroResult {
  double mean = 0.0;
  double standard_error = 0.0;
  EmpiricalMeasure fibre;  // thinned observable values (line)
  EmpiricalMeasure base;   // thinned base points (projective angles)
  // Cramer's V of the base-bin x fibre-bin table over all visited points:
  // 0 for a product distribution.
  double product_diagnostic = 0.0;
  bool fibre_constant = false;  // every observed value equals f(z0)
  std::size_t steps = 0;
  std::size_t trials = 0;
};

// Runs `trials` walks of n steps from x0 and records f(z_k) for k = 1..n.
CesaroResult cesaro_distribution(const StepMeasure& mu, const BundlePoint& x0, std::size_t n, std::size_t trials,
                                 const Observable& f, const CocycleHandle& alpha, std::uint64_t seed,
                                 const CesaroOptions& options = {});

// Cramer's V of a contingency table; empty rows and columns are ignored.
double cramers_v(const std::vector<std::vector<double>>& table);

// Unimodular lattice with a dense diagonal orbit, used as the default fibre
// start.
LatticePoint generic_lattice();

struct EquidistConfig {
  std::size_t steps = 100000;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double dt = 0.05;
  double cap = 1.0;
  double ks_tolerance = 0.05;
  double product_tolerance = 0.05;
  std::size_t lyapunov_steps = 10000;
  std::size_t lyapunov_trials = 200;
  std::size_t stride = 100;
  bool check_refinement = true;
};

struct EquidistReport {
  WalkReport lyapunov;
  double drift = 0.0;
  Tristate cone = Tristate::kUnknown;
  bool signed_orbit = false;
  double horizon = 0.0;  // T = drift * steps
  double ks = 0.0;
  double product_diagnostic = 0.0;
  double cesaro_mean = 0.0;
  double cesaro_standard_error = 0.0;
  double orbit_mean = 0.0;
  std::vector<double> cesaro_quantiles;  // 101-point quantile tables
  std::vector<double> orbit_quantiles;
  std::optional<double> ks_quarter;  // same experiment with steps / 4
  bool monotone = true;
  bool pass = false;
};

// Compares the Cesaro fibre distribution of the capped shortest vector
// with its distribution along the diagonal orbit of z0 over [0, drift * n]
// (the D+- orbit when the walk has no invariant cone). In the cone case
// theta0 must lie within 0.05 of the sampled limit set.
EquidistReport equidist_experiment(const StepMeasure& mu, const CocycleHandle& alpha, const BundlePoint& x0,
                                   const EquidistConfig& config);

struct DecomposeReport {
  double ks = 0.0;  // bundle walk vs direct walk, thinned fibre samples
  double bundle_mean = 0.0;
  double direct_mean = 0.0;
  std::vector<double> bundle_quantiles;  // 101-point quantile tables
  std::vector<double> direct_quantiles;
  bool trivial_fibre_constant = false;
  bool pass = false;
};

// Runs the bundle walk with `bundle_alpha` and the untwisted walk with
// `direct_alpha` (independent seeds) and compares fibre distributions; the
// trivial cocycle walk must keep its fibre fixed.
DecomposeReport decompose_experiment(const StepMeasure& mu, const CocycleHandle& bundle_alpha,
                                     const CocycleHandle& direct_alpha, const BundlePoint& x0, std::size_t steps,
                                     std::size_t trials, std::uint64_t seed, double tolerance);

}  // namespace homdyn

#endif  // HOMDYN_WALK_HPP_
