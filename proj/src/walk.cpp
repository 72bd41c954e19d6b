#include "homdyn/walk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "homdyn/errors.hpp"
#include "homdyn/parallel.hpp"

namespace homdyn {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double operator_norm(const Matrix2& p) {
  const double s = p.squaredNorm();
  const double d = p.determinant();
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * d * d));
  return std::sqrt(0.5 * (s + disc));
}

}  // namespace

BundlePoint step(const Matrix2& g, const BundlePoint& x, const CocycleHandle& alpha) {
  if (alpha.has_diag_sign()) {
    return {act_direction(g, x.theta), act(alpha.diag_sign(g, x.theta).matrix(), x.z)};
  }
  return {act_direction(g, x.theta), act(alpha(g, x.theta), x.z)};
}

bool WalkReport::same_result(const WalkReport& other) const {
  return estimator == other.estimator && estimate == other.estimate && standard_error == other.standard_error &&
         deterministic == other.deterministic && trials == other.trials && steps == other.steps &&
         seed == other.seed;
}

WalkReport lyapunov(const StepMeasure& mu, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (n < 1000) throw PreconditionError("lyapunov: need at least 1000 steps");
  if (trials == 0) throw PreconditionError("lyapunov: zero trials");
  const auto start = std::chrono::steady_clock::now();
  WalkReport report;
  report.estimator = "lyapunov";
  report.deterministic = mu.deterministic();
  report.trials = report.deterministic ? 1 : trials;
  report.steps = n;
  report.seed = seed;
  std::vector<double> rates(report.trials);
  parallel_for(report.trials, [&](std::size_t t) {
    Engine rng = substream(seed, t);
    Matrix2 p = Matrix2::Identity();
    long exponent = 0;
    for (std::size_t k = 0; k < n; ++k) {
      p = mu.sample(rng) * p;
      exponent += renormalize_pow2(p);
    }
    // Working in base 2 keeps the deterministic diagonal case exact.
    rates[t] = (std::log2(operator_norm(p)) + static_cast<double>(exponent)) / static_cast<double>(n) * log_two();
  });
  const MeanAndError m = mean_and_error(rates);
  report.estimate = m.mean;
  report.standard_error = m.standard_error;
  report.wall_clock_seconds = seconds_since(start);
  return report;
}

LdpTable ldp_tail(const StepMeasure& mu, double drift, double eps1, const std::vector<std::size_t>& n_grid,
                  std::size_t trials, std::uint64_t seed, const Vector2& w) {
  if (n_grid.empty() || trials == 0) throw PreconditionError("ldp_tail: empty grid or zero trials");
  if (!(eps1 > 0.0)) throw PreconditionError("ldp_tail: eps1 must be positive");
  std::vector<std::size_t> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  const std::size_t horizon = grid.back();
  std::vector<std::vector<unsigned char>> hit(trials, std::vector<unsigned char>(grid.size(), 0));
  parallel_for(trials, [&](std::size_t t) {
    Engine rng = substream(seed, t);
    Vector2 u = w.normalized();
    double sigma = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= horizon; ++k) {
      const Vector2 v = mu.sample(rng) * u;
      const double len = v.norm();
      sigma += 2.0 * std::log(len);
      u = v / len;
      while (next < grid.size() && grid[next] == k) {
        const double nk = static_cast<double>(k);
        hit[t][next] = std::abs(sigma - drift * nk) >= eps1 * nk ? 1 : 0;
        ++next;
      }
    }
  });
  LdpTable table;
  table.drift = drift;
  table.eps1 = eps1;
  table.trials = trials;
  table.seed = seed;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    LdpRow row;
    row.n = grid[j];
    for (std::size_t t = 0; t < trials; ++t) row.events += hit[t][j];
    row.tail = static_cast<double>(row.events) / static_cast<double>(trials);
    row.upper_bound = row.events == 0 ? 3.0 / static_cast<double>(trials) : row.tail;
    if (row.events > 0) {
      xs.push_back(static_cast<double>(row.n));
      ys.push_back(std::log(row.tail));
    }
    table.rows.push_back(row);
  }
  if (xs.size() >= 3) {
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    table.slope = sxy / sxx;
    table.intercept = my - table.slope * mx;
    table.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    table.fit_valid = true;
  }
  return table;
}

RenewalEstimate renewal_sum(const StepMeasure& mu, const RenewalObservable& obs, const Vector2& w, double t,
                            std::size_t k_max, std::size_t trials, std::uint64_t seed, double drift,
                            const LdpTable* tail_model) {
  if (!obs.f) throw PreconditionError("renewal_sum: empty test function");
  if (!(drift > 0.0)) throw PreconditionError("renewal_sum: drift must be positive");
  if (static_cast<double>(k_max) < 3.0 * t / drift) throw PreconditionError("renewal_sum: k_max below 3 t / drift");
  if (trials == 0) throw PreconditionError("renewal_sum: zero trials");
  RenewalEstimate out;
  out.k_max = k_max;
  out.trials = mu.deterministic() ? 1 : trials;
  std::vector<double> sums(out.trials);
  parallel_for(out.trials, [&](std::size_t i) {
    Engine rng = substream(seed, i);
    Vector2 u = w.normalized();
    double sigma = 0.0;
    double acc = obs.f(u, -t);
    for (std::size_t k = 1; k <= k_max; ++k) {
      const Vector2 v = mu.sample(rng) * u;
      const double len = v.norm();
      sigma += 2.0 * std::log(len);
      u = v / len;
      if (std::abs(sigma - t) <= obs.support_radius) acc += obs.f(u, sigma - t);
    }
    sums[i] = acc;
  });
  const MeanAndError m = mean_and_error(sums);
  out.estimate = m.mean;
  out.standard_error = m.standard_error;

  if (obs.sup_norm == 0.0) {
    out.truncation_bound = 0.0;
    out.truncation_method = "zero observable";
  } else if (mu.deterministic()) {
    // Continue the single trajectory until sigma has left the support for
    // good; the omitted tail is then summed exactly.
    Vector2 u = w.normalized();
    const Matrix2& g = mu.atoms().front().g;
    double sigma = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      const Vector2 v = g * u;
      sigma += 2.0 * std::log(v.norm());
      u = v.normalized();
    }
    double omitted = 0.0;
    const std::size_t extra = 10 * k_max + 1000;
    for (std::size_t k = 0; k < extra; ++k) {
      const Vector2 v = g * u;
      sigma += 2.0 * std::log(v.norm());
      u = v.normalized();
      if (std::abs(sigma - t) <= obs.support_radius) omitted += std::abs(obs.f(u, sigma - t));
    }
    out.truncation_bound = omitted;
    out.truncation_method = "trajectory-continuation";
  } else if (tail_model != nullptr && tail_model->fit_valid && tail_model->slope < 0.0 &&
             tail_model->eps1 < drift) {
    // A term k > k_max is nonzero only if |sigma_k - drift k| >= drift k - t - R,
    // which is at least eps1 k once k >= (t + R) / (drift - eps1).
    const double threshold = (t + obs.support_radius) / (drift - tail_model->eps1);
    if (static_cast<double>(k_max + 1) >= threshold) {
      const double b = tail_model->slope;
      const double first = std::exp(tail_model->intercept + b * static_cast<double>(k_max + 1));
      out.truncation_bound = obs.sup_norm * first / (1.0 - std::exp(b));
      out.truncation_method = "large-deviation-fit";
    } else {
      out.truncation_bound = std::numeric_limits<double>::infinity();
      out.truncation_method = "unavailable: k_max below the large-deviation regime";
    }
  } else {
    out.truncation_bound = std::numeric_limits<double>::infinity();
    out.truncation_method = "unavailable: no tail model";
  }
  out.truncation_warning = !(out.truncation_bound <= 0.01 * std::abs(out.estimate));
  return out;
}

double renewal_limit(const RenewalObservable& obs, const EmpiricalMeasure& nu, double drift,
                     std::size_t quadrature_points) {
  if (!(drift > 0.0)) throw PreconditionError("renewal_limit: drift must be positive");
  if (nu.space() != MetricSpace::kCircle) throw PreconditionError("renewal_limit: nu must live on the circle");
  std::size_t m = std::max<std::size_t>(quadrature_points, 3);
  if (m % 2 == 0) ++m;
  const double a = -obs.support_radius;
  const double h = 2.0 * obs.support_radius / static_cast<double>(m - 1);
  const double inner = nu.integrate([&](double angle) {
    const Vector2 y = unit_at(angle);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double c = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      s += c * obs.f(y, a + h * static_cast<double>(i));
    }
    return s * h / 3.0;
  });
  return inner / drift;
}

double cramers_v(const std::vector<std::vector<double>>& table) {
  std::vector<double> rows, cols;
  double total = 0.0;
  for (const auto& r : table) {
    double s = 0.0;
    for (double v : r) s += v;
    rows.push_back(s);
    total += s;
  }
  if (table.empty() || total <= 0.0) return 0.0;
  cols.assign(table.front().size(), 0.0);
  for (const auto& r : table)
    for (std::size_t j = 0; j < r.size(); ++j) cols[j] += r[j];
  const auto live_rows = std::count_if(rows.begin(), rows.end(), [](double v) { return v > 0.0; });
  const auto live_cols = std::count_if(cols.begin(), cols.end(), [](double v) { return v > 0.0; });
  const auto k = std::min(live_rows, live_cols);
  if (k <= 1) return 0.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (rows[i] == 0.0) continue;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] == 0.0) continue;
      const double expected = rows[i] * cols[j] / total;
      const double d = table[i][j] - expected;
      chi2 += d * d / expected;
    }
  }
  return std::sqrt(chi2 / (total * static_cast<double>(k - 1)));
}

CesaroResult cesaro_distribution(const StepMeasure& mu, const BundlePoint& x0, std::size_t n, std::size_t trials,
                                 const Observable& f, const CocycleHandle& alpha, std::uint64_t seed,
                                 const CesaroOptions& options) {
  if (n == 0 || trials == 0) throw PreconditionError("cesaro_distribution: need steps and trials");
  if (alpha.fibre_dim() != x0.z.dim()) throw PreconditionError("cesaro_distribution: fibre dimension mismatch");
  if (options.stride == 0 || options.base_bins == 0 || options.fibre_bins == 0) {
    throw PreconditionError("cesaro_distribution: stride and bin counts must be positive");
  }
  const double f0 = f(x0.z);
  struct TrialResult {
    double mean = 0.0;
    std::vector<double> fibre, base;
    std::vector<std::vector<double>> table;
    bool constant = true;
  };
  std::vector<TrialResult> results(trials);
  parallel_for(trials, [&](std::size_t t) {
    Engine rng = substream(seed, t);
    TrialResult& r = results[t];
    r.table.assign(options.base_bins, std::vector<double>(options.fibre_bins, 0.0));
    r.fibre.reserve(n / options.stride + 1);
    r.base.reserve(n / options.stride + 1);
    BundlePoint x = x0;
    std::vector<double> values(n);
    for (std::size_t k = 1; k <= n; ++k) {
      x = step(mu.sample(rng), x, alpha);
      const double v = f(x.z);
      const double angle = projective_angle(x.theta);
      values[k - 1] = v;
      if (v != f0) r.constant = false;
      if (k % options.stride == 0) {
        r.fibre.push_back(v);
        r.base.push_back(angle);
      }
      const auto bi = std::min(options.base_bins - 1,
                               static_cast<std::size_t>(angle / kPi * static_cast<double>(options.base_bins)));
      const double scaled = std::clamp(v / options.fibre_range, 0.0, 1.0);
      const auto fi = std::min(options.fibre_bins - 1,
                               static_cast<std::size_t>(scaled * static_cast<double>(options.fibre_bins)));
      r.table[bi][fi] += 1.0;
    }
    r.mean = pairwise_sum(values) / static_cast<double>(n);
  });
  CesaroResult out;
  out.steps = n;
  out.trials = trials;
  std::vector<double> means(trials), fibre, base;
  std::vector<std::vector<double>> table(options.base_bins, std::vector<double>(options.fibre_bins, 0.0));
  out.fibre_constant = true;
  for (std::size_t t = 0; t < trials; ++t) {
    means[t] = results[t].mean;
    fibre.insert(fibre.end(), results[t].fibre.begin(), results[t].fibre.end());
    base.insert(base.end(), results[t].base.begin(), results[t].base.end());
    for (std::size_t i = 0; i < options.base_bins; ++i)
      for (std::size_t j = 0; j < options.fibre_bins; ++j) table[i][j] += results[t].table[i][j];
    out.fibre_constant = out.fibre_constant && results[t].constant;
  }
  const MeanAndError m = mean_and_error(means);
  out.mean = m.mean;
  out.standard_error = m.standard_error;
  out.fibre = EmpiricalMeasure(MetricSpace::kLine, std::move(fibre));
  out.base = EmpiricalMeasure(MetricSpace::kProjective, std::move(base));
  out.product_diagnostic = cramers_v(table);
  return out;
}

LatticePoint generic_lattice() {
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  Matrix b(2, 2);
  b << 1.0, golden, 0.0, 1.0;
  const double c = std::cos(0.7), s = std::sin(0.7);
  Matrix k(2, 2);
  k << c, -s, s, c;
  Matrix d(2, 2);
  d << std::exp(0.3), 0.0, 0.0, std::exp(-0.3);
  return reduce(k * d * b);
}

EquidistReport equidist_experiment(const StepMeasure& mu, const CocycleHandle& alpha, const BundlePoint& x0,
                                   const EquidistConfig& config) {
  if (alpha.fibre_dim() != 2 || x0.z.dim() != 2) {
    throw ConfigurationError("equidist: the diagonal-orbit comparison needs a 2-dimensional fibre");
  }
  if (config.steps < 1000) throw ConfigurationError("equidist: steps must be at least 1000");
  EquidistReport report;
  report.lyapunov = lyapunov(mu, config.lyapunov_steps, config.lyapunov_trials, splitmix64(config.seed ^ 0x1f));
  report.drift = cocycle_drift(report.lyapunov);
  const ConeDetection cone = detect_cone(mu);
  report.cone = cone.verdict;
  if (cone.verdict == Tristate::kTrue) {
    const LimitSet limit(mu, cone.cone, 20000, splitmix64(config.seed ^ 0x2f));
    const double a = circle_angle(x0.theta);
    if (std::min(limit.distance(a), limit.distance(a + kPi)) > 0.05) {
      throw ConfigurationError("equidist: theta0 is not in the sampled support of the stationary measure");
    }
  }
  report.signed_orbit = cone.verdict != Tristate::kTrue;
  const Observable f = capped_shortest_vector(config.cap);
  CesaroOptions options;
  options.stride = config.stride;
  options.fibre_range = config.cap;

  auto run = [&](std::size_t n, double& ks, double& product, CesaroResult* keep, EmpiricalMeasure* orbit_out) {
    CesaroResult c = cesaro_distribution(mu, x0, n, config.trials, f, alpha, config.seed, options);
    const double T = report.drift * static_cast<double>(n);
    std::vector<double> orbit = diag_orbit_samples(x0.z, T, config.dt, f, report.signed_orbit);
    ks = ks_statistic(c.fibre.values(), orbit);
    product = c.product_diagnostic;
    if (keep != nullptr) *keep = std::move(c);
    if (orbit_out != nullptr) *orbit_out = EmpiricalMeasure(MetricSpace::kLine, std::move(orbit));
  };
  CesaroResult main;
  EmpiricalMeasure orbit;
  run(config.steps, report.ks, report.product_diagnostic, &main, &orbit);
  report.orbit_mean = pairwise_sum(orbit.values()) / static_cast<double>(orbit.size());
  report.cesaro_quantiles = main.fibre.quantile_table();
  report.orbit_quantiles = orbit.quantile_table();
  report.horizon = report.drift * static_cast<double>(config.steps);
  report.cesaro_mean = main.mean;
  report.cesaro_standard_error = main.standard_error;
  if (config.check_refinement) {
    double ks_q = 0.0, product_q = 0.0;
    run(config.steps / 4, ks_q, product_q, nullptr, nullptr);
    report.ks_quarter = ks_q;
    report.monotone = report.ks <= ks_q;
  }
  report.pass = report.ks <= config.ks_tolerance && report.product_diagnostic <= config.product_tolerance &&
                report.monotone;
  return report;
}

DecomposeReport decompose_experiment(const StepMeasure& mu, const CocycleHandle& bundle_alpha,
                                     const CocycleHandle& direct_alpha, const BundlePoint& x0, std::size_t steps,
                                     std::size_t trials, std::uint64_t seed, double tolerance) {
  const Observable f = capped_shortest_vector(1.0);
  const CesaroResult bundle = cesaro_distribution(mu, x0, steps, trials, f, bundle_alpha, seed);
  const CesaroResult direct = cesaro_distribution(mu, x0, steps, trials, f, direct_alpha, splitmix64(seed + 1));
  const CesaroResult trivial =
      cesaro_distribution(mu, x0, steps, std::min<std::size_t>(trials, 8), f, trivial_cocycle(x0.z.dim()), seed);
  DecomposeReport report;
  report.ks = bundle.fibre.ks_distance(direct.fibre);
  report.bundle_mean = bundle.mean;
  report.direct_mean = direct.mean;
  report.bundle_quantiles = bundle.fibre.quantile_table();
  report.direct_quantiles = direct.fibre.quantile_table();
  report.trivial_fibre_constant = trivial.fibre_constant;
  report.pass = report.ks <= tolerance && report.trivial_fibre_constant;
  return report;
}

}  // namespace homdyn
