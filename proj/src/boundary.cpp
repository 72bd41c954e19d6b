#include "homdyn/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homdyn/errors.hpp"
#include "homdyn/parallel.hpp"

namespace homdyn {

namespace {

constexpr double kProximalRatio = 1.0 + 1e-6;

double wrap_signed(double angle) {
  angle = std::fmod(angle, 2.0 * kPi);
  if (angle > kPi) angle -= 2.0 * kPi;
  if (angle <= -kPi) angle += 2.0 * kPi;
  return angle;
}

Vector2 sign_canonical(Vector2 v) {
  if (v(0) < 0.0 || (v(0) == 0.0 && v(1) < 0.0)) v = -v;
  return v;
}

LimitDirection top_direction(const Matrix2& product, bool left) {
  Eigen::JacobiSVD<Matrix2> svd(product, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector2 s = svd.singularValues();
  LimitDirection out;
  out.direction = sign_canonical(left ? Vector2(svd.matrixU().col(0)) : Vector2(svd.matrixV().col(0)));
  out.log_gap = (s(1) > 0.0) ? std::log(s(0) / s(1)) : std::numeric_limits<double>::infinity();
  out.proximal = s(0) >= kProximalRatio * s(1);
  return out;
}

Vector2 act_unit(const Matrix2& g, const Vector2& u) {
  const Vector2 v = g * u;
  return v / v.norm();
}

}  // namespace

StepMeasure::StepMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw PreconditionError("StepMeasure: no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0)) throw PreconditionError("StepMeasure: weights must be positive");
    if (!a.g.allFinite()) throw PreconditionError("StepMeasure: non-finite matrix entry");
    if (std::abs(std::abs(a.g.determinant()) - 1.0) > 1e-9) {
      throw PreconditionError("StepMeasure: atom with |det| != 1");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("StepMeasure: weights do not sum to 1");
  cumulative_.reserve(atoms_.size());
  double acc = 0.0;
  for (const auto& a : atoms_) cumulative_.push_back(acc += a.weight);
  cumulative_.back() = 1.0;
}

StepMeasure StepMeasure::uniform(const std::vector<Matrix2>& matrices) {
  std::vector<Atom> atoms;
  for (const auto& m : matrices) atoms.push_back({1.0 / static_cast<double>(matrices.size()), m});
  return StepMeasure(std::move(atoms));
}

StepMeasure StepMeasure::dirac(const Matrix2& g) { return StepMeasure({{1.0, g}}); }

const Matrix2& StepMeasure::sample(Engine& rng) const {
  if (atoms_.size() == 1) return atoms_.front().g;
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  return atoms_[idx].g;
}

Word StepMeasure::sample_word(std::size_t length, Engine& rng) const {
  Word w;
  w.reserve(length);
  for (std::size_t i = 0; i < length; ++i) w.push_back(sample(rng));
  return w;
}

bool StepMeasure::looks_zariski_dense() const {
  bool noncommuting = false;
  bool hyperbolic = false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Matrix2& a = atoms_[i].g;
    if (std::abs(a.trace()) > 2.0 + 1e-9) hyperbolic = true;
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      const Matrix2& b = atoms_[j].g;
      if ((a * b - b * a).cwiseAbs().maxCoeff() > 1e-9) noncommuting = true;
      if (std::abs((a * b).trace()) > 2.0 + 1e-9) hyperbolic = true;
    }
  }
  return noncommuting && hyperbolic;
}

double StepMeasure::max_log_singular_value() const {
  double best = 0.0;
  for (const auto& a : atoms_) {
    Eigen::JacobiSVD<Matrix2> svd(a.g);
    best = std::max(best, std::abs(std::log(svd.singularValues()(0))));
  }
  return best;
}

LimitDirection limit_vector(const Word& b, std::size_t n) {
  if (n == 0 || b.size() < n) throw PreconditionError("limit_vector: need 1 <= n <= word length");
  Matrix2 p = Matrix2::Identity();
  for (std::size_t i = 0; i < n; ++i) {
    p = p * b[i];
    renormalize_pow2(p);
  }
  return top_direction(p, true);
}

Matrix2 forward_product(const Word& a, std::size_t n, long& log2_scale) {
  if (a.size() < n) throw PreconditionError("forward_product: word shorter than n");
  Matrix2 p = Matrix2::Identity();
  for (std::size_t i = 0; i < n; ++i) {
    p = a[i] * p;
    log2_scale += renormalize_pow2(p);
  }
  return p;
}

LimitDirection limit_form(const Word& a, std::size_t n) {
  if (n == 0 || a.size() < n) throw PreconditionError("limit_form: need 1 <= n <= word length");
  long scale = 0;
  return top_direction(forward_product(a, n, scale), false);
}

EmpiricalMeasure sample_furstenberg(const StepMeasure& mu, std::size_t burn_in, std::size_t samples,
                                    MetricSpace space, std::uint64_t seed, const Vector2& start) {
  if (space == MetricSpace::kLine) throw PreconditionError("sample_furstenberg: boundary is a circle or a line of directions");
  if (start.norm() == 0.0) throw PreconditionError("sample_furstenberg: zero start vector");
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t i) {
    Engine rng = substream(seed, i);
    Vector2 u = start.normalized();
    for (std::size_t k = 0; k < burn_in; ++k) u = act_unit(mu.sample(rng), u);
    values[i] = space == MetricSpace::kCircle ? circle_angle(u) : projective_angle(u);
  });
  return EmpiricalMeasure(space, std::move(values));
}

EmpiricalMeasure sample_hitting_measure(const StepMeasure& mu, const Vector2& w, std::size_t steps,
                                        std::size_t samples, std::uint64_t seed) {
  return sample_furstenberg(mu, steps, samples, MetricSpace::kCircle, seed, w);
}

double autocorrelation(const std::vector<double>& series, std::size_t lag) {
  if (series.size() <= lag + 1) return 0.0;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double d = series[i] - mean;
    den += d * d;
    if (i + lag < series.size()) num += d * (series[i + lag] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::kTrue:
      return "true";
    case Tristate::kFalse:
      return "false";
    case Tristate::kUnknown:
      break;
  }
  return "unknown";
}

bool Arc::contains(double angle, double slack) const {
  const double offset = wrap_signed(angle - center());
  return std::abs(offset) <= 0.5 * width + slack;
}

namespace {

struct ArcImage {
  double lo;  // offsets from a fixed center, lo <= hi
  double hi;
  bool ok;
};

ArcImage image_offsets(const Matrix2& g, double start, double width, double center) {
  const double a = circle_angle(act_unit(g, unit_at(start)));
  const double b = circle_angle(act_unit(g, unit_at(start + width)));
  const bool preserves = g.determinant() > 0.0;
  const double from = preserves ? a : b;
  const double to = preserves ? b : a;
  double span = std::fmod(to - from, 2.0 * kPi);
  if (span < 0.0) span += 2.0 * kPi;
  const double lo = wrap_signed(from - center);
  return {lo, lo + span, lo + span <= kPi && span < kPi};
}

// Grows `arc` to the smallest invariant arc containing it; nullopt-like
// failure is signalled by a width of pi or more.
bool grow_to_invariant(const StepMeasure& mu, Arc& arc) {
  const double center = arc.center();
  double lo = -0.5 * arc.width, hi = 0.5 * arc.width;
  for (int iter = 0; iter < 2000; ++iter) {
    double new_lo = lo, new_hi = hi;
    for (const auto& atom : mu.atoms()) {
      const ArcImage img = image_offsets(atom.g, center + lo, hi - lo, center);
      if (!img.ok) return false;
      new_lo = std::min(new_lo, img.lo);
      new_hi = std::max(new_hi, img.hi);
    }
    if (new_hi - new_lo >= kPi - 1e-9) return false;
    const bool settled = (lo - new_lo) < 1e-15 && (new_hi - hi) < 1e-15;
    lo = new_lo;
    hi = new_hi;
    if (settled) break;
  }
  for (const auto& atom : mu.atoms()) {
    const ArcImage img = image_offsets(atom.g, center + lo, hi - lo, center);
    if (!img.ok || img.lo < lo - 1e-9 || img.hi > hi + 1e-9) return false;
  }
  arc.start = center + lo;
  arc.width = hi - lo;
  return true;
}

// Smallest arc containing all angles: the complement of the widest gap.
Arc hull_of(std::vector<double> angles) {
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * kPi - angles.back();
  double start = angles.front();
  for (std::size_t i = 1; i < angles.size(); ++i) {
    if (angles[i] - angles[i - 1] > gap) {
      gap = angles[i] - angles[i - 1];
      start = angles[i];
    }
  }
  return {start, 2.0 * kPi - gap};
}

}  // namespace

ConeDetection detect_cone(const StepMeasure& mu, const ConeOptions& options) {
  ConeDetection out;
  Arc quadrant{0.0, 0.5 * kPi};
  if (grow_to_invariant(mu, quadrant)) {
    out.verdict = Tristate::kTrue;
    out.cone = quadrant;
    return out;
  }
  const EmpiricalMeasure circle = sample_furstenberg(mu, 200, options.samples, MetricSpace::kCircle, options.seed);
  Arc hull = hull_of(circle.values());
  if (hull.width < kPi && grow_to_invariant(mu, hull)) {
    out.verdict = Tristate::kTrue;
    out.cone = hull;
    return out;
  }
  const EmpiricalMeasure flipped = circle.map([](double a) { return a + kPi; }, MetricSpace::kCircle);
  out.antipodal_w1 = circle.wasserstein1(flipped);
  out.verdict = out.antipodal_w1 <= options.symmetry_tolerance ? Tristate::kFalse : Tristate::kUnknown;
  return out;
}

LimitSet::LimitSet(const StepMeasure& mu, const Arc& cone, std::size_t samples, std::uint64_t seed) {
  angles_ = sample_furstenberg(mu, 200, samples, MetricSpace::kCircle, seed, unit_at(cone.center())).values();
  std::sort(angles_.begin(), angles_.end());
}

double LimitSet::distance(double angle) const {
  const double two_pi = 2.0 * kPi;
  angle = std::fmod(angle, two_pi);
  if (angle < 0.0) angle += two_pi;
  const auto it = std::lower_bound(angles_.begin(), angles_.end(), angle);
  const double after = it == angles_.end() ? angles_.front() : *it;
  const double before = it == angles_.begin() ? angles_.back() : *(it - 1);
  return std::min(arc_distance(angle, after, two_pi), arc_distance(angle, before, two_pi));
}

AttractionProbabilities estimate_p1p2(const StepMeasure& mu, const Vector2& x, std::size_t trials,
                                      std::size_t horizon, std::uint64_t seed, const AttractionOptions& options) {
  const ConeDetection cone = detect_cone(mu);
  if (cone.verdict != Tristate::kTrue) {
    throw ConfigurationError("estimate_p1p2: no invariant cone; the boundary walk has a single stationary measure");
  }
  const LimitSet limit_set(mu, cone.cone, options.support_samples, seed ^ 0xa5a5a5a5ULL);
  return estimate_p1p2(mu, limit_set, x, trials, horizon, seed, options);
}

AttractionProbabilities estimate_p1p2(const StepMeasure& mu, const LimitSet& limit_set, const Vector2& x,
                                      std::size_t trials, std::size_t horizon, std::uint64_t seed,
                                      const AttractionOptions& options) {
  if (trials == 0) throw PreconditionError("estimate_p1p2: zero trials");
  if (x.norm() == 0.0) throw PreconditionError("estimate_p1p2: zero start vector");
  std::vector<double> first(trials, 0.0);
  std::vector<unsigned char> unsettled(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Engine rng = substream(seed, t);
    Vector2 u = x.normalized();
    std::size_t near1 = 0, near2 = 0;
    for (std::size_t k = 0; k < horizon; ++k) {
      u = act_unit(mu.sample(rng), u);
      const double a = circle_angle(u);
      near1 = limit_set.distance(a) <= options.eps ? near1 + 1 : 0;
      near2 = limit_set.distance(a + kPi) <= options.eps ? near2 + 1 : 0;
      if (near1 >= options.sustain || near2 >= options.sustain) break;
    }
    if (near1 >= options.sustain) {
      first[t] = 1.0;
    } else if (near2 < options.sustain) {
      unsettled[t] = 1;
      const double a = circle_angle(u);
      first[t] = limit_set.distance(a) <= limit_set.distance(a + kPi) ? 1.0 : 0.0;
    }
  });
  const MeanAndError m = mean_and_error(first);
  AttractionProbabilities out;
  out.p1 = m.mean;
  out.p2 = 1.0 - m.mean;
  out.standard_error = m.standard_error;
  out.unsettled = static_cast<std::size_t>(std::count(unsettled.begin(), unsettled.end(), 1));
  return out;
}

}  // namespace homdyn
