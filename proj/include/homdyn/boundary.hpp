#ifndef HOMDYN_BOUNDARY_HPP_
#define HOMDYN_BOUNDARY_HPP_

#include <cstdint>
#include <vector>

#include "homdyn/empirical.hpp"
#include "homdyn/linalg.hpp"
#include "homdyn/rng.hpp"

namespace homdyn {

struct Atom {
  double weight;
  Matrix2 g;
};

// Finitely supported probability measure on SL_2^{+-}(R).
//
// Weights must be positive and sum to 1 within 1e-12; every atom must have
// |det| = 1 within 1e-9.
class StepMeasure {
 public:
  explicit StepMeasure(std::vector<Atom> atoms);
  static StepMeasure uniform(const std::vector<Matrix2>& matrices);
  static StepMeasure dirac(const Matrix2& g);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool deterministic() const { return atoms_.size() == 1; }

  const Matrix2& sample(Engine& rng) const;
  Word sample_word(std::size_t length, Engine& rng) const;

  // Heuristic Zariski-density check: two atoms fail to commute and some
  // atom or product of two atoms is hyperbolic (|trace| > 2).
  bool looks_zariski_dense() const;

  // Largest |log| singular value over atoms; bounds the per-step change of
  // any log-norm.
  double max_log_singular_value() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

// Unit direction together with the proximality gap log(s1 / s2) of the
// product it was extracted from.
struct LimitDirection {
  Vector2 direction;
  double log_gap = 0.0;
  // False when s1 / s2 < 1 + 1e-6, i.e. the product has not collapsed to
  // rank one yet.
  bool proximal = false;
};

// Top left-singular direction of b[0] b[1] ... b[n-1], where b[0] is the
// most recent step of the past. Sign-canonical: first nonzero coordinate
// positive.
LimitDirection limit_vector(const Word& b, std::size_t n);

// Top right-singular direction of a[n-1] ... a[0]: the unit linear form phi
// with |phi(v)| = lim |A_n v| / |A_n|.
LimitDirection limit_form(const Word& a, std::size_t n);

// Product a[n-1] ... a[0] scaled by powers of two; the removed exponent is
// added to `log2_scale`.
Matrix2 forward_product(const Word& a, std::size_t n, long& log2_scale);

// Endpoints of `samples` independent boundary walks of `burn_in` steps from
// `start`, as angles on the circle or the projective line.
EmpiricalMeasure sample_furstenberg(const StepMeasure& mu, std::size_t burn_in, std::size_t samples,
                                    MetricSpace space, std::uint64_t seed,
                                    const Vector2& start = Vector2(1.0, 0.0));

// Law of g_n ... g_1 w over independent walks of `steps` steps: the
// hitting measure nu_w, equal to p1(w) nu_1 + p2(w) nu_2 in the cone case
// and to nu_K otherwise.
EmpiricalMeasure sample_hitting_measure(const StepMeasure& mu, const Vector2& w, std::size_t steps,
                                        std::size_t samples, std::uint64_t seed);

// Lag-k autocorrelation of a scalar series; values close to 1 signal slow
// mixing of the sampling walk.
double autocorrelation(const std::vector<double>& series, std::size_t lag);

enum class Tristate { kFalse, kTrue, kUnknown };
const char* to_string(Tristate t);

// Closed arc [start, start + width] on the circle (angles in radians).
struct Arc {
  double start = 0.0;
  double width = 0.0;
  double center() const { return start + 0.5 * width; }
  bool contains(double angle, double slack = 0.0) const;
};

struct ConeDetection {
  Tristate verdict = Tristate::kUnknown;
  Arc cone;                     // invariant arc when verdict is true
  double antipodal_w1 = 0.0;    // W1(nu, -nu) of the sampled circle measure
};

struct ConeOptions {
  std::size_t samples = 20000;
  double symmetry_tolerance = 0.05;
  std::uint64_t seed = 0x5eed;
};

// Searches for a closed arc of length < pi mapped into itself by every
// atom, growing candidate arcs (positive quadrant, then the hull of a
// sampled trajectory) until they are invariant. Without such an arc the
// verdict is false when the sampled circle measure is antipodally symmetric
// and unknown otherwise.
ConeDetection detect_cone(const StepMeasure& mu, const ConeOptions& options = {});

struct AttractionOptions {
  double eps = 0.05;
  std::size_t sustain = 50;
  std::size_t support_samples = 20000;
};

struct AttractionProbabilities {
  double p1 = 0.0;
  double p2 = 0.0;
  double standard_error = 0.0;
  std::size_t unsettled = 0;  // trials classified by final position only
};

// Sampled limit set of the cone walk, reusable across estimate_p1p2 calls.
class LimitSet {
 public:
  LimitSet(const StepMeasure& mu, const Arc& cone, std::size_t samples, std::uint64_t seed);
  // Circle distance from `angle` to the nearest sample.
  double distance(double angle) const;
  const std::vector<double>& angles() const { return angles_; }

 private:
  std::vector<double> angles_;
};

// Probability that the circle walk from x settles near the limit set
// Lambda_1 of the invariant cone (p1) or near its antipode (p2). Requires a
// cone; otherwise ConfigurationError.
AttractionProbabilities estimate_p1p2(const StepMeasure& mu, const Vector2& x, std::size_t trials,
                                      std::size_t horizon, std::uint64_t seed,
                                      const AttractionOptions& options = {});
AttractionProbabilities estimate_p1p2(const StepMeasure& mu, const LimitSet& limit_set, const Vector2& x,
                                      std::size_t trials, std::size_t horizon, std::uint64_t seed,
                                      const AttractionOptions& options = {});

}  // namespace homdyn

#endif  // HOMDYN_BOUNDARY_HPP_
