#ifndef HOMDYN_COCYCLE_HPP_
#define HOMDYN_COCYCLE_HPP_

#include <functional>
#include <optional>
#include <string>

#include "homdyn/boundary.hpp"
#include "homdyn/group.hpp"
#include "homdyn/linalg.hpp"

namespace homdyn {

// Element of D x {+1, -1}: the diagonal matrix diag(e^{r/2}, e^{-r/2})
// composed with the sign element diag(1, sign).
struct DiagSignValue {
  double r = 0.0;
  int sign = 1;

  DiagSignValue operator*(const DiagSignValue& o) const { return {r + o.r, sign * o.sign}; }
  DiagSignValue inverse() const { return {-r, sign}; }
  Matrix2 matrix() const;
};

enum class SectionMode {
  kConeHalfCircle,      // lifts in the half circle centred on the cone
  kConnectedComponent,  // PGL_2: the sign is the component of g
  kPlain,               // lifts with angle in [0, pi)
};
const char* to_string(SectionMode mode);

// Section of the circle over the projective line: each direction gets the
// unit lift whose angle lies in the half-open half circle
// [center - pi/2, center + pi/2).
class CircleSection {
 public:
  static CircleSection plain();
  static CircleSection cone_half_circle(const Arc& cone);
  static CircleSection connected_component();

  SectionMode mode() const { return mode_; }
  double center() const { return center_; }

  Vector2 lift(const Vector2& eta) const;
  // Rotation k with k e_1 = lift(eta).
  Matrix2 lift_rotation(const Vector2& eta) const;
  // +1 when the unit vector u is the section's own lift of its direction.
  int sign_of(const Vector2& u) const;

 private:
  CircleSection(SectionMode mode, double center) : mode_(mode), center_(center) {}
  SectionMode mode_;
  double center_;
};

// Default section for a step measure: cone-half-circle when a cone is
// detected, connected-component for PGL_2, plain otherwise.
CircleSection default_section(const StepMeasure& mu, bool projective_group);

// Additive Iwasawa cocycle: h k = k' diag(e^{t/2}, e^{-t/2}) n with k a lift
// of xi; returns t, computed from the a-factor of iwasawa_decompose(h k).
double iwasawa_cocycle(const Matrix2& h, const Vector2& xi);

// Same value as iwasawa_cocycle from the closed form 2 log |h u| for the unit
// lift u; used on hot paths.
inline double iwasawa_increment(const Matrix2& h, const Vector2& u) { return 2.0 * std::log((h * u).norm()); }

// 2 log(|rho(h) v| / |v|) for v on the highest-weight line over xi, with
// the K-invariant norm of `rep`. Equals iwasawa_cocycle for the standard
// representation and (n-1) times it for the n-dimensional one.
double sigma_chi(const Matrix2& h, const Vector2& xi, const Representation& rep);

// sg(g, eta) in {+1, -1}; in connected-component mode, the sign of det g.
int sign_cocycle(const Matrix2& g, const Vector2& eta, const CircleSection& sec);

// (iwasawa_cocycle, sign_cocycle).
DiagSignValue alpha_cocycle(const Matrix2& g, const Vector2& eta, const CircleSection& sec);

enum class CocycleKind { kIwasawaSign, kMorphism, kConjugated };
const char* to_string(CocycleKind kind);

// Fibre-valued cocycle over the boundary of H, alpha(g, eta) as a k x k
// matrix acting on the fibre. Handles built from the Iwasawa-sign cocycle
// also expose the D+- value.
class CocycleHandle {
 public:
  using Rule = std::function<Matrix(const Matrix2&, const Vector2&)>;
  using DiagRule = std::function<DiagSignValue(const Matrix2&, const Vector2&)>;

  CocycleHandle(CocycleKind kind, int fibre_dim, Rule rule, DiagRule diag_rule = {});

  CocycleKind kind() const { return kind_; }
  int fibre_dim() const { return fibre_dim_; }
  bool has_diag_sign() const { return static_cast<bool>(diag_rule_); }
  // True when the value ignores the boundary point (morphism type without
  // a section).
  bool boundary_independent() const { return boundary_independent_; }

  Matrix operator()(const Matrix2& g, const Vector2& eta) const { return rule_(g, eta); }
  DiagSignValue diag_sign(const Matrix2& g, const Vector2& eta) const;

 private:
  friend CocycleHandle morphism_cocycle(const Representation&, std::optional<CircleSection>);
  CocycleKind kind_;
  int fibre_dim_;
  Rule rule_;
  DiagRule diag_rule_;
  bool boundary_independent_ = false;
};

// alpha(g, eta) = diag(e^{r/2}, e^{-r/2}) diag(1, sg) with (r, sg) from
// alpha_cocycle.
CocycleHandle iwasawa_sign_cocycle(const CircleSection& sec);

// Without a section: alpha(g, eta) = rho(g). With a section s:
// alpha(g, eta) = rho(s(g eta)^{-1} g s(eta)), the P-valued cocycle pushed
// through rho.
CocycleHandle morphism_cocycle(const Representation& rho, std::optional<CircleSection> sec = std::nullopt);

// Constant cocycle with value the identity of the k-dimensional fibre.
CocycleHandle trivial_cocycle(int fibre_dim);

// alpha'(g, x) = phi(g x)^{-1} alpha(g, x) phi(x).
CocycleHandle conjugate_cocycle(const CocycleHandle& alpha, std::function<Matrix(const Vector2&)> phi);

// max |alpha(g1 g2, eta) - alpha(g1, g2 eta) alpha(g2, eta)| after
// normalizing both sides to |det| = 1 and a common overall sign.
double cocycle_residual(const CocycleHandle& alpha, const Matrix2& g1, const Matrix2& g2, const Vector2& eta);

// Direction g . eta on the unit circle.
inline Vector2 act_direction(const Matrix2& g, const Vector2& eta) {
  const Vector2 v = g * eta;
  return v / v.norm();
}

struct CrossRatio {
  double value = 0.0;
  bool degenerate = false;       // v_b parallel to v_b'
  bool ill_conditioned = false;  // some |phi(v)| below 1e-8 in the limit form
};

// Drift cross-ratio
//   log(|A' v_b'| |A v_b| / (|A' v_b| |A v_b'|))
// with A = a[n-1]...a[0], A' = a'[m-1]...a'[0] and v_b, v_b' the limit
// vectors of the pasts over their full lengths. Equal pasts or equal
// futures give exactly 0.
CrossRatio cross_ratio(const Word& a, const Word& a_prime, const Word& b, const Word& b_prime, std::size_t n,
                       std::size_t m);

// The n, m -> infinity limit of cross_ratio expressed with limit forms:
//   log(|phi_a'(v_b')| |phi_a(v_b)| / (|phi_a'(v_b)| |phi_a(v_b')|)).
CrossRatio cross_ratio_limit(const Word& a, const Word& a_prime, const Word& b, const Word& b_prime);

// First lengths n, m at which log|a[n-1]...a[0]| and log|a'[m-1]...a'[0]|
// reach `threshold`. Throws PreconditionError when a word is too short.
std::pair<std::size_t, std::size_t> matched_lengths(const Word& a, const Word& a_prime, double threshold);

}  // namespace homdyn

#endif  // HOMDYN_COCYCLE_HPP_
