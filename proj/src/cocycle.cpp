#include "homdyn/cocycle.hpp"

#include <cmath>

#include "homdyn/errors.hpp"

namespace homdyn {

namespace {

// Offset of `angle` from `center` in [-pi, pi).
double offset_from(double angle, double center) {
  double d = std::fmod(angle - center + kPi, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return d - kPi;
}

Matrix2 rotation_to(const Vector2& u) {
  Matrix2 k;
  k << u(0), -u(1), u(1), u(0);
  return k;
}

double log_norm(const Matrix2& m, const Vector2& v) { return std::log((m * v).norm()); }

}  // namespace

Matrix2 DiagSignValue::matrix() const {
  const double s = std::exp(0.5 * r);
  Matrix2 m;
  m << s, 0.0, 0.0, static_cast<double>(sign) / s;
  return m;
}

const char* to_string(SectionMode mode) {
  switch (mode) {
    case SectionMode::kConeHalfCircle:
      return "cone-half-circle";
    case SectionMode::kConnectedComponent:
      return "connected-component";
    case SectionMode::kPlain:
      break;
  }
  return "plain";
}

CircleSection CircleSection::plain() { return CircleSection(SectionMode::kPlain, 0.5 * kPi); }

CircleSection CircleSection::cone_half_circle(const Arc& cone) {
  if (!(cone.width < kPi)) throw PreconditionError("cone_half_circle: cone arc must be shorter than pi");
  return CircleSection(SectionMode::kConeHalfCircle, cone.center());
}

CircleSection CircleSection::connected_component() {
  return CircleSection(SectionMode::kConnectedComponent, 0.5 * kPi);
}

int CircleSection::sign_of(const Vector2& u) const {
  const double d = offset_from(circle_angle(u), center_);
  return (d >= -0.5 * kPi && d < 0.5 * kPi) ? 1 : -1;
}

Vector2 CircleSection::lift(const Vector2& eta) const {
  const double len = eta.norm();
  if (len == 0.0) throw PreconditionError("CircleSection: zero boundary vector");
  const Vector2 u = eta / len;
  return sign_of(u) > 0 ? u : Vector2(-u);
}

Matrix2 CircleSection::lift_rotation(const Vector2& eta) const { return rotation_to(lift(eta)); }

CircleSection default_section(const StepMeasure& mu, bool projective_group) {
  const ConeDetection cone = detect_cone(mu);
  if (cone.verdict == Tristate::kTrue) return CircleSection::cone_half_circle(cone.cone);
  if (projective_group) return CircleSection::connected_component();
  return CircleSection::plain();
}

double iwasawa_cocycle(const Matrix2& h, const Vector2& xi) {
  const double len = xi.norm();
  if (len == 0.0) throw PreconditionError("iwasawa_cocycle: zero boundary vector");
  const Matrix hk = h * rotation_to(xi / len);
  return 2.0 * std::log(iwasawa_decompose(hk).a(0, 0));
}

double sigma_chi(const Matrix2& h, const Vector2& xi, const Representation& rep) {
  const double len = xi.norm();
  if (len == 0.0) throw PreconditionError("sigma_chi: zero boundary vector");
  const Vector v = rep.highest_weight_vector(xi / len);
  const double base = rep.norm(v);
  if (base == 0.0) throw PreconditionError("sigma_chi: zero highest-weight vector");
  return 2.0 * std::log(rep.norm(rep(h) * v) / base);
}

int sign_cocycle(const Matrix2& g, const Vector2& eta, const CircleSection& sec) {
  if (sec.mode() == SectionMode::kConnectedComponent) return g.determinant() > 0.0 ? 1 : -1;
  const Vector2 u = sec.lift(eta);
  return sec.sign_of(act_direction(g, u));
}

DiagSignValue alpha_cocycle(const Matrix2& g, const Vector2& eta, const CircleSection& sec) {
  return {iwasawa_cocycle(g, eta), sign_cocycle(g, eta, sec)};
}

const char* to_string(CocycleKind kind) {
  switch (kind) {
    case CocycleKind::kIwasawaSign:
      return "iwasawa-sign";
    case CocycleKind::kMorphism:
      return "morphism";
    case CocycleKind::kConjugated:
      break;
  }
  return "conjugated";
}

CocycleHandle::CocycleHandle(CocycleKind kind, int fibre_dim, Rule rule, DiagRule diag_rule)
    : kind_(kind), fibre_dim_(fibre_dim), rule_(std::move(rule)), diag_rule_(std::move(diag_rule)) {
  if (fibre_dim_ < 1) throw PreconditionError("CocycleHandle: fibre dimension must be positive");
  if (!rule_) throw PreconditionError("CocycleHandle: empty rule");
}

DiagSignValue CocycleHandle::diag_sign(const Matrix2& g, const Vector2& eta) const {
  if (!diag_rule_) throw PreconditionError("CocycleHandle: not a diagonal-sign cocycle");
  return diag_rule_(g, eta);
}

CocycleHandle iwasawa_sign_cocycle(const CircleSection& sec) {
  auto diag = [sec](const Matrix2& g, const Vector2& eta) {
    const Vector2 u = sec.lift(eta);
    int sign = 1;
    if (sec.mode() == SectionMode::kConnectedComponent) {
      sign = g.determinant() > 0.0 ? 1 : -1;
    } else {
      sign = sec.sign_of(act_direction(g, u));
    }
    return DiagSignValue{iwasawa_increment(g, u), sign};
  };
  return CocycleHandle(
      CocycleKind::kIwasawaSign, 2, [diag](const Matrix2& g, const Vector2& eta) { return Matrix(diag(g, eta).matrix()); },
      diag);
}

CocycleHandle morphism_cocycle(const Representation& rho, std::optional<CircleSection> sec) {
  if (!sec) {
    CocycleHandle h(CocycleKind::kMorphism, rho.target_dim(),
                    [rho](const Matrix2& g, const Vector2&) { return rho(g); });
    h.boundary_independent_ = true;
    return h;
  }
  const CircleSection s = *sec;
  return CocycleHandle(CocycleKind::kMorphism, rho.target_dim(), [rho, s](const Matrix2& g, const Vector2& eta) {
    const Matrix2 k = s.lift_rotation(eta);
    const Matrix2 k_image = s.lift_rotation(g * eta);
    const Matrix2 p = k_image.transpose() * g * k;
    return rho(p);
  });
}

CocycleHandle trivial_cocycle(int fibre_dim) {
  CocycleHandle h = morphism_cocycle(
      Representation(fibre_dim, [fibre_dim](const Matrix&) { return Matrix(Matrix::Identity(fibre_dim, fibre_dim)); },
                     Vector::Ones(fibre_dim)));
  return CocycleHandle(CocycleKind::kMorphism, fibre_dim, [h](const Matrix2& g, const Vector2& eta) { return h(g, eta); },
                       [](const Matrix2&, const Vector2&) { return DiagSignValue{}; });
}

CocycleHandle conjugate_cocycle(const CocycleHandle& alpha, std::function<Matrix(const Vector2&)> phi) {
  if (!phi) throw PreconditionError("conjugate_cocycle: empty conjugating map");
  return CocycleHandle(CocycleKind::kConjugated, alpha.fibre_dim(),
                       [alpha, phi](const Matrix2& g, const Vector2& x) {
                         const Matrix right = phi(x);
                         const Matrix left = phi(act_direction(g, x));
                         return Matrix(left.inverse() * alpha(g, x) * right);
                       });
}

double cocycle_residual(const CocycleHandle& alpha, const Matrix2& g1, const Matrix2& g2, const Vector2& eta) {
  const Matrix lhs = alpha(g1 * g2, eta);
  const Matrix rhs = alpha(g1, act_direction(g2, eta)) * alpha(g2, eta);
  return max_abs(lhs - rhs) / std::max(1.0, max_abs(lhs));
}

CrossRatio cross_ratio(const Word& a, const Word& a_prime, const Word& b, const Word& b_prime, std::size_t n,
                       std::size_t m) {
  const Vector2 vb = limit_vector(b, b.size()).direction;
  const Vector2 vbp = limit_vector(b_prime, b_prime.size()).direction;
  CrossRatio out;
  if (std::abs(vb(0) * vbp(1) - vb(1) * vbp(0)) < 1e-14) {
    out.degenerate = true;
    return out;
  }
  long scale = 0;
  const Matrix2 A = forward_product(a, n, scale);
  const Matrix2 Ap = forward_product(a_prime, m, scale);
  const double top = std::max(A.norm(), 1e-300), top_p = std::max(Ap.norm(), 1e-300);
  const double l_ap_bp = log_norm(Ap, vbp), l_a_b = log_norm(A, vb);
  const double l_ap_b = log_norm(Ap, vb), l_a_bp = log_norm(A, vbp);
  out.value = (l_ap_bp + l_a_b) - (l_ap_b + l_a_bp);
  for (double l : {l_ap_bp - std::log(top_p), l_ap_b - std::log(top_p), l_a_b - std::log(top), l_a_bp - std::log(top)}) {
    if (l < std::log(1e-8)) out.ill_conditioned = true;
  }
  return out;
}

CrossRatio cross_ratio_limit(const Word& a, const Word& a_prime, const Word& b, const Word& b_prime) {
  const Vector2 vb = limit_vector(b, b.size()).direction;
  const Vector2 vbp = limit_vector(b_prime, b_prime.size()).direction;
  CrossRatio out;
  if (std::abs(vb(0) * vbp(1) - vb(1) * vbp(0)) < 1e-14) {
    out.degenerate = true;
    return out;
  }
  const Vector2 phi = limit_form(a, a.size()).direction;
  const Vector2 phi_p = limit_form(a_prime, a_prime.size()).direction;
  const double terms[4] = {std::abs(phi_p.dot(vbp)), std::abs(phi.dot(vb)), std::abs(phi_p.dot(vb)),
                           std::abs(phi.dot(vbp))};
  for (double t : terms) {
    if (t < 1e-8) out.ill_conditioned = true;
  }
  out.value = (std::log(terms[0]) + std::log(terms[1])) - (std::log(terms[2]) + std::log(terms[3]));
  return out;
}

std::pair<std::size_t, std::size_t> matched_lengths(const Word& a, const Word& a_prime, double threshold) {
  auto first_crossing = [threshold](const Word& w) {
    Matrix2 p = Matrix2::Identity();
    long scale = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      p = w[i] * p;
      scale += renormalize_pow2(p);
      const double log_norm_p = std::log(p.operatorNorm()) + static_cast<double>(scale) * log_two();
      if (log_norm_p >= threshold) return i + 1;
    }
    throw PreconditionError("matched_lengths: word too short to reach the threshold");
  };
  return {first_crossing(a), first_crossing(a_prime)};
}

}  // namespace homdyn
