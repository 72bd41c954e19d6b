#include <doctest.h>

#include <random>

#include "homdyn/boundary.hpp"
#include "homdyn/catalog.hpp"
#include "homdyn/errors.hpp"
#include "oracles.hpp"

using namespace homdyn;

namespace {

Matrix2 m2(double a, double b, double c, double d) {
  Matrix2 m;
  m << a, b, c, d;
  return m;
}

// Angle between two lines through the origin.
double line_distance(const Vector2& u, const Vector2& v) {
  return arc_distance(projective_angle(u), projective_angle(v), kPi);
}

}  // namespace

TEST_CASE("step measures validate their atoms") {
  CHECK_THROWS_AS(StepMeasure({{0.5, Matrix2::Identity()}, {0.4, Matrix2::Identity()}}), PreconditionError);
  CHECK_THROWS_AS(StepMeasure({{1.0, m2(2, 0, 0, 1)}}), PreconditionError);
  CHECK_THROWS_AS(StepMeasure({{-1.0, Matrix2::Identity()}, {2.0, Matrix2::Identity()}}), PreconditionError);
  CHECK_THROWS_AS(StepMeasure(std::vector<Atom>{}), PreconditionError);
  const StepMeasure mu = canned_measure("positive-pair");
  CHECK(mu.size() == 2);
  CHECK(mu.looks_zariski_dense());
  CHECK_FALSE(canned_measure("diagonal").looks_zariski_dense());
  CHECK(canned_measure("diagonal").deterministic());
}

TEST_CASE("limit vectors of fixed words") {
  const Word diag(10, m2(2, 0, 0, 0.5));
  CHECK(line_distance(limit_vector(diag, 10).direction, Vector2(1, 0)) < 1e-15);
  const Word tri(40, m2(2, 1, 0, 0.5));
  CHECK(line_distance(limit_vector(tri, 40).direction, Vector2(1, 0)) < 1e-12);
  const LimitDirection v = limit_vector(tri, 40);
  CHECK(v.proximal);
  CHECK(v.direction(0) > 0.0);
  const LimitDirection rot = limit_vector(Word(5, m2(0, -1, 1, 0)), 5);
  CHECK_FALSE(rot.proximal);
}

TEST_CASE("limit vector agrees with an SVD oracle") {
  const StepMeasure mu = canned_measure("positive-triple");
  Engine rng = substream(41, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Word b = mu.sample_word(50, rng);
    Matrix2 p = Matrix2::Identity();
    for (const Matrix2& g : b) p = p * g;  // b[0] b[1] ... b[n-1]
    Eigen::JacobiSVD<Matrix2> svd(p, Eigen::ComputeFullU);
    CHECK(line_distance(limit_vector(b, 50).direction, svd.matrixU().col(0)) < 1e-9);
  }
}

TEST_CASE("limit forms of fixed words") {
  const Word diag(10, m2(2, 0, 0, 0.5));
  CHECK(line_distance(limit_form(diag, 10).direction, Vector2(1, 0)) < 1e-15);
  const Word lower(30, m2(2, 0, 1, 0.5));
  Matrix2 p = Matrix2::Identity();
  for (const Matrix2& g : lower) p = g * p;
  Eigen::JacobiSVD<Matrix2> svd(p, Eigen::ComputeFullV);
  const Vector2 phi = limit_form(lower, 30).direction;
  CHECK(line_distance(phi, svd.matrixV().col(0)) < 1e-9);
  CHECK(std::abs(phi.dot(Vector2(0, 1))) < 1e-9);  // kills the contracted eigenvector
}

TEST_CASE("limit form reproduces asymptotic norm ratios") {
  const StepMeasure mu = canned_measure("positive-pair");
  Engine rng = substream(42, 0);
  std::mt19937_64 angles(43);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const Word a = mu.sample_word(60, rng);
    long scale = 0;
    const Matrix2 p = forward_product(a, 60, scale);
    const Vector2 phi = limit_form(a, 60).direction;
    const Vector2 v = unit_at(angle(angles)), w = unit_at(angle(angles));
    const double lhs = (p * v).norm() / (p * w).norm();
    const double rhs = std::abs(phi.dot(v)) / std::abs(phi.dot(w));
    CHECK(std::abs(lhs - rhs) <= 1e-2 * std::max(1.0, rhs));
  }
}

TEST_CASE("limit vectors stabilize and are equivariant") {
  const StepMeasure mu = canned_measure("positive-pair");
  Engine rng = substream(44, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Word b = mu.sample_word(61, rng);
    CHECK(line_distance(limit_vector(b, 40).direction, limit_vector(b, 60).direction) <= 1e-6);
    // Prepending a0 to the past moves the limit by a0: xi(a0 b) = a0 xi(b).
    Word shifted(b.begin() + 1, b.end());
    const Vector2 pushed = b.front() * limit_vector(shifted, 60).direction;
    CHECK(line_distance(limit_vector(b, 61).direction, pushed) <= 1e-9);
  }
}

TEST_CASE("limit directions need a long enough word") {
  CHECK_THROWS_AS(limit_vector(Word(3, Matrix2::Identity()), 4), PreconditionError);
  CHECK_THROWS_AS(limit_form(Word(3, Matrix2::Identity()), 0), PreconditionError);
}

TEST_CASE("forward product keeps an exact power-of-two scale") {
  const Word w(2000, m2(2, 0, 0, 0.5));
  long scale = 0;
  const Matrix2 p = forward_product(w, 2000, scale);
  CHECK(std::log(p(0, 0)) + scale * log_two() == doctest::Approx(2000 * std::log(2.0)));
}

TEST_CASE("furstenberg samples of a positive measure stay in the quadrant") {
  const EmpiricalMeasure nu =
      sample_furstenberg(canned_measure("positive-pair"), 100, 20000, MetricSpace::kCircle, 45, Vector2(1, 1));
  for (double a : nu.values()) CHECK((a >= 0.0 && a <= 0.5 * kPi));
  const EmpiricalMeasure proj =
      sample_furstenberg(canned_measure("positive-pair"), 100, 1000, MetricSpace::kProjective, 45);
  for (double a : proj.values()) CHECK((a >= 0.0 && a < kPi));
}

TEST_CASE("furstenberg sampling is stationary") {
  for (const char* name : {"positive-pair", "positive-triple"}) {
    const StepMeasure mu = canned_measure(name);
    const EmpiricalMeasure nu = sample_furstenberg(mu, 200, 100000, MetricSpace::kProjective, 46);
    // mu * nu: push each sample through an independent step.
    Engine rng = substream(47, 0);
    std::vector<double> pushed;
    for (double a : nu.values()) {
      const Vector2 v = mu.sample(rng) * unit_at(a);
      pushed.push_back(projective_angle(v));
    }
    CHECK(nu.wasserstein1(EmpiricalMeasure(MetricSpace::kProjective, pushed)) <= 0.02);
  }
}

TEST_CASE("a rotation-rich measure has an antipodally symmetric circle measure") {
  const EmpiricalMeasure nu =
      sample_furstenberg(canned_measure("rotation-diagonal"), 200, 100000, MetricSpace::kCircle, 48);
  const EmpiricalMeasure flipped = nu.map([](double a) { return a + kPi; }, MetricSpace::kCircle);
  CHECK(nu.wasserstein1(flipped) <= 0.02);
}

TEST_CASE("cone detection") {
  const ConeDetection positive = detect_cone(canned_measure("positive-pair"));
  CHECK(positive.verdict == Tristate::kTrue);
  CHECK(positive.cone.width < kPi);
  CHECK(detect_cone(canned_measure("unipotent-pair")).verdict == Tristate::kTrue);
  CHECK(detect_cone(canned_measure("rotation-diagonal")).verdict == Tristate::kFalse);
  CHECK(std::string(to_string(Tristate::kUnknown)) == "unknown");
}

TEST_CASE("attraction probabilities") {
  const StepMeasure mu = canned_measure("unipotent-pair");
  const ConeDetection cone = detect_cone(mu);
  const LimitSet limit(mu, cone.cone, 20000, 49);
  const Vector2 inside = unit_at(limit.angles()[limit.angles().size() / 2]);
  const AttractionProbabilities in = estimate_p1p2(mu, limit, inside, 2000, 200, 50);
  CHECK(in.p1 == doctest::Approx(1.0));
  CHECK(in.p1 + in.p2 == 1.0);
  const AttractionProbabilities out = estimate_p1p2(mu, limit, -inside, 2000, 200, 51);
  CHECK(out.p2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(estimate_p1p2(canned_measure("rotation-diagonal"), Vector2(1, 0), 10, 10, 52), ConfigurationError);
}

TEST_CASE("hitting measure from inside the cone lives on the cone limit set") {
  const StepMeasure mu = canned_measure("unipotent-pair");
  const EmpiricalMeasure nu = sample_hitting_measure(mu, unit_at(0.7), 200, 2000, 53);
  for (double a : nu.values()) CHECK((a >= 0.0 && a <= 0.5 * kPi));
}

TEST_CASE("autocorrelation of a constant-free alternating series") {
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back(i % 2 ? 1.0 : -1.0);
  CHECK(autocorrelation(s, 1) == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK(autocorrelation(s, 2) == doctest::Approx(1.0).epsilon(1e-2));
}
