#include <doctest.h>

#include <random>

#include "homdyn/errors.hpp"
#include "homdyn/group.hpp"
#include "oracles.hpp"

using namespace homdyn;

TEST_CASE("iwasawa factors agree with a Householder QR oracle") {
  std::mt19937_64 rng(11);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 500; ++trial) {
      const Matrix g = oracle::random_sl(n, rng);
      Matrix q, r;
      oracle::householder_qr(g, q, r);
      const IwasawaFactors f = iwasawa_decompose(g);
      CHECK(max_abs(f.k - q) < 1e-10);
      CHECK(max_abs(f.a - Matrix(r.diagonal().asDiagonal())) < 1e-10);
      const Matrix nu = r.diagonal().asDiagonal().inverse() * r;
      CHECK(max_abs(f.nu - nu) < 1e-10);
      CHECK(max_abs(g - f.k * f.a * f.nu) < 1e-12);
    }
  }
}

TEST_CASE("iwasawa of [[1,0],[1,1]] by hand") {
  Matrix g(2, 2);
  g << 1, 0, 1, 1;
  const IwasawaFactors f = iwasawa_decompose(g);
  const double s = std::sqrt(0.5);
  Matrix k(2, 2), a(2, 2), nu(2, 2);
  k << s, -s, s, s;
  a << std::sqrt(2.0), 0, 0, s;
  nu << 1, 0.5, 0, 1;
  CHECK(max_abs(f.k - k) < 1e-15);
  CHECK(max_abs(f.a - a) < 1e-15);
  CHECK(max_abs(f.nu - nu) < 1e-15);
}

TEST_CASE("iwasawa of the identity and a negative determinant") {
  const IwasawaFactors id = iwasawa_decompose(Matrix(Matrix::Identity(3, 3)));
  CHECK(max_abs(id.k - Matrix::Identity(3, 3)) == 0.0);
  Matrix g(2, 2);
  g << 0, 1, 1, 0;
  const IwasawaFactors f = iwasawa_decompose(g);
  CHECK(f.k.determinant() == doctest::Approx(-1.0));
  CHECK(max_abs(g - f.k * f.a * f.nu) < 1e-15);
}

TEST_CASE("iwasawa refuses near-singular input") {
  Matrix g(2, 2);
  g << 1, 1, 1, 1 + 1e-14;
  CHECK_THROWS_AS(iwasawa_decompose(g), DecompositionError);
}

TEST_CASE("group elements normalize and multiply") {
  Matrix m(2, 2);
  m << -2, 0, 0, -0.5;
  const GroupElement p(m, Normalization::kProjective);
  CHECK(p.matrix()(0, 0) == doctest::Approx(2.0));
  const GroupElement g(m);
  CHECK((g * g.inverse()).approx_equal(GroupElement::identity(2), 1e-15));
  Matrix bad(2, 2);
  bad << 1, 0, 0, 0;
  CHECK_THROWS_AS(GroupElement{bad}, PreconditionError);
}

TEST_CASE("sym_power matches polynomial substitution") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix2 g = oracle::random_sl2(rng);
      const Matrix expected = oracle::sym_power_by_substitution(g, n);
      CHECK(max_abs(sym_power(g, n) - expected) < 1e-10 * std::max(1.0, max_abs(expected)));
    }
  }
  const Matrix2 g = oracle::random_sl2(rng);
  CHECK(max_abs(sym_power(g, 2) - Matrix(g)) == 0.0);
}

TEST_CASE("sym_power is a homomorphism") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix2 g = oracle::random_sl2(rng), h = oracle::random_sl2(rng);
    const Matrix lhs = sym_power(g * h, 5);
    CHECK(max_abs(lhs - sym_power(g, 5) * sym_power(h, 5)) < 1e-10 * std::max(1.0, max_abs(lhs)));
  }
}

TEST_CASE("principal triple brackets hold in integer arithmetic") {
  using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
  for (int m = 2; m <= 8; ++m) {
    const Sl2Triple t = principal_triple(m);
    auto to_int = [](const Matrix& a) {
      IntMatrix out = a.unaryExpr([](double v) { return static_cast<long long>(std::llround(v)); });
      REQUIRE((out.cast<double>() - a).cwiseAbs().maxCoeff() == 0.0);
      return out;
    };
    const IntMatrix e = to_int(t.e), x = to_int(t.x), f = to_int(t.f);
    auto br = [](const IntMatrix& a, const IntMatrix& b) -> IntMatrix { return a * b - b * a; };
    CHECK(br(x, e) == 2 * e);
    CHECK(br(x, f) == -2 * f);
    CHECK(br(e, f) == x);
    CHECK(t.bracket_residual() == 0.0);
  }
}

TEST_CASE("extend_sl2_triple recovers the principal f") {
  for (int m = 2; m <= 8; ++m) {
    const Sl2Triple t = principal_triple(m);
    const Sl2Extension ext = extend_sl2_triple(t.x, t.e);
    REQUIRE(ext.f.has_value());
    CHECK(ext.residual < 1e-12);
    CHECK(max_abs(*ext.f - t.f) < 1e-9);
  }
}

TEST_CASE("extend_sl2_triple refuses a pair without [x, e] = 2e") {
  Matrix x = Matrix::Zero(2, 2), e = Matrix::Zero(2, 2);
  e(0, 1) = 1.0;
  CHECK_THROWS_AS(extend_sl2_triple(x, e), PreconditionError);
}

TEST_CASE("bracket checks dimensions") {
  CHECK_THROWS_AS(bracket(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), PreconditionError);
}

TEST_CASE("triple_representation integrates the standard triple to the identity map") {
  Sl2Triple std_triple{Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  std_triple.e(0, 1) = 1.0;
  std_triple.f(1, 0) = 1.0;
  std_triple.x(0, 0) = 1.0;
  std_triple.x(1, 1) = -1.0;
  const Representation rho = triple_representation(std_triple);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix2 g = oracle::random_sl2(rng);
    CHECK(max_abs(rho(g) - Matrix(g)) < 1e-10);
  }
}

TEST_CASE("triple_representation is a homomorphism") {
  const Representation rho = triple_representation(principal_triple(4));
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix2 g = oracle::random_sl2(rng), h = oracle::random_sl2(rng);
    const Matrix lhs = rho(g * h);
    CHECK(max_abs(lhs - rho(g) * rho(h)) < 1e-8 * std::max(1.0, max_abs(lhs)));
  }
}

TEST_CASE("symmetric power norm is rotation invariant") {
  const Representation rep = Representation::symmetric_power(5);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(5);
    for (int i = 0; i < 5; ++i) v(i) = normal(rng);
    const double theta = normal(rng);
    Matrix2 k;
    k << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    CHECK(rep.norm(rep(k) * v) == doctest::Approx(rep.norm(v)).epsilon(1e-12));
  }
}

TEST_CASE("highest weight vector needs a factory representation") {
  const Representation rho = triple_representation(principal_triple(3));
  CHECK_THROWS_AS(rho.highest_weight_vector(Vector2(1.0, 0.0)), PreconditionError);
  const Representation sym = Representation::symmetric_power(3);
  const Vector v = sym.highest_weight_vector(Vector2(1.0, 0.0));
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(v.tail(2).norm() == 0.0);
}
