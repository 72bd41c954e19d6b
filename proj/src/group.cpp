#include "homdyn/group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "homdyn/errors.hpp"
#include "rational.hpp"

namespace homdyn {

double circle_angle(const Vector2& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

double projective_angle(const Vector2& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double arc_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

Matrix normalize_matrix(const Matrix& m, Normalization normalization) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError("group element must be a nonempty square matrix");
  }
  const double det = m.determinant();
  if (det == 0.0 || !std::isfinite(det)) throw PreconditionError("group element must be invertible");
  const int n = static_cast<int>(m.rows());
  Matrix out = m * std::pow(std::abs(det), -1.0 / n);
  switch (normalization) {
    case Normalization::kDetOne:
      if (det < 0.0) {
        if (n % 2 == 0) throw PreconditionError("negative determinant cannot be normalized to +1 in even dimension");
        out = -out;
      }
      break;
    case Normalization::kDetPlusMinusOne:
      break;
    case Normalization::kProjective:
      for (int i = 0; i < n; ++i) {
        if (out(i, 0) != 0.0) {
          if (out(i, 0) < 0.0) out = -out;
          break;
        }
      }
      break;
  }
  return out;
}

GroupElement::GroupElement(Matrix entries, Normalization normalization)
    : entries_(normalize_matrix(entries, normalization)), normalization_(normalization) {}

GroupElement GroupElement::identity(int n, Normalization normalization) {
  return GroupElement(Matrix::Identity(n, n), normalization);
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (other.dim() != dim()) throw PreconditionError("group elements of different dimensions");
  return GroupElement(entries_ * other.entries_, normalization_);
}

GroupElement GroupElement::inverse() const { return GroupElement(entries_.inverse(), normalization_); }

bool GroupElement::approx_equal(const GroupElement& other, double tol) const {
  return other.dim() == dim() && (entries_ - other.entries_).cwiseAbs().maxCoeff() <= tol;
}

namespace {

double condition_number(const Matrix& g) {
  if (g.rows() == 2) {
    // Singular values of a 2x2 matrix from its Frobenius norm and determinant.
    const double fro2 = g.squaredNorm();
    const double det = std::abs(g.determinant());
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
    const double s1 = std::sqrt(0.5 * (fro2 + disc));
    const double s2 = det / s1;
    return s2 > 0.0 ? s1 / s2 : std::numeric_limits<double>::infinity();
  }
  Eigen::JacobiSVD<Matrix> svd(g);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

IwasawaFactors iwasawa_decompose(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw PreconditionError("iwasawa_decompose needs a square matrix");
  const double cond = condition_number(g);
  if (!(cond <= 1e12)) {
    throw DecompositionError("iwasawa_decompose: condition number " + std::to_string(cond) + " exceeds 1e12");
  }
  const Eigen::Index n = g.rows();
  Matrix q = g;
  Matrix r = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = q.col(j).norm();
    if (pivot == 0.0) throw DecompositionError("iwasawa_decompose: rank-deficient input");
    r(j, j) = pivot;
    q.col(j) /= pivot;
    for (Eigen::Index l = j + 1; l < n; ++l) {
      const double c = q.col(j).dot(q.col(l));
      r(j, l) = c;
      q.col(l) -= c * q.col(j);
    }
  }
  IwasawaFactors out;
  out.k = std::move(q);
  out.a = r.diagonal().asDiagonal();
  out.nu = r.diagonal().cwiseInverse().asDiagonal() * r;
  out.nu.diagonal().setOnes();
  return out;
}

IwasawaFactors iwasawa_decompose(const GroupElement& g) { return iwasawa_decompose(g.matrix()); }

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

Matrix sym_power(const Matrix& g, int n) {
  if (n < 1) throw PreconditionError("sym_power: target dimension must be >= 1");
  if (g.rows() != 2 || g.cols() != 2) throw PreconditionError("sym_power: source must be 2x2");
  const int d = n - 1;
  const double a = g(0, 0), b = g(0, 1), c = g(1, 0), dd = g(1, 1);
  Matrix out = Matrix::Zero(n, n);
  // Column j is the image of x^{d-j} y^j = (a x + c y)^{d-j} (b x + dd y)^j.
  for (int j = 0; j <= d; ++j) {
    for (int p = 0; p <= d - j; ++p) {
      // p factors of c y from the first power.
      const double first = binomial(d - j, p) * std::pow(a, d - j - p) * std::pow(c, p);
      if (first == 0.0) continue;
      for (int q = 0; q <= j; ++q) {
        // q factors of dd y from the second power.
        const double second = binomial(j, q) * std::pow(b, j - q) * std::pow(dd, q);
        out(p + q, j) += first * second;
      }
    }
  }
  return out;
}

Matrix bracket(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw PreconditionError("bracket: operands must be square of equal dimension");
  }
  return a * b - b * a;
}

double Sl2Triple::bracket_residual() const {
  const double r1 = max_abs(bracket(x, e) - 2.0 * e);
  const double r2 = max_abs(bracket(x, f) + 2.0 * f);
  const double r3 = max_abs(bracket(e, f) - x);
  return std::max({r1, r2, r3});
}

Sl2Triple principal_triple(int m) {
  if (m < 2) throw PreconditionError("principal_triple: dimension must be >= 2");
  Sl2Triple t{Matrix::Zero(m, m), Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (int i = 0; i < m; ++i) t.x(i, i) = m - 1 - 2 * i;
  for (int i = 0; i + 1 < m; ++i) {
    t.e(i, i + 1) = 1.0;
    t.f(i + 1, i) = static_cast<double>((i + 1) * (m - 1 - i));
  }
  return t;
}

namespace {

// Matrix of F -> [X, F] acting on column-major vec(F).
Matrix ad_matrix(const Matrix& x) {
  const Eigen::Index n = x.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n * n, n * n);
  // vec(XF) = (I kron X) vec F, vec(FX) = (X^T kron I) vec F.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.block(i * n, j * n, n, n) += id(i, j) * x;
      out.block(i * n, j * n, n, n) -= x(j, i) * id;
    }
  }
  return out;
}

}  // namespace

Sl2Extension extend_sl2_triple(const Matrix& xbar, const Matrix& ebar, double tol) {
  if (xbar.rows() != ebar.rows()) throw PreconditionError("extend_sl2_triple: dimension mismatch");
  const double pre = max_abs(bracket(xbar, ebar) - 2.0 * ebar);
  if (pre > tol) {
    throw PreconditionError("extend_sl2_triple: [x, e] = 2e violated by " + std::to_string(pre));
  }
  const Eigen::Index n = xbar.rows();
  const Eigen::Index nn = n * n;
  Matrix system(2 * nn, nn);
  system.topRows(nn) = ad_matrix(xbar) + 2.0 * Matrix::Identity(nn, nn);
  system.bottomRows(nn) = ad_matrix(ebar);
  Vector rhs = Vector::Zero(2 * nn);
  rhs.tail(nn) = Eigen::Map<const Vector>(xbar.data(), nn);

  if (detail::is_integral(system) && detail::is_integral(rhs)) {
    // Integer data: solve exactly and fall back to least squares only for
    // the residual of an inconsistent system.
    detail::RationalMatrix aug(static_cast<int>(2 * nn), static_cast<int>(nn + 1));
    for (int i = 0; i < aug.rows(); ++i) {
      for (int j = 0; j < nn; ++j) aug(i, j) = detail::Rational(static_cast<long long>(system(i, j)));
      aug(i, static_cast<int>(nn)) = detail::Rational(static_cast<long long>(rhs(i)));
    }
    const std::vector<int> pivots = detail::rref(aug);
    if (pivots.empty() || pivots.back() < nn) {
      Vector sol = Vector::Zero(nn);
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        sol(pivots[r]) = static_cast<double>(aug(static_cast<int>(r), static_cast<int>(nn)));
      }
      Sl2Extension out;
      out.f = Eigen::Map<const Matrix>(sol.data(), n, n);
      return out;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(system);
  const Vector sol = cod.solve(rhs);
  Sl2Extension out;
  out.residual = (system * sol - rhs).norm();
  if (out.residual <= tol) out.f = Eigen::Map<const Matrix>(sol.data(), n, n);
  return out;
}

Representation::Representation(int target_dim, Rule rule, Vector gram_weights, bool has_highest_weight)
    : target_dim_(target_dim),
      rule_(std::move(rule)),
      gram_weights_(std::move(gram_weights)),
      has_highest_weight_(has_highest_weight) {
  if (gram_weights_.size() != target_dim_) throw PreconditionError("Representation: gram weight size mismatch");
}

Representation Representation::standard() {
  return Representation(2, [](const Matrix& g) { return g; }, Vector::Ones(2), true);
}

Representation Representation::symmetric_power(int n) {
  if (n < 1) throw PreconditionError("symmetric_power: n must be >= 1");
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = 1.0 / binomial(n - 1, i);
  return Representation(n, [n](const Matrix& g) { return sym_power(g, n); }, w, true);
}

double Representation::norm(const Vector& v) const {
  return std::sqrt((v.array().square() * gram_weights_.array()).sum());
}

Vector Representation::highest_weight_vector(const Vector2& u) const {
  if (!has_highest_weight_) throw PreconditionError("highest_weight_vector: representation has no weight model");
  const int d = target_dim_ - 1;
  Vector out(target_dim_);
  for (int i = 0; i <= d; ++i) out(i) = binomial(d, i) * std::pow(u(0), d - i) * std::pow(u(1), i);
  return out;
}

Representation triple_representation(const Sl2Triple& triple) {
  const int n = triple.dim();
  const Matrix rot_gen = triple.f - triple.e;
  return Representation(
      n,
      [triple, rot_gen](const Matrix& g) -> Matrix {
        if (g.rows() != 2 || g.cols() != 2) throw PreconditionError("triple_representation: input must be 2x2");
        if (!(g.determinant() > 0.0)) throw PreconditionError("triple_representation: det must be positive");
        const Matrix g1 = g / std::sqrt(g.determinant());
        const IwasawaFactors f = iwasawa_decompose(g1);
        const double theta = std::atan2(f.k(1, 0), f.k(0, 0));
        const Matrix k = (theta * rot_gen).exp();
        const Matrix a = (std::log(f.a(0, 0)) * triple.x).exp();
        const Matrix nu = (f.nu(0, 1) * triple.e).exp();
        return k * a * nu;
      },
      Vector::Ones(n));
}

}  // namespace homdyn
