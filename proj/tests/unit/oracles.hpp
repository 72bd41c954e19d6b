#ifndef HOMDYN_TESTS_ORACLES_HPP_
#define HOMDYN_TESTS_ORACLES_HPP_

// Reference implementations used as independent oracles. They share no
// code with the library beyond the Eigen matrix types.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "homdyn/linalg.hpp"

namespace oracle {

using homdyn::Matrix;
using homdyn::Matrix2;

// Householder QR with the signs fixed so that R has a positive diagonal.
inline void householder_qr(const Matrix& g, Matrix& q, Matrix& r) {
  const Eigen::Index n = g.rows();
  r = g;
  q = Matrix::Identity(n, n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    Eigen::VectorXd x = r.block(j, j, n - j, 1);
    const double alpha = (x(0) >= 0.0 ? -1.0 : 1.0) * x.norm();
    Eigen::VectorXd v = x;
    v(0) -= alpha;
    const double vn = v.squaredNorm();
    if (vn == 0.0) continue;
    const Matrix h = Matrix::Identity(n - j, n - j) - 2.0 * v * v.transpose() / vn;
    r.bottomRows(n - j) = h * r.bottomRows(n - j);
    q.rightCols(n - j) = q.rightCols(n - j) * h;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
}

// Coefficients of prod_j (a x + c y)^{n-1-j} (b x + d y)^j expanded in the
// basis x^{n-1}, ..., y^{n-1}: column j of sym^{n-1}(g) by polynomial
// multiplication.
inline Matrix sym_power_by_substitution(const Matrix2& g, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> poly{1.0};  // coefficient of x^{deg-i} y^i
    auto times = [&](double px, double py) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * px;
        next[i + 1] += poly[i] * py;
      }
      poly = next;
    };
    for (int k = 0; k < n - 1 - j; ++k) times(g(0, 0), g(1, 0));
    for (int k = 0; k < j; ++k) times(g(0, 1), g(1, 1));
    for (int i = 0; i < n; ++i) out(i, j) = poly[static_cast<std::size_t>(i)];
  }
  return out;
}

// Exact fraction over 128-bit integers, enough for small integer inputs.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;

  static __int128 gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
  Fraction normalized() const {
    Fraction f = *this;
    if (f.den < 0) {
      f.num = -f.num;
      f.den = -f.den;
    }
    const __int128 g = gcd(f.num, f.den);
    f.num /= g;
    f.den /= g;
    return f;
  }
  Fraction operator-(const Fraction& o) const { return Fraction{num * o.den - o.num * den, den * o.den}.normalized(); }
  Fraction operator*(const Fraction& o) const { return Fraction{num * o.num, den * o.den}.normalized(); }
  Fraction operator/(const Fraction& o) const { return Fraction{num * o.den, den * o.num}.normalized(); }
  bool zero() const { return num == 0; }
};

// Rank of an integer matrix by fraction Gaussian elimination.
inline int exact_rank(const std::vector<std::vector<long long>>& rows_in) {
  std::vector<std::vector<Fraction>> m;
  for (const auto& r : rows_in) {
    std::vector<Fraction> row;
    for (long long v : r) row.push_back(Fraction{v, 1});
    m.push_back(row);
  }
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < m.size() && m[pivot][c].zero()) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[pivot], m[static_cast<std::size_t>(rank)]);
    const auto& p = m[static_cast<std::size_t>(rank)];
    for (std::size_t i = static_cast<std::size_t>(rank) + 1; i < m.size(); ++i) {
      if (m[i][c].zero()) continue;
      const Fraction factor = m[i][c] / p[c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] = m[i][k] - factor * p[k];
    }
    ++rank;
  }
  return rank;
}

// dim(span A n span B) = rank A + rank B - rank [A; B] for integer matrices
// flattened to coordinate rows.
inline int exact_intersection_dim(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  auto rows = [](const std::vector<Matrix>& basis) {
    std::vector<std::vector<long long>> out;
    for (const Matrix& m : basis) {
      std::vector<long long> row;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(std::llround(m(i, j)));
      out.push_back(row);
    }
    return out;
  };
  auto ra = rows(a), rb = rows(b), both = ra;
  both.insert(both.end(), rb.begin(), rb.end());
  return exact_rank(ra) + exact_rank(rb) - exact_rank(both);
}

// Random SL_n matrix with entries of moderate size.
inline Matrix random_sl(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
    const double det = g.determinant();
    if (std::abs(det) < 1e-3) continue;
    if (det < 0.0) g.col(0) *= -1.0;
    return g / std::pow(std::abs(det), 1.0 / n);
  }
}

inline Matrix2 random_sl2(std::mt19937_64& rng) { return Matrix2(random_sl(2, rng)); }

}  // namespace oracle

#endif  // HOMDYN_TESTS_ORACLES_HPP_
