#ifndef HOMDYN_SRC_RATIONAL_HPP_
#define HOMDYN_SRC_RATIONAL_HPP_

// Exact rational linear algebra for integer inputs. Internal to the library.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "homdyn/linalg.hpp"

namespace homdyn::detail {

using Rational = boost::multiprecision::cpp_rational;

// Dense rational matrix, row-major.
class RationalMatrix {
 public:
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows * cols)) {}
  static RationalMatrix from(const Matrix& m) {
    RationalMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r(i, j) = Rational(static_cast<long long>(std::llround(m(i, j))));
    return r;
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return v_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const { return v_[static_cast<std::size_t>(i * cols_ + j)]; }

  RationalMatrix operator*(const RationalMatrix& o) const {
    RationalMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        if ((*this)(i, k) == 0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
      }
    return r;
  }
  RationalMatrix operator-(const RationalMatrix& o) const {
    RationalMatrix r = *this;
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] -= o.v_[i];
    return r;
  }
  RationalMatrix operator+(const RationalMatrix& o) const {
    RationalMatrix r = *this;
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] += o.v_[i];
    return r;
  }
  RationalMatrix scaled(const Rational& s) const {
    RationalMatrix r = *this;
    for (auto& x : r.v_) x *= s;
    return r;
  }
  bool is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](const Rational& x) { return x == 0; });
  }
  Matrix to_double() const {
    Matrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<Rational> v_;
};

inline RationalMatrix rbracket(const RationalMatrix& a, const RationalMatrix& b) { return a * b - b * a; }

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(RationalMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (int j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational factor = m(i, col);
      for (int j = 0; j < m.cols(); ++j) m(i, j) -= factor * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rational_rank(RationalMatrix m) { return static_cast<int>(rref(m).size()); }

// Null space basis of m as coefficient vectors.
inline std::vector<std::vector<Rational>> null_space(RationalMatrix m) {
  const auto pivots = rref(m);
  std::vector<std::vector<Rational>> out;
  std::set<int> pivot_set(pivots.begin(), pivots.end());
  for (int free = 0; free < m.cols(); ++free) {
    if (pivot_set.count(free)) continue;
    std::vector<Rational> v(static_cast<std::size_t>(m.cols()));
    v[static_cast<std::size_t>(free)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[static_cast<std::size_t>(pivots[r])] = -m(static_cast<int>(r), free);
    out.push_back(std::move(v));
  }
  return out;
}

// True when every entry is an integer of moderate size.
inline bool is_integral(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (!std::isfinite(v) || std::abs(v) > 1e9 || v != std::round(v)) return false;
  }
  return true;
}

}  // namespace homdyn::detail

#endif  // HOMDYN_SRC_RATIONAL_HPP_
