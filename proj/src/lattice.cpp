#include "homdyn/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "homdyn/errors.hpp"

namespace homdyn {

namespace {

// Integer k with r - k in (-1/2, 1/2].
double size_coefficient(double r) { return std::ceil(r - 0.5); }

bool positive_direction(const Vector2& v) { return v(0) > 0.0 || (v(0) == 0.0 && v(1) > 0.0); }

void size_reduce(const Vector2& b1, Vector2& b2) {
  const double k = size_coefficient(b1.dot(b2) / b1.squaredNorm());
  if (k != 0.0) b2 -= k * b1;
}

Matrix gauss_reduce(const Matrix& basis) {
  Vector2 b1 = basis.col(0), b2 = basis.col(1);
  bool done = false;
  for (int iter = 0; iter < 100000; ++iter) {
    if (b2.squaredNorm() < b1.squaredNorm()) std::swap(b1, b2);
    const double k = size_coefficient(b1.dot(b2) / b1.squaredNorm());
    if (k == 0.0) {
      done = true;
      break;
    }
    b2 -= k * b1;
  }
  if (!done) throw DecompositionError("reduce: Gauss reduction did not terminate");

  if (b1(0) * b2(1) - b1(1) * b2(0) < 0.0) b2 = -b2;
  if (!positive_direction(b1)) {
    b1 = -b1;
    b2 = -b2;
  }
  size_reduce(b1, b2);

  // Among ties for the shortest vector pick the one of smallest angle.
  const double limit = b1.squaredNorm() * (1.0 + 1e-12);
  struct Candidate {
    Vector2 v;
    Vector2 partner;  // completes v to a positively oriented basis
  };
  std::vector<Candidate> candidates{{b1, b2}};
  if (b2.squaredNorm() <= limit) {
    candidates.push_back({b2, -b1});
    candidates.push_back({-b2, b1});
  }
  const Vector2 diff = b2 - b1;
  if (diff.squaredNorm() <= limit) {
    candidates.push_back({diff, -b1});
    candidates.push_back({-diff, b1});
  }
  std::size_t best = 0;
  double best_angle = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!positive_direction(candidates[i].v)) continue;
    const double angle = std::atan2(candidates[i].v(1), candidates[i].v(0));
    if (angle < best_angle) {
      best_angle = angle;
      best = i;
    }
  }
  if (best != 0) {
    b1 = candidates[best].v;
    b2 = candidates[best].partner;
    size_reduce(b1, b2);
  }
  Matrix out(2, 2);
  out.col(0) = b1;
  out.col(1) = b2;
  return out;
}

Matrix lll_reduce(Matrix b) {
  const int k = static_cast<int>(b.cols());
  constexpr double delta = 0.99;
  auto gram_schmidt = [&](Matrix& bstar, Matrix& mu) {
    bstar = b;
    mu = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < i; ++j) {
        mu(i, j) = b.col(i).dot(bstar.col(j)) / bstar.col(j).squaredNorm();
        bstar.col(i) -= mu(i, j) * bstar.col(j);
      }
    }
  };
  Matrix bstar, mu;
  gram_schmidt(bstar, mu);
  int i = 1;
  for (long guard = 0; i < k; ++guard) {
    if (guard > 1000000) throw DecompositionError("reduce: LLL did not terminate");
    for (int j = i - 1; j >= 0; --j) {
      const double q = std::round(mu(i, j));
      if (q != 0.0) {
        b.col(i) -= q * b.col(j);
        for (int l = 0; l <= j; ++l) mu(i, l) -= q * (l == j ? 1.0 : mu(j, l));
      }
    }
    const double lhs = bstar.col(i).squaredNorm();
    const double rhs = (delta - mu(i, i - 1) * mu(i, i - 1)) * bstar.col(i - 1).squaredNorm();
    if (lhs >= rhs) {
      ++i;
    } else {
      b.col(i).swap(b.col(i - 1));
      gram_schmidt(bstar, mu);
      i = std::max(i - 1, 1);
    }
  }
  if (!positive_direction(Vector2(b(0, 0), b(1, 0)))) b.col(0) = -b.col(0);
  if (b.determinant() < 0.0) b.col(k - 1) = -b.col(k - 1);
  return b;
}

void check_basis(const Matrix& b) {
  if (b.rows() != b.cols() || b.rows() < 2) throw PreconditionError("reduce: basis must be square of size >= 2");
  if (!b.allFinite()) throw PreconditionError("reduce: non-finite basis entry");
  const double det = std::abs(b.determinant());
  if (!(det > 1e-12)) throw PreconditionError("reduce: near-singular basis");
  if (std::abs(det - 1.0) > 1e-6) throw PreconditionError("reduce: basis is not unimodular");
}

Matrix reduce_basis(const Matrix& b) {
  check_basis(b);
  return b.rows() == 2 ? gauss_reduce(b) : lll_reduce(b);
}

}  // namespace

LatticePoint LatticePoint::standard(int k) { return reduce(Matrix::Identity(k, k)); }

bool LatticePoint::approx_equal(const LatticePoint& other, double tol) const {
  return basis_.rows() == other.basis_.rows() && max_abs(basis_ - other.basis_) <= tol;
}

LatticePoint reduce(const Matrix& b) {
  LatticePoint z;
  z.basis_ = reduce_basis(b);
  return z;
}

LatticePoint act(const Matrix& s, const LatticePoint& z) {
  if (s.rows() != z.dim() || s.cols() != z.dim()) throw PreconditionError("act: dimension mismatch");
  Matrix moved = s * z.basis_;
  unsigned actions = z.actions_ + 1;
  if (actions >= 100) {
    moved /= std::pow(std::abs(moved.determinant()), 1.0 / static_cast<double>(z.dim()));
    actions = 0;
  }
  LatticePoint out;
  out.basis_ = reduce_basis(moved);
  out.actions_ = actions;
  return out;
}

LatticePoint diag_action(const DiagSignValue& d, const LatticePoint& z) {
  if (z.dim() != 2) throw PreconditionError("diag_action: fibre must be 2-dimensional");
  return act(d.matrix(), z);
}

double shortest_vector(const LatticePoint& z) { return z.basis().col(0).norm(); }

double shortest_vector_enumerated(const Matrix& basis, int bound) {
  const int k = static_cast<int>(basis.cols());
  std::vector<int> c(k, -bound);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    bool nonzero = false;
    Vector v = Vector::Zero(basis.rows());
    for (int i = 0; i < k; ++i) {
      if (c[i] != 0) nonzero = true;
      v += static_cast<double>(c[i]) * basis.col(i);
    }
    if (nonzero) best = std::min(best, v.norm());
    int pos = 0;
    while (pos < k && c[pos] == bound) c[pos++] = -bound;
    if (pos == k) break;
    ++c[pos];
  }
  return best;
}

Observable capped_shortest_vector(double cap) {
  return [cap](const LatticePoint& z) { return std::min(shortest_vector(z), cap); };
}

std::vector<double> diag_orbit_samples(const LatticePoint& z, double T, double dt, const Observable& f,
                                       bool signed_orbit) {
  if (z.dim() != 2) throw PreconditionError("diag_orbit_samples: fibre must be 2-dimensional");
  if (!(dt > 0.0) || !(T >= 0.0)) throw PreconditionError("diag_orbit_samples: need dt > 0 and T >= 0");
  // Step size T / count, the closest to dt that tiles [0, T] exactly.
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
  const double h = T / static_cast<double>(count);
  std::vector<double> out;
  out.reserve(signed_orbit ? 2 * count : count);
  const Matrix stepper = DiagSignValue{h, 1}.matrix();
  auto run = [&](LatticePoint start) {
    LatticePoint cur = diag_action({0.5 * h, 1}, start);
    for (std::size_t j = 0; j < count; ++j) {
      out.push_back(f(cur));
      cur = act(stepper, cur);
    }
  };
  run(z);
  if (signed_orbit) run(diag_action({0.0, -1}, z));
  return out;
}

double diag_orbit_average(const LatticePoint& z, double T, double dt, const Observable& f, bool signed_orbit) {
  if (dt > 0.05) throw PreconditionError("diag_orbit_average: dt must be at most 0.05");
  if (T < 1.0) throw PreconditionError("diag_orbit_average: T must be at least 1");
  const std::vector<double> values = diag_orbit_samples(z, T, dt, f, signed_orbit);
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

}  // namespace homdyn
