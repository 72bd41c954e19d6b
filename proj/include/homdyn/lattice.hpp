#ifndef HOMDYN_LATTICE_HPP_
#define HOMDYN_LATTICE_HPP_

#include <functional>
#include <vector>

#include "homdyn/cocycle.hpp"
#include "homdyn/linalg.hpp"

namespace homdyn {

// A unimodular lattice in R^k stored as a reduced basis (columns).
//
// For k = 2 the basis is Gauss-reduced and canonical: b1 is a shortest
// vector with positive first nonzero coordinate (smallest angle on ties),
// det > 0, and <b1, b2> / |b1|^2 lies in (-1/2, 1/2]. Lattices are taken up
// to GL_k(Z), so a basis and its reflection represent the same point. For
// k >= 3 the basis is LLL-reduced with delta = 0.99.
class LatticePoint {
 public:
  // The standard lattice Z^k.
  static LatticePoint standard(int k);

  const Matrix& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.rows()); }

  bool operator==(const LatticePoint& other) const { return basis_ == other.basis_; }
  bool approx_equal(const LatticePoint& other, double tol) const;

 private:
  friend LatticePoint reduce(const Matrix& b);
  friend LatticePoint act(const Matrix& s, const LatticePoint& z);
  LatticePoint() = default;
  Matrix basis_;
  unsigned actions_ = 0;  // actions since the last determinant rescaling
};

// Reduces the lattice spanned by the columns of B. Requires |det B| = 1
// within 1e-6; throws PreconditionError for singular or non-finite input.
LatticePoint reduce(const Matrix& b);

// Lattice s B, reduced. Every 100 actions the basis is rescaled to
// |det| = 1 to stop multiplicative drift.
LatticePoint act(const Matrix& s, const LatticePoint& z);

// act(diag(e^{r/2}, e^{-r/2}) diag(1, sign), z).
LatticePoint diag_action(const DiagSignValue& d, const LatticePoint& z);

// Length of the first reduced basis vector: the lattice minimum for k = 2.
double shortest_vector(const LatticePoint& z);

// Lattice minimum by enumerating integer coefficient vectors in
// [-bound, bound]^k; reference implementation for tests.
double shortest_vector_enumerated(const Matrix& basis, int bound);

using Observable = std::function<double(const LatticePoint&)>;

// min(shortest_vector(z), cap).
Observable capped_shortest_vector(double cap = 1.0);

// Values f(G(r) z) at the midpoints r = (j + 1/2) h of [0, T], where h is
// T divided by round(T / dt), and
// G(r) = diag(e^{r/2}, e^{-r/2}). With `signed_orbit`, the values along the
// sign-twisted orbit G(r) diag(1, -1) z follow, in the same order.
std::vector<double> diag_orbit_samples(const LatticePoint& z, double T, double dt, const Observable& f,
                                       bool signed_orbit);

// Midpoint-rule average of f over the diagonal orbit segment of length T
// (the D+- average when `signed_orbit`). Requires dt <= 0.05 and T >= 1.
double diag_orbit_average(const LatticePoint& z, double T, double dt, const Observable& f, bool signed_orbit);

}  // namespace homdyn

#endif  // HOMDYN_LATTICE_HPP_
