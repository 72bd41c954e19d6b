#ifndef HOMDYN_GROUP_HPP_
#define HOMDYN_GROUP_HPP_

#include <functional>
#include <optional>

#include "homdyn/linalg.hpp"

namespace homdyn {

enum class Normalization {
  kDetOne,       // SL_n: determinant +1
  kDetPlusMinusOne,  // SL_n^{+-}: |det| = 1
  kProjective,   // PGL_n: |det| = 1 and a canonical sign
};

// An element of SL_n, SL_n^{+-} or PGL_n stored as a normalized matrix.
//
// Projective representatives are canonicalized so that the first nonzero
// entry of the first column is positive; two projective elements are equal
// exactly when their stored matrices are.
class GroupElement {
 public:
  explicit GroupElement(Matrix entries, Normalization normalization = Normalization::kDetOne);

  static GroupElement identity(int n, Normalization normalization = Normalization::kDetOne);

  const Matrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  Normalization normalization() const { return normalization_; }

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;

  // Entrywise comparison of representatives.
  bool approx_equal(const GroupElement& other, double tol) const;

 private:
  Matrix entries_;
  Normalization normalization_;
};

// Rescales `m` to |det| = 1 and, for projective classes, fixes the sign of
// the first nonzero entry of the first column.
Matrix normalize_matrix(const Matrix& m, Normalization normalization);

// Factors g = k * a * nu with k orthogonal, a positive diagonal and nu unit
// upper triangular.
struct IwasawaFactors {
  Matrix k;
  Matrix a;
  Matrix nu;
};

// Iwasawa (KAN) decomposition by modified Gram-Schmidt on the columns with
// positive pivots. Throws DecompositionError when the condition number of
// `g` exceeds 1e12. For det g < 0 the orthogonal factor has det -1.
IwasawaFactors iwasawa_decompose(const Matrix& g);
IwasawaFactors iwasawa_decompose(const GroupElement& g);

// Matrix of the n-dimensional irreducible representation of SL_2 evaluated
// at the 2x2 matrix g, acting on homogeneous polynomials of degree n-1.
//
// Basis order is x^{n-1}, x^{n-2} y, ..., y^{n-1}, so the weights of the
// diagonal torus appear in descending order n-1, n-3, ..., 1-n along the
// diagonal. For n = 2 the result is g itself.
Matrix sym_power(const Matrix& g, int n);

// (e, x, f) with [x, e] = 2e, [x, f] = -2f, [e, f] = x.
struct Sl2Triple {
  Matrix e;
  Matrix x;
  Matrix f;

  int dim() const { return static_cast<int>(x.rows()); }
  // Largest entrywise violation of the three bracket relations.
  double bracket_residual() const;
};

// Lie bracket ab - ba. Throws PreconditionError on a dimension mismatch.
Matrix bracket(const Matrix& a, const Matrix& b);

// Principal triple in dimension m >= 2: x = diag(m-1, m-3, ..., 1-m),
// e = ones on the superdiagonal, f = (m-1), 2(m-2), ..., (m-1) on the
// subdiagonal. All entries are integers.
Sl2Triple principal_triple(int m);

struct Sl2Extension {
  std::optional<Matrix> f;  // set when the residual is below tol
  double residual = 0.0;    // minimal residual of the stacked linear system
};

// Looks for f with [x, f] = -2f and [e, f] = x by least squares over all
// n x n matrices. Integer inputs are solved exactly in rational arithmetic,
// so a consistent integer system reports residual 0. Requires [x, e] = 2e
// to `tol`; otherwise PreconditionError.
Sl2Extension extend_sl2_triple(const Matrix& xbar, const Matrix& ebar, double tol = 1e-6);

// A finite-dimensional representation of SL_2 given by an evaluation rule,
// together with the Gram weights of a K-invariant Euclidean norm in the
// working basis (the basis is orthogonal for that norm).
class Representation {
 public:
  using Rule = std::function<Matrix(const Matrix&)>;

  // Without `has_highest_weight`, highest_weight_vector is unavailable.
  Representation(int target_dim, Rule rule, Vector gram_weights, bool has_highest_weight = false);

  // The defining representation on R^2.
  static Representation standard();
  // The n-dimensional irreducible representation (sym_power) with the
  // SO(2)-invariant norm |sum c_i x^{n-1-i} y^i|^2 = sum c_i^2 / binom(n-1, i).
  static Representation symmetric_power(int n);

  int source_dim() const { return 2; }
  int target_dim() const { return target_dim_; }
  Matrix operator()(const Matrix& g) const { return rule_(g); }

  // K-invariant norm of a vector of the representation space.
  double norm(const Vector& v) const;

  // Vector spanning the highest-weight line over the boundary point with
  // lift `u` (for sym_power: the coefficients of (u_1 x + u_2 y)^{n-1}).
  // Only available for representations built by the factories above.
  Vector highest_weight_vector(const Vector2& u) const;

 private:
  int target_dim_;
  Rule rule_;
  Vector gram_weights_;
  bool has_highest_weight_;
};

// The group homomorphism SL_2 -> SL_n integrating an sl2-triple:
// k a nu = exp(theta (f - e)) exp(log(a_11) x) exp(nu_12 e) for the Iwasawa
// factors of g, with k the rotation by theta. Requires det g > 0. The Gram
// weights are all ones.
Representation triple_representation(const Sl2Triple& triple);

}  // namespace homdyn

#endif  // HOMDYN_GROUP_HPP_
