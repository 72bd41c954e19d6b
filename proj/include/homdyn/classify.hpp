#ifndef HOMDYN_CLASSIFY_HPP_
#define HOMDYN_CLASSIFY_HPP_

#include <string>
#include <vector>

#include "homdyn/group.hpp"

namespace homdyn {

// Partial flag 0 < V_{k_1} < ... < V_{k_j} in R^n spanned by initial
// standard basis vectors, and the Levi blocks absorbed into R_0.
//
// The parabolic Q is the block-upper-triangular stabilizer of the flag.
// R_0 is its solvable radical (strictly block-upper part plus the scalar
// matrices of each block), enlarged by the full blocks listed in
// `r0_blocks`.
struct FlagConfig {
  int n = 0;
  std::vector<int> dims;
  std::vector<int> r0_blocks;

  void validate() const;
  // Sizes m_1, ..., m_{j+1} of the diagonal blocks.
  std::vector<int> block_sizes() const;
  // Block index of each coordinate 0..n-1.
  std::vector<int> block_of() const;
};

enum class AmbientGroup { kSL2, kPGL2 };
const char* to_string(AmbientGroup g);

// The Lie algebra of H as the span of an sl2-triple in n x n matrices.
struct EmbeddingSpec {
  Sl2Triple triple;
  AmbientGroup group = AmbientGroup::kSL2;

  // Throws ConfigurationError when the bracket relations fail (exactly for
  // integer entries, to 1e-9 relative otherwise).
  void validate() const;
};

enum class Case { kCase1, kCase2_1, kCase2_2, kCase2_3a, kCase2_3b };
const char* to_string(Case c);
Case case_from_string(const std::string& name);

struct BlockExtension {
  int block = 0;
  int offset = 0;
  int size = 0;
  bool absorbed = false;    // block lies in R_0, so it is not part of S
  bool extendable = true;   // [x, f] = -2f, [e, f] = x solvable
  double residual = 0.0;    // least-squares residual of the extension
};

struct ClassifierDiagnostics {
  int dim_h_cap_q = 0;
  int dim_qh_cap_r0 = -1;         // -1 when not computed (Case 1)
  int irreducible_components = 0;
  bool intersection_nilpotent = false;  // Case 2.2: q_H n r_0 is nilpotent
  std::vector<BlockExtension> blocks;   // Case 2.3 only
  double max_extension_residual = 0.0;
  bool exact = false;            // decided in rational arithmetic
  bool ill_conditioned = false;  // a rank decision was close to threshold
  std::vector<std::string> warnings;
};

struct CaseLabel {
  Case label = Case::kCase1;
  ClassifierDiagnostics diagnostics;
};

struct SubspaceIntersection {
  std::vector<Matrix> basis;  // orthonormal in the Frobenius inner product
  int dim = 0;
  bool ill_conditioned = false;
  double smallest_kept = 0.0;     // smallest singular value counted as rank
  double largest_dropped = 0.0;   // largest singular value counted as zero
};

// Intersection of two spans of n x n matrices, from the null space of the
// stacked coordinate system [A | -B] after orthonormalizing each side.
// Singular values below `threshold` count as zero; one within a factor 10
// of it marks the result ill-conditioned. Throws PreconditionError when a
// basis is linearly dependent.
SubspaceIntersection lie_intersection(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                                      double threshold = 1e-9);

// Exact dimension of span(a) n span(b) for matrices with integer entries.
int exact_intersection_dim(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

// Number of sl2-irreducible summands of R^n, i.e. dim ker e. Throws
// PreconditionError when e is not nilpotent.
int count_irreducible_components(const Matrix& e);

// Lie algebra bases of the parabolic q and of r_0 for a flag.
std::vector<Matrix> parabolic_basis(const FlagConfig& cfg);
std::vector<Matrix> radical_basis(const FlagConfig& cfg);

struct InducedBlock {
  int block = 0;
  int offset = 0;
  int size = 0;
  bool absorbed = false;
  Matrix xbar;  // traceless part of the diagonal block of x'
  Matrix ebar;  // traceless part of the diagonal block of e'
};

// Image of the Borel q_H = h n q in the Levi blocks. x', e' are the
// triple's own x, e when they lie in q, and otherwise a normalized pair
// spanning q_H with [x', e'] = 2e'. Throws ConfigurationError unless
// dim(h n q) = 2.
std::vector<InducedBlock> induced_morphism(const FlagConfig& cfg, const EmbeddingSpec& emb);

// Decides the case of the configuration. dim(h n q) = 3 gives Case 1 and 2
// a parabolic Q_H; other dimensions are refused with ConfigurationError.
// Case 2 splits by dim(q_H n r_0) = 2, 1, 0, and the last by whether every
// induced block pair extends to an sl2-triple. Integer triples are decided
// in exact rational arithmetic.
CaseLabel classify(const FlagConfig& cfg, const EmbeddingSpec& emb);

}  // namespace homdyn

#endif  // HOMDYN_CLASSIFY_HPP_
