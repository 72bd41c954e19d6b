#include "homdyn/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "homdyn/errors.hpp"
#include "rational.hpp"

namespace homdyn {

namespace {

using detail::Rational;
using detail::RationalMatrix;
using detail::null_space;
using detail::rational_rank;
using detail::rbracket;
using detail::rref;
using detail::is_integral;

// Column-stacked coordinates of a list of n x n matrices.
RationalMatrix stack_columns(const std::vector<RationalMatrix>& mats) {
  const int n = mats.front().rows();
  RationalMatrix out(n * n, static_cast<int>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i * n + j, static_cast<int>(k)) = mats[k](i, j);
  return out;
}

// Linear constraints (one row per entry functional) cutting out a subspace
// of n x n matrices.
using Constraint = std::vector<std::pair<std::pair<int, int>, int>>;  // ((i, j), coefficient)

std::vector<Constraint> parabolic_constraints(const FlagConfig& cfg) {
  const auto block = cfg.block_of();
  std::vector<Constraint> out;
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.n; ++j)
      if (block[i] > block[j]) out.push_back({{{i, j}, 1}});
  return out;
}

std::vector<Constraint> radical_constraints(const FlagConfig& cfg) {
  auto out = parabolic_constraints(cfg);
  const auto sizes = cfg.block_sizes();
  int offset = 0;
  for (int b = 0; b < static_cast<int>(sizes.size()); ++b) {
    const int m = sizes[b];
    const bool absorbed = std::find(cfg.r0_blocks.begin(), cfg.r0_blocks.end(), b) != cfg.r0_blocks.end();
    if (!absorbed) {
      for (int i = offset; i < offset + m; ++i)
        for (int j = offset; j < offset + m; ++j)
          if (i != j) out.push_back({{{i, j}, 1}});
      for (int i = offset + 1; i < offset + m; ++i) out.push_back({{{i, i}, 1}, {{offset, offset}, -1}});
    }
    offset += m;
  }
  return out;
}

// Elements of span(basis) satisfying every constraint.
std::vector<RationalMatrix> restrict_span(const std::vector<RationalMatrix>& basis,
                                          const std::vector<Constraint>& constraints) {
  if (basis.empty()) return {};
  const int n = basis.front().rows();
  RationalMatrix sys(std::max<int>(1, static_cast<int>(constraints.size())), static_cast<int>(basis.size()));
  for (std::size_t r = 0; r < constraints.size(); ++r)
    for (std::size_t k = 0; k < basis.size(); ++k) {
      Rational s = 0;
      for (const auto& [ij, c] : constraints[r]) s += c * basis[k](ij.first, ij.second);
      sys(static_cast<int>(r), static_cast<int>(k)) = s;
    }
  std::vector<RationalMatrix> out;
  for (const auto& coeffs : null_space(sys)) {
    RationalMatrix m(n, n);
    for (std::size_t k = 0; k < basis.size(); ++k)
      if (coeffs[k] != 0) m = m + basis[k].scaled(coeffs[k]);
    out.push_back(m);
  }
  return out;
}

bool satisfies(const RationalMatrix& m, const std::vector<Constraint>& constraints) {
  for (const auto& c : constraints) {
    Rational s = 0;
    for (const auto& [ij, coeff] : c) s += coeff * m(ij.first, ij.second);
    if (s != 0) return false;
  }
  return true;
}

bool satisfies(const Matrix& m, const std::vector<Constraint>& constraints, double tol) {
  for (const auto& c : constraints) {
    double s = 0.0;
    for (const auto& [ij, coeff] : c) s += coeff * m(ij.first, ij.second);
    if (std::abs(s) > tol) return false;
  }
  return true;
}

RationalMatrix traceless_block(const RationalMatrix& m, int offset, int size) {
  RationalMatrix b(size, size);
  Rational trace = 0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) b(i, j) = m(offset + i, offset + j);
  for (int i = 0; i < size; ++i) trace += b(i, i);
  for (int i = 0; i < size; ++i) b(i, i) -= trace / size;
  return b;
}

Matrix traceless_block(const Matrix& m, int offset, int size) {
  Matrix b = m.block(offset, offset, size, size);
  b -= (b.trace() / size) * Matrix::Identity(size, size);
  return b;
}

// Exact solvability of [x, F] = -2F, [e, F] = x.
bool exact_extendable(const RationalMatrix& x, const RationalMatrix& e) {
  const int m = x.rows();
  RationalMatrix aug(2 * m * m, m * m + 1);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      RationalMatrix unit(m, m);
      unit(k, l) = 1;
      const RationalMatrix top = rbracket(x, unit) + unit.scaled(2);
      const RationalMatrix bottom = rbracket(e, unit);
      const int col = k * m + l;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          aug(i * m + j, col) = top(i, j);
          aug(m * m + i * m + j, col) = bottom(i, j);
        }
    }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) aug(m * m + i * m + j, m * m) = x(i, j);
  RationalMatrix coeff(2 * m * m, m * m);
  for (int i = 0; i < 2 * m * m; ++i)
    for (int j = 0; j < m * m; ++j) coeff(i, j) = aug(i, j);
  return rational_rank(coeff) == rational_rank(aug);
}

bool nilpotent(const Matrix& n, double tol) {
  Matrix p = Matrix::Identity(n.rows(), n.cols());
  const double scale = std::max(1.0, max_abs(n));
  for (Eigen::Index k = 0; k < n.rows(); ++k) p = p * n / scale;
  return max_abs(p) <= tol;
}

Matrix frobenius_normalized(const Matrix& m) { return m / m.norm(); }

// Pair (x', e') spanning q_H with [x', e'] = 2 e'.
std::pair<Matrix, Matrix> borel_pair(const std::vector<Matrix>& qh) {
  const Matrix c = bracket(qh[0], qh[1]);
  if (c.norm() < 1e-9) throw ConfigurationError("classify: h n q is abelian, not a Borel subalgebra of h");
  const Matrix e = frobenius_normalized(c);
  Matrix y = qh[0] - (qh[0].cwiseProduct(e).sum()) * e;
  const Matrix y2 = qh[1] - (qh[1].cwiseProduct(e).sum()) * e;
  if (y2.norm() > y.norm()) y = y2;
  const double lambda = bracket(y, e).cwiseProduct(e).sum();
  if (std::abs(lambda) < 1e-12) throw ConfigurationError("classify: h n q has no semisimple part");
  return {(2.0 / lambda) * y, e};
}

std::pair<RationalMatrix, RationalMatrix> borel_pair(const std::vector<RationalMatrix>& qh) {
  const RationalMatrix e = rbracket(qh[0], qh[1]);
  if (e.is_zero()) throw ConfigurationError("classify: h n q is abelian, not a Borel subalgebra of h");
  // y: a basis element not proportional to e.
  RationalMatrix y = qh[0];
  {
    std::vector<RationalMatrix> pair{qh[0], e};
    if (rational_rank(stack_columns(pair)) < 2) y = qh[1];
  }
  const RationalMatrix ye = rbracket(y, e);
  int pi = -1, pj = -1;
  for (int i = 0; i < e.rows() && pi < 0; ++i)
    for (int j = 0; j < e.cols(); ++j)
      if (e(i, j) != 0) {
        pi = i;
        pj = j;
        break;
      }
  const Rational lambda = ye(pi, pj) / e(pi, pj);
  if (lambda == 0) throw ConfigurationError("classify: h n q has no semisimple part");
  return {y.scaled(Rational(2) / lambda), e};
}

std::vector<int> boundaries(const FlagConfig& cfg) {
  std::vector<int> b{0};
  for (int k : cfg.dims)
    if (k < cfg.n) b.push_back(k);
  b.push_back(cfg.n);
  return b;
}

bool absorbed_block(const FlagConfig& cfg, int b) {
  return std::find(cfg.r0_blocks.begin(), cfg.r0_blocks.end(), b) != cfg.r0_blocks.end();
}

CaseLabel classify_exact(const FlagConfig& cfg, const EmbeddingSpec& emb) {
  CaseLabel out;
  auto& d = out.diagnostics;
  d.exact = true;
  const RationalMatrix e = RationalMatrix::from(emb.triple.e);
  const RationalMatrix x = RationalMatrix::from(emb.triple.x);
  const RationalMatrix f = RationalMatrix::from(emb.triple.f);
  d.irreducible_components = cfg.n - rational_rank(e);

  const auto q_constraints = parabolic_constraints(cfg);
  const std::vector<RationalMatrix> qh = restrict_span({e, x, f}, q_constraints);
  d.dim_h_cap_q = static_cast<int>(qh.size());
  if (d.dim_h_cap_q == 3) {
    out.label = Case::kCase1;
    return out;
  }
  if (d.dim_h_cap_q != 2) {
    throw ConfigurationError("classify: dim(h n q) = " + std::to_string(d.dim_h_cap_q) +
                             "; H is not positioned against this parabolic");
  }
  const std::vector<RationalMatrix> qr = restrict_span(qh, radical_constraints(cfg));
  d.dim_qh_cap_r0 = static_cast<int>(qr.size());
  if (d.dim_qh_cap_r0 == 2) {
    out.label = Case::kCase2_1;
    return out;
  }
  if (d.dim_qh_cap_r0 == 1) {
    RationalMatrix p = qr.front();
    for (int k = 1; k < cfg.n; ++k) p = p * qr.front();
    d.intersection_nilpotent = p.is_zero();
    if (!d.intersection_nilpotent) {
      throw ConfigurationError("classify: q_H n r_0 is one-dimensional but not nilpotent");
    }
    out.label = Case::kCase2_2;
    return out;
  }
  const bool own = satisfies(x, q_constraints) && satisfies(e, q_constraints);
  const auto [xp, ep] = own ? std::pair<RationalMatrix, RationalMatrix>{x, e} : borel_pair(qh);
  const auto bounds = boundaries(cfg);
  bool all = true;
  for (int b = 0; b + 1 < static_cast<int>(bounds.size()); ++b) {
    BlockExtension be;
    be.block = b;
    be.offset = bounds[b];
    be.size = bounds[b + 1] - bounds[b];
    be.absorbed = absorbed_block(cfg, b);
    if (!be.absorbed && be.size >= 2) {
      const RationalMatrix xb = traceless_block(xp, be.offset, be.size);
      const RationalMatrix eb = traceless_block(ep, be.offset, be.size);
      be.extendable = exact_extendable(xb, eb);
      be.residual = extend_sl2_triple(xb.to_double(), eb.to_double()).residual;
      all = all && be.extendable;
      d.max_extension_residual = std::max(d.max_extension_residual, be.residual);
    }
    d.blocks.push_back(be);
  }
  out.label = all ? Case::kCase2_3a : Case::kCase2_3b;
  return out;
}

CaseLabel classify_numeric(const FlagConfig& cfg, const EmbeddingSpec& emb) {
  CaseLabel out;
  auto& d = out.diagnostics;
  d.irreducible_components = count_irreducible_components(emb.triple.e);
  const std::vector<Matrix> h{emb.triple.e, emb.triple.x, emb.triple.f};
  const SubspaceIntersection hq = lie_intersection(h, parabolic_basis(cfg));
  d.dim_h_cap_q = hq.dim;
  d.ill_conditioned = hq.ill_conditioned;
  if (hq.dim == 3) {
    out.label = Case::kCase1;
    return out;
  }
  if (hq.dim != 2) {
    throw ConfigurationError("classify: dim(h n q) = " + std::to_string(hq.dim) +
                             "; H is not positioned against this parabolic");
  }
  const SubspaceIntersection qr = lie_intersection(hq.basis, radical_basis(cfg));
  d.dim_qh_cap_r0 = qr.dim;
  d.ill_conditioned = d.ill_conditioned || qr.ill_conditioned;
  if (qr.dim == 2) {
    out.label = Case::kCase2_1;
  } else if (qr.dim == 1) {
    d.intersection_nilpotent = nilpotent(qr.basis.front(), 1e-8);
    if (!d.intersection_nilpotent) {
      throw ConfigurationError("classify: q_H n r_0 is one-dimensional but not nilpotent");
    }
    out.label = Case::kCase2_2;
  } else {
    bool all = true;
    for (const InducedBlock& ib : induced_morphism(cfg, emb)) {
      BlockExtension be;
      be.block = ib.block;
      be.offset = ib.offset;
      be.size = ib.size;
      be.absorbed = ib.absorbed;
      if (!ib.absorbed && ib.size >= 2) {
        const Sl2Extension ext = extend_sl2_triple(ib.xbar, ib.ebar);
        be.extendable = ext.f.has_value();
        be.residual = ext.residual;
        all = all && be.extendable;
        d.max_extension_residual = std::max(d.max_extension_residual, be.residual);
      }
      d.blocks.push_back(be);
    }
    out.label = all ? Case::kCase2_3a : Case::kCase2_3b;
  }
  if (d.ill_conditioned) d.warnings.push_back("a rank decision was within a factor 10 of the threshold");
  return out;
}

}  // namespace

void FlagConfig::validate() const {
  if (n < 2) throw ConfigurationError("flag: n must be at least 2");
  if (dims.empty()) throw ConfigurationError("flag: dims must not be empty");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i] > n) throw ConfigurationError("flag: dims must lie in [1, n]");
    if (i > 0 && dims[i] <= dims[i - 1]) throw ConfigurationError("flag: dims must be strictly increasing");
  }
  const auto blocks = static_cast<int>(block_sizes().size());
  for (int b : r0_blocks) {
    if (b < 0 || b >= blocks) throw ConfigurationError("flag: r0_blocks names a block that does not exist");
  }
}

std::vector<int> FlagConfig::block_sizes() const {
  const auto b = boundaries(*this);
  std::vector<int> sizes;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) sizes.push_back(b[i + 1] - b[i]);
  return sizes;
}

std::vector<int> FlagConfig::block_of() const {
  std::vector<int> out;
  const auto sizes = block_sizes();
  for (int b = 0; b < static_cast<int>(sizes.size()); ++b) out.insert(out.end(), static_cast<std::size_t>(sizes[b]), b);
  return out;
}

const char* to_string(AmbientGroup g) { return g == AmbientGroup::kSL2 ? "SL2" : "PGL2"; }

void EmbeddingSpec::validate() const {
  const int n = triple.dim();
  if (n < 2 || triple.e.rows() != n || triple.e.cols() != n || triple.f.rows() != n || triple.f.cols() != n ||
      triple.x.cols() != n) {
    throw ConfigurationError("embedding: e, x, f must be square matrices of one size");
  }
  const double scale = std::max({1.0, max_abs(triple.e), max_abs(triple.x), max_abs(triple.f)});
  const double tol = (is_integral(triple.e) && is_integral(triple.x) && is_integral(triple.f)) ? 0.0 : 1e-9 * scale * scale;
  if (triple.bracket_residual() > tol) {
    throw ConfigurationError("embedding: triple violates the sl2 bracket relations");
  }
  if (max_abs(triple.x) == 0.0) throw ConfigurationError("embedding: zero triple");
}

const char* to_string(Case c) {
  switch (c) {
    case Case::kCase1:
      return "Case1";
    case Case::kCase2_1:
      return "Case2_1";
    case Case::kCase2_2:
      return "Case2_2";
    case Case::kCase2_3a:
      return "Case2_3a";
    case Case::kCase2_3b:
      break;
  }
  return "Case2_3b";
}

Case case_from_string(const std::string& name) {
  for (Case c : {Case::kCase1, Case::kCase2_1, Case::kCase2_2, Case::kCase2_3a, Case::kCase2_3b}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigurationError("unknown case label '" + name + "'");
}

SubspaceIntersection lie_intersection(const std::vector<Matrix>& a, const std::vector<Matrix>& b, double threshold) {
  if (a.empty() || b.empty()) return {};
  const Eigen::Index n = a.front().rows();
  const Eigen::Index dim = n * a.front().cols();
  auto orthonormal = [&](const std::vector<Matrix>& mats) {
    Matrix m(dim, static_cast<Eigen::Index>(mats.size()));
    for (std::size_t k = 0; k < mats.size(); ++k) {
      if (mats[k].size() != dim) throw PreconditionError("lie_intersection: matrices of different sizes");
      m.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(mats[k].data(), dim);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() < m.cols()) throw PreconditionError("lie_intersection: linearly dependent basis");
    return Matrix(qr.householderQ() * Matrix::Identity(dim, m.cols()));
  };
  const Matrix qa = orthonormal(a), qb = orthonormal(b);
  Matrix stacked(dim, qa.cols() + qb.cols());
  stacked << qa, -qb;
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const Eigen::Index cols = stacked.cols();
  Eigen::Index rank = 0;
  SubspaceIntersection out;
  out.smallest_kept = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) {
      ++rank;
      out.smallest_kept = std::min(out.smallest_kept, s(i));
    } else {
      out.largest_dropped = std::max(out.largest_dropped, s(i));
    }
    if (s(i) > 0.1 * threshold && s(i) < 10.0 * threshold) out.ill_conditioned = true;
  }
  out.dim = static_cast<int>(cols - rank);
  Matrix elements(dim, out.dim);
  for (int k = 0; k < out.dim; ++k) {
    const Vector coeff = svd.matrixV().col(rank + k);
    elements.col(k) = qa * coeff.head(qa.cols());
  }
  if (out.dim > 0) {
    Eigen::HouseholderQR<Matrix> qr(elements);
    const Matrix q = qr.householderQ() * Matrix::Identity(dim, out.dim);
    for (int k = 0; k < out.dim; ++k) out.basis.push_back(Eigen::Map<const Matrix>(q.col(k).data(), n, a.front().cols()));
  }
  return out;
}

int exact_intersection_dim(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  std::vector<RationalMatrix> ra, rb, all;
  for (const auto& m : a) {
    if (!is_integral(m)) throw PreconditionError("exact_intersection_dim: entries must be integers");
    ra.push_back(RationalMatrix::from(m));
  }
  for (const auto& m : b) {
    if (!is_integral(m)) throw PreconditionError("exact_intersection_dim: entries must be integers");
    rb.push_back(RationalMatrix::from(m));
  }
  all = ra;
  all.insert(all.end(), rb.begin(), rb.end());
  return rational_rank(stack_columns(ra)) + rational_rank(stack_columns(rb)) - rational_rank(stack_columns(all));
}

int count_irreducible_components(const Matrix& e) {
  if (e.rows() != e.cols()) throw PreconditionError("count_irreducible_components: e must be square");
  if (is_integral(e)) {
    const RationalMatrix r = RationalMatrix::from(e);
    RationalMatrix p = r;
    for (Eigen::Index k = 1; k < e.rows(); ++k) p = p * r;
    if (!p.is_zero()) throw PreconditionError("count_irreducible_components: e is not nilpotent");
    return static_cast<int>(e.rows()) - rational_rank(r);
  }
  if (!nilpotent(e, 1e-8)) throw PreconditionError("count_irreducible_components: e is not nilpotent");
  Eigen::JacobiSVD<Matrix> svd(e);
  const Vector s = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, max_abs(e));
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > tol ? 1 : 0;
  return static_cast<int>(e.rows()) - rank;
}

std::vector<Matrix> parabolic_basis(const FlagConfig& cfg) {
  cfg.validate();
  const auto block = cfg.block_of();
  std::vector<Matrix> out;
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.n; ++j)
      if (block[i] <= block[j]) {
        Matrix m = Matrix::Zero(cfg.n, cfg.n);
        m(i, j) = 1.0;
        out.push_back(m);
      }
  return out;
}

std::vector<Matrix> radical_basis(const FlagConfig& cfg) {
  cfg.validate();
  const auto block = cfg.block_of();
  std::vector<Matrix> out;
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.n; ++j) {
      const bool inside = block[i] < block[j] || (block[i] == block[j] && absorbed_block(cfg, block[i]));
      if (inside) {
        Matrix m = Matrix::Zero(cfg.n, cfg.n);
        m(i, j) = 1.0;
        out.push_back(m);
      }
    }
  const auto sizes = cfg.block_sizes();
  int offset = 0;
  for (int b = 0; b < static_cast<int>(sizes.size()); ++b) {
    if (!absorbed_block(cfg, b)) {
      Matrix m = Matrix::Zero(cfg.n, cfg.n);
      m.block(offset, offset, sizes[b], sizes[b]).setIdentity();
      out.push_back(m);
    }
    offset += sizes[b];
  }
  return out;
}

std::vector<InducedBlock> induced_morphism(const FlagConfig& cfg, const EmbeddingSpec& emb) {
  cfg.validate();
  if (emb.triple.dim() != cfg.n) throw ConfigurationError("induced_morphism: embedding and flag sizes differ");
  const std::vector<Matrix> h{emb.triple.e, emb.triple.x, emb.triple.f};
  const SubspaceIntersection hq = lie_intersection(h, parabolic_basis(cfg));
  if (hq.dim != 2) {
    throw ConfigurationError("induced_morphism: the Borel direction of H does not preserve the flag");
  }
  const auto constraints = parabolic_constraints(cfg);
  const double tol = 1e-9 * std::max(1.0, max_abs(emb.triple.x));
  const bool own = satisfies(emb.triple.x, constraints, tol) && satisfies(emb.triple.e, constraints, tol);
  const auto [xp, ep] = own ? std::pair<Matrix, Matrix>{emb.triple.x, emb.triple.e} : borel_pair(hq.basis);
  std::vector<InducedBlock> out;
  const auto bounds = boundaries(cfg);
  for (int b = 0; b + 1 < static_cast<int>(bounds.size()); ++b) {
    InducedBlock ib;
    ib.block = b;
    ib.offset = bounds[b];
    ib.size = bounds[b + 1] - bounds[b];
    ib.absorbed = absorbed_block(cfg, b);
    ib.xbar = traceless_block(xp, ib.offset, ib.size);
    ib.ebar = traceless_block(ep, ib.offset, ib.size);
    out.push_back(std::move(ib));
  }
  return out;
}

CaseLabel classify(const FlagConfig& cfg, const EmbeddingSpec& emb) {
  cfg.validate();
  emb.validate();
  if (emb.triple.dim() != cfg.n) throw ConfigurationError("classify: embedding and flag sizes differ");
  const bool integral = is_integral(emb.triple.e) && is_integral(emb.triple.x) && is_integral(emb.triple.f);
  CaseLabel out = integral ? classify_exact(cfg, emb) : classify_numeric(cfg, emb);
  auto& d = out.diagnostics;
  if (out.label == Case::kCase2_3b && d.irreducible_components == 1) {
    d.warnings.push_back("H acts irreducibly but a block pair failed to extend");
  }
  return out;
}

}  // namespace homdyn
