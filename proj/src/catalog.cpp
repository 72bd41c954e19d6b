#include "homdyn/catalog.hpp"

#include <cmath>
#include <sstream>

#include "homdyn/errors.hpp"

namespace homdyn {

namespace {

Matrix unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

Sl2Triple corner_triple(int n, int i, int j) {
  Sl2Triple t{unit(n, i, j), Matrix::Zero(n, n), unit(n, j, i)};
  t.x(i, i) = 1.0;
  t.x(j, j) = -1.0;
  return t;
}

std::vector<CannedExample> build_examples() {
  std::vector<CannedExample> out;

  out.push_back({"ex-ss",
                 "Rank-2 lattices in R^3 up to homothety; H = SO(2,1) realized as the principal SL2 in SL3; "
                 "Q stabilizes <e1,e2>",
                 Case::kCase2_3a, FlagConfig{3, {2}, {}}, EmbeddingSpec{principal_triple(3), AmbientGroup::kSL2},
                 FibreAction::kSectionedMorphism, "positive-pair"});

  out.push_back({"ex-reducible",
                 "Rank-2 lattices in R^3 up to homothety; H acts on <e2,e3> and fixes e1; Q stabilizes <e1,e2>; "
                 "fibre PGL2(R)/PGL2(Z) moved by the diagonal-sign cocycle",
                 Case::kCase2_2, FlagConfig{3, {2}, {}}, EmbeddingSpec{corner_triple(3, 1, 2), AmbientGroup::kSL2},
                 FibreAction::kIwasawaSign, "positive-pair"});

  out.push_back({"ex-case-2.1-a",
                 "SL4 with the full-flag Borel Q = R0; H is the top-left SL2 on <e1,e2>; S is trivial",
                 Case::kCase2_1, FlagConfig{4, {1, 2, 3}, {}}, EmbeddingSpec{corner_triple(4, 0, 1), AmbientGroup::kSL2},
                 FibreAction::kTrivial, "positive-pair"});

  {
    Sl2Triple t{unit(4, 0, 3) + unit(4, 1, 2), Matrix::Zero(4, 4), unit(4, 3, 0) + unit(4, 2, 1)};
    t.x.diagonal() << 1.0, 1.0, -1.0, -1.0;
    out.push_back({"ex-case-2.1-b",
                   "SL4, Q stabilizes <e1,e2>; H acts by the standard representation on <e1,e4> and on <e2,e3>; "
                   "Q_H lies in the solvable radical so the fibre action is trivial",
                   Case::kCase2_1, FlagConfig{4, {2}, {}}, EmbeddingSpec{t, AmbientGroup::kSL2}, FibreAction::kTrivial,
                   "positive-pair"});
  }

  {
    // sym^2 on <e1,e2,e4> (weights 2, 0, -2) plus the trivial line <e3>.
    Sl2Triple t{unit(4, 0, 1) + 2.0 * unit(4, 1, 3), Matrix::Zero(4, 4), 2.0 * unit(4, 1, 0) + unit(4, 3, 1)};
    t.x.diagonal() << 2.0, 0.0, 0.0, -2.0;
    out.push_back({"ex-2.3.b",
                   "SL4, Q stabilizes <e1,e2,e3>; H = PGL2 acting by sym^2 on <e1,e2,e4> and trivially on e3; "
                   "the induced Borel pair in the 3x3 block does not extend to a triple",
                   Case::kCase2_3b, FlagConfig{4, {3}, {}}, EmbeddingSpec{t, AmbientGroup::kPGL2},
                   FibreAction::kSectionedMorphism, "positive-pair"});
  }

  out.push_back({"ex-principal-sl3",
                 "Principal SL2 in SL3 (irreducible on R^3); Q stabilizes the highest-weight line <e1>",
                 Case::kCase2_3a, FlagConfig{3, {1}, {}}, EmbeddingSpec{principal_triple(3), AmbientGroup::kSL2},
                 FibreAction::kSectionedMorphism, "positive-pair"});

  out.push_back({"ex-principal-sl4",
                 "Principal SL2 in SL4 (irreducible on R^4); Q stabilizes the highest-weight plane <e1,e2>",
                 Case::kCase2_3a, FlagConfig{4, {2}, {}}, EmbeddingSpec{principal_triple(4), AmbientGroup::kSL2},
                 FibreAction::kSectionedMorphism, "positive-pair"});

  out.push_back({"ex-fixed-plane",
                 "SL3, H is the top-left SL2 and Q stabilizes the H-invariant plane <e1,e2>: a compact H-orbit "
                 "on G/Q",
                 Case::kCase1, FlagConfig{3, {2}, {}}, EmbeddingSpec{corner_triple(3, 0, 1), AmbientGroup::kSL2},
                 FibreAction::kNone, "positive-pair"});
  return out;
}

Matrix2 m2(double a, double b, double c, double d) {
  Matrix2 m;
  m << a, b, c, d;
  return m;
}

}  // namespace

const char* to_string(FibreAction a) {
  switch (a) {
    case FibreAction::kNone:
      return "none";
    case FibreAction::kTrivial:
      return "trivial";
    case FibreAction::kIwasawaSign:
      return "iwasawa-sign";
    case FibreAction::kSectionedMorphism:
      break;
  }
  return "sectioned-morphism";
}

const std::vector<CannedExample>& canned_examples() {
  static const std::vector<CannedExample> examples = build_examples();
  return examples;
}

const CannedExample& find_example(const std::string& name) {
  for (const auto& ex : canned_examples())
    if (ex.name == name) return ex;
  throw ConfigurationError("unknown example '" + name + "'");
}

std::vector<std::string> canned_measure_names() {
  return {"positive-pair", "positive-triple", "unipotent-pair", "rotation-diagonal",
          "diagonal",      "half-diagonal",   "rotation"};
}

StepMeasure canned_measure(const std::string& name) {
  if (name == "positive-pair") return StepMeasure::uniform({m2(2, 1, 1, 1), m2(1, 1, 1, 2)});
  if (name == "positive-triple") {
    return StepMeasure({{0.5, m2(3, 1, 2, 1)}, {0.3, m2(1, 1, 1, 2)}, {0.2, m2(2, 1, 1, 1)}});
  }
  if (name == "unipotent-pair") return StepMeasure::uniform({m2(1, 1, 0, 1), m2(1, 0, 1, 1)});
  if (name == "rotation-diagonal") {
    const double c = std::cos(1.0), s = std::sin(1.0);
    return StepMeasure::uniform({m2(std::exp(0.5), 0, 0, std::exp(-0.5)), m2(c, -s, s, c)});
  }
  if (name == "diagonal") return StepMeasure::dirac(m2(2, 0, 0, 0.5));
  if (name == "half-diagonal") return StepMeasure::dirac(m2(std::exp(0.5), 0, 0, std::exp(-0.5)));
  if (name == "rotation") {
    const double c = std::cos(1.0), s = std::sin(1.0);
    return StepMeasure::dirac(m2(c, -s, s, c));
  }
  throw ConfigurationError("unknown measure '" + name + "'");
}

std::optional<int> fibre_block(const FlagConfig& cfg) {
  const auto sizes = cfg.block_sizes();
  for (int b = 0; b < static_cast<int>(sizes.size()); ++b) {
    const bool absorbed = std::find(cfg.r0_blocks.begin(), cfg.r0_blocks.end(), b) != cfg.r0_blocks.end();
    if (!absorbed && sizes[b] >= 2) return b;
  }
  return std::nullopt;
}

int fibre_dimension(const FlagConfig& cfg) {
  const auto b = fibre_block(cfg);
  return b ? cfg.block_sizes()[static_cast<std::size_t>(*b)] : 2;
}

Representation block_representation(const FlagConfig& cfg, const EmbeddingSpec& emb, int block) {
  const auto sizes = cfg.block_sizes();
  if (block < 0 || block >= static_cast<int>(sizes.size())) throw ConfigurationError("block_representation: no such block");
  int offset = 0;
  for (int b = 0; b < block; ++b) offset += sizes[static_cast<std::size_t>(b)];
  const int m = sizes[static_cast<std::size_t>(block)];
  const Representation phi = triple_representation(emb.triple);
  return Representation(
      m,
      [phi, offset, m](const Matrix& g) -> Matrix {
        Matrix b = phi(g).block(offset, offset, m, m);
        const double det = b.determinant();
        if (det == 0.0) throw DecompositionError("block_representation: singular block");
        return b / std::pow(std::abs(det), 1.0 / m);
      },
      Vector::Ones(m));
}

Representation extended_block_morphism(const FlagConfig& cfg, const EmbeddingSpec& emb, int block) {
  for (const InducedBlock& ib : induced_morphism(cfg, emb)) {
    if (ib.block != block) continue;
    const Sl2Extension ext = extend_sl2_triple(ib.xbar, ib.ebar);
    if (!ext.f) throw ConfigurationError("extended_block_morphism: the block pair does not extend");
    return triple_representation(Sl2Triple{ib.ebar, ib.xbar, *ext.f});
  }
  throw ConfigurationError("extended_block_morphism: no such block");
}

CocycleHandle bundle_cocycle(const FlagConfig& cfg, const EmbeddingSpec& emb, FibreAction action,
                             const CircleSection& section) {
  switch (action) {
    case FibreAction::kTrivial:
      return trivial_cocycle(fibre_dimension(cfg));
    case FibreAction::kIwasawaSign:
      return iwasawa_sign_cocycle(section);
    case FibreAction::kSectionedMorphism: {
      const auto block = fibre_block(cfg);
      if (!block) throw ConfigurationError("bundle_cocycle: S is trivial for this flag");
      return morphism_cocycle(block_representation(cfg, emb, *block), section);
    }
    case FibreAction::kNone:
      break;
  }
  throw ConfigurationError("bundle_cocycle: Case 1 fibre dynamics are not simulated");
}

std::string list_examples() {
  std::ostringstream out;
  for (const auto& ex : canned_examples()) {
    out << ex.name << "  " << to_string(ex.expected) << "  fibre=" << to_string(ex.fibre)
        << "  measure=" << ex.default_measure << "\n    " << ex.description << "\n";
  }
  return out.str();
}

}  // namespace homdyn
