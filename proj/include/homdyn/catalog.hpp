#ifndef HOMDYN_CATALOG_HPP_
#define HOMDYN_CATALOG_HPP_

#include <optional>
#include <string>
#include <vector>

#include "homdyn/boundary.hpp"
#include "homdyn/classify.hpp"
#include "homdyn/cocycle.hpp"

namespace homdyn {

// How the walk driver moves the fibre for a configuration.
enum class FibreAction {
  kNone,               // Case 1: fibre dynamics not simulated
  kTrivial,            // Case 2.1: fibre fixed
  kIwasawaSign,        // Case 2.2: diagonal-sign cocycle
  kSectionedMorphism,  // Case 2.3: Q_H -> S pushed through a section
};
const char* to_string(FibreAction a);

struct CannedExample {
  std::string name;
  std::string description;
  Case expected;
  FlagConfig flag;
  EmbeddingSpec embedding;
  FibreAction fibre;
  std::string default_measure;
};

const std::vector<CannedExample>& canned_examples();
// Throws ConfigurationError for an unknown name.
const CannedExample& find_example(const std::string& name);

std::vector<std::string> canned_measure_names();
StepMeasure canned_measure(const std::string& name);

// Index of the Levi block carried as the fibre: the first block of size at
// least 2 not absorbed into R_0, or nullopt when S is trivial.
std::optional<int> fibre_block(const FlagConfig& cfg);

// Q_H -> S on the fibre block: g -> block of the triple's group
// homomorphism, rescaled to |det| = 1. Meaningful on the upper triangular
// Borel of SL_2, which the triple maps into Q when its x, e lie in q.
Representation block_representation(const FlagConfig& cfg, const EmbeddingSpec& emb, int block);

// Fibre cocycle for walks on the configuration: the identity for Case 2.1,
// (sigma, sg) for Case 2.2 and the sectioned block morphism for Case 2.3.
CocycleHandle bundle_cocycle(const FlagConfig& cfg, const EmbeddingSpec& emb, FibreAction action,
                             const CircleSection& section);

// Dimension of the fibre lattices for a configuration (2 when S is trivial).
int fibre_dimension(const FlagConfig& cfg);

// For a Case 2.3.a configuration: the morphism H -> S on the fibre block
// obtained by extending the induced block pair to a triple.
Representation extended_block_morphism(const FlagConfig& cfg, const EmbeddingSpec& emb, int block);

// Multi-line catalog listing: name, expected case, default measure, and
// description for each example.
std::string list_examples();

}  // namespace homdyn

#endif  // HOMDYN_CATALOG_HPP_
