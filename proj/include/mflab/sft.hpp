#ifndef MFLAB_SFT_HPP
#define MFLAB_SFT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mflab/numeric.hpp"

namespace mflab {

// Ordered set of opaque symbol labels. Every matrix and vector in the library
// is indexed by the position of a label in its alphabet, fixed at
// construction.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& labels() const { return labels_; }

  // Index of a label, or throws.
  int index_of(const std::string& label) const;
  std::optional<int> try_index_of(const std::string& label) const;

  bool operator==(const Alphabet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

// Finite word of symbol indices, placed at an absolute position. Allowed-ness
// is always checked against a concrete SubshiftSpec, never assumed.
struct Word {
  std::vector<int> symbols;
  int offset = 0;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  int operator[](std::size_t i) const { return symbols[i]; }

  bool operator==(const Word& other) const {
    return offset == other.offset && symbols == other.symbols;
  }
};

std::string format_word(const Alphabet& alphabet, const Word& word);

// 0/1 transition matrix. "Reduced" means no all-zero row or column.
class BinaryAdjacency {
 public:
  BinaryAdjacency() = default;
  explicit BinaryAdjacency(BoolMatrix entries);

  std::size_t size() const { return entries_.rows(); }
  bool allows(int from, int to) const {
    return entries_(static_cast<std::size_t>(from), static_cast<std::size_t>(to)) != 0;
  }
  const BoolMatrix& entries() const { return entries_; }
  bool is_reduced() const;

 private:
  BoolMatrix entries_;
};

struct SubshiftSpec {
  Alphabet alphabet;
  BinaryAdjacency adjacency;

  std::size_t size() const { return alphabet.size(); }
};

// Validates dimensions and reducedness; all constructors of analysis objects
// go through here.
SubshiftSpec make_subshift(Alphabet alphabet, BinaryAdjacency adjacency);

bool word_allowed(const SubshiftSpec& s, const Word& w);

// --- predicates -------------------------------------------------------------

// Strongly connected components in topological order; component ids per state.
struct SccDecomposition {
  std::vector<int> component_of;      // state -> component id
  std::vector<std::vector<int>> components;
};
SccDecomposition strongly_connected_components(const BinaryAdjacency& m);

bool is_irreducible(const SubshiftSpec& s);
bool is_aperiodic(const SubshiftSpec& s);
bool is_primitive(const SubshiftSpec& s);

// --- language ---------------------------------------------------------------

// All allowed words of length n, lexicographic in the alphabet order.
std::vector<Word> allowed_words(const SubshiftSpec& s, std::size_t n);

// Number of allowed words of length n (no materialization).
std::size_t count_allowed_words(const SubshiftSpec& s, std::size_t n);

// log of the spectral radius of the adjacency matrix, via power iteration on
// each strongly connected component (component-wise maximum for reducible
// input). Tolerance 1e-12, at most 1e5 iterations.
double topological_entropy(const SubshiftSpec& s);

// Spectral data of a nonnegative matrix restricted to one SCC.
struct PerronData {
  double value = 0.0;               // spectral radius
  std::vector<double> right_vector; // indexed like the full matrix; zero off-component
};
PerronData dominant_eigen(const BoolMatrix& m);

// --- recoding and trimming --------------------------------------------------

struct RecodedSubshift {
  SubshiftSpec shift;
  // new symbol index -> k-block of old symbol indices
  std::vector<std::vector<int>> block_of;
};

// Higher-block presentation on allowed k-blocks; k = 1 returns the input
// unchanged. Throws if no k-block is allowed.
RecodedSubshift higher_block_recode(const SubshiftSpec& s, std::size_t k);

struct TrimResult {
  SubshiftSpec shift;
  std::vector<int> kept;     // new index -> old index
  std::vector<int> removed;  // old indices dropped
};

// Removes states until every row and column has an entry. Never implicit:
// indices stay meaningful unless the caller asks for this.
TrimResult trim(const SubshiftSpec& s);

}  // namespace mflab

#endif  // MFLAB_SFT_HPP
