#ifndef MFLAB_FACTOR_HPP
#define MFLAB_FACTOR_HPP

#include <optional>
#include <utility>
#include <vector>

#include "mflab/markov.hpp"
#include "mflab/sft.hpp"

namespace mflab {

// Symbol-wise surjection from a domain alphabet onto a smaller one.
struct FactorMap {
  Alphabet source;
  Alphabet target;
  std::vector<int> assign;  // source index -> target index

  int operator()(int source_symbol) const {
    return assign[static_cast<std::size_t>(source_symbol)];
  }
};

FactorMap make_factor_map(Alphabet source, Alphabet target, std::vector<int> assign);

// Candidate image adjacency: edge (b,b') present iff some allowed domain edge
// maps onto it.
SubshiftSpec induced_image_adjacency(const SubshiftSpec& domain, const FactorMap& map);

// Domain SFT + 1-block code + candidate image SFT, with per-edge submatrix
// access. The image defaults to the induced adjacency; a user-supplied
// candidate must contain it edge-wise.
class FactorSystem {
 public:
  FactorSystem(SubshiftSpec domain, FactorMap map,
               std::optional<SubshiftSpec> image_candidate = std::nullopt);

  const SubshiftSpec& domain() const { return domain_; }
  const FactorMap& map() const { return map_; }
  const SubshiftSpec& image() const { return image_; }

  const std::vector<int>& preimage(int image_symbol) const {
    return preimages_[static_cast<std::size_t>(image_symbol)];
  }

  // 0/1 submatrix of the domain adjacency with rows pi^{-1}(b), cols pi^{-1}(b').
  BoolMatrix edge_submatrix(int b, int b_next) const;

  int image_of(int domain_symbol) const { return map_(domain_symbol); }
  Word image_word(const Word& domain_word) const;

 private:
  SubshiftSpec domain_;
  FactorMap map_;
  SubshiftSpec image_;
  std::vector<std::vector<int>> preimages_;
};

// Follower-set check that every word the candidate image adjacency allows is
// realized by a domain path. Runs the subset construction to closure (or to
// `depth` layers / `state_cap` subsets, whichever bites first); a failure
// carries the shortest unrealizable word.
struct ImageSftCheck {
  bool ok = false;
  bool complete = false;           // closure reached: verdict holds at every length
  std::optional<Word> witness;     // shortest unrealizable image word
  std::size_t states_explored = 0;
};
ImageSftCheck verify_image_sft(const FactorSystem& fs, std::size_t depth,
                               std::size_t state_cap = 0);

// Fibre over a finite observation word: per-position preimage sets and the
// submatrix chain between them, trimmed so that every surviving state lies on
// a path crossing the whole window (all matrices reduced afterwards).
struct FibreWindow {
  Word image_word;
  std::vector<std::vector<int>> states;  // per position, sorted domain indices
  std::vector<BoolMatrix> matrices;      // matrices[i]: states[i] x states[i+1]
  std::vector<std::pair<int, int>> removed;  // (position, domain symbol) trimmed away
};

FibreWindow fibre_window(const FactorSystem& fs, const Word& y);

// Smallest m such that every product of m consecutive window matrices is
// strictly positive; nullopt when no m within the window works.
std::optional<int> transitivity_index(const FibreWindow& fw);

// Fibre-mixing decision over the finite boolean semigroup of submatrix
// products along allowed image words.
struct MixingVerdict {
  enum class Kind { mixing, not_mixing, inconclusive };
  Kind kind = Kind::inconclusive;
  std::optional<int> index;               // mixing: uniform window length
  std::optional<Word> witness_word;       // not_mixing: image word whose product fails
  std::optional<std::pair<int, int>> witness_pair;  // domain states not connected along it
  std::size_t states_explored = 0;
  std::size_t state_cap = 0;
};

MixingVerdict is_fibre_mixing(const FactorSystem& fs, std::size_t state_cap = 1000000);

}  // namespace mflab

#endif  // MFLAB_FACTOR_HPP
