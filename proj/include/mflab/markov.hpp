#ifndef MFLAB_MARKOV_HPP
#define MFLAB_MARKOV_HPP

#include <cstdint>
#include <vector>

#include "mflab/sft.hpp"

namespace mflab {

// Row-stochastic matrix over exact rationals. Construction checks row sums
// exactly; an off-by-1e-3 input is a located error, not a warning.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(RationalMatrix entries);

  std::size_t size() const { return entries_.rows(); }
  const Rational& operator()(int i, int j) const {
    return entries_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  const RationalMatrix& entries() const { return entries_; }

  // 0/1 pattern of strictly positive entries.
  BinaryAdjacency support() const;

 private:
  RationalMatrix entries_;
};

// P_{ij} > 0 exactly where the adjacency allows i -> j.
bool check_compatible(const StochasticMatrix& p, const SubshiftSpec& s);

// Unique stationary vector of an irreducible stochastic matrix, by exact
// rational elimination. Throws naming the offending components otherwise.
std::vector<Rational> stationary_distribution(const StochasticMatrix& p);

// Stationary Markov chain compatible with an SFT: exact transition matrix,
// stationary vector and time reversal. Immutable after construction.
struct MarkovModel {
  SubshiftSpec shift;
  StochasticMatrix transition;
  std::vector<Rational> stationary;
  RationalMatrix reversal;  // Q(a,a') = p_a P(a,a') / p_{a'}; columns sum to 1
};

MarkovModel make_markov_model(SubshiftSpec shift, StochasticMatrix transition);

// Q as a standalone operation (same values as model.reversal).
RationalMatrix time_reversal_matrix(const MarkovModel& m);

// p_{w0} * prod P(w_i, w_{i+1}); exactly 0 for disallowed words.
Rational cylinder_probability(const MarkovModel& m, const Word& w);

// -sum_a p_a P(a,b) log P(a,b), natural log.
double entropy_rate(const MarkovModel& m);

// Double-precision sibling used where entries are irrational (Parry measure).
struct MarkovModelD {
  SubshiftSpec shift;
  Matrix<double> transition;
  std::vector<double> stationary;
};

double entropy_rate(const MarkovModelD& m);

// Measure of maximal entropy of a primitive SFT: P_{ij} = M_{ij} r_j / (lambda r_i).
MarkovModelD parry_measure(const SubshiftSpec& s);

// Length-n realization from a stationary start. Same seed, same path, on any
// platform (raw mt19937_64 draws, manual inverse CDF).
Word sample_path(const MarkovModel& m, std::size_t n, std::uint64_t seed);

// Markov chain on the k-block recoding: state (x_0..x_{k-1}), transitions
// driven by the last coordinate. Stationary vector computed in closed form.
struct HigherBlockModel {
  MarkovModel model;
  std::vector<std::vector<int>> block_of;
};
HigherBlockModel higher_block_model(const MarkovModel& m, std::size_t k);

}  // namespace mflab

#endif  // MFLAB_MARKOV_HPP
