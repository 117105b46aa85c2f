#ifndef MFLAB_CONDITIONALS_HPP
#define MFLAB_CONDITIONALS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mflab/factor.hpp"
#include "mflab/markov.hpp"

namespace mflab {

// Forward filter over the fibre of a growing observation prefix. Rational
// instantiation keeps exact unnormalized masses; the double instantiation
// renormalizes every step and tracks the consumed mass in log scale
// (unnormalized products underflow near length 700).
template <class S>
class ForwardState {
 public:
  ForwardState(const MarkovModel& m, const FactorSystem& fs);

  void start(int image_symbol);
  bool extend(int image_symbol);  // false once the prefix mass is zero

  std::size_t length() const { return length_; }
  int last_symbol() const { return last_; }
  bool alive() const { return alive_; }

  // Entries indexed like fs.preimage(last_symbol()).
  const std::vector<S>& vec() const { return vec_; }

  // nu(prefix): exact in the Rational instantiation.
  S mass() const;
  double log_mass() const;

 private:
  const MarkovModel* model_;
  const FactorSystem* fs_;
  std::vector<S> vec_;
  double log_scale_ = 0.0;
  int last_ = -1;
  std::size_t length_ = 0;
  bool alive_ = false;
};

// nu(y) = sum of cylinder masses over the fibre of y; exactly 0 for words the
// hidden chain cannot realize.
Rational factor_cylinder_probability(const MarkovModel& m, const FactorSystem& fs, const Word& y);

struct LogProbability {
  bool positive = false;
  double log_value = 0.0;
  double value = 0.0;
};
LogProbability factor_cylinder_probability_double(const MarkovModel& m, const FactorSystem& fs,
                                                  const Word& y);

// g_n(y_0^n) = nu(y_0 | y_1^n). Throws on a zero-probability conditioning event.
Rational g_n(const MarkovModel& m, const FactorSystem& fs, const Word& y);
double g_n_double(const MarkovModel& m, const FactorSystem& fs, const Word& y);

// --- variation of the conditionals ------------------------------------------

struct VariationOptions {
  std::size_t center_budget = 4096;     // exhaustive center enumeration cap
  std::size_t extension_budget = 4096;  // exhaustive continuation cap
  std::size_t random_extensions = 64;   // sampled continuations beyond the cap
  std::uint64_t seed = 1;
};

struct VariationEstimate {
  std::size_t n = 0;
  std::size_t m_ext = 0;
  double lower = 0.0;             // certified: achieved by concrete words
  bool exhaustive = false;        // centers and continuations fully enumerated
  double upper_heuristic = 1.0;   // Birkhoff contraction product; 1 = vacuous
  Word worst_center;              // y_0^n achieving the lower bound
};

// Bounds on var_n(g): max over allowed y_0^n and pairs of allowed length-m_ext
// continuations of |g difference|. Beyond the budgets, continuations are
// steered (greedy extremization of g) and sampled, so `lower` stays a genuine
// lower bound but is no longer a maximum.
VariationEstimate variation_estimate(const MarkovModel& m, const FactorSystem& fs, std::size_t n,
                                     std::size_t m_ext, const VariationOptions& opts = {});

// g_k values along one base word plus the variation profile and its decay fit.
struct ConditionalTable {
  Word base;
  std::vector<Rational> g_values;            // g_k(y_0^k), k = 1..n
  std::vector<VariationEstimate> variations; // var_k estimates, k = 1..n
  DecayFit fit;                              // fitted on the lower bounds
};
ConditionalTable conditional_table(const MarkovModel& m, const FactorSystem& fs, const Word& base,
                                   std::size_t m_ext, const VariationOptions& opts = {});

// --- bad configurations ------------------------------------------------------

struct BadConfigWitness {
  Word center;             // y_0^n
  Word continuation_high;  // appended after y_n
  Word continuation_low;
  Rational g_high;
  Rational g_low;
  double gap = 0.0;
};

struct BadConfigOptions {
  std::size_t n_min = 1;
  std::size_t n_max = 6;
  std::size_t m_max = 40;
  double eps = 0.05;
  std::size_t center_budget = 4096;
  std::size_t extension_budget = 2048;
  std::uint64_t seed = 1;
};

// Guided search for a center whose conditionals can be pushed eps apart by
// distant continuations. Absence of a witness is NOT a regularity proof and is
// reported as such by the CLI.
std::optional<BadConfigWitness> find_bad_configuration(const MarkovModel& m,
                                                       const FactorSystem& fs,
                                                       const BadConfigOptions& opts);

// --- lumpability and Markov order --------------------------------------------

struct LumpabilityResult {
  bool lumpable = false;
  std::optional<RationalMatrix> factor_matrix;  // P^(pi) when lumpable
  std::string detail;                           // first violated class-sum equality
};

// Kemeny-Snell test: exact equality of preimage-class row sums.
LumpabilityResult strong_lumpability(const StochasticMatrix& p, const FactorMap& map);

struct MarkovOrderReport {
  bool order_at_most_one = false;
  std::size_t depth = 0;
  std::optional<Word> violating_word;
  RationalMatrix recovered_transition;  // nu(b'|b) from 2-cylinders
  std::optional<Rational> violation_gap;
};

// Exact finite surrogate for weak lumpability: does g_k depend only on
// (y_0, y_1) for every allowed word up to `depth`?
MarkovOrderReport markov_order_probe(const MarkovModel& m, const FactorSystem& fs,
                                     std::size_t depth);

// --- Monte Carlo cross-check --------------------------------------------------

struct EmpiricalConditional {
  double estimate = 0.0;
  double stderr_value = 0.0;
  std::size_t conditioning_hits = 0;
  std::size_t joint_hits = 0;
  bool flagged = false;  // conditioning event never sampled
};
EmpiricalConditional empirical_conditional(const MarkovModel& m, const FactorSystem& fs,
                                           const Word& y, std::size_t samples,
                                           std::uint64_t seed);

}  // namespace mflab

#endif  // MFLAB_CONDITIONALS_HPP
