#ifndef MFLAB_DISINTEGRATION_HPP
#define MFLAB_DISINTEGRATION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mflab/conditionals.hpp"
#include "mflab/factor.hpp"
#include "mflab/markov.hpp"

namespace mflab {

// kappa = min over positive entries of Q; the claimed uniform lower bound for
// g-tilde values.
Rational positivity_bound(const MarkovModel& m);

// Strong lumpability of the time-reversed chain: column-class sums of Q agree
// within each preimage class. On success the common values form the reversed
// factor kernel S, and g-tilde(y) = S(y_0, y_1) at every depth.
struct ReversedLumpability {
  bool holds = false;
  std::optional<RationalMatrix> s_matrix;
  std::string detail;
};
ReversedLumpability reversed_lumpability(const MarkovModel& m, const FactorMap& map);

// Exact posterior of the first hidden symbol given a finite observation
// window; the depth-N approximation of the fibre measure's single-site
// marginal. Throws when the window has probability zero or the symbol is not
// in the fibre.
Rational conditional_fibre_marginal(const MarkovModel& m, const FactorSystem& fs,
                                    const Word& window, int hidden_symbol);

// Single-site fibre marginals at successive depths, with sup-change deltas.
struct FibreMeasure {
  Word base;
  std::vector<int> states;  // preimage of base[0]
  std::vector<std::vector<Rational>> marginal_by_depth;  // depth d uses base[0..d-1]
  std::vector<double> deltas;
};
FibreMeasure fibre_measure(const MarkovModel& m, const FactorSystem& fs, const Word& base);

// g-tilde at finite depth: sum over the fibre of Q-brackets weighted by the
// conditional fibre marginal. Sums to 1 over admissible y_0 exactly at every
// depth.
struct GTildeValue {
  Rational value;
  std::size_t depth = 0;                  // conditioning symbols used (|y| - 1)
  std::optional<Rational> previous;       // value at depth - 1
  std::optional<Rational> delta;          // |value - previous|
  bool converged = false;                 // delta < 1e-10, or exact by reversed lumpability
};
GTildeValue g_tilde(const MarkovModel& m, const FactorSystem& fs, const Word& y);

// Normalized two-point-interaction weights G_n^y over the interior words of a
// fibre window, pinned at a boundary state.
struct FibrePotential {
  Word image_window;                // y_0^{n+1}
  int boundary_state = -1;          // hidden state at position n+1
  std::vector<Word> words;          // admissible interior words a_0^n
  std::vector<Rational> weights;    // normalized Q-products, parallel to words
  Rational partition;               // Z: sum of unnormalized weights
};
FibrePotential fibre_potential(const MarkovModel& m, const FibreWindow& fw, int boundary_state);

// P_n^y applied to f, where f sees the interior word with the boundary symbol
// appended. Constants are fixed points.
Rational averaging_operator_apply(const FibrePotential& pot,
                                  const std::function<Rational(const Word&)>& f);

// DLR kernel over the window before `boundary`; numerically the same object
// as fibre_potential (the kernel depends on the boundary word only through
// its first symbol). `boundary.offset` marks its position in the window.
struct GibbsKernel {
  FibrePotential potential;
  Word boundary;
};
GibbsKernel gibbs_kernel(const MarkovModel& m, const FibreWindow& fw, const Word& boundary);

// min over ordered boundary pairs and interior prefix cylinders of the kernel
// mass ratio; strictly positive c certifies boundary uniformity at this depth.
Rational boundary_uniformity_constant(const MarkovModel& m, const FibreWindow& fw,
                                      std::size_t interior_depth);

// Closed form for the fibre conditional: Q-product of the interior word over
// the sum of Q-products of all admissible interior words sharing the boundary
// symbol. Independent of everything beyond the boundary symbol.
Rational fibre_markov_conditional(const MarkovModel& m, const FactorSystem& fs, const Word& y,
                                  const Word& interior, int boundary_state);

// mu(test cylinder | pi^{-1}[prefix_n . z]) across continuations z and prefix
// depths n; a spread bounded away from zero at all depths certifies a
// discontinuity point of the disintegration.
struct TjurProbe {
  Word prefix;
  std::vector<Word> continuations;
  Word test_cylinder;
  std::vector<std::vector<Rational>> values;  // values[depth-1][continuation]
  std::vector<Rational> spreads;              // per depth: max - min
};
TjurProbe tjur_probe(const MarkovModel& m, const FactorSystem& fs, const Word& prefix,
                     const std::vector<Word>& continuations, const Word& test_cylinder);

// Discontinuity certificate at desk scale: the spread stays >= eps over the
// deepest `depths` probe levels (default 3). A vanishing spread only
// *suggests* a Tjur point; persistence certifies the obstruction.
bool spread_persists(const TjurProbe& probe, const Rational& eps, std::size_t depths = 3);

}  // namespace mflab

#endif  // MFLAB_DISINTEGRATION_HPP
