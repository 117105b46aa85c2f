#ifndef MFLAB_MODEL_ZOO_HPP
#define MFLAB_MODEL_ZOO_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mflab/conditionals.hpp"
#include "mflab/disintegration.hpp"
#include "mflab/factor.hpp"
#include "mflab/markov.hpp"

namespace mflab {

// Built-in example with machine-checkable ground truths. The facts list IS
// the golden-test suite for the preset; each fact names the operation that
// decides it.
struct NamedModel;

struct ExpectedFact {
  std::string operation;
  std::string claim;
  std::function<bool(const NamedModel&)> check;
};

struct NamedModel {
  std::string id;
  MarkovModel model;
  FactorSystem system;
  std::vector<ExpectedFact> facts;
};

// Two-block factor of a Bernoulli(p) +/- process: Y_n = X_n * X_{n+1},
// realized as a 1-block factor of the pair chain. Image is the full 2-shift;
// conditionals have the closed form below. p != 1/2 makes every point a
// discontinuity with asymptotic gap |2p - 1|.
NamedModel furstenberg(const Rational& p);

// Closed-form oracle for the Bernoulli pair-factor conditionals:
// nu(y_0 = + | y_1^n) = (a lam^{S} + b) / (c lam^{S} + d) with lam = p/(1-p),
// S = sum of running products of y_1..y_k, a/c = p and b/d = 1-p. Stable for
// large |S|. Independent of the forward-algorithm path.
double closed_form_furstenberg_g(double p, const Word& y);

// Same pair construction over the symmetric two-state chain
// P = [[p, 1-p], [1-p, p]]; the factor is Bernoulli(p) for every p, with the
// same two-point fibres.
NamedModel symmetric_xor(const Rational& p);

// The 4-state weakly-lumpable chain: not strongly lumpable, factor Markov
// with rows (1/2,1/4,1/4), (1,0,0), (1,0,0); reversed-lumpable; no continuous
// disintegration (Tjur spread 1 at the all-a point).
NamedModel weak_lumpable_4state();

// Strictly positive 3-state chain with two states merged: fibre mixing with
// index 1 and geometrically decaying variation.
NamedModel positive_merge_3state(std::optional<StochasticMatrix> p = std::nullopt);

// Preset ids understood by the CLI: "wl4", "pos3", "furstenberg:<p>", "xor:<p>".
std::optional<NamedModel> parse_preset(const std::string& id);

}  // namespace mflab

#endif  // MFLAB_MODEL_ZOO_HPP
