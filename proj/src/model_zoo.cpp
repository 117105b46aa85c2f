#include "mflab/model_zoo.hpp"

#include <cmath>

namespace mflab {

namespace {

SubshiftSpec full_shift(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  BoolMatrix adj(n, n, 1);
  return make_subshift(Alphabet(std::move(labels)), BinaryAdjacency(std::move(adj)));
}

// Pair chain of a 2-state base chain with the product code
// pi((u,v)) = u * v; the canonical route to the Bernoulli/XOR examples.
struct PairFactor {
  MarkovModel model;
  FactorMap map;
};

PairFactor product_code_pair_chain(const MarkovModel& base) {
  auto lifted = higher_block_model(base, 2);
  std::vector<int> assign;
  for (const auto& block : lifted.block_of)
    assign.push_back(block[0] == block[1] ? 0 : 1);  // same signs multiply to +
  FactorMap map = make_factor_map(lifted.model.shift.alphabet,
                                  Alphabet({"+", "-"}), std::move(assign));
  return PairFactor{std::move(lifted.model), std::move(map)};
}

bool image_is_full_two_shift(const FactorSystem& fs) {
  if (fs.image().size() != 2) return false;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c)
      if (!fs.image().adjacency.allows(b, c)) return false;
  return true;
}

Word repeat_word(int symbol, std::size_t n) {
  return Word{std::vector<int>(n, symbol), 0};
}

}  // namespace

NamedModel furstenberg(const Rational& p) {
  if (!(p > 0 && p < 1)) throw Error("furstenberg: p must lie in (0,1)");
  RationalMatrix base_p(2, 2);
  base_p(0, 0) = p;
  base_p(0, 1) = 1 - p;
  base_p(1, 0) = p;
  base_p(1, 1) = 1 - p;
  MarkovModel base = make_markov_model(full_shift({"+", "-"}), StochasticMatrix(std::move(base_p)));
  auto pair = product_code_pair_chain(base);
  FactorSystem fs(pair.model.shift, pair.map);

  NamedModel nm{"furstenberg:" + format_rational(p), std::move(pair.model), std::move(fs), {}};
  const double pd = to_double(p);
  const bool symmetric = p == Rational(1, 2);

  nm.facts.push_back({"induced_image_adjacency", "image is the full 2-shift",
                      [](const NamedModel& m) { return image_is_full_two_shift(m.system); }});
  nm.facts.push_back({"is_fibre_mixing", "two-point fibres are never mixing",
                      [](const NamedModel& m) {
                        return is_fibre_mixing(m.system).kind == MixingVerdict::Kind::not_mixing;
                      }});
  if (symmetric) {
    nm.facts.push_back({"g_n", "conditionals are identically 1/2", [](const NamedModel& m) {
                          for (std::size_t len = 2; len <= 6; ++len)
                            for (const auto& y : allowed_words(m.system.image(), len))
                              if (g_n(m.model, m.system, y) != Rational(1, 2)) return false;
                          return true;
                        }});
    nm.facts.push_back({"find_bad_configuration", "no witness exists", [](const NamedModel& m) {
                          BadConfigOptions opts;
                          opts.n_max = 4;
                          opts.m_max = 12;
                          opts.eps = 0.01;
                          return !find_bad_configuration(m.model, m.system, opts).has_value();
                        }});
    nm.facts.push_back({"conditional_fibre_marginal", "fibre marginals are 1/2",
                        [](const NamedModel& m) {
                          for (std::size_t len = 1; len <= 5; ++len)
                            for (const auto& y : allowed_words(m.system.image(), len))
                              for (int a : m.system.preimage(y[0]))
                                if (conditional_fibre_marginal(m.model, m.system, y, a) !=
                                    Rational(1, 2))
                                  return false;
                          return true;
                        }});
  } else {
    const double gap_limit = std::abs(2 * pd - 1);
    nm.facts.push_back(
        {"find_bad_configuration", "witness gap approaches |2p-1|",
         [gap_limit](const NamedModel& m) {
           BadConfigOptions opts;
           opts.n_max = 4;
           opts.m_max = 40;
           opts.eps = gap_limit - 0.01;
           auto w = find_bad_configuration(m.model, m.system, opts);
           return w && w->gap >= gap_limit - 0.01 && w->gap <= gap_limit + 1e-9;
         }});
    nm.facts.push_back({"closed_form_furstenberg_g", "forward algorithm matches the closed form",
                        [pd](const NamedModel& m) {
                          for (std::size_t len = 2; len <= 8; ++len)
                            for (const auto& y : allowed_words(m.system.image(), len)) {
                              double lhs = to_double(g_n(m.model, m.system, y));
                              double want = closed_form_furstenberg_g(pd, y);
                              if (std::abs(lhs - want) > 1e-12) return false;
                            }
                          return true;
                        }});
  }
  return nm;
}

double closed_form_furstenberg_g(double p, const Word& y) {
  if (!(p > 0 && p < 1)) throw Error("closed_form_furstenberg_g: p must lie in (0,1)");
  if (y.empty()) throw Error("closed_form_furstenberg_g: empty word");
  // S = sum_{k=1}^n prod_{j=1}^k s_j, s_j = +/-1 (image symbol 0 is +1).
  long long s_sum = 0;
  int prod = 1;
  for (std::size_t k = 1; k < y.size(); ++k) {
    prod *= y[k] == 0 ? 1 : -1;
    s_sum += prod;
  }
  const double lam = p / (1 - p);
  // a = p^2, b = (1-p)^2, c = p, d = 1-p, so a/c = p and b/d = 1-p. Evaluate
  // with lam^{-|S|} when S < 0 so large exponents never overflow.
  double plus;
  if (s_sum >= 0) {
    double t = std::pow(lam, -static_cast<double>(s_sum));  // <= 1
    plus = (p * p + (1 - p) * (1 - p) * t) / (p + (1 - p) * t);
  } else {
    double t = std::pow(lam, static_cast<double>(s_sum));  // lam^S, <= 1 when lam > 1
    plus = (p * p * t + (1 - p) * (1 - p)) / (p * t + (1 - p));
  }
  return y[0] == 0 ? plus : 1.0 - plus;
}

NamedModel symmetric_xor(const Rational& p) {
  if (!(p > 0 && p < 1)) throw Error("symmetric_xor: p must lie in (0,1)");
  RationalMatrix base_p(2, 2);
  base_p(0, 0) = p;
  base_p(0, 1) = 1 - p;
  base_p(1, 0) = 1 - p;
  base_p(1, 1) = p;
  MarkovModel base = make_markov_model(full_shift({"+", "-"}), StochasticMatrix(std::move(base_p)));
  std::vector<Rational> base_stationary = base.stationary;
  auto pair = product_code_pair_chain(base);
  FactorSystem fs(pair.model.shift, pair.map);

  NamedModel nm{"xor:" + format_rational(p), std::move(pair.model), std::move(fs), {}};
  const Rational pr = p;

  nm.facts.push_back({"stationary_distribution", "base chain stationary is (1/2, 1/2)",
                      [base_stationary](const NamedModel&) {
                        return base_stationary ==
                               std::vector<Rational>{Rational(1, 2), Rational(1, 2)};
                      }});
  nm.facts.push_back({"g_n", "factor is Bernoulli(p): g(+|...) = p exactly",
                      [pr](const NamedModel& m) {
                        for (std::size_t len = 2; len <= 7; ++len)
                          for (const auto& y : allowed_words(m.system.image(), len)) {
                            Rational want = y[0] == 0 ? pr : 1 - pr;
                            if (g_n(m.model, m.system, y) != want) return false;
                          }
                        return true;
                      }});
  nm.facts.push_back({"conditional_fibre_marginal", "fibre marginals are 1/2",
                      [](const NamedModel& m) {
                        for (std::size_t len = 1; len <= 5; ++len)
                          for (const auto& y : allowed_words(m.system.image(), len))
                            for (int a : m.system.preimage(y[0]))
                              if (conditional_fibre_marginal(m.model, m.system, y, a) !=
                                  Rational(1, 2))
                                return false;
                        return true;
                      }});
  nm.facts.push_back({"is_fibre_mixing", "not mixing, like the Bernoulli pair factor",
                      [](const NamedModel& m) {
                        return is_fibre_mixing(m.system).kind == MixingVerdict::Kind::not_mixing;
                      }});
  nm.facts.push_back({"find_bad_configuration", "regular despite not mixing: no witness",
                      [](const NamedModel& m) {
                        BadConfigOptions opts;
                        opts.n_max = 4;
                        opts.m_max = 12;
                        opts.eps = 0.01;
                        return !find_bad_configuration(m.model, m.system, opts).has_value();
                      }});
  return nm;
}

NamedModel weak_lumpable_4state() {
  RationalMatrix p(4, 4, Rational(0));
  const Rational h(1, 2);
  p(0, 0) = h; p(0, 1) = h;
  p(1, 0) = h; p(1, 2) = h;
  p(2, 2) = h; p(2, 3) = h;
  p(3, 0) = h; p(3, 2) = h;
  Alphabet domain({"1", "2", "3", "4"});
  BoolMatrix adj(4, 4, 0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (p(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) > 0)
        adj(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1;
  MarkovModel model = make_markov_model(
      make_subshift(domain, BinaryAdjacency(std::move(adj))), StochasticMatrix(std::move(p)));
  FactorMap map = make_factor_map(domain, Alphabet({"a", "b", "c"}), {0, 1, 0, 2});
  FactorSystem fs(model.shift, map);

  NamedModel nm{"wl4", std::move(model), std::move(fs), {}};

  nm.facts.push_back({"stationary_distribution", "stationary is (1/3,1/6,1/3,1/6)",
                      [](const NamedModel& m) {
                        return m.model.stationary ==
                               std::vector<Rational>{Rational(1, 3), Rational(1, 6),
                                                     Rational(1, 3), Rational(1, 6)};
                      }});
  nm.facts.push_back({"strong_lumpability", "not lumpable",
                      [](const NamedModel& m) {
                        return !strong_lumpability(m.model.transition, m.system.map()).lumpable;
                      }});
  nm.facts.push_back(
      {"markov_order_probe", "factor Markov with rows (1/2,1/4,1/4),(1,0,0),(1,0,0)",
       [](const NamedModel& m) {
         auto probe = markov_order_probe(m.model, m.system, 8);
         if (!probe.order_at_most_one) return false;
         RationalMatrix want(3, 3, Rational(0));
         want(0, 0) = Rational(1, 2);
         want(0, 1) = Rational(1, 4);
         want(0, 2) = Rational(1, 4);
         want(1, 0) = 1;
         want(2, 0) = 1;
         return probe.recovered_transition == want;
       }});
  nm.facts.push_back({"reversed_lumpability", "time reversal is lumpable",
                      [](const NamedModel& m) {
                        return reversed_lumpability(m.model, m.system.map()).holds;
                      }});
  nm.facts.push_back({"tjur_probe", "spread 1 at the all-a point",
                      [](const NamedModel& m) {
                        auto probe = tjur_probe(
                            m.model, m.system, repeat_word(0, 8),
                            {Word{{1}, 0}, Word{{2}, 0}}, Word{{0}, 0});
                        for (const auto& s : probe.spreads)
                          if (s != 1) return false;
                        return true;
                      }});
  nm.facts.push_back({"entropy_rate", "entropy log 2",
                      [](const NamedModel& m) {
                        return std::abs(entropy_rate(m.model) - std::log(2.0)) < 1e-12;
                      }});
  nm.facts.push_back({"topological_entropy", "maximal entropy log 2",
                      [](const NamedModel& m) {
                        return std::abs(topological_entropy(m.model.shift) - std::log(2.0)) < 1e-9;
                      }});
  return nm;
}

NamedModel positive_merge_3state(std::optional<StochasticMatrix> p) {
  if (!p) {
    // The default must not be lumpable in either time direction (a symmetric
    // choice would make the factor exactly Markov and kill the variation
    // decay this preset exists to exhibit).
    RationalMatrix def(3, 3, Rational(1, 4));
    def(0, 0) = Rational(1, 2);
    def(1, 0) = Rational(1, 6);
    def(1, 1) = Rational(1, 2);
    def(1, 2) = Rational(1, 3);
    def(2, 2) = Rational(1, 2);
    p = StochasticMatrix(std::move(def));
  }
  for (std::size_t i = 0; i < p->size(); ++i)
    for (std::size_t j = 0; j < p->size(); ++j)
      if ((*p)(static_cast<int>(i), static_cast<int>(j)) <= 0)
        throw Error("positive_merge_3state: transition matrix must be strictly positive");
  if (p->size() != 3) throw Error("positive_merge_3state: need a 3x3 matrix");

  Alphabet domain({"1", "2", "3"});
  MarkovModel model =
      make_markov_model(full_shift({"1", "2", "3"}), std::move(*p));
  FactorMap map = make_factor_map(domain, Alphabet({"a", "b"}), {0, 0, 1});
  FactorSystem fs(model.shift, map);

  NamedModel nm{"pos3", std::move(model), std::move(fs), {}};
  nm.facts.push_back({"is_fibre_mixing", "mixing with index 1",
                      [](const NamedModel& m) {
                        auto v = is_fibre_mixing(m.system);
                        return v.kind == MixingVerdict::Kind::mixing && v.index == 1;
                      }});
  nm.facts.push_back({"variation_estimate", "variation decays: var_4 < var_3",
                      [](const NamedModel& m) {
                        auto v3 = variation_estimate(m.model, m.system, 3, 8);
                        auto v4 = variation_estimate(m.model, m.system, 4, 8);
                        return v4.lower < v3.lower && v3.lower > 0;
                      }});
  nm.facts.push_back({"find_bad_configuration", "no witness up to the search bounds",
                      [](const NamedModel& m) {
                        BadConfigOptions opts;
                        opts.n_min = 3;
                        opts.n_max = 6;
                        opts.m_max = 12;
                        opts.eps = 0.05;
                        return !find_bad_configuration(m.model, m.system, opts).has_value();
                      }});
  return nm;
}

std::optional<NamedModel> parse_preset(const std::string& id) {
  if (id == "wl4") return weak_lumpable_4state();
  if (id == "pos3") return positive_merge_3state();
  auto colon = id.find(':');
  if (colon != std::string::npos) {
    std::string head = id.substr(0, colon);
    std::string arg = id.substr(colon + 1);
    if (head == "furstenberg" || head == "xor") {
      Rational p = parse_rational(arg);
      return head == "furstenberg" ? furstenberg(p) : symmetric_xor(p);
    }
  }
  return std::nullopt;
}

}  // namespace mflab
