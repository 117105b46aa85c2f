// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit status is the number of failed criteria. Target runtime: well under
// two minutes on a laptop, single-threaded.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mflab/conditionals.hpp"
#include "mflab/disintegration.hpp"
#include "mflab/model_zoo.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace mflab;
using namespace mflab::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

constexpr std::uint64_t kCorpusSeed = 20260809;
constexpr std::size_t kCorpusSize = 50;

std::vector<RandomSystem>& corpus() {
  static std::vector<RandomSystem> models = random_corpus(kCorpusSize, kCorpusSeed);
  return models;
}

// ---------------------------------------------------------------------------
// 1. WL4 exactness: stationary vector, lumpability verdicts, recovered factor
//    matrix, reversed lumpability, entropies.
Outcome criterion_wl4_exactness() {
  Outcome out;
  auto nm = weak_lumpable_4state();

  if (nm.model.stationary != std::vector<Rational>{Rational(1, 3), Rational(1, 6),
                                                   Rational(1, 3), Rational(1, 6)})
    out.fail("stationary vector is not (1/3,1/6,1/3,1/6)");

  if (strong_lumpability(nm.model.transition, nm.system.map()).lumpable)
    out.fail("chain reported strongly lumpable");

  auto probe = markov_order_probe(nm.model, nm.system, 8);
  RationalMatrix want(3, 3, Rational(0));
  want(0, 0) = Rational(1, 2);
  want(0, 1) = Rational(1, 4);
  want(0, 2) = Rational(1, 4);
  want(1, 0) = 1;
  want(2, 0) = 1;
  if (!probe.order_at_most_one) out.fail("factor order > 1 within depth 8");
  if (!(probe.recovered_transition == want)) out.fail("recovered factor matrix differs");

  if (!reversed_lumpability(nm.model, nm.system.map()).holds)
    out.fail("reversed chain not lumpable");

  double h = entropy_rate(nm.model);
  if (std::abs(h - std::log(2.0)) > 1e-12) out.fail("entropy_rate differs from log 2");
  double ht = topological_entropy(nm.model.shift);
  if (std::abs(ht - std::log(2.0)) > 1e-9) out.fail("topological entropy differs from log 2");
  return out;
}

// ---------------------------------------------------------------------------
// 2. WL4 discontinuity: spread exactly 1 at a^n for every n <= 12.
Outcome criterion_wl4_discontinuity() {
  Outcome out;
  auto nm = weak_lumpable_4state();
  auto probe = tjur_probe(nm.model, nm.system, Word{std::vector<int>(12, 0), 0},
                          {Word{{1}, 0}, Word{{2}, 0}}, Word{{0}, 0});
  for (std::size_t d = 0; d < probe.spreads.size(); ++d)
    if (probe.spreads[d] != 1)
      out.fail("spread at depth " + std::to_string(d + 1) + " is " +
               format_rational(probe.spreads[d]));
  if (probe.spreads.size() != 12) out.fail("probe depth mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Bernoulli pair factor: forward conditionals equal the closed form within
//    1e-12 for p in {0.3, 0.5, 0.7}, exhaustively over |y| <= 12.
Outcome criterion_closed_form_agreement() {
  Outcome out;
  for (const char* ps : {"3/10", "1/2", "7/10"}) {
    Rational p = parse_rational(ps);
    auto nm = furstenberg(p);
    double pd = to_double(p);
    for (std::size_t len = 2; len <= 12; ++len)
      for (const auto& y : allowed_words(nm.system.image(), len)) {
        double lhs = to_double(g_n(nm.model, nm.system, y));
        double rhs = closed_form_furstenberg_g(pd, y);
        if (std::abs(lhs - rhs) > 1e-12) {
          out.fail("p=" + std::string(ps) + " word " +
                   format_word(nm.system.image().alphabet, y) + ": " + format_double(lhs) +
                   " vs " + format_double(rhs));
          return out;
        }
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 4. Irregularity at p=0.7 (gap >= 0.39 at every center length n <= 8,
//    m_max = 40); regularity artifacts at p=0.5 (constant 1/2, no witness).
Outcome criterion_bad_configurations() {
  Outcome out;
  auto skew = furstenberg(Rational(7, 10));
  for (std::size_t n = 1; n <= 8; ++n) {
    BadConfigOptions opts;
    opts.n_min = n;
    opts.n_max = n;
    opts.m_max = 40;
    opts.eps = 0.39;
    auto witness = find_bad_configuration(skew.model, skew.system, opts);
    if (!witness) {
      out.fail("no witness at center length " + std::to_string(n));
      continue;
    }
    if (witness->gap < 0.39)
      out.fail("gap " + format_double(witness->gap) + " below 0.39 at n=" + std::to_string(n));
  }

  auto half = furstenberg(Rational(1, 2));
  for (std::size_t len = 2; len <= 10; ++len)
    for (const auto& y : allowed_words(half.system.image(), len))
      if (g_n(half.model, half.system, y) != Rational(1, 2)) {
        out.fail("p=1/2 conditional differs from 1/2");
        break;
      }
  BadConfigOptions opts;
  opts.n_max = 6;
  opts.m_max = 40;
  opts.eps = 0.01;
  if (find_bad_configuration(half.model, half.system, opts))
    out.fail("p=1/2 produced a spurious witness");
  return out;
}

// ---------------------------------------------------------------------------
// 5. Symmetric chain with the product code: the factor is Bernoulli(p),
//    g(+|...) = p exactly for n <= 10 (exhaustive up to length 8, sampled
//    continuations at n = 9, 10).
Outcome criterion_xor_bernoulli() {
  Outcome out;
  for (const char* ps : {"1/4", "3/5"}) {
    Rational p = parse_rational(ps);
    auto nm = symmetric_xor(p);
    for (std::size_t len = 2; len <= 8; ++len)
      for (const auto& y : allowed_words(nm.system.image(), len)) {
        Rational want = y[0] == 0 ? p : 1 - p;
        if (g_n(nm.model, nm.system, y) != want) {
          out.fail("p=" + std::string(ps) + " exhaustive check failed at length " +
                   std::to_string(len));
          return out;
        }
      }
    std::mt19937_64 rng(kCorpusSeed);
    for (std::size_t n : {9, 10}) {
      for (int trial = 0; trial < 100; ++trial) {
        Word y;
        for (std::size_t k = 0; k <= n; ++k)
          y.symbols.push_back(static_cast<int>(rng() % 2));
        Rational want = y[0] == 0 ? p : 1 - p;
        if (g_n(nm.model, nm.system, y) != want) {
          out.fail("p=" + std::string(ps) + " sampled check failed at n=" + std::to_string(n));
          return out;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 6. Geometric variation decay on the positive-merge preset: successive
//    lower-bound ratios <= 0.95 for n = 3..8 and log-linear fit r^2 >= 0.98.
Outcome criterion_variation_decay() {
  Outcome out;
  auto nm = positive_merge_3state();
  std::vector<double> lowers;  // index n-1
  for (std::size_t n = 1; n <= 9; ++n)
    lowers.push_back(variation_estimate(nm.model, nm.system, n, 8).lower);
  for (std::size_t n = 3; n <= 8; ++n) {
    double ratio = lowers[n] / lowers[n - 1];  // var_{n+1} / var_n
    if (!(lowers[n - 1] > 0) || ratio > 0.95)
      out.fail("ratio var_" + std::to_string(n + 1) + "/var_" + std::to_string(n) + " = " +
               format_double(ratio));
  }
  auto fit = fit_geometric_decay(std::vector<double>(lowers.begin() + 2, lowers.end()));
  if (fit.r2 < 0.98) out.fail("decay fit r^2 = " + format_double(fit.r2));
  return out;
}

// ---------------------------------------------------------------------------
// 7. Forward algorithm vs brute-force fibre enumeration on the random corpus,
//    every observation word up to length 7; exact in rational arithmetic and
//    within 1e-12 relative in the rescaled double mode.
Outcome criterion_forward_oracle() {
  Outcome out;
  std::size_t index = 0;
  for (const auto& sys : corpus()) {
    ++index;
    for (std::size_t len = 1; len <= 7; ++len)
      for (const auto& y : allowed_words(sys.system.image(), len)) {
        Rational exact = factor_cylinder_probability(sys.model, sys.system, y);
        if (exact != oracle::brute_factor_cylinder(sys.model, sys.system, y)) {
          out.fail("rational mismatch on corpus model " + std::to_string(index));
          return out;
        }
        auto dbl = factor_cylinder_probability_double(sys.model, sys.system, y);
        double want = to_double(exact);
        if (exact == 0 ? dbl.positive : std::abs(dbl.value - want) > 1e-12 * want) {
          out.fail("double-mode mismatch on corpus model " + std::to_string(index));
          return out;
        }
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 8. g-tilde invariants on presets and the corpus: sums to 1 exactly over
//    admissible first symbols at every depth, and dominates kappa.
Outcome criterion_gtilde_invariants() {
  Outcome out;
  std::vector<std::pair<std::string, const NamedModel*>> presets;
  auto wl4 = weak_lumpable_4state();
  auto fp = furstenberg(Rational(7, 10));
  auto fh = furstenberg(Rational(1, 2));
  auto xr = symmetric_xor(Rational(2, 5));
  auto p3 = positive_merge_3state();

  struct Item {
    const MarkovModel* model;
    const FactorSystem* system;
    std::string name;
  };
  std::vector<Item> items = {{&wl4.model, &wl4.system, "wl4"},
                             {&fp.model, &fp.system, "furstenberg:0.7"},
                             {&fh.model, &fh.system, "furstenberg:0.5"},
                             {&xr.model, &xr.system, "xor:0.4"},
                             {&p3.model, &p3.system, "pos3"}};
  std::size_t index = 0;
  for (const auto& sys : corpus()) {
    items.push_back({&sys.model, &sys.system, "corpus-" + std::to_string(++index)});
  }

  std::size_t windows_checked = 0;
  std::string sigma_violation, kappa_violation;
  for (const auto& item : items) {
    Rational kappa = positivity_bound(*item.model);
    auto check_window = [&](const Word& tail) {
      ++windows_checked;
      Rational total(0);
      for (std::size_t b = 0; b < item.system->image().size(); ++b) {
        if (!item.system->image().adjacency.allows(static_cast<int>(b), tail[0])) continue;
        Word y{{static_cast<int>(b)}, 0};
        y.symbols.insert(y.symbols.end(), tail.symbols.begin(), tail.symbols.end());
        auto gv = g_tilde(*item.model, *item.system, y);
        if (gv.value < kappa && kappa_violation.empty())
          kappa_violation = item.name + " window " +
                            format_word(item.system->image().alphabet, tail) + ": value " +
                            format_rational(gv.value) + " < kappa " + format_rational(kappa);
        total += gv.value;
      }
      if (total != 1 && sigma_violation.empty())
        sigma_violation = item.name + ": sum " + format_rational(total);
    };
    for (std::size_t len = 1; len <= 4; ++len)
      for (const auto& tail : allowed_words(item.system->image(), len)) check_window(tail);
    // two deep sampled windows per system
    for (std::uint64_t s : {1u, 2u}) {
      Word hidden = sample_path(*item.model, 10, kCorpusSeed + s);
      check_window(item.system->image_word(hidden));
    }
  }
  std::string summary = "sum-to-one " +
                        (sigma_violation.empty()
                             ? "exact on all " + std::to_string(windows_checked) + " windows"
                             : "VIOLATED: " + sigma_violation) +
                        "; kappa domination " +
                        (kappa_violation.empty() ? "holds" : "VIOLATED: " + kappa_violation);
  if (!sigma_violation.empty() || !kappa_violation.empty()) out.fail(summary);
  return out;
}

// ---------------------------------------------------------------------------
// 9. The fibre conditional closed form equals direct conditioning on
//    pi^{-1}[y_0^m z] exactly, for all window shapes n+l <= 6, all
//    m in (n+l, 12], all continuations z with |z| <= 3.
namespace fibre_markov_check {

// Generic pinned conditional mu(pins | pi^{-1}[w]); deliberately a plain DP
// over the whole conditioning word, independent of the closed-form path.
Rational pinned_conditional(const MarkovModel& m, const FactorSystem& fs, const Word& w,
                            const std::vector<std::pair<std::size_t, int>>& pins_num,
                            const std::vector<std::pair<std::size_t, int>>& pins_den) {
  auto run = [&](const std::vector<std::pair<std::size_t, int>>& pins) -> Rational {
    auto pinned_to = [&](std::size_t pos) {
      for (const auto& [at, state] : pins)
        if (at == pos) return state;
      return -1;
    };
    std::vector<int> states = fs.preimage(w[0]);
    std::vector<Rational> v(states.size(), Rational(0));
    int pin0 = pinned_to(0);
    for (std::size_t i = 0; i < states.size(); ++i)
      if (pin0 < 0 || states[i] == pin0)
        v[i] = m.stationary[static_cast<std::size_t>(states[i])];
    for (std::size_t k = 1; k < w.size(); ++k) {
      std::vector<int> nstates = fs.preimage(w[k]);
      std::vector<Rational> nv(nstates.size(), Rational(0));
      int pink = pinned_to(k);
      for (std::size_t j = 0; j < nstates.size(); ++j) {
        if (pink >= 0 && nstates[j] != pink) continue;
        for (std::size_t i = 0; i < states.size(); ++i) {
          const Rational& p = m.transition(states[i], nstates[j]);
          if (p != 0 && v[i] != 0) nv[j] += v[i] * p;
        }
      }
      v = std::move(nv);
      states = std::move(nstates);
    }
    Rational total(0);
    for (const auto& x : v) total += x;
    return total;
  };
  Rational den = run(pins_den);
  if (den == 0) return Rational(-1);  // conditioning impossible; caller skips
  return run(pins_num) / den;
}

void enumerate_fibre_words(const FactorSystem& fs, const Word& y, std::size_t upto,
                           std::vector<Word>* out) {
  Word prefix{std::vector<int>(y.symbols.begin(), y.symbols.begin() + static_cast<long>(upto)),
              0};
  auto words = oracle::preimage_words(fs, prefix);
  out->assign(words.begin(), words.end());
}

Outcome check_system(const MarkovModel& model, const FactorSystem& fs, const Word& base,
                     const std::string& name, std::size_t word_cap) {
  Outcome out;
  for (std::size_t n = 0; n + 1 <= 5; ++n) {
    for (std::size_t ell = 1; n + ell <= 6; ++ell) {
      const std::size_t window_end = n + ell;  // boundary segment is n+1..n+ell
      std::vector<Word> xs;
      enumerate_fibre_words(fs, base, window_end + 1, &xs);
      if (xs.size() > word_cap) xs.resize(word_cap);
      for (const auto& x : xs) {
        Word interior{std::vector<int>(x.symbols.begin(),
                                       x.symbols.begin() + static_cast<long>(n) + 1),
                      0};
        Rational closed;
        try {
          closed = fibre_markov_conditional(model, fs, base, interior,
                                            x.symbols[n + 1]);
        } catch (const Error&) {
          continue;
        }
        std::vector<std::pair<std::size_t, int>> pins_den, pins_num;
        for (std::size_t k = n + 1; k <= window_end; ++k)
          pins_den.emplace_back(k, x.symbols[k]);
        for (std::size_t k = 0; k <= window_end; ++k)
          pins_num.emplace_back(k, x.symbols[k]);

        for (std::size_t m = window_end + 1; m <= 12; ++m) {
          // conditioning word y_0^m plus every allowed continuation z, |z| <= 3
          Word stem{std::vector<int>(base.symbols.begin(),
                                     base.symbols.begin() + static_cast<long>(m) + 1),
                    0};
          std::vector<Word> conditionings;
          std::function<void(Word&, std::size_t)> extend = [&](Word& w, std::size_t left) {
            conditionings.push_back(w);
            if (left == 0) return;
            for (std::size_t b = 0; b < fs.image().size(); ++b) {
              if (!fs.image().adjacency.allows(w.symbols.back(), static_cast<int>(b))) continue;
              w.symbols.push_back(static_cast<int>(b));
              extend(w, left - 1);
              w.symbols.pop_back();
            }
          };
          extend(stem, 3);
          for (const auto& w : conditionings) {
            Rational direct = pinned_conditional(model, fs, w, pins_num, pins_den);
            if (direct == Rational(-1)) continue;
            if (direct != closed) {
              out.fail(name + ": window n=" + std::to_string(n) + " l=" + std::to_string(ell) +
                       " m=" + std::to_string(m) + ": " + format_rational(direct) + " vs " +
                       format_rational(closed));
              return out;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace fibre_markov_check

Outcome criterion_fibre_markov() {
  Outcome out;
  auto wl4 = weak_lumpable_4state();
  // the all-a point and two sampled base words
  Word arun{std::vector<int>(16, 0), 0};
  auto r = fibre_markov_check::check_system(wl4.model, wl4.system, arun, "wl4-arun", 16);
  if (!r.pass) return r;
  for (std::uint64_t s : {3u, 4u}) {
    Word hidden = sample_path(wl4.model, 16, kCorpusSeed + s);
    r = fibre_markov_check::check_system(wl4.model, wl4.system, wl4.system.image_word(hidden),
                                         "wl4-sampled", 16);
    if (!r.pass) return r;
  }
  std::size_t index = 0;
  for (const auto& sys : corpus()) {
    ++index;
    for (std::uint64_t s : {0u, 1u}) {
      Word hidden = sample_path(sys.model, 16, kCorpusSeed + 2 * index + s);
      r = fibre_markov_check::check_system(sys.model, sys.system, sys.system.image_word(hidden),
                                           "corpus-" + std::to_string(index), 12);
      if (!r.pass) return r;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 10. Fibre-mixing decisions with verified witnesses, each under 10 seconds.
Outcome criterion_mixing_decisions() {
  Outcome out;
  auto timed = [&](const std::string& name, const FactorSystem& fs,
                   MixingVerdict::Kind expected, std::optional<int> expected_index) {
    auto start = std::chrono::steady_clock::now();
    auto verdict = is_fibre_mixing(fs);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 10.0) out.fail(name + ": decision took " + format_double(secs) + "s");
    if (verdict.kind != expected) {
      out.fail(name + ": wrong verdict");
      return;
    }
    if (expected_index && verdict.index != expected_index) {
      out.fail(name + ": wrong uniform index");
      return;
    }
    if (expected == MixingVerdict::Kind::not_mixing) {
      // re-verify the witness by direct multiplication
      const Word& w = *verdict.witness_word;
      if (!word_allowed(fs.image(), w) || w.size() < 2) {
        out.fail(name + ": malformed witness");
        return;
      }
      BoolMatrix prod = fs.edge_submatrix(w[0], w[1]);
      for (std::size_t i = 2; i < w.size(); ++i)
        prod = bool_product(prod, fs.edge_submatrix(w[i - 1], w[i]));
      if (positive_on_support(prod)) out.fail(name + ": witness product is positive");
    }
  };
  auto pos3 = positive_merge_3state();
  timed("pos3", pos3.system, MixingVerdict::Kind::mixing, 1);
  auto fb = furstenberg(Rational(7, 10));
  timed("furstenberg", fb.system, MixingVerdict::Kind::not_mixing, std::nullopt);
  auto xr = symmetric_xor(Rational(2, 5));
  timed("xor", xr.system, MixingVerdict::Kind::not_mixing, std::nullopt);
  auto wl4 = weak_lumpable_4state();
  timed("wl4", wl4.system, MixingVerdict::Kind::not_mixing, std::nullopt);
  return out;
}

// ---------------------------------------------------------------------------
// 11. Monte Carlo consistency: 1e6 seeded samples match the exact
//     conditionals within four standard errors.
Outcome criterion_monte_carlo() {
  Outcome out;
  const std::size_t samples = 1000000;
  auto check = [&](const MarkovModel& m, const FactorSystem& fs, const Word& y,
                   std::uint64_t seed, const std::string& name) {
    auto emp = empirical_conditional(m, fs, y, samples, seed);
    if (emp.flagged) {
      out.fail(name + ": conditioning event never sampled");
      return;
    }
    double exact = to_double(g_n(m, fs, y));
    double diff = std::abs(emp.estimate - exact);
    if (emp.stderr_value == 0 ? diff != 0 : diff > 4 * emp.stderr_value)
      out.fail(name + ": |" + format_double(emp.estimate) + " - " + format_double(exact) +
               "| exceeds 4 stderr = " + format_double(4 * emp.stderr_value));
  };
  auto wl4 = weak_lumpable_4state();
  check(wl4.model, wl4.system, Word{{0, 1}, 0}, 101, "wl4 ab");
  check(wl4.model, wl4.system, Word{{0, 0, 1}, 0}, 102, "wl4 aab");
  auto half = furstenberg(Rational(1, 2));
  check(half.model, half.system, Word{{0, 0}, 0}, 103, "furstenberg ++");
  check(half.model, half.system, Word{{1, 0, 1}, 0}, 104, "furstenberg -+-");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string title;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "4-state example: exact stationary vector, lumpability verdicts, entropies",
       criterion_wl4_exactness},
      {2, "4-state example: unit Tjur spread at the all-a point up to depth 12",
       criterion_wl4_discontinuity},
      {3, "pair factor of a Bernoulli chain matches the closed form to 1e-12 (|y| <= 12)",
       criterion_closed_form_agreement},
      {4, "bad configurations: gap >= 0.39 at p=0.7 for n <= 8; none at p=0.5",
       criterion_bad_configurations},
      {5, "symmetric product code is Bernoulli(p) exactly up to n = 10",
       criterion_xor_bernoulli},
      {6, "variation lower bounds decay geometrically on the positive merge",
       criterion_variation_decay},
      {7, "forward algorithm equals brute-force fibre enumeration on 50 random models",
       criterion_forward_oracle},
      {8, "g-tilde sums to 1 exactly and dominates kappa on presets and corpus",
       criterion_gtilde_invariants},
      {9, "fibre conditional closed form is window-independent (exact, corpus-wide)",
       criterion_fibre_markov},
      {10, "fibre-mixing verdicts with verified witnesses, each under 10 s",
       criterion_mixing_decisions},
      {11, "1e6-sample Monte Carlo agrees with exact conditionals within 4 stderr",
       criterion_monte_carlo},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome = c.run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::printf("%s  %2d  %s  (%.1fs)%s%s\n", outcome.pass ? "PASS" : "FAIL", c.number,
                c.title.c_str(), secs, outcome.detail.empty() ? "" : "  -- ",
                outcome.detail.c_str());
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
