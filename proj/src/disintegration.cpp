#include "mflab/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mflab {

namespace {

// Backward hidden-path masses along an image word (transition products only):
// beta[k][i] = mass of continuations of the i-th preimage state of word[k].
std::vector<std::vector<Rational>> backward_table(const MarkovModel& m, const FactorSystem& fs,
                                                  const Word& word) {
  const std::size_t len = word.size();
  std::vector<std::vector<Rational>> beta(len);
  beta[len - 1].assign(fs.preimage(word[len - 1]).size(), Rational(1));
  for (std::size_t k = len - 1; k-- > 0;) {
    const auto& pre = fs.preimage(word[k]);
    const auto& nxt = fs.preimage(word[k + 1]);
    beta[k].assign(pre.size(), Rational(0));
    for (std::size_t i = 0; i < pre.size(); ++i)
      for (std::size_t j = 0; j < nxt.size(); ++j) {
        const Rational& p = m.transition(pre[i], nxt[j]);
        if (p != 0 && beta[k + 1][j] != 0) beta[k][i] += p * beta[k + 1][j];
      }
  }
  return beta;
}

std::vector<Rational> first_site_posterior(const MarkovModel& m, const FactorSystem& fs,
                                           const Word& window) {
  auto beta = backward_table(m, fs, window);
  const auto& pre = fs.preimage(window[0]);
  std::vector<Rational> post(pre.size(), Rational(0));
  Rational total(0);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    post[i] = m.stationary[static_cast<std::size_t>(pre[i])] * beta[0][i];
    total += post[i];
  }
  if (total == 0)
    throw Error("conditional window '" + format_word(fs.image().alphabet, window) +
                "' has probability zero");
  for (auto& v : post) v /= total;
  return post;
}

}  // namespace

Rational positivity_bound(const MarkovModel& m) {
  Rational kappa(0);
  bool first = true;
  const std::size_t n = m.shift.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Rational& q = m.reversal(a, b);
      if (q > 0 && (first || q < kappa)) {
        kappa = q;
        first = false;
      }
    }
  return kappa;
}

ReversedLumpability reversed_lumpability(const MarkovModel& m, const FactorMap& map) {
  ReversedLumpability out;
  const std::size_t nb = map.target.size();
  std::vector<std::vector<int>> pre(nb);
  for (std::size_t a = 0; a < map.source.size(); ++a)
    pre[static_cast<std::size_t>(map(static_cast<int>(a)))].push_back(static_cast<int>(a));

  RationalMatrix s(nb, nb, Rational(0));
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t bp = 0; bp < nb; ++bp) {
      Rational common;
      bool first = true;
      for (int ap : pre[bp]) {
        Rational sum(0);
        for (int a : pre[b]) sum += m.reversal(static_cast<std::size_t>(a),
                                               static_cast<std::size_t>(ap));
        if (first) {
          common = sum;
          first = false;
        } else if (sum != common) {
          out.holds = false;
          out.detail = "Q-column sums over class " + map.target.label(static_cast<int>(b)) +
                       " differ within class " + map.target.label(static_cast<int>(bp)) + ": " +
                       format_rational(common) + " vs " + format_rational(sum);
          return out;
        }
      }
      s(b, bp) = common;
    }
  }
  out.holds = true;
  out.s_matrix = std::move(s);
  return out;
}

Rational conditional_fibre_marginal(const MarkovModel& m, const FactorSystem& fs,
                                    const Word& window, int hidden_symbol) {
  if (window.empty()) throw Error("conditional_fibre_marginal: empty window");
  if (fs.image_of(hidden_symbol) != window[0])
    throw Error("conditional_fibre_marginal: state " +
                fs.domain().alphabet.label(hidden_symbol) + " is not in the fibre of " +
                fs.image().alphabet.label(window[0]));
  auto post = first_site_posterior(m, fs, window);
  const auto& pre = fs.preimage(window[0]);
  for (std::size_t i = 0; i < pre.size(); ++i)
    if (pre[i] == hidden_symbol) return post[i];
  throw Error("conditional_fibre_marginal: state not found");
}

FibreMeasure fibre_measure(const MarkovModel& m, const FactorSystem& fs, const Word& base) {
  if (base.empty()) throw Error("fibre_measure: empty base word");
  FibreMeasure fm;
  fm.base = base;
  fm.states = fs.preimage(base[0]);
  for (std::size_t depth = 1; depth <= base.size(); ++depth) {
    Word window{std::vector<int>(base.symbols.begin(),
                                 base.symbols.begin() + static_cast<long>(depth)),
                0};
    fm.marginal_by_depth.push_back(first_site_posterior(m, fs, window));
    if (depth > 1) {
      double d = 0.0;
      const auto& cur = fm.marginal_by_depth[depth - 1];
      const auto& prev = fm.marginal_by_depth[depth - 2];
      for (std::size_t i = 0; i < cur.size(); ++i)
        d = std::max(d, std::abs(to_double(cur[i] - prev[i])));
      fm.deltas.push_back(d);
    }
  }
  return fm;
}

GTildeValue g_tilde(const MarkovModel& m, const FactorSystem& fs, const Word& y) {
  if (y.size() < 2) throw Error("g_tilde: need y_0 plus a nonempty window");
  const int y0 = y[0];
  Word window{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0};

  const auto& pre1 = fs.preimage(window[0]);
  std::vector<Rational> bracket(pre1.size(), Rational(0));
  for (std::size_t j = 0; j < pre1.size(); ++j)
    for (int a : fs.preimage(y0))
      bracket[j] += m.reversal(static_cast<std::size_t>(a), static_cast<std::size_t>(pre1[j]));

  auto eval = [&](const Word& win) {
    auto post = first_site_posterior(m, fs, win);
    Rational v(0);
    for (std::size_t j = 0; j < pre1.size(); ++j) v += bracket[j] * post[j];
    return v;
  };

  GTildeValue out;
  out.depth = window.size();
  out.value = eval(window);
  if (window.size() >= 2) {
    Word shorter{std::vector<int>(window.symbols.begin(), window.symbols.end() - 1), 0};
    out.previous = eval(shorter);
    Rational d = out.value - *out.previous;
    if (d < 0) d = -d;
    out.delta = d;
  }
  bool exact_const = reversed_lumpability(m, fs.map()).holds;
  out.converged = exact_const || (out.delta && to_double(*out.delta) < 1e-10);
  return out;
}

FibrePotential fibre_potential(const MarkovModel& m, const FibreWindow& fw, int boundary_state) {
  if (fw.states.size() < 2)
    throw Error("fibre_potential: window must cover the boundary position");
  const std::size_t last = fw.states.size() - 1;
  if (std::find(fw.states[last].begin(), fw.states[last].end(), boundary_state) ==
      fw.states[last].end())
    throw Error("fibre_potential: boundary state not admissible at the window end");

  FibrePotential pot;
  pot.image_window = fw.image_word;
  pot.boundary_state = boundary_state;
  pot.partition = 0;

  // DFS over interior words a_0^n with a_n -> boundary.
  std::vector<int> current;
  Rational weight(1);
  std::function<void(std::size_t, Rational)> dfs = [&](std::size_t pos, Rational w) {
    if (pos == last) {
      // close with the boundary edge
      const Rational& q = m.reversal(static_cast<std::size_t>(current.back()),
                                     static_cast<std::size_t>(boundary_state));
      if (q == 0) return;
      Rational full = w * q;
      pot.words.push_back(Word{current, 0});
      pot.weights.push_back(full);
      pot.partition += full;
      return;
    }
    for (int s : fw.states[pos]) {
      Rational step(1);
      if (!current.empty()) {
        step = m.reversal(static_cast<std::size_t>(current.back()), static_cast<std::size_t>(s));
        if (step == 0) continue;
      }
      current.push_back(s);
      dfs(pos + 1, w * step);
      current.pop_back();
    }
  };
  dfs(0, Rational(1));
  if (pot.partition == 0)
    throw Error("fibre_potential: no admissible interior word for this boundary");
  for (auto& w : pot.weights) w /= pot.partition;
  return pot;
}

Rational averaging_operator_apply(const FibrePotential& pot,
                                  const std::function<Rational(const Word&)>& f) {
  Rational acc(0);
  for (std::size_t i = 0; i < pot.words.size(); ++i) {
    Word full = pot.words[i];
    full.symbols.push_back(pot.boundary_state);
    acc += pot.weights[i] * f(full);
  }
  return acc;
}

GibbsKernel gibbs_kernel(const MarkovModel& m, const FibreWindow& fw, const Word& boundary) {
  if (boundary.empty()) throw Error("gibbs_kernel: empty boundary");
  const std::size_t start = static_cast<std::size_t>(boundary.offset);
  if (boundary.offset < 1 || start + boundary.size() > fw.states.size())
    throw Error("gibbs_kernel: boundary does not fit the window");
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto& states = fw.states[start + i];
    if (std::find(states.begin(), states.end(), boundary[i]) == states.end())
      throw Error("gibbs_kernel: boundary word not admissible in the fibre");
    if (i + 1 < boundary.size()) {
      // adjacency within the boundary itself
      bool ok = m.transition(boundary[i], boundary[i + 1]) > 0;
      if (!ok) throw Error("gibbs_kernel: boundary word not admissible in the fibre");
    }
  }

  // Kernel over interior [0, offset-1]; only boundary[0] matters.
  FibreWindow sub;
  sub.image_word.symbols.assign(fw.image_word.symbols.begin(),
                                fw.image_word.symbols.begin() + static_cast<long>(start) + 1);
  sub.states.assign(fw.states.begin(), fw.states.begin() + static_cast<long>(start) + 1);
  sub.matrices.assign(fw.matrices.begin(), fw.matrices.begin() + static_cast<long>(start));
  GibbsKernel kernel{fibre_potential(m, sub, boundary[0]), boundary};
  return kernel;
}

Rational boundary_uniformity_constant(const MarkovModel& m, const FibreWindow& fw,
                                      std::size_t interior_depth) {
  if (fw.states.size() < 2) throw Error("boundary_uniformity_constant: window too short");
  const std::size_t last = fw.states.size() - 1;
  if (interior_depth + 1 >= fw.states.size())
    throw Error("boundary_uniformity_constant: interior depth exceeds the window");

  const auto& boundaries = fw.states[last];
  // Prefix cylinder masses per boundary state.
  std::vector<std::map<std::vector<int>, Rational>> mass(boundaries.size());
  for (std::size_t bi = 0; bi < boundaries.size(); ++bi) {
    FibrePotential pot = fibre_potential(m, fw, boundaries[bi]);
    for (std::size_t w = 0; w < pot.words.size(); ++w) {
      std::vector<int> prefix(pot.words[w].symbols.begin(),
                              pot.words[w].symbols.begin() + static_cast<long>(interior_depth) + 1);
      mass[bi][prefix] += pot.weights[w];
    }
  }

  Rational c(1);
  bool first = true;
  for (std::size_t x = 0; x < boundaries.size(); ++x)
    for (std::size_t xt = 0; xt < boundaries.size(); ++xt) {
      for (const auto& [prefix, denom] : mass[xt]) {
        if (denom == 0) continue;
        auto it = mass[x].find(prefix);
        Rational num = it == mass[x].end() ? Rational(0) : it->second;
        Rational ratio = num / denom;
        if (first || ratio < c) {
          c = ratio;
          first = false;
        }
      }
    }
  return first ? Rational(1) : c;
}

Rational fibre_markov_conditional(const MarkovModel& m, const FactorSystem& fs, const Word& y,
                                  const Word& interior, int boundary_state) {
  const std::size_t n1 = interior.size();  // interior covers positions 0..n
  if (n1 == 0) throw Error("fibre_markov_conditional: empty interior word");
  if (y.size() < n1 + 1)
    throw Error("fibre_markov_conditional: observation word shorter than the window");
  for (std::size_t i = 0; i < n1; ++i)
    if (fs.image_of(interior[i]) != y[i])
      throw Error("fibre_markov_conditional: interior word is not in the fibre");
  if (fs.image_of(boundary_state) != y[n1])
    throw Error("fibre_markov_conditional: boundary state is not in the fibre");

  Rational numerator(1);
  for (std::size_t i = 0; i + 1 < n1; ++i) {
    const Rational& q = m.reversal(static_cast<std::size_t>(interior[i]),
                                   static_cast<std::size_t>(interior[i + 1]));
    if (q == 0) return 0;
    numerator *= q;
  }
  {
    const Rational& q = m.reversal(static_cast<std::size_t>(interior[n1 - 1]),
                                   static_cast<std::size_t>(boundary_state));
    if (q == 0) return 0;
    numerator *= q;
  }

  // Denominator: backward DP over all b_0^n in the full preimage sets with
  // P(b_n, boundary) > 0.
  std::vector<Rational> d(1, Rational(1));  // at the boundary position, pinned state
  std::vector<int> d_states{boundary_state};
  for (std::size_t pos = n1; pos-- > 0;) {
    const auto& pre = fs.preimage(y[pos]);
    std::vector<Rational> nd(pre.size(), Rational(0));
    for (std::size_t i = 0; i < pre.size(); ++i)
      for (std::size_t j = 0; j < d_states.size(); ++j) {
        const Rational& q = m.reversal(static_cast<std::size_t>(pre[i]),
                                       static_cast<std::size_t>(d_states[j]));
        if (q != 0 && d[j] != 0) nd[i] += q * d[j];
      }
    d = std::move(nd);
    d_states = pre;
  }
  Rational denominator(0);
  for (const auto& v : d) denominator += v;
  if (denominator == 0)
    throw Error("fibre_markov_conditional: no admissible word matches the conditioning");
  return numerator / denominator;
}

TjurProbe tjur_probe(const MarkovModel& m, const FactorSystem& fs, const Word& prefix,
                     const std::vector<Word>& continuations, const Word& test_cylinder) {
  if (prefix.empty()) throw Error("tjur_probe: empty prefix");
  if (continuations.empty()) throw Error("tjur_probe: need at least one continuation");
  TjurProbe probe;
  probe.prefix = prefix;
  probe.continuations = continuations;
  probe.test_cylinder = test_cylinder;

  // Pinned-forward conditional mu(test | pi^{-1}[word]). Explicit return
  // type: a deduced one would be gmp's lazy expression over dead temporaries.
  auto conditional = [&](const Word& word) -> Rational {
    const std::size_t off = static_cast<std::size_t>(test_cylinder.offset);
    if (off + test_cylinder.size() > word.size())
      throw Error("tjur_probe: test cylinder exceeds the conditioning window");
    auto run = [&](bool pinned) {
      std::vector<Rational> v;
      std::vector<int> states = fs.preimage(word[0]);
      v.assign(states.size(), Rational(0));
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (pinned && 0 >= off && 0 < off + test_cylinder.size() &&
            states[i] != test_cylinder[0 - off])
          continue;
        v[i] = m.stationary[static_cast<std::size_t>(states[i])];
      }
      for (std::size_t k = 1; k < word.size(); ++k) {
        std::vector<int> nstates = fs.preimage(word[k]);
        std::vector<Rational> nv(nstates.size(), Rational(0));
        for (std::size_t j = 0; j < nstates.size(); ++j) {
          if (pinned && k >= off && k < off + test_cylinder.size() &&
              nstates[j] != test_cylinder[k - off])
            continue;
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
    Rational denom = run(false);
    if (denom == 0)
      throw Error("tjur_probe: conditioning cylinder '" +
                  format_word(fs.image().alphabet, word) + "' has probability zero");
    return run(true) / denom;
  };

  for (std::size_t depth = 1; depth <= prefix.size(); ++depth) {
    std::vector<Rational> row;
    row.reserve(continuations.size());
    for (const auto& z : continuations) {
      Word word{std::vector<int>(prefix.symbols.begin(),
                                 prefix.symbols.begin() + static_cast<long>(depth)),
                0};
      word.symbols.insert(word.symbols.end(), z.symbols.begin(), z.symbols.end());
      row.push_back(conditional(word));
    }
    Rational lo = row[0], hi = row[0];
    for (const auto& v : row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    probe.values.push_back(std::move(row));
    probe.spreads.push_back(hi - lo);
  }
  return probe;
}

bool spread_persists(const TjurProbe& probe, const Rational& eps, std::size_t depths) {
  if (depths == 0 || probe.spreads.size() < depths) return false;
  for (std::size_t d = probe.spreads.size() - depths; d < probe.spreads.size(); ++d)
    if (probe.spreads[d] < eps) return false;
  return true;
}

}  // namespace mflab
