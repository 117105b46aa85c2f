#include "mflab/conditionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mflab {

template <class S>
ForwardState<S>::ForwardState(const MarkovModel& m, const FactorSystem& fs)
    : model_(&m), fs_(&fs) {}

template <class S>
void ForwardState<S>::start(int image_symbol) {
  const auto& pre = fs_->preimage(image_symbol);
  vec_.assign(pre.size(), S(0));
  bool any = false;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if constexpr (std::is_same_v<S, double>) {
      vec_[i] = to_double(model_->stationary[static_cast<std::size_t>(pre[i])]);
    } else {
      vec_[i] = model_->stationary[static_cast<std::size_t>(pre[i])];
    }
    if (vec_[i] > S(0)) any = true;
  }
  last_ = image_symbol;
  length_ = 1;
  alive_ = any;
  log_scale_ = 0.0;
  if constexpr (std::is_same_v<S, double>) {
    if (alive_) {
      double total = 0.0;
      for (double v : vec_) total += v;
      log_scale_ = std::log(total);
      for (double& v : vec_) v /= total;
    }
  }
}

template <class S>
bool ForwardState<S>::extend(int image_symbol) {
  const auto& pre_old = fs_->preimage(last_);
  const auto& pre_new = fs_->preimage(image_symbol);
  std::vector<S> next(pre_new.size(), S(0));
  bool any = false;
  for (std::size_t j = 0; j < pre_new.size(); ++j) {
    S acc(0);
    for (std::size_t i = 0; i < pre_old.size(); ++i) {
      const Rational& pij = model_->transition(pre_old[i], pre_new[j]);
      if (pij == 0 || vec_[i] == S(0)) continue;
      if constexpr (std::is_same_v<S, double>)
        acc += vec_[i] * to_double(pij);
      else
        acc += vec_[i] * pij;
    }
    next[j] = acc;
    if (acc > S(0)) any = true;
  }
  vec_ = std::move(next);
  last_ = image_symbol;
  ++length_;
  alive_ = alive_ && any;
  if constexpr (std::is_same_v<S, double>) {
    if (alive_) {
      double total = 0.0;
      for (double v : vec_) total += v;
      log_scale_ += std::log(total);
      for (double& v : vec_) v /= total;
    }
  }
  return alive_;
}

template <class S>
S ForwardState<S>::mass() const {
  if constexpr (std::is_same_v<S, double>) {
    return alive_ ? std::exp(log_scale_) : 0.0;
  } else {
    S total(0);
    for (const auto& v : vec_) total += v;
    return total;
  }
}

template <class S>
double ForwardState<S>::log_mass() const {
  if constexpr (std::is_same_v<S, double>) {
    return alive_ ? log_scale_ : -std::numeric_limits<double>::infinity();
  } else {
    S total(0);
    for (const auto& v : vec_) total += v;
    double d = to_double(total);
    return d > 0 ? std::log(d) : -std::numeric_limits<double>::infinity();
  }
}

template class ForwardState<Rational>;
template class ForwardState<double>;

namespace {

void check_image_word(const FactorSystem& fs, const Word& y, const char* who) {
  if (y.empty()) throw Error(std::string(who) + ": empty word");
  for (int sym : y.symbols)
    if (sym < 0 || static_cast<std::size_t>(sym) >= fs.image().size())
      throw Error(std::string(who) + ": symbol out of range");
}

}  // namespace

Rational factor_cylinder_probability(const MarkovModel& m, const FactorSystem& fs, const Word& y) {
  check_image_word(fs, y, "factor_cylinder_probability");
  ForwardState<Rational> f(m, fs);
  f.start(y[0]);
  for (std::size_t i = 1; i < y.size() && f.alive(); ++i) f.extend(y[i]);
  return f.alive() ? f.mass() : Rational(0);
}

LogProbability factor_cylinder_probability_double(const MarkovModel& m, const FactorSystem& fs,
                                                  const Word& y) {
  check_image_word(fs, y, "factor_cylinder_probability");
  ForwardState<double> f(m, fs);
  f.start(y[0]);
  for (std::size_t i = 1; i < y.size() && f.alive(); ++i) f.extend(y[i]);
  LogProbability out;
  out.positive = f.alive();
  out.log_value = f.log_mass();
  out.value = out.positive ? std::exp(out.log_value) : 0.0;
  return out;
}

Rational g_n(const MarkovModel& m, const FactorSystem& fs, const Word& y) {
  check_image_word(fs, y, "g_n");
  if (y.size() < 2) throw Error("g_n: need y_0 plus at least one conditioning symbol");
  Word tail{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0};
  Rational den = factor_cylinder_probability(m, fs, tail);
  if (den == 0)
    throw Error("g_n: conditioning event '" + format_word(fs.image().alphabet, tail) +
                "' has probability zero");
  Rational num = factor_cylinder_probability(m, fs, y);
  return num / den;
}

double g_n_double(const MarkovModel& m, const FactorSystem& fs, const Word& y) {
  check_image_word(fs, y, "g_n");
  if (y.size() < 2) throw Error("g_n: need y_0 plus at least one conditioning symbol");
  Word tail{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0};
  auto den = factor_cylinder_probability_double(m, fs, tail);
  if (!den.positive)
    throw Error("g_n: conditioning event '" + format_word(fs.image().alphabet, tail) +
                "' has probability zero");
  auto num = factor_cylinder_probability_double(m, fs, y);
  if (!num.positive) return 0.0;
  return std::exp(num.log_value - den.log_value);
}

namespace {

// Conditional path-mass matrix C(a_1, e): mass of hidden paths over the
// window starting at state a_1 (position 1 of the center) and ending at e,
// transition products only. Renormalized; ratios are all that matter here.
struct SteerState {
  std::vector<std::vector<double>> c;  // rows: preimage(y_1), cols: preimage(last)
  int last = -1;
  bool alive = false;
};

SteerState steer_init(const MarkovModel& m, const FactorSystem& fs, const Word& window) {
  SteerState st;
  const auto& pre1 = fs.preimage(window[0]);
  st.c.assign(pre1.size(), std::vector<double>(pre1.size(), 0.0));
  for (std::size_t i = 0; i < pre1.size(); ++i) st.c[i][i] = 1.0;
  st.last = window[0];
  st.alive = true;
  for (std::size_t k = 1; k < window.size() && st.alive; ++k) {
    const auto& pre_old = fs.preimage(st.last);
    const auto& pre_new = fs.preimage(window[k]);
    double total = 0.0;
    for (auto& row : st.c) {
      std::vector<double> next(pre_new.size(), 0.0);
      for (std::size_t i = 0; i < pre_old.size(); ++i) {
        if (row[i] == 0.0) continue;
        for (std::size_t j = 0; j < pre_new.size(); ++j) {
          const Rational& pij = m.transition(pre_old[i], pre_new[j]);
          if (pij != 0) next[j] += row[i] * to_double(pij);
        }
      }
      row = std::move(next);
      for (double v : row) total += v;
    }
    st.last = window[k];
    if (total <= 0.0) {
      st.alive = false;
    } else {
      for (auto& row : st.c)
        for (double& v : row) v /= total;
    }
  }
  return st;
}

SteerState steer_extend(const MarkovModel& m, const FactorSystem& fs, const SteerState& st,
                        int symbol) {
  SteerState out;
  out.last = symbol;
  const auto& pre_old = fs.preimage(st.last);
  const auto& pre_new = fs.preimage(symbol);
  out.c.assign(st.c.size(), std::vector<double>(pre_new.size(), 0.0));
  double total = 0.0;
  for (std::size_t r = 0; r < st.c.size(); ++r) {
    for (std::size_t i = 0; i < pre_old.size(); ++i) {
      if (st.c[r][i] == 0.0) continue;
      for (std::size_t j = 0; j < pre_new.size(); ++j) {
        const Rational& pij = m.transition(pre_old[i], pre_new[j]);
        if (pij != 0) out.c[r][j] += st.c[r][i] * to_double(pij);
      }
    }
    for (double v : out.c[r]) total += v;
  }
  out.alive = total > 0.0;
  if (out.alive)
    for (auto& row : out.c)
      for (double& v : row) v /= total;
  return out;
}

// g(y0 | window ...) from the conditional matrix: weights the rows by the
// one-step mass from pi^{-1}(y0) into position 1.
double steer_g_value(const MarkovModel& m, const FactorSystem& fs, int y0, int y1,
                     const SteerState& st) {
  const auto& pre0 = fs.preimage(y0);
  const auto& pre1 = fs.preimage(y1);
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < st.c.size(); ++r) {
    double row_mass = 0.0;
    for (double v : st.c[r]) row_mass += v;
    if (row_mass == 0.0) continue;
    double start = to_double(m.stationary[static_cast<std::size_t>(pre1[r])]);
    den += start * row_mass;
    double in_mass = 0.0;
    for (int a0 : pre0) {
      const Rational& p = m.transition(a0, pre1[r]);
      if (p != 0) in_mass += to_double(m.stationary[static_cast<std::size_t>(a0)]) * to_double(p);
    }
    num += in_mass * row_mass;
  }
  return den > 0.0 ? num / den : 0.0;
}

struct SteerOutcome {
  double value;
  Word continuation;
};

// Greedy one-step-lookahead extremization of g; records the best value seen
// at any prefix length (a short continuation's g is a convex combination of
// its extensions', so prefix values remain valid lower-bound material).
SteerOutcome steer_extremize(const MarkovModel& m, const FactorSystem& fs, int y0, int y1,
                             const SteerState& base, std::size_t m_ext, bool maximize) {
  SteerState st = base;
  SteerOutcome best{steer_g_value(m, fs, y0, y1, st), Word{}};
  Word built;
  const std::size_t nb = fs.image().size();
  for (std::size_t step = 0; step < m_ext; ++step) {
    double best_val = 0.0;
    int best_sym = -1;
    SteerState best_state;
    for (std::size_t b = 0; b < nb; ++b) {
      if (!fs.image().adjacency.allows(st.last, static_cast<int>(b))) continue;
      SteerState cand = steer_extend(m, fs, st, static_cast<int>(b));
      if (!cand.alive) continue;
      double v = steer_g_value(m, fs, y0, y1, cand);
      if (best_sym < 0 || (maximize ? v > best_val : v < best_val)) {
        best_val = v;
        best_sym = static_cast<int>(b);
        best_state = std::move(cand);
      }
    }
    if (best_sym < 0) break;
    st = std::move(best_state);
    built.symbols.push_back(best_sym);
    if (maximize ? best_val > best.value : best_val < best.value) {
      best.value = best_val;
      best.continuation = built;
    }
  }
  return best;
}

// Exhaustive continuations of length <= depth, DFS along the image adjacency.
void enumerate_extensions(const MarkovModel& m, const FactorSystem& fs, int y0, int y1,
                          const SteerState& st, std::size_t depth, Word& built,
                          double& lo, double& hi, Word& lo_word, Word& hi_word) {
  double v = steer_g_value(m, fs, y0, y1, st);
  if (v > hi) {
    hi = v;
    hi_word = built;
  }
  if (v < lo) {
    lo = v;
    lo_word = built;
  }
  if (depth == 0) return;
  const std::size_t nb = fs.image().size();
  for (std::size_t b = 0; b < nb; ++b) {
    if (!fs.image().adjacency.allows(st.last, static_cast<int>(b))) continue;
    SteerState cand = steer_extend(m, fs, st, static_cast<int>(b));
    if (!cand.alive) continue;
    built.symbols.push_back(static_cast<int>(b));
    enumerate_extensions(m, fs, y0, y1, cand, depth - 1, built, lo, hi, lo_word, hi_word);
    built.symbols.pop_back();
  }
}

std::size_t exhaustive_extension_depth(const FactorSystem& fs, std::size_t m_ext,
                                       std::size_t budget) {
  // Largest depth whose worst-case word count stays within budget.
  const double nb = static_cast<double>(fs.image().size());
  std::size_t depth = 0;
  double count = 1;
  while (depth < m_ext) {
    count *= nb;
    if (count > static_cast<double>(budget)) break;
    ++depth;
  }
  return depth;
}

std::vector<Word> enumerate_or_sample_centers(const FactorSystem& fs, std::size_t length,
                                              std::size_t budget, std::uint64_t seed,
                                              bool* exhaustive) {
  std::size_t total = count_allowed_words(fs.image(), length);
  if (total <= budget) {
    *exhaustive = true;
    return allowed_words(fs.image(), length);
  }
  *exhaustive = false;
  std::mt19937_64 rng(seed);
  std::vector<Word> out;
  const std::size_t nb = fs.image().size();
  for (std::size_t i = 0; i < budget; ++i) {
    Word w;
    for (std::size_t k = 0; k < length; ++k) {
      std::vector<int> options;
      for (std::size_t b = 0; b < nb; ++b) {
        if (w.empty() || fs.image().adjacency.allows(w.symbols.back(), static_cast<int>(b)))
          options.push_back(static_cast<int>(b));
      }
      if (options.empty()) break;
      w.symbols.push_back(
          options[static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(options.size()))]);
    }
    if (w.size() == length) out.push_back(std::move(w));
  }
  return out;
}

double birkhoff_coefficient(const MarkovModel& m, const FactorSystem& fs, int b, int b_next) {
  const auto& rows = fs.preimage(b);
  const auto& cols = fs.preimage(b_next);
  double phi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (std::size_t k = 0; k < cols.size(); ++k)
        for (std::size_t l = 0; l < cols.size(); ++l) {
          double aik = to_double(m.transition(rows[i], cols[k]));
          double ajl = to_double(m.transition(rows[j], cols[l]));
          double ajk = to_double(m.transition(rows[j], cols[k]));
          double ail = to_double(m.transition(rows[i], cols[l]));
          if (aik <= 0 || ajl <= 0 || ajk <= 0 || ail <= 0) return 1.0;
          phi = std::min(phi, (aik * ajl) / (ajk * ail));
        }
  if (!std::isfinite(phi)) return 1.0;
  double s = std::sqrt(phi);
  return (1.0 - s) / (1.0 + s);
}

double contraction_upper_bound(const MarkovModel& m, const FactorSystem& fs, std::size_t n) {
  // max over allowed y_1^n of the product of per-step Birkhoff coefficients.
  if (n < 2) return 1.0;
  const std::size_t nb = fs.image().size();
  std::vector<double> best(nb, 1.0);
  for (std::size_t step = 0; step + 2 <= n; ++step) {
    std::vector<double> next(nb, -1.0);
    for (std::size_t b = 0; b < nb; ++b) {
      if (best[b] < 0) continue;
      for (std::size_t b2 = 0; b2 < nb; ++b2) {
        if (!fs.image().adjacency.allows(static_cast<int>(b), static_cast<int>(b2))) continue;
        double v = best[b] * birkhoff_coefficient(m, fs, static_cast<int>(b), static_cast<int>(b2));
        next[b2] = std::max(next[b2], v);
      }
    }
    best = std::move(next);
  }
  double out = 0.0;
  for (double v : best) out = std::max(out, v);
  return std::min(out < 0 ? 1.0 : out, 1.0);
}

}  // namespace

VariationEstimate variation_estimate(const MarkovModel& m, const FactorSystem& fs, std::size_t n,
                                     std::size_t m_ext, const VariationOptions& opts) {
  if (n < 1 || m_ext < 1) throw Error("variation_estimate: n and m_ext must be >= 1");
  VariationEstimate est;
  est.n = n;
  est.m_ext = m_ext;

  bool centers_exhaustive = false;
  auto centers =
      enumerate_or_sample_centers(fs, n + 1, opts.center_budget, opts.seed, &centers_exhaustive);
  std::size_t exhaust_depth = exhaustive_extension_depth(fs, m_ext, opts.extension_budget);
  est.exhaustive = centers_exhaustive && exhaust_depth >= m_ext;

  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t nb = fs.image().size();

  for (const auto& center : centers) {
    int y0 = center[0];
    Word window{std::vector<int>(center.symbols.begin() + 1, center.symbols.end()), 0};
    SteerState base = steer_init(m, fs, window);
    if (!base.alive) continue;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    Word lo_w, hi_w;
    Word built;
    enumerate_extensions(m, fs, y0, window[0], base, exhaust_depth, built, lo, hi, lo_w, hi_w);
    if (exhaust_depth < m_ext) {
      auto up = steer_extremize(m, fs, y0, window[0], base, m_ext, true);
      auto down = steer_extremize(m, fs, y0, window[0], base, m_ext, false);
      hi = std::max(hi, up.value);
      lo = std::min(lo, down.value);
      for (std::size_t trial = 0; trial < opts.random_extensions; ++trial) {
        SteerState st = base;
        for (std::size_t step = 0; step < m_ext && st.alive; ++step) {
          std::vector<int> options;
          for (std::size_t b = 0; b < nb; ++b)
            if (fs.image().adjacency.allows(st.last, static_cast<int>(b)))
              options.push_back(static_cast<int>(b));
          if (options.empty()) break;
          int sym = options[static_cast<std::size_t>(uniform_unit(rng) *
                                                     static_cast<double>(options.size()))];
          SteerState nextst = steer_extend(m, fs, st, sym);
          if (!nextst.alive) break;
          st = std::move(nextst);
          double v = steer_g_value(m, fs, y0, window[0], st);
          hi = std::max(hi, v);
          lo = std::min(lo, v);
        }
      }
    }
    if (hi >= lo && hi - lo > est.lower) {
      est.lower = hi - lo;
      est.worst_center = center;
    }
  }
  est.upper_heuristic = contraction_upper_bound(m, fs, n + 1);
  return est;
}

ConditionalTable conditional_table(const MarkovModel& m, const FactorSystem& fs, const Word& base,
                                   std::size_t m_ext, const VariationOptions& opts) {
  check_image_word(fs, base, "conditional_table");
  if (base.size() < 2) throw Error("conditional_table: base word too short");
  ConditionalTable table;
  table.base = base;
  for (std::size_t k = 1; k + 1 <= base.size(); ++k) {
    Word prefix{std::vector<int>(base.symbols.begin(), base.symbols.begin() + static_cast<long>(k) + 1),
                0};
    table.g_values.push_back(g_n(m, fs, prefix));
    table.variations.push_back(variation_estimate(m, fs, k, m_ext, opts));
  }
  std::vector<double> lowers;
  for (const auto& v : table.variations) lowers.push_back(v.lower);
  table.fit = fit_geometric_decay(lowers);
  return table;
}

std::optional<BadConfigWitness> find_bad_configuration(const MarkovModel& m,
                                                       const FactorSystem& fs,
                                                       const BadConfigOptions& opts) {
  if (opts.eps <= 0) throw Error("find_bad_configuration: eps must be positive");
  for (std::size_t n = opts.n_min; n <= opts.n_max; ++n) {
    bool centers_exhaustive = false;
    auto centers =
        enumerate_or_sample_centers(fs, n + 1, opts.center_budget, opts.seed, &centers_exhaustive);
    std::size_t exhaust_depth = exhaustive_extension_depth(fs, opts.m_max, opts.extension_budget);
    for (const auto& center : centers) {
      int y0 = center[0];
      Word window{std::vector<int>(center.symbols.begin() + 1, center.symbols.end()), 0};
      SteerState base = steer_init(m, fs, window);
      if (!base.alive) continue;

      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      Word lo_w, hi_w;
      Word built;
      enumerate_extensions(m, fs, y0, window[0], base, exhaust_depth, built, lo, hi, lo_w, hi_w);
      auto up = steer_extremize(m, fs, y0, window[0], base, opts.m_max, true);
      auto down = steer_extremize(m, fs, y0, window[0], base, opts.m_max, false);
      if (up.value > hi) {
        hi = up.value;
        hi_w = up.continuation;
      }
      if (down.value < lo) {
        lo = down.value;
        lo_w = down.continuation;
      }
      if (!(hi - lo >= opts.eps)) continue;

      // Certify with exact arithmetic before reporting.
      auto exact_g = [&](const Word& cont) {
        Word full = center;
        full.symbols.insert(full.symbols.end(), cont.symbols.begin(), cont.symbols.end());
        return g_n(m, fs, full);
      };
      BadConfigWitness w;
      w.center = center;
      w.continuation_high = hi_w;
      w.continuation_low = lo_w;
      w.g_high = exact_g(hi_w);
      w.g_low = exact_g(lo_w);
      w.gap = to_double(w.g_high - w.g_low);
      if (w.gap >= opts.eps) return w;
    }
  }
  return std::nullopt;
}

LumpabilityResult strong_lumpability(const StochasticMatrix& p, const FactorMap& map) {
  LumpabilityResult out;
  const std::size_t nb = map.target.size();
  std::vector<std::vector<int>> pre(nb);
  for (std::size_t a = 0; a < map.source.size(); ++a)
    pre[static_cast<std::size_t>(map(static_cast<int>(a)))].push_back(static_cast<int>(a));

  RationalMatrix factor(nb, nb, Rational(0));
  for (std::size_t b1 = 0; b1 < nb; ++b1) {
    for (std::size_t b2 = 0; b2 < nb; ++b2) {
      Rational common;
      bool first = true;
      for (int x1 : pre[b1]) {
        Rational sum(0);
        for (int x2 : pre[b2]) sum += p(x1, x2);
        if (first) {
          common = sum;
          first = false;
        } else if (sum != common) {
          out.lumpable = false;
          out.detail = "rows " + map.source.label(pre[b1].front()) + " and " +
                       map.source.label(x1) + " disagree on the " +
                       map.target.label(static_cast<int>(b2)) + "-class sum: " +
                       format_rational(common) + " vs " + format_rational(sum);
          return out;
        }
      }
      factor(b1, b2) = common;
    }
  }
  out.lumpable = true;
  out.factor_matrix = std::move(factor);
  return out;
}

MarkovOrderReport markov_order_probe(const MarkovModel& m, const FactorSystem& fs,
                                     std::size_t depth) {
  if (depth < 2) throw Error("markov_order_probe: depth must be >= 2");
  MarkovOrderReport report;
  report.depth = depth;

  const std::size_t nb = fs.image().size();
  RationalMatrix recovered(nb, nb, Rational(0));
  std::vector<Rational> nu1(nb, Rational(0));
  for (std::size_t b = 0; b < nb; ++b)
    for (int a : fs.preimage(static_cast<int>(b)))
      nu1[b] += m.stationary[static_cast<std::size_t>(a)];
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t b2 = 0; b2 < nb; ++b2) {
      if (!fs.image().adjacency.allows(static_cast<int>(b), static_cast<int>(b2))) continue;
      Word pair{{static_cast<int>(b), static_cast<int>(b2)}, 0};
      recovered(b, b2) = factor_cylinder_probability(m, fs, pair) / nu1[b];
    }
  report.recovered_transition = std::move(recovered);

  for (std::size_t k = 2; k <= depth; ++k) {
    for (const auto& w : allowed_words(fs.image(), k + 1)) {
      Word head{{w[0], w[1]}, 0};
      Rational tail_mass = factor_cylinder_probability(
          m, fs, Word{std::vector<int>(w.symbols.begin() + 1, w.symbols.end()), 0});
      if (tail_mass == 0) continue;  // conditioning impossible; nothing to compare
      Rational gk = g_n(m, fs, w);
      Rational g1 = g_n(m, fs, head);
      if (gk != g1) {
        report.order_at_most_one = false;
        report.violating_word = w;
        report.violation_gap = gk - g1;
        return report;
      }
    }
  }
  report.order_at_most_one = true;
  return report;
}

EmpiricalConditional empirical_conditional(const MarkovModel& m, const FactorSystem& fs,
                                           const Word& y, std::size_t samples,
                                           std::uint64_t seed) {
  check_image_word(fs, y, "empirical_conditional");
  if (samples < 1) throw Error("empirical_conditional: need at least one sample");
  std::mt19937_64 rng(seed);
  const std::size_t k = m.shift.size();
  const std::size_t len = y.size();

  std::vector<double> start(k);
  for (std::size_t i = 0; i < k; ++i) start[i] = to_double(m.stationary[i]);
  std::vector<std::vector<double>> rows(k, std::vector<double>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) rows[a][b] = to_double(m.transition(static_cast<int>(a), static_cast<int>(b)));

  auto draw = [&](const std::vector<double>& weights) {
    double u = uniform_unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);
  };

  EmpiricalConditional out;
  for (std::size_t s = 0; s < samples; ++s) {
    int x = draw(start);
    bool cond_match = true;
    bool head_match = fs.image_of(x) == y[0];
    for (std::size_t i = 1; i < len; ++i) {
      x = draw(rows[static_cast<std::size_t>(x)]);
      if (fs.image_of(x) != y[i]) {
        cond_match = false;
        break;
      }
    }
    if (cond_match) {
      ++out.conditioning_hits;
      if (head_match) ++out.joint_hits;
    }
  }
  if (out.conditioning_hits == 0) {
    out.flagged = true;
    return out;
  }
  out.estimate =
      static_cast<double>(out.joint_hits) / static_cast<double>(out.conditioning_hits);
  out.stderr_value = std::sqrt(out.estimate * (1.0 - out.estimate) /
                               static_cast<double>(out.conditioning_hits));
  return out;
}

}  // namespace mflab
