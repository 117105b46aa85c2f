#include "mflab/markov.hpp"

#include <cmath>
#include <random>
#include <string>

namespace mflab {

StochasticMatrix::StochasticMatrix(RationalMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw Error("transition matrix must be square");
  for (std::size_t i = 0; i < entries_.rows(); ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < entries_.cols(); ++j) {
      if (entries_(i, j) < 0)
        throw Error("negative transition probability in row " + std::to_string(i + 1));
      sum += entries_(i, j);
    }
    if (sum != 1)
      throw Error("row " + std::to_string(i + 1) + " sums to " + format_rational(sum) +
                  ", expected 1");
  }
}

BinaryAdjacency StochasticMatrix::support() const {
  BoolMatrix m(entries_.rows(), entries_.cols(), 0);
  for (std::size_t i = 0; i < entries_.rows(); ++i)
    for (std::size_t j = 0; j < entries_.cols(); ++j)
      if (entries_(i, j) > 0) m(i, j) = 1;
  return BinaryAdjacency(std::move(m));
}

bool check_compatible(const StochasticMatrix& p, const SubshiftSpec& s) {
  if (p.size() != s.size()) throw Error("transition matrix and adjacency sizes differ");
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      bool pos = p(static_cast<int>(i), static_cast<int>(j)) > 0;
      if (pos != s.adjacency.allows(static_cast<int>(i), static_cast<int>(j))) return false;
    }
  return true;
}

std::vector<Rational> stationary_distribution(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  auto scc = strongly_connected_components(p.support());
  if (scc.components.size() != 1) {
    std::string msg = "stationary_distribution: transition matrix is reducible (components:";
    for (const auto& comp : scc.components) {
      msg += " {";
      for (std::size_t i = 0; i < comp.size(); ++i)
        msg += (i ? "," : "") + std::to_string(comp[i] + 1);
      msg += "}";
    }
    throw Error(msg + ")");
  }

  // Solve x (P - I) = 0 with sum(x) = 1: build A = (P - I)^T, replace the last
  // equation by the normalization, eliminate exactly.
  RationalMatrix a(n, n + 1, Rational(0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = p(static_cast<int>(j), static_cast<int>(i));
      if (i == j) a(i, j) -= 1;
    }
  }
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1;
  a(n - 1, n) = 1;

  for (std::size_t col = 0, row = 0; col < n && row < n; ++col) {
    std::size_t pivot = row;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) continue;
    if (pivot != row)
      for (std::size_t j = col; j <= n; ++j) std::swap(a(pivot, j), a(row, j));
    Rational inv = a(row, col);
    for (std::size_t j = col; j <= n; ++j) a(row, j) /= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || a(r, col) == 0) continue;
      Rational f = a(r, col);
      for (std::size_t j = col; j <= n; ++j) a(r, j) -= f * a(row, j);
    }
    ++row;
  }

  std::vector<Rational> x(n, Rational(0));
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t lead = n + 1;
    for (std::size_t j = 0; j < n; ++j)
      if (a(r, j) != 0) {
        lead = j;
        break;
      }
    if (lead == n + 1) continue;
    x[lead] = a(r, n);
  }
  Rational total = 0;
  for (const auto& v : x) {
    if (v < 0) throw Error("stationary_distribution: negative solution (matrix not stochastic?)");
    total += v;
  }
  if (total != 1) throw Error("stationary_distribution: no normalized solution");
  return x;
}

MarkovModel make_markov_model(SubshiftSpec shift, StochasticMatrix transition) {
  if (!check_compatible(transition, shift))
    throw Error("transition matrix support does not match the adjacency");
  auto p = stationary_distribution(transition);
  const std::size_t n = p.size();
  RationalMatrix q(n, n, Rational(0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (transition(static_cast<int>(a), static_cast<int>(b)) > 0)
        q(a, b) = p[a] * transition(static_cast<int>(a), static_cast<int>(b)) / p[b];
  return MarkovModel{std::move(shift), std::move(transition), std::move(p), std::move(q)};
}

RationalMatrix time_reversal_matrix(const MarkovModel& m) { return m.reversal; }

Rational cylinder_probability(const MarkovModel& m, const Word& w) {
  if (w.empty()) throw Error("cylinder_probability: empty word");
  const int n = static_cast<int>(m.shift.size());
  for (int sym : w.symbols)
    if (sym < 0 || sym >= n) throw Error("cylinder_probability: symbol out of range");
  Rational value = m.stationary[static_cast<std::size_t>(w[0])];
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    value *= m.transition(w[i], w[i + 1]);
    if (value == 0) return 0;
  }
  return value;
}

double entropy_rate(const MarkovModel& m) {
  double h = 0.0;
  const std::size_t n = m.shift.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Rational& pab = m.transition(static_cast<int>(a), static_cast<int>(b));
      if (pab > 0) {
        double t = to_double(pab);
        h -= to_double(m.stationary[a]) * t * std::log(t);
      }
    }
  return h;
}

double entropy_rate(const MarkovModelD& m) {
  double h = 0.0;
  const std::size_t n = m.shift.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double t = m.transition(a, b);
      if (t > 0) h -= m.stationary[a] * t * std::log(t);
    }
  return h;
}

MarkovModelD parry_measure(const SubshiftSpec& s) {
  if (!is_primitive(s)) throw Error("parry_measure: SFT must be primitive");
  auto perron = dominant_eigen(s.adjacency.entries());
  const std::size_t n = s.size();
  Matrix<double> p(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (s.adjacency.allows(static_cast<int>(i), static_cast<int>(j))) {
        p(i, j) = perron.right_vector[j] / (perron.value * perron.right_vector[i]);
        row_sum += p(i, j);
      }
    for (std::size_t j = 0; j < n; ++j) p(i, j) /= row_sum;  // absorb residual eps
  }

  // Stationary vector by power iteration on the lazy chain (I + P)/2.
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < 100000; ++iter) {
    std::vector<double> next(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) next[b] += pi[a] * p(a, b);
    double delta = 0.0, total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      next[a] = 0.5 * (next[a] + pi[a]);
      total += next[a];
    }
    for (std::size_t a = 0; a < n; ++a) {
      next[a] /= total;
      delta = std::max(delta, std::abs(next[a] - pi[a]));
    }
    pi.swap(next);
    if (delta < 1e-15) break;
  }
  return MarkovModelD{s, std::move(p), std::move(pi)};
}

Word sample_path(const MarkovModel& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("sample_path: length must be >= 1");
  std::mt19937_64 rng(seed);
  const std::size_t k = m.shift.size();

  auto draw = [&](const std::vector<double>& weights) {
    double u = uniform_unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);
  };

  std::vector<double> start(k);
  for (std::size_t i = 0; i < k; ++i) start[i] = to_double(m.stationary[i]);
  Word w;
  w.symbols.reserve(n);
  w.symbols.push_back(draw(start));
  std::vector<double> row(k);
  for (std::size_t step = 1; step < n; ++step) {
    int cur = w.symbols.back();
    for (std::size_t j = 0; j < k; ++j) row[j] = to_double(m.transition(cur, static_cast<int>(j)));
    w.symbols.push_back(draw(row));
  }
  return w;
}

HigherBlockModel higher_block_model(const MarkovModel& m, std::size_t k) {
  auto recoded = higher_block_recode(m.shift, k);
  if (k == 1) return HigherBlockModel{m, std::move(recoded.block_of)};

  const std::size_t nb = recoded.shift.size();
  RationalMatrix p(nb, nb, Rational(0));
  for (std::size_t u = 0; u < nb; ++u)
    for (std::size_t v = 0; v < nb; ++v)
      if (recoded.shift.adjacency.allows(static_cast<int>(u), static_cast<int>(v)))
        p(u, v) = m.transition(recoded.block_of[u].back(), recoded.block_of[v].back());

  auto model = make_markov_model(recoded.shift, StochasticMatrix(std::move(p)));
  return HigherBlockModel{std::move(model), std::move(recoded.block_of)};
}

}  // namespace mflab
