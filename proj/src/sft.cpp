#include "mflab/sft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace mflab {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error("alphabet must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw Error("empty symbol label");
    if (!seen.insert(l).second) throw Error("duplicate symbol label '" + l + "'");
  }
}

int Alphabet::index_of(const std::string& label) const {
  auto idx = try_index_of(label);
  if (!idx) throw Error("unknown symbol '" + label + "'");
  return *idx;
}

std::optional<int> Alphabet::try_index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  return std::nullopt;
}

std::string format_word(const Alphabet& alphabet, const Word& word) {
  std::string out;
  bool multi = false;
  for (const auto& l : alphabet.labels())
    if (l.size() > 1) multi = true;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (multi && i) out += ',';
    out += alphabet.label(word[i]);
  }
  return out;
}

BinaryAdjacency::BinaryAdjacency(BoolMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw Error("adjacency matrix must be square");
}

bool BinaryAdjacency::is_reduced() const {
  const std::size_t n = entries_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    bool row = false, col = false;
    for (std::size_t j = 0; j < n; ++j) {
      row |= entries_(i, j) != 0;
      col |= entries_(j, i) != 0;
    }
    if (!row || !col) return false;
  }
  return true;
}

SubshiftSpec make_subshift(Alphabet alphabet, BinaryAdjacency adjacency) {
  if (alphabet.size() != adjacency.size())
    throw Error("alphabet size does not match adjacency dimension");
  if (!adjacency.is_reduced())
    throw Error("adjacency has an all-zero row or column; trim() first");
  return SubshiftSpec{std::move(alphabet), std::move(adjacency)};
}

bool word_allowed(const SubshiftSpec& s, const Word& w) {
  const int n = static_cast<int>(s.size());
  for (int sym : w.symbols)
    if (sym < 0 || sym >= n) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!s.adjacency.allows(w[i], w[i + 1])) return false;
  return !w.empty();
}

SccDecomposition strongly_connected_components(const BinaryAdjacency& m) {
  // Tarjan, iterative.
  const int n = static_cast<int>(m.size());
  SccDecomposition out;
  out.component_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  int next_index = 0;

  struct Frame {
    int v;
    int next_child;
  };
  for (int start = 0; start < n; ++start) {
    if (index[static_cast<std::size_t>(start)] != -1) continue;
    std::vector<Frame> frames{{start, 0}};
    index[static_cast<std::size_t>(start)] = low[static_cast<std::size_t>(start)] = next_index++;
    stack.push_back(start);
    on_stack[static_cast<std::size_t>(start)] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      bool descended = false;
      for (int w = f.next_child; w < n; ++w) {
        if (!m.allows(f.v, w)) continue;
        f.next_child = w + 1;
        if (index[static_cast<std::size_t>(w)] == -1) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[static_cast<std::size_t>(w)])
          low[static_cast<std::size_t>(f.v)] =
              std::min(low[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
      }
      if (descended) continue;
      if (f.next_child >= n) f.next_child = n;
      int v = f.v;
      frames.pop_back();
      if (!frames.empty())
        low[static_cast<std::size_t>(frames.back().v)] = std::min(
            low[static_cast<std::size_t>(frames.back().v)], low[static_cast<std::size_t>(v)]);
      if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
        std::vector<int> comp;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        int id = static_cast<int>(out.components.size());
        for (int w : comp) out.component_of[static_cast<std::size_t>(w)] = id;
        out.components.push_back(std::move(comp));
      }
    }
  }
  return out;
}

bool is_irreducible(const SubshiftSpec& s) {
  return strongly_connected_components(s.adjacency).components.size() == 1;
}

bool is_aperiodic(const SubshiftSpec& s) {
  // Cycle gcd per SCC via BFS levels; a state with no return fails outright.
  const auto scc = strongly_connected_components(s.adjacency);
  const int n = static_cast<int>(s.size());
  for (const auto& comp : scc.components) {
    bool has_edge = false;
    for (int v : comp)
      for (int w : comp)
        if (s.adjacency.allows(v, w)) has_edge = true;
    if (!has_edge) return false;  // trivial component: empty return-length set

    std::vector<int> level(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    int root = comp.front();
    level[static_cast<std::size_t>(root)] = 0;
    q.push(root);
    long long g = 0;
    int comp_id = scc.component_of[static_cast<std::size_t>(root)];
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w = 0; w < n; ++w) {
        if (!s.adjacency.allows(v, w)) continue;
        if (scc.component_of[static_cast<std::size_t>(w)] != comp_id) continue;
        if (level[static_cast<std::size_t>(w)] == -1) {
          level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
          q.push(w);
        } else {
          long long diff = level[static_cast<std::size_t>(v)] + 1 - level[static_cast<std::size_t>(w)];
          g = std::gcd(g, diff < 0 ? -diff : diff);
        }
      }
    }
    if (g != 1) return false;
  }
  return true;
}

bool is_primitive(const SubshiftSpec& s) {
  return is_irreducible(s) && is_aperiodic(s);
}

namespace {

void enumerate_words(const SubshiftSpec& s, std::size_t n, Word& current,
                     std::vector<Word>* sink, std::size_t* count) {
  if (current.size() == n) {
    if (sink) sink->push_back(current);
    if (count) ++*count;
    return;
  }
  const int m = static_cast<int>(s.size());
  for (int sym = 0; sym < m; ++sym) {
    if (!current.empty() && !s.adjacency.allows(current.symbols.back(), sym)) continue;
    current.symbols.push_back(sym);
    enumerate_words(s, n, current, sink, count);
    current.symbols.pop_back();
  }
}

}  // namespace

std::vector<Word> allowed_words(const SubshiftSpec& s, std::size_t n) {
  if (n == 0) throw Error("allowed_words: length must be >= 1");
  std::vector<Word> out;
  Word w;
  enumerate_words(s, n, w, &out, nullptr);
  return out;
}

std::size_t count_allowed_words(const SubshiftSpec& s, std::size_t n) {
  if (n == 0) return 0;
  // DP over last symbol.
  const std::size_t m = s.size();
  std::vector<std::size_t> cnt(m, 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::vector<std::size_t> next(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (s.adjacency.allows(static_cast<int>(i), static_cast<int>(j))) next[j] += cnt[i];
    cnt.swap(next);
  }
  std::size_t total = 0;
  for (auto c : cnt) total += c;
  return total;
}

PerronData dominant_eigen(const BoolMatrix& m) {
  // Power iteration on (M + I); the shift keeps periodic components from
  // oscillating and preserves the Perron vector. rho(M) = rho(M + I) - 1.
  const std::size_t n = m.rows();
  PerronData out;
  out.right_vector.assign(n, 0.0);
  std::vector<int> live;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (m(i, j)) {
        live.push_back(static_cast<int>(i));
        break;
      }
  }
  if (live.empty()) return out;

  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0;
  double lambda = 0.0;
  const double tol = 1e-12;
  const int max_iter = 100000;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = v[i];  // identity shift
      for (std::size_t j = 0; j < n; ++j)
        if (m(i, j)) acc += v[j];
      w[i] = acc;
    }
    double norm = 0.0;
    for (double x : w) norm = std::max(norm, x);
    if (norm == 0.0) return out;
    for (double& x : w) x /= norm;
    double next_lambda = norm - 1.0;
    v.swap(w);
    if (std::abs(next_lambda - lambda) < tol && iter > 2) {
      lambda = next_lambda;
      break;
    }
    lambda = next_lambda;
  }
  out.value = lambda;
  out.right_vector = v;
  return out;
}

double topological_entropy(const SubshiftSpec& s) {
  const auto scc = strongly_connected_components(s.adjacency);
  double best = 0.0;
  for (const auto& comp : scc.components) {
    BoolMatrix sub(comp.size(), comp.size(), 0);
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = 0; b < comp.size(); ++b)
        if (s.adjacency.allows(comp[a], comp[b])) sub(a, b) = 1;
    best = std::max(best, dominant_eigen(sub).value);
  }
  if (best <= 0.0) throw Error("topological_entropy: no cycle found (input not reduced?)");
  return std::log(best);
}

RecodedSubshift higher_block_recode(const SubshiftSpec& s, std::size_t k) {
  if (k == 0) throw Error("higher_block_recode: k must be >= 1");
  if (k == 1) {
    RecodedSubshift out{s, {}};
    for (std::size_t i = 0; i < s.size(); ++i) out.block_of.push_back({static_cast<int>(i)});
    return out;
  }
  std::vector<Word> blocks = allowed_words(s, k);
  if (blocks.empty()) throw Error("higher_block_recode: no allowed k-blocks");

  bool single_char = true;
  for (const auto& l : s.alphabet.labels())
    if (l.size() > 1) single_char = false;
  const char sep = '|';
  std::vector<std::string> labels;
  labels.reserve(blocks.size());
  for (const auto& b : blocks) {
    std::string lab;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string& part = s.alphabet.label(b[i]);
      if (!single_char && part.find(sep) != std::string::npos)
        throw Error("higher_block_recode: label '" + part + "' contains the separator");
      if (!single_char && i) lab += sep;
      lab += part;
    }
    labels.push_back(std::move(lab));
  }

  BoolMatrix adj(blocks.size(), blocks.size(), 0);
  for (std::size_t u = 0; u < blocks.size(); ++u)
    for (std::size_t v = 0; v < blocks.size(); ++v) {
      bool overlap = true;
      for (std::size_t i = 0; i + 1 < k; ++i)
        if (blocks[u][i + 1] != blocks[v][i]) overlap = false;
      // Both blocks are allowed, so the overlapped (k+1)-word is allowed too.
      if (overlap) adj(u, v) = 1;
    }

  RecodedSubshift out;
  out.shift = make_subshift(Alphabet(std::move(labels)), BinaryAdjacency(std::move(adj)));
  for (const auto& b : blocks) out.block_of.push_back(b.symbols);
  return out;
}

TrimResult trim(const SubshiftSpec& s) {
  const std::size_t n = s.size();
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      bool row = false, col = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (alive[j] && s.adjacency.allows(static_cast<int>(i), static_cast<int>(j))) row = true;
        if (alive[j] && s.adjacency.allows(static_cast<int>(j), static_cast<int>(i))) col = true;
      }
      if (!row || !col) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  TrimResult out;
  for (std::size_t i = 0; i < n; ++i)
    (alive[i] ? out.kept : out.removed).push_back(static_cast<int>(i));
  if (out.kept.empty()) throw Error("trim: no state survives");
  std::vector<std::string> labels;
  for (int i : out.kept) labels.push_back(s.alphabet.label(i));
  BoolMatrix adj(out.kept.size(), out.kept.size(), 0);
  for (std::size_t a = 0; a < out.kept.size(); ++a)
    for (std::size_t b = 0; b < out.kept.size(); ++b)
      if (s.adjacency.allows(out.kept[a], out.kept[b])) adj(a, b) = 1;
  out.shift = make_subshift(Alphabet(std::move(labels)), BinaryAdjacency(std::move(adj)));
  return out;
}

}  // namespace mflab
