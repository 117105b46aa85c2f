#include "mflab/factor.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>

namespace mflab {

FactorMap make_factor_map(Alphabet source, Alphabet target, std::vector<int> assign) {
  if (assign.size() != source.size()) throw Error("factor map: assignment size mismatch");
  if (source.size() < target.size())
    throw Error("factor map: target alphabet larger than source");
  std::vector<bool> hit(target.size(), false);
  for (int t : assign) {
    if (t < 0 || static_cast<std::size_t>(t) >= target.size())
      throw Error("factor map: assignment out of range");
    hit[static_cast<std::size_t>(t)] = true;
  }
  for (std::size_t b = 0; b < target.size(); ++b)
    if (!hit[b]) throw Error("factor map: not surjective, '" + target.label(static_cast<int>(b)) +
                             "' has no preimage");
  return FactorMap{std::move(source), std::move(target), std::move(assign)};
}

SubshiftSpec induced_image_adjacency(const SubshiftSpec& domain, const FactorMap& map) {
  const std::size_t nb = map.target.size();
  BoolMatrix adj(nb, nb, 0);
  for (std::size_t i = 0; i < domain.size(); ++i)
    for (std::size_t j = 0; j < domain.size(); ++j)
      if (domain.adjacency.allows(static_cast<int>(i), static_cast<int>(j)))
        adj(static_cast<std::size_t>(map(static_cast<int>(i))),
            static_cast<std::size_t>(map(static_cast<int>(j)))) = 1;
  return make_subshift(map.target, BinaryAdjacency(std::move(adj)));
}

FactorSystem::FactorSystem(SubshiftSpec domain, FactorMap map,
                           std::optional<SubshiftSpec> image_candidate)
    : domain_(std::move(domain)), map_(std::move(map)) {
  if (map_.source.size() != domain_.size())
    throw Error("factor system: map source alphabet does not match the domain");
  SubshiftSpec induced = induced_image_adjacency(domain_, map_);
  if (image_candidate) {
    if (image_candidate->alphabet.size() != map_.target.size())
      throw Error("factor system: candidate image alphabet size mismatch");
    for (std::size_t b = 0; b < map_.target.size(); ++b)
      for (std::size_t c = 0; c < map_.target.size(); ++c)
        if (induced.adjacency.allows(static_cast<int>(b), static_cast<int>(c)) &&
            !image_candidate->adjacency.allows(static_cast<int>(b), static_cast<int>(c)))
          throw Error("factor system: candidate image forbids the realized transition " +
                      map_.target.label(static_cast<int>(b)) + " -> " +
                      map_.target.label(static_cast<int>(c)));
    image_ = std::move(*image_candidate);
  } else {
    image_ = std::move(induced);
  }
  preimages_.assign(map_.target.size(), {});
  for (std::size_t a = 0; a < domain_.size(); ++a)
    preimages_[static_cast<std::size_t>(map_(static_cast<int>(a)))].push_back(static_cast<int>(a));
}

BoolMatrix FactorSystem::edge_submatrix(int b, int b_next) const {
  const auto& rows = preimage(b);
  const auto& cols = preimage(b_next);
  BoolMatrix out(rows.size(), cols.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (domain_.adjacency.allows(rows[i], cols[j])) out(i, j) = 1;
  return out;
}

Word FactorSystem::image_word(const Word& domain_word) const {
  Word out;
  out.offset = domain_word.offset;
  out.symbols.reserve(domain_word.size());
  for (int sym : domain_word.symbols) out.symbols.push_back(map_(sym));
  return out;
}

ImageSftCheck verify_image_sft(const FactorSystem& fs, std::size_t depth,
                               std::size_t state_cap) {
  if (depth < 2) throw Error("verify_image_sft: depth must be >= 2");
  if (state_cap == 0)
    state_cap = static_cast<std::size_t>(1) << std::min<std::size_t>(fs.domain().size(), 20);

  const std::size_t nb = fs.image().size();
  struct Node {
    int symbol;
    std::vector<int> subset;
    int parent;
    std::size_t word_len;
  };
  std::vector<Node> nodes;
  std::map<std::pair<int, std::vector<int>>, int> seen;
  std::queue<int> frontier;

  ImageSftCheck result;
  auto make_witness = [&](int parent, int bad_symbol) {
    std::vector<int> rev{bad_symbol};
    for (int at = parent; at >= 0; at = nodes[static_cast<std::size_t>(at)].parent)
      rev.push_back(nodes[static_cast<std::size_t>(at)].symbol);
    std::reverse(rev.begin(), rev.end());
    return Word{std::move(rev), 0};
  };

  for (std::size_t b = 0; b < nb; ++b) {
    Node n{static_cast<int>(b), fs.preimage(static_cast<int>(b)), -1, 1};
    seen[{n.symbol, n.subset}] = static_cast<int>(nodes.size());
    frontier.push(static_cast<int>(nodes.size()));
    nodes.push_back(std::move(n));
  }

  bool truncated = false;
  while (!frontier.empty()) {
    int id = frontier.front();
    frontier.pop();
    Node node = nodes[static_cast<std::size_t>(id)];  // copy: nodes may reallocate
    if (node.word_len >= depth) {
      truncated = true;
      continue;
    }
    for (std::size_t b2 = 0; b2 < nb; ++b2) {
      if (!fs.image().adjacency.allows(node.symbol, static_cast<int>(b2))) continue;
      std::vector<int> next;
      for (int cand : fs.preimage(static_cast<int>(b2))) {
        bool reachable = false;
        for (int cur : node.subset)
          if (fs.domain().adjacency.allows(cur, cand)) {
            reachable = true;
            break;
          }
        if (reachable) next.push_back(cand);
      }
      if (next.empty()) {
        result.ok = false;
        result.complete = true;
        result.witness = make_witness(id, static_cast<int>(b2));
        result.states_explored = nodes.size();
        return result;
      }
      auto key = std::make_pair(static_cast<int>(b2), next);
      if (seen.count(key)) continue;
      if (nodes.size() >= state_cap) {
        truncated = true;
        continue;
      }
      seen[key] = static_cast<int>(nodes.size());
      frontier.push(static_cast<int>(nodes.size()));
      nodes.push_back(Node{static_cast<int>(b2), std::move(next), id, node.word_len + 1});
    }
  }
  result.ok = true;
  result.complete = !truncated;
  result.states_explored = nodes.size();
  return result;
}

FibreWindow fibre_window(const FactorSystem& fs, const Word& y) {
  if (y.empty()) throw Error("fibre_window: empty word");
  if (!word_allowed(fs.image(), y))
    throw Error("fibre_window: word '" + format_word(fs.image().alphabet, y) +
                "' is not allowed in the image");

  const std::size_t len = y.size();
  std::vector<std::set<int>> keep(len);
  // Forward sweep: reachable from position 0.
  for (int a : fs.preimage(y[0])) keep[0].insert(a);
  for (std::size_t i = 1; i < len; ++i)
    for (int cand : fs.preimage(y[i]))
      for (int prev : keep[i - 1])
        if (fs.domain().adjacency.allows(prev, cand)) {
          keep[i].insert(cand);
          break;
        }
  // Backward sweep: must also reach the last position.
  for (std::size_t ir = len - 1; ir-- > 0;) {
    std::set<int> filtered;
    for (int cand : keep[ir])
      for (int nxt : keep[ir + 1])
        if (fs.domain().adjacency.allows(cand, nxt)) {
          filtered.insert(cand);
          break;
        }
    keep[ir] = std::move(filtered);
  }

  FibreWindow fw;
  fw.image_word = y;
  fw.states.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (keep[i].empty())
      throw Error("fibre_window: no domain path realizes '" +
                  format_word(fs.image().alphabet, y) + "'");
    fw.states[i].assign(keep[i].begin(), keep[i].end());
    for (int a : fs.preimage(y[static_cast<std::size_t>(i)]))
      if (!keep[i].count(a)) fw.removed.emplace_back(static_cast<int>(i), a);
  }
  for (std::size_t i = 0; i + 1 < len; ++i) {
    BoolMatrix m(fw.states[i].size(), fw.states[i + 1].size(), 0);
    for (std::size_t a = 0; a < fw.states[i].size(); ++a)
      for (std::size_t b = 0; b < fw.states[i + 1].size(); ++b)
        if (fs.domain().adjacency.allows(fw.states[i][a], fw.states[i + 1][b])) m(a, b) = 1;
    fw.matrices.push_back(std::move(m));
  }
  return fw;
}

std::optional<int> transitivity_index(const FibreWindow& fw) {
  const std::size_t chain = fw.matrices.size();
  for (std::size_t m = 1; m <= chain; ++m) {
    bool all = true;
    for (std::size_t j = 0; j + m <= chain && all; ++j) {
      BoolMatrix prod = fw.matrices[j];
      for (std::size_t t = 1; t < m; ++t) prod = bool_product(prod, fw.matrices[j + t]);
      if (!all_positive(prod)) all = false;
    }
    if (all) return static_cast<int>(m);
  }
  return std::nullopt;
}

namespace {

std::vector<unsigned char> encode_state(int b0, int bl, const BoolMatrix& m) {
  std::vector<unsigned char> key;
  key.reserve(m.rows() * m.cols() + 4);
  key.push_back(static_cast<unsigned char>(b0));
  key.push_back(static_cast<unsigned char>(bl));
  key.push_back(static_cast<unsigned char>(m.rows()));
  key.push_back(static_cast<unsigned char>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) key.push_back(m(i, j));
  return key;
}

}  // namespace

MixingVerdict is_fibre_mixing(const FactorSystem& fs, std::size_t state_cap) {
  // Products that fail positivity-on-support can only be extensions of
  // failing products (a positive-on-support product stays so under any
  // admissible extension), so the search tracks failing products per word
  // length; the first empty level is the uniform mixing index, and a
  // repeating nonempty level set certifies failure at every length.
  struct Node {
    int first, last;
    BoolMatrix product;
    int parent;
    int via;  // symbol appended to reach this node
  };
  std::vector<Node> nodes;
  std::map<std::vector<unsigned char>, int> ids;

  MixingVerdict verdict;
  verdict.state_cap = state_cap;

  auto intern = [&](int b0, int bl, BoolMatrix m, int parent, int via) -> int {
    auto key = encode_state(b0, bl, m);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    ids.emplace(std::move(key), id);
    nodes.push_back(Node{b0, bl, std::move(m), parent, via});
    return id;
  };

  const std::size_t nb = fs.image().size();
  std::vector<int> level;
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t b2 = 0; b2 < nb; ++b2) {
      if (!fs.image().adjacency.allows(static_cast<int>(b), static_cast<int>(b2))) continue;
      BoolMatrix prod = fs.edge_submatrix(static_cast<int>(b), static_cast<int>(b2));
      if (positive_on_support(prod)) continue;
      level.push_back(intern(static_cast<int>(b), static_cast<int>(b2), std::move(prod), -1,
                             static_cast<int>(b2)));
    }

  auto reconstruct = [&](int id) {
    std::vector<int> rev;
    int at = id;
    while (at >= 0) {
      rev.push_back(nodes[static_cast<std::size_t>(at)].via);
      int parent = nodes[static_cast<std::size_t>(at)].parent;
      if (parent < 0) rev.push_back(nodes[static_cast<std::size_t>(at)].first);
      at = parent;
    }
    std::reverse(rev.begin(), rev.end());
    return Word{std::move(rev), 0};
  };

  std::map<std::vector<int>, int> seen_levels;
  for (int length = 1;; ++length) {
    if (level.empty()) {
      // Every product of `length` consecutive submatrices passes.
      verdict.kind = MixingVerdict::Kind::mixing;
      verdict.index = length;
      verdict.states_explored = nodes.size();
      return verdict;
    }

    std::vector<int> sorted_level = level;
    std::sort(sorted_level.begin(), sorted_level.end());
    sorted_level.erase(std::unique(sorted_level.begin(), sorted_level.end()), sorted_level.end());
    auto inserted = seen_levels.emplace(sorted_level, length);
    if (!inserted.second) {
      // Same failing set recurs: the level sequence is periodic and nonempty
      // forever, so no uniform index exists.
      int bad = sorted_level.front();
      verdict.kind = MixingVerdict::Kind::not_mixing;
      verdict.witness_word = reconstruct(bad);
      const BoolMatrix& m = nodes[static_cast<std::size_t>(bad)].product;
      std::vector<bool> row_live(m.rows(), false), col_live(m.cols(), false);
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
          if (m(i, j)) row_live[i] = col_live[j] = true;
      const auto& rows = fs.preimage(nodes[static_cast<std::size_t>(bad)].first);
      const auto& cols = fs.preimage(nodes[static_cast<std::size_t>(bad)].last);
      for (std::size_t i = 0; i < m.rows() && !verdict.witness_pair; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
          if (row_live[i] && col_live[j] && !m(i, j)) {
            verdict.witness_pair = std::make_pair(rows[i], cols[j]);
            break;
          }
      verdict.states_explored = nodes.size();
      return verdict;
    }

    std::vector<int> next_level;
    for (int id : sorted_level) {
      int bl = nodes[static_cast<std::size_t>(id)].last;
      for (std::size_t b2 = 0; b2 < nb; ++b2) {
        if (!fs.image().adjacency.allows(bl, static_cast<int>(b2))) continue;
        BoolMatrix prod = bool_product(nodes[static_cast<std::size_t>(id)].product,
                                       fs.edge_submatrix(bl, static_cast<int>(b2)));
        if (positive_on_support(prod)) continue;
        next_level.push_back(intern(nodes[static_cast<std::size_t>(id)].first,
                                    static_cast<int>(b2), std::move(prod), id,
                                    static_cast<int>(b2)));
      }
      if (nodes.size() > state_cap) {
        verdict.kind = MixingVerdict::Kind::inconclusive;
        verdict.states_explored = nodes.size();
        return verdict;
      }
    }
    level = std::move(next_level);
  }
}

}  // namespace mflab
