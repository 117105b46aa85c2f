#ifndef MFLAB_TESTS_FIXTURES_HPP
#define MFLAB_TESTS_FIXTURES_HPP

#include <initializer_list>
#include <string>
#include <vector>

#include "mflab/sft.hpp"

namespace mflab::testing {

inline BoolMatrix bool_matrix(std::initializer_list<std::initializer_list<int>> rows) {
  BoolMatrix m(rows.size(), rows.begin()->size(), 0);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (int v : row) m(i, j++) = v ? 1 : 0;
    ++i;
  }
  return m;
}

inline SubshiftSpec spec_from(std::vector<std::string> labels,
                              std::initializer_list<std::initializer_list<int>> rows) {
  return make_subshift(Alphabet(std::move(labels)), BinaryAdjacency(bool_matrix(rows)));
}

inline SubshiftSpec full_shift_2() { return spec_from({"a", "b"}, {{1, 1}, {1, 1}}); }

inline SubshiftSpec golden_mean() { return spec_from({"a", "b"}, {{1, 1}, {1, 0}}); }

// Adjacency pattern of the 4-state weakly lumpable example.
inline SubshiftSpec wl4_shift() {
  return spec_from({"1", "2", "3", "4"},
                   {{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}});
}

inline Word word(std::vector<int> symbols, int offset = 0) {
  return Word{std::move(symbols), offset};
}

}  // namespace mflab::testing

#endif  // MFLAB_TESTS_FIXTURES_HPP
