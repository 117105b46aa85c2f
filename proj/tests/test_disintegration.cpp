#include <doctest.h>

#include <cmath>
#include <map>

#include "mflab/disintegration.hpp"
#include "mflab/model_zoo.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace mflab;
using namespace mflab::testing;

namespace {

RationalMatrix rat_matrix(std::initializer_list<std::initializer_list<const char*>> rows) {
  RationalMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const char* v : row) m(i, j++) = parse_rational(v);
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("reversed lumpability") {
  auto wl4 = weak_lumpable_4state();
  auto res = reversed_lumpability(wl4.model, wl4.system.map());
  REQUIRE(res.holds);
  // S(b, b') = common Q-column sum over the class of b
  const RationalMatrix& s = *res.s_matrix;
  CHECK(s(0, 0) == Rational(1, 2));  // a-class into either a-state
  CHECK(s(1, 0) == Rational(1, 4));  // b-class
  CHECK(s(2, 0) == Rational(1, 4));  // c-class
  CHECK(s(0, 1) == 1);               // a-class into state 2
  CHECK(s(0, 2) == 1);               // a-class into state 4

  auto fb = furstenberg(Rational(7, 10));
  CHECK_FALSE(reversed_lumpability(fb.model, fb.system.map()).holds);

  // injective code: trivially reversed-lumpable
  Alphabet ab({"x", "y"});
  auto inj_model = make_markov_model(
      full_shift_2(), StochasticMatrix(rat_matrix({{"1/4", "3/4"}, {"2/3", "1/3"}})));
  auto inj = make_factor_map(ab, ab, {0, 1});
  CHECK(reversed_lumpability(inj_model, inj).holds);
}

TEST_CASE("conditional fibre marginal") {
  // injective code: the unique preimage has posterior 1
  Alphabet ab({"x", "y"});
  auto inj_model = make_markov_model(
      full_shift_2(), StochasticMatrix(rat_matrix({{"1/4", "3/4"}, {"2/3", "1/3"}})));
  FactorSystem inj_fs(inj_model.shift, make_factor_map(ab, ab, {0, 1}));
  CHECK(conditional_fibre_marginal(inj_model, inj_fs, word({0, 1, 0}), 0) == 1);

  // two-point fibres at p = 1/2: both branches weigh 1/2 at every depth
  auto half = furstenberg(Rational(1, 2));
  for (std::size_t len = 1; len <= 6; ++len)
    for (const auto& y : allowed_words(half.system.image(), len))
      for (int a : half.system.preimage(y[0]))
        CHECK(conditional_fibre_marginal(half.model, half.system, y, a) == Rational(1, 2));

  // decodable window: a followed by b pins the hidden state to 1
  auto wl4 = weak_lumpable_4state();
  Word ab_window{{0, 1}, 0};
  CHECK(conditional_fibre_marginal(wl4.model, wl4.system, ab_window, 0) == 1);
  CHECK(conditional_fibre_marginal(wl4.model, wl4.system, ab_window, 2) == 0);

  CHECK_THROWS_AS(conditional_fibre_marginal(wl4.model, wl4.system, ab_window, 1), Error);
}

TEST_CASE("fibre measure reports marginals with convergence deltas") {
  auto wl4 = weak_lumpable_4state();
  Word base{{0, 0, 0, 1}, 0};  // aaab: decodable at the last step
  auto fm = fibre_measure(wl4.model, wl4.system, base);
  REQUIRE(fm.marginal_by_depth.size() == 4);
  CHECK(fm.states == std::vector<int>{0, 2});
  CHECK(fm.marginal_by_depth[0] ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(fm.marginal_by_depth[3] == std::vector<Rational>{Rational(1), Rational(0)});
  CHECK(fm.deltas.size() == 3);
  CHECK(fm.deltas.back() > 0);
}

TEST_CASE("g_tilde: exact values and invariants") {
  auto wl4 = weak_lumpable_4state();
  auto rl = reversed_lumpability(wl4.model, wl4.system.map());

  // reversed-lumpable: value S(y0,y1) independent of depth, delta exactly 0
  for (std::size_t len = 2; len <= 6; ++len)
    for (const auto& y : allowed_words(wl4.system.image(), len)) {
      auto gv = g_tilde(wl4.model, wl4.system, y);
      CHECK(gv.value == (*rl.s_matrix)(static_cast<std::size_t>(y[0]),
                                       static_cast<std::size_t>(y[1])));
      CHECK(gv.converged);
      if (gv.delta) CHECK(*gv.delta == 0);
    }

  auto half = furstenberg(Rational(1, 2));
  for (const auto& y : allowed_words(half.system.image(), 5))
    CHECK(g_tilde(half.model, half.system, y).value == Rational(1, 2));
}

TEST_CASE("g_tilde sums to one exactly and respects the positivity bound on presets") {
  for (const auto& nm : {weak_lumpable_4state(), furstenberg(Rational(7, 10)),
                         symmetric_xor(Rational(2, 5)), positive_merge_3state()}) {
    Rational kappa = positivity_bound(nm.model);
    CHECK(kappa > 0);
    for (std::size_t len = 1; len <= 5; ++len)
      for (const auto& tail : allowed_words(nm.system.image(), len)) {
        Rational total(0);
        for (std::size_t b = 0; b < nm.system.image().size(); ++b) {
          if (!nm.system.image().adjacency.allows(static_cast<int>(b), tail[0])) continue;
          Word y{{static_cast<int>(b)}, 0};
          y.symbols.insert(y.symbols.end(), tail.symbols.begin(), tail.symbols.end());
          auto gv = g_tilde(nm.model, nm.system, y);
          CHECK(gv.value >= kappa);
          total += gv.value;
        }
        CHECK(total == 1);
      }
  }
}

TEST_CASE("g_tilde can dip below the min-Q bound on adversarial topologies") {
  // Four states, two mapped to u; edges into state s2 only from s4, so the
  // u-bracket vanishes there while long u-runs keep posterior mass on s2.
  RationalMatrix p(4, 4, Rational(0));
  p(0, 0) = Rational(1, 100);
  p(0, 3) = Rational(99, 100);
  p(1, 0) = Rational(9, 10);
  p(1, 3) = Rational(1, 10);
  p(2, 0) = 1;
  p(3, 1) = Rational(9, 10);
  p(3, 2) = Rational(1, 10);
  BoolMatrix adj(4, 4, 0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (p(i, j) > 0) adj(i, j) = 1;
  Alphabet domain({"s1", "s2", "s3", "s4"});
  auto model = make_markov_model(make_subshift(domain, BinaryAdjacency(adj)),
                                 StochasticMatrix(p));
  FactorSystem fs(model.shift,
                  make_factor_map(domain, Alphabet({"u", "v", "w"}), {0, 0, 1, 2}));
  REQUIRE(verify_image_sft(fs, 16).ok);

  Rational kappa = positivity_bound(model);
  // y = v u u u w ...: posterior after the u-run sits mostly on s2, whose
  // bracket from pi^{-1}(v) is zero.
  Word y{{1, 0, 0, 0, 2}, 0};
  auto gv = g_tilde(model, fs, y);
  CHECK(gv.value > 0);
  CHECK(gv.value < kappa);

  // normalization still holds exactly
  Rational total(0);
  Word tail{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0};
  for (std::size_t b = 0; b < fs.image().size(); ++b) {
    if (!fs.image().adjacency.allows(static_cast<int>(b), tail[0])) continue;
    Word full{{static_cast<int>(b)}, 0};
    full.symbols.insert(full.symbols.end(), tail.symbols.begin(), tail.symbols.end());
    total += g_tilde(model, fs, full).value;
  }
  CHECK(total == 1);
}

TEST_CASE("fibre potential") {
  // all Q entries equal on the support: uniform weights
  auto uniform = make_markov_model(
      full_shift_2(), StochasticMatrix(rat_matrix({{"1/2", "1/2"}, {"1/2", "1/2"}})));
  FactorSystem merge_all(uniform.shift,
                         make_factor_map(uniform.shift.alphabet, Alphabet({"o"}), {0, 0}));
  auto fw = fibre_window(merge_all, Word{{0, 0}, 0});
  auto pot = fibre_potential(uniform, fw, 0);
  REQUIRE(pot.words.size() == 2);
  CHECK(pot.weights[0] == Rational(1, 2));
  CHECK(pot.weights[1] == Rational(1, 2));

  // two-point fibres: a boundary state pins the branch, weight 1
  auto fb = furstenberg(Rational(7, 10));
  auto fbw = fibre_window(fb.system, Word{{0, 1, 0, 1}, 0});
  for (int boundary : fbw.states.back()) {
    auto bp = fibre_potential(fb.model, fbw, boundary);
    REQUIRE(bp.words.size() == 1);
    CHECK(bp.weights[0] == 1);
  }

  // positive example: weights match brute-force normalized Q-products
  auto pos3 = positive_merge_3state();
  auto pw = fibre_window(pos3.system, Word{{0, 0, 0, 0}, 0});
  for (int boundary : pw.states.back()) {
    auto pot3 = fibre_potential(pos3.model, pw, boundary);
    Rational z(0);
    std::vector<Rational> direct;
    for (const auto& w : pot3.words) {
      Rational prod(1);
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        prod *= pos3.model.reversal(static_cast<std::size_t>(w[i]),
                                    static_cast<std::size_t>(w[i + 1]));
      prod *= pos3.model.reversal(static_cast<std::size_t>(w.symbols.back()),
                                  static_cast<std::size_t>(boundary));
      direct.push_back(prod);
      z += prod;
    }
    CHECK(z == pot3.partition);
    for (std::size_t i = 0; i < direct.size(); ++i)
      CHECK(pot3.weights[i] == direct[i] / z);
  }
}

TEST_CASE("averaging operator") {
  auto pos3 = positive_merge_3state();
  auto fw = fibre_window(pos3.system, Word{{0, 0, 0}, 0});
  auto pot = fibre_potential(pos3.model, fw, fw.states.back().front());

  CHECK(averaging_operator_apply(pot, [](const Word&) { return Rational(1); }) == 1);

  // indicator of one interior word returns its weight
  Word target = pot.words.front();
  auto indicator = [&](const Word& w) {
    for (std::size_t i = 0; i < target.size(); ++i)
      if (w[i] != target[i]) return Rational(0);
    return Rational(1);
  };
  CHECK(averaging_operator_apply(pot, indicator) == pot.weights.front());
}

TEST_CASE("averaged observables agree across boundary states as the window grows") {
  auto pos3 = positive_merge_3state();
  auto f = [](const Word& w) { return w[0] == 0 ? Rational(1) : Rational(0); };
  double prev_gap = 2.0;
  for (std::size_t len = 3; len <= 9; len += 2) {
    auto fw = fibre_window(pos3.system, Word{std::vector<int>(len, 0), 0});
    Rational lo(1), hi(0);
    for (int boundary : fw.states.back()) {
      Rational v = averaging_operator_apply(fibre_potential(pos3.model, fw, boundary), f);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    double gap = to_double(hi - lo);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);
}

TEST_CASE("gibbs kernel") {
  auto pos3 = positive_merge_3state();
  auto fw = fibre_window(pos3.system, Word{{0, 0, 0, 0}, 0});
  Word boundary{{fw.states[3].front()}, 3};
  auto kernel = gibbs_kernel(pos3.model, fw, boundary);
  Rational total(0);
  for (const auto& w : kernel.potential.weights) total += w;
  CHECK(total == 1);
  // definitionally the fibre potential over the same window
  auto pot = fibre_potential(pos3.model, fw, boundary[0]);
  CHECK(kernel.potential.weights == pot.weights);
  CHECK(kernel.potential.partition == pot.partition);

  // decodable tail: kernel is a point mass
  auto wl4 = weak_lumpable_4state();
  auto wfw = fibre_window(wl4.system, Word{{0, 0, 0, 1}, 0});  // aaab
  auto wk = gibbs_kernel(wl4.model, wfw, Word{{1}, 3});
  REQUIRE(wk.potential.words.size() == 1);
  CHECK(wk.potential.weights[0] == 1);

  CHECK_THROWS_AS(gibbs_kernel(wl4.model, wfw, Word{{2}, 3}), Error);  // state 3 trimmed away
}

TEST_CASE("boundary uniformity constant") {
  auto pos3 = positive_merge_3state();
  auto fw = fibre_window(pos3.system, Word{{0, 0, 0, 0}, 0});
  Rational c = boundary_uniformity_constant(pos3.model, fw, 1);
  CHECK(c > 0);
  CHECK(c <= 1);

  // kernel masses of depth-1 interior prefixes really are within the ratio
  const auto& boundaries = fw.states.back();
  auto prefix_masses = [&](int boundary) {
    std::map<std::vector<int>, Rational> mass;
    auto pot = fibre_potential(pos3.model, fw, boundary);
    for (std::size_t i = 0; i < pot.words.size(); ++i) {
      std::vector<int> prefix(pot.words[i].symbols.begin(), pot.words[i].symbols.begin() + 2);
      mass[prefix] += pot.weights[i];
    }
    return mass;
  };
  for (int x : boundaries)
    for (int xt : boundaries) {
      auto mx = prefix_masses(x);
      auto mxt = prefix_masses(xt);
      for (const auto& [prefix, w] : mxt) CHECK(mx[prefix] >= c * w);
    }

  // two-point fibre: disjoint supports across branches
  auto fb = furstenberg(Rational(7, 10));
  auto fbw = fibre_window(fb.system, Word{{0, 1, 0}, 0});
  CHECK(boundary_uniformity_constant(fb.model, fbw, 0) == 0);

  // single admissible boundary: trivially 1
  auto wl4 = weak_lumpable_4state();
  auto wfw = fibre_window(wl4.system, Word{{0, 0, 1}, 0});  // aab pins everything
  CHECK(boundary_uniformity_constant(wl4.model, wfw, 0) == 1);
}

TEST_CASE("fibre Markov conditional: closed form equals direct conditioning") {
  auto wl4 = weak_lumpable_4state();

  // unique fibre path: probability 1
  Word y_dec{{0, 1, 0}, 0};  // aba decodes to 1,2,(1 or 3): interior 1,2 pinned
  CHECK(fibre_markov_conditional(wl4.model, wl4.system, y_dec, word({0}), 1) == 1);

  // window invariance: value equals mu(interior-cyl | pi^{-1}[y_0^m z]) given
  // the boundary, for every m and continuation-irrelevant extension
  for (const auto& y_base : allowed_words(wl4.system.image(), 7)) {
    auto words = oracle::preimage_words(wl4.system, y_base);
    if (words.empty()) continue;
    for (const auto& x : words) {
      // interior [0,1], boundary at position 2
      Word interior{{x[0], x[1]}, 0};
      Rational closed = fibre_markov_conditional(wl4.model, wl4.system, y_base, interior, x[2]);
      // direct: among fibre paths of y_base agreeing with x on positions 2..4,
      // the conditional mass of those also matching the interior
      Rational num(0), den(0);
      for (const auto& b : words) {
        bool tail_match = b[2] == x[2] && b[3] == x[3] && b[4] == x[4];
        if (!tail_match) continue;
        Rational mass = cylinder_probability(wl4.model, b);
        den += mass;
        if (b[0] == x[0] && b[1] == x[1]) num += mass;
      }
      CHECK(closed == num / den);
    }
  }
}

TEST_CASE("tjur probe") {
  auto wl4 = weak_lumpable_4state();
  // spread exactly 1 at the all-a point, continuations b vs c, test [1_0]
  auto probe = tjur_probe(wl4.model, wl4.system, Word{std::vector<int>(12, 0), 0},
                          {Word{{1}, 0}, Word{{2}, 0}}, Word{{0}, 0});
  REQUIRE(probe.spreads.size() == 12);
  for (std::size_t d = 0; d < 12; ++d) {
    CHECK(probe.values[d][0] == 1);
    CHECK(probe.values[d][1] == 0);
    CHECK(probe.spreads[d] == 1);
  }

  // p = 1/2: branch cylinder has weight 1/2, spread 0
  auto half = furstenberg(Rational(1, 2));
  // the + branch over y starting with +: pair state (+,+) = index 0
  auto hp = tjur_probe(half.model, half.system, Word{{0, 0, 0, 0}, 0},
                       {Word{{0}, 0}, Word{{1}, 0}}, Word{{0}, 0});
  for (std::size_t d = 0; d < hp.spreads.size(); ++d) {
    CHECK(hp.values[d][0] == Rational(1, 2));
    CHECK(hp.spreads[d] == 0);
  }

  // injective code: point fibres, spread 0 everywhere
  Alphabet ab({"x", "y"});
  auto inj_model = make_markov_model(
      full_shift_2(), StochasticMatrix(rat_matrix({{"1/4", "3/4"}, {"2/3", "1/3"}})));
  FactorSystem inj_fs(inj_model.shift, make_factor_map(ab, ab, {0, 1}));
  auto ip = tjur_probe(inj_model, inj_fs, Word{{0, 1, 0}, 0},
                       {Word{{0}, 0}, Word{{1}, 0}}, Word{{0}, 0});
  for (const auto& s : ip.spreads) CHECK(s == 0);

  CHECK_THROWS_AS(tjur_probe(wl4.model, wl4.system, Word{{1}, 0}, {Word{{1}, 0}}, Word{{0}, 0}),
                  Error);  // bb conditioning impossible
}

TEST_CASE("tjur spreads decay on a mixing system") {
  auto pos3 = positive_merge_3state();
  auto probe = tjur_probe(pos3.model, pos3.system, Word{std::vector<int>(10, 0), 0},
                          {Word{{0}, 0}, Word{{1}, 0}}, Word{{0}, 0});
  // geometric-looking decay: strictly decreasing and small at depth 10
  for (std::size_t d = 1; d < probe.spreads.size(); ++d)
    CHECK(probe.spreads[d] < probe.spreads[d - 1]);
  CHECK(to_double(probe.spreads.back()) < 1e-3);
  std::vector<double> vals;
  for (const auto& s : probe.spreads) vals.push_back(to_double(s));
  auto fit = fit_geometric_decay(vals);
  CHECK(fit.rate < 1.0);
  CHECK(fit.rate > 0.0);
}

TEST_CASE("furstenberg branch weights follow the two-point fibre computation") {
  auto fb = furstenberg(Rational(7, 10));
  // conditioning on [y_0^n z]: the branch cylinder mass equals the brute-force
  // two-point ratio
  for (std::size_t len = 2; len <= 6; ++len)
    for (const auto& y : allowed_words(fb.system.image(), len)) {
      Word plus_branch{{y[0] == 0 ? 0 : 1}, 0};  // pair state (+, y_0): ++ is 0, +- is 1
      Rational direct = oracle::brute_conditional(fb.model, fb.system, y, plus_branch);
      auto probe = tjur_probe(fb.model, fb.system, y, {Word{{}, 0}}, plus_branch);
      // empty continuation row at full depth equals the direct value
      CHECK(probe.values.back()[0] == direct);
    }
}

TEST_CASE("finite-depth identity: g_tilde equals the forward conditional exactly") {
  // Two fully independent code paths (posterior-with-brackets vs forward
  // quotient) compute the same finite-dimensional conditional.
  std::vector<std::pair<MarkovModel, FactorSystem>> systems;
  for (auto& nm : {weak_lumpable_4state(), furstenberg(Rational(7, 10)),
                   symmetric_xor(Rational(1, 4)), positive_merge_3state()})
    systems.emplace_back(nm.model, nm.system);
  for (int trial = 0; trial < 6; ++trial) {
    auto sys = random_system(7700 + 13 * static_cast<std::uint64_t>(trial));
    systems.emplace_back(sys.model, sys.system);
  }
  for (const auto& [model, fs] : systems) {
    for (std::size_t len = 2; len <= 5; ++len)
      for (const auto& y : allowed_words(fs.image(), len)) {
        Word tail{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0};
        if (factor_cylinder_probability(model, fs, tail) == 0) continue;
        CHECK(g_tilde(model, fs, y).value == g_n(model, fs, y));
      }
  }
}

TEST_CASE("conditional chain telescopes back to the cylinder mass") {
  auto wl4 = weak_lumpable_4state();
  auto fb = furstenberg(Rational(7, 10));
  for (const auto* nm : {&wl4, &fb}) {
    for (const auto& y : allowed_words(nm->system.image(), 6)) {
      if (factor_cylinder_probability(nm->model, nm->system, y) == 0) continue;
      // nu(y_0^k) = prod_j g(y_j | y_{j+1}^k) * nu(y_k)
      Rational product(1);
      for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        Word suffix{std::vector<int>(y.symbols.begin() + static_cast<long>(j), y.symbols.end()),
                    0};
        product *= g_n(nm->model, nm->system, suffix);
      }
      Word last{{y.symbols.back()}, 0};
      product *= factor_cylinder_probability(nm->model, nm->system, last);
      CHECK(product == factor_cylinder_probability(nm->model, nm->system, y));
    }
  }
}

TEST_CASE("spread persistence certifies discontinuities") {
  auto wl4 = weak_lumpable_4state();
  auto probe = tjur_probe(wl4.model, wl4.system, Word{std::vector<int>(6, 0), 0},
                          {Word{{1}, 0}, Word{{2}, 0}}, Word{{0}, 0});
  CHECK(spread_persists(probe, Rational(1)));
  CHECK(spread_persists(probe, Rational(1, 2)));
  CHECK_FALSE(spread_persists(probe, Rational(1), 7));  // only 6 depths available

  auto pos3 = positive_merge_3state();
  auto decaying = tjur_probe(pos3.model, pos3.system, Word{std::vector<int>(8, 0), 0},
                             {Word{{0}, 0}, Word{{1}, 0}}, Word{{0}, 0});
  CHECK_FALSE(spread_persists(decaying, Rational(1, 100)));
}
