#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ltr/errors.hpp"
#include "ltr/rank1.hpp"
#include "ltr/reduce.hpp"
#include "ltr/verify.hpp"
#include "oracles.hpp"

using namespace ltr;

TEST_SUITE("reduce") {

TEST_CASE("index set sampling") {
  const Shape s{8, 5, 3};
  CHECK(sample_bingo_spec(s, {{8, 5, 3}}, 1) == full_bingo_spec(s));
  const BingoSpec one = sample_bingo_spec(s, {{1, 1, 1}}, 1);
  for (const auto& c : one.modes) CHECK(c == std::vector<std::size_t>{1});

  const BingoSpec a = sample_bingo_spec(s, {{5, 2, 3}}, 42);
  CHECK(a == sample_bingo_spec(s, {{5, 2, 3}}, 42));
  CHECK(a.rank() == TuckerRank{{5, 2, 3}});
  CHECK_NOTHROW(a.validate(s));

  // Every non-anchor element of {2..8} shows up across seeds: the draw is not stuck.
  std::vector<int> seen(9, 0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const BingoSpec spec = sample_bingo_spec(s, {{3, 1, 1}}, seed);
    for (std::size_t c : spec.modes[0]) ++seen[c];
  }
  CHECK(seen[1] == 200);
  for (std::size_t c = 2; c <= 8; ++c) CHECK(seen[c] > 20);

  CHECK_THROWS_AS((sample_bingo_spec(s, {{9, 1, 1}}, 0)), RankError);
  CHECK_THROWS_AS((sample_bingo_spec(s, {{0, 1, 1}}, 0)), RankError);
  CHECK_THROWS_AS((sample_bingo_spec(s, {{1, 1}}, 0)), RankError);
}

TEST_CASE("blocks from index sets") {
  const Shape s{8, 5};
  const BingoSpec spec{{{1, 3, 7}, {1}}};
  CHECK(blocks_from_spec(spec, s, 1) == std::vector<ModeBlock>{{1, 1, 2}, {1, 3, 6}, {1, 7, 8}});
  CHECK(blocks_from_spec(spec, s, 2) == std::vector<ModeBlock>{{2, 1, 5}});
  CHECK(blocks_from_spec(full_bingo_spec(s), s, 1).empty());

  // Lengths minus one add up to I_k - r_k.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = gen::random_target(Shape{9, 6}, seed);
    const BingoSpec sp = sample_bingo_spec(Shape{9, 6}, {r}, seed);
    for (std::size_t k = 1; k <= 2; ++k) {
      std::size_t lost = 0;
      for (const auto& b : blocks_from_spec(sp, Shape{9, 6}, k)) lost += b.length() - 1;
      CHECK(lost == Shape{9, 6}.extent(k) - r[k - 1]);
    }
  }
}

TEST_CASE("spec validation and JSON") {
  const Shape s{4, 3};
  CHECK_THROWS_AS((BingoSpec{{{2, 3}, {1}}}.validate(s)), RankError);
  CHECK_THROWS_AS((BingoSpec{{{1, 3, 3}, {1}}}.validate(s)), RankError);
  CHECK_THROWS_AS((BingoSpec{{{1, 5}, {1}}}.validate(s)), RankError);
  CHECK_THROWS_AS((BingoSpec{{{1}}}.validate(s)), RankError);

  const BingoSpec spec{{{1, 3, 7}, {1, 2}, {1}}};
  CHECK(to_json(spec) == R"({"modes":[[1,3,7],[1,2],[1]]})");
  CHECK(bingo_spec_from_json(to_json(spec)) == spec);
  CHECK_THROWS_AS((bingo_spec_from_json("{")), ParseError);
  CHECK_THROWS_AS((bingo_spec_from_json(R"({"mode":[[1]]})")), ParseError);
  CHECK_THROWS_AS((bingo_spec_from_json(R"({"modes":[["a"]]})")), ParseError);
}

TEST_CASE("trivial targets") {
  const DenseTensor t = gen::positive(Shape{4, 3, 5}, 2);
  CHECK(reduce(t, TuckerRank{{4, 3, 5}}, 0).tensor == t);
  const DenseTensor r1 = reduce(t, TuckerRank{{1, 1, 1}}, 0).tensor;
  CHECK(max_abs_diff(r1, best_rank1(t).tensor) < 1e-14);
  ReduceOptions sub;
  sub.rule = BlockRule::Subtensor;
  CHECK(max_abs_diff(reduce(t, TuckerRank{{1, 1, 1}}, 0, sub).tensor, best_rank1(t).tensor) < 1e-14);
}

TEST_CASE("4x4 matrix with two row blocks") {
  const DenseTensor t = gen::positive(Shape{4, 4}, 8);
  const BingoSpec spec{{{1, 3}, {1, 2, 3, 4}}};
  const DenseTensor q = reduce(t, spec).tensor;
  // Rows 1-2 and 3-4 each become the rank-1 fit of their 2x4 slab.
  const DenseTensor top = oracle::rank1(extract_block(t, {1, 1, 2}));
  const DenseTensor bottom = oracle::rank1(extract_block(t, {1, 3, 4}));
  CHECK(max_abs_diff(extract_block(q, {1, 1, 2}), top) < 1e-15);
  CHECK(max_abs_diff(extract_block(q, {1, 3, 4}), bottom) < 1e-15);
  // Every 2x2 minor inside a slab vanishes, so the rank is at most 2.
  for (std::size_t r : {1u, 3u}) {
    for (std::size_t a = 1; a <= 4; ++a) {
      for (std::size_t b = a + 1; b <= 4; ++b) {
        const double minor = q.at({r, a}) * q.at({r + 1, b}) - q.at({r, b}) * q.at({r + 1, a});
        CHECK(std::abs(minor) < 1e-15);
      }
    }
  }
  CHECK(oracle::matrix_rank(mode_k_expansion(q, 1), 1e-10) == 2);
}

TEST_CASE("the two block rules agree on matrices") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor t = gen::positive(Shape{7, 6}, seed);
    const auto r = gen::random_target(t.shape(), seed + 100);
    ReduceOptions sub;
    sub.rule = BlockRule::Subtensor;
    CHECK(max_abs_diff(reduce(t, {r}, seed).tensor, reduce(t, {r}, seed, sub).tensor) < 1e-14);
  }
}

TEST_CASE("rank bound holds for both rules") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseTensor t = gen::positive(Shape{6, 5, 4}, seed);
    const auto r = gen::random_target(t.shape(), seed + 7);
    for (BlockRule rule : {BlockRule::ModeExpansion, BlockRule::Subtensor}) {
      ReduceOptions opts;
      opts.rule = rule;
      const auto est = numerical_tucker_rank(reduce(t, {r}, seed, opts).tensor);
      for (std::size_t k = 0; k < 3; ++k) CHECK(est.ranks[k] <= r[k]);
    }
  }
}

TEST_CASE("mode order does not matter for the expansion rule") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor t = gen::positive(Shape{5, 4, 3}, seed);
    const BingoSpec spec = sample_bingo_spec(t.shape(), {gen::random_target(t.shape(), seed)}, seed);
    const DenseTensor base = reduce(t, spec).tensor;
    std::vector<std::size_t> order{1, 2, 3};
    while (std::next_permutation(order.begin(), order.end())) {
      CHECK(max_abs_diff(reduce(t, spec, {order, BlockRule::ModeExpansion}).tensor, base) < 1e-12);
    }
  }
  CHECK_THROWS(reduce(gen::positive(Shape{2, 2}, 1), full_bingo_spec(Shape{2, 2}), {{1, 1}, BlockRule::ModeExpansion}));
  CHECK_THROWS(reduce(gen::positive(Shape{2, 2}, 1), full_bingo_spec(Shape{2, 2}), {{1}, BlockRule::ModeExpansion}));
}

TEST_CASE("elements outside every block slab are untouched") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor t = gen::positive(Shape{6, 5, 4}, seed);
    const BingoSpec spec = sample_bingo_spec(t.shape(), {gen::random_target(t.shape(), seed)}, seed);
    const DenseTensor q = reduce(t, spec).tensor;
    for (std::size_t off = 0; off < t.size(); ++off) {
      const MultiIndex idx = t.index_of(off);
      bool inside = false;
      for (std::size_t k = 1; k <= 3; ++k) {
        for (const auto& b : blocks_from_spec(spec, t.shape(), k)) {
          inside = inside || (idx[k - 1] >= b.lo && idx[k - 1] <= b.hi);
        }
      }
      if (!inside) CHECK(q[off] == t[off]);
    }
  }
}

TEST_CASE("zero-sum blocks are skipped and reported") {
  DenseTensor t = gen::positive(Shape{4, 3}, 1);
  for (std::size_t j = 1; j <= 3; ++j) {
    t.at({3, j}) = 0.0;
    t.at({4, j}) = 0.0;
  }
  const auto res = reduce(t, BingoSpec{{{1, 3}, {1, 2, 3}}});
  CHECK(res.skipped_blocks == std::vector<ModeBlock>{{1, 3, 4}});
  CHECK(extract_block(res.tensor, {1, 3, 4}) == extract_block(t, {1, 3, 4}));
  CHECK_THROWS(reduce(DenseTensor(Shape{2, 2}, 0.0), TuckerRank{{1, 1}}, 0));
  CHECK_THROWS(reduce(DenseTensor(Shape{2}, {-1.0, 2.0}), TuckerRank{{1}}, 0));
}

TEST_CASE("worst-case cost") {
  CHECK(worst_case_cost(Shape{30, 30, 30}, {{10, 10, 10}}) == 27000000ULL);
  CHECK(worst_case_cost(Shape{4, 5, 6}, {{1, 1, 1}}) == 120ULL);
  CHECK(worst_case_cost(Shape{2, 2}, {{2, 2}}) == 16ULL);
  CHECK_THROWS_AS((worst_case_cost(Shape{2, 2}, {{3, 2}})), RankError);
}

}  // TEST_SUITE
