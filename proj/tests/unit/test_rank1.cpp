#include <doctest.h>

#include <cmath>

#include "ltr/infogeo.hpp"
#include "ltr/rank1.hpp"
#include "ltr/verify.hpp"
#include "oracles.hpp"

using namespace ltr;

TEST_SUITE("rank1") {

TEST_CASE("closed-form fixtures") {
  SUBCASE("all ones stays all ones") {
    const DenseTensor ones(Shape{2, 2, 2}, 1.0);
    const auto r = best_rank1(ones);
    CHECK(max_abs_diff(r.tensor, ones) < 1e-15);
    CHECK(r.factors.lambda == doctest::Approx(1.0 / 64.0));
    CHECK(r.factors.factors[0] == std::vector<double>{4.0, 4.0});
  }
  SUBCASE("2x2 matrix") {
    const DenseTensor m(Shape{2, 2}, {0.1, 0.2, 0.3, 0.4});
    const auto r = best_rank1(m);
    CHECK(max_abs_diff(r.tensor, DenseTensor(Shape{2, 2}, {0.12, 0.18, 0.28, 0.42})) < 1e-12);
    CHECK(r.factors.lambda == doctest::Approx(1.0));
    CHECK(max_abs_diff(r.factors.reconstruct(), r.tensor) < 1e-15);
  }
  SUBCASE("rank-1 input is a fixed point") {
    const DenseTensor t = scaled(gen::rank1(Shape{3, 4, 2}, 4), 37.0);
    CHECK(max_abs_diff(best_rank1(t).tensor, t) < 1e-12);
  }
  CHECK_THROWS(best_rank1(DenseTensor(Shape{2, 2}, 0.0)));
  CHECK_THROWS(best_rank1(DenseTensor(Shape{2}, {-1.0, 2.0})));
}

TEST_CASE("agrees with marginal enumeration, zeros allowed") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenseTensor t = scaled(gen::positive(Shape{3, 2, 4}, seed), 5.0);
    t[seed % t.size()] = 0.0;
    const DenseTensor q = best_rank1(t).tensor;
    CHECK(max_abs_diff(q, oracle::rank1(t)) < 1e-13);
    CHECK(std::abs(total_sum(q) - total_sum(t)) <= 1e-9 * total_sum(t));
  }
}

TEST_CASE("idempotent, scale equivariant, conserves axis sums and one-body eta") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseTensor t = gen::positive_normalized(Shape{4, 3, 3}, seed);
    const DenseTensor q = best_rank1(t).tensor;
    CHECK(max_abs_diff(best_rank1(q).tensor, q) < 1e-12);

    const DenseTensor q7 = best_rank1(scaled(t, 7.5)).tensor;
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(q7[i] - 7.5 * q[i]) <= 1e-12 * q7[i]);

    for (std::size_t k = 1; k <= 3; ++k) {
      const auto a = axis_sums(t, k), b = axis_sums(q, k);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9 * a[i]);
    }
    const auto eta_t = one_body_values(eta_from_tensor(t).values);
    const auto eta_q = one_body_values(eta_from_tensor(q).values);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < eta_t[k].size(); ++j) CHECK(std::abs(eta_t[k][j] - eta_q[k][j]) < 1e-10);
    }
  }
}

TEST_CASE("grid search never beats the closed form") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DenseTensor t = gen::positive_normalized(Shape{2, 2}, seed);
    const DenseTensor q = best_rank1(t).tensor;
    const auto grid = rank1_grid_oracle(t, 1e-2);
    CHECK(grid.best_kl >= kl_divergence(t, q) - 1e-6);
  }
}

TEST_CASE("rank-1 test through factorized eta") {
  const std::vector<std::vector<double>> v{{0.3, 0.7}, {0.4, 0.6}};
  CHECK(is_rank1(outer_product(v)));
  CHECK_FALSE(is_rank1(DenseTensor(Shape{2, 2}, {0.1, 0.2, 0.3, 0.4})));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseTensor t = gen::positive(Shape{3, 3, 2}, seed);
    CHECK_FALSE(is_rank1(t));
    CHECK(is_rank1(best_rank1(t).tensor));
    CHECK(is_rank1(scaled(gen::rank1(Shape{3, 3, 2}, seed), 4.0)));
  }
  CHECK_THROWS(is_rank1(DenseTensor(Shape{2}, {0.0, 1.0})));
}

TEST_CASE("a zero one-body theta on a bingo row survives") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t mode = 1 + seed % 3;
    const DenseTensor t = gen::planted_bingo(Shape{4, 3, 3}, mode, {2}, seed, true);
    MultiIndex idx(3, 1);
    idx[mode - 1] = 2;
    CHECK(std::abs(theta_from_tensor(t).values.at(idx)) < 1e-9);
    CHECK(std::abs(theta_from_tensor(best_rank1(t).tensor).values.at(idx)) < 1e-8);
  }
}

TEST_CASE("a zero one-body theta off a bingo row is generally not preserved") {
  // Documents the limit of the zero-preservation property: the zero must come
  // with the proportional-row structure, not on its own.
  ThetaCoords th{gen::positive(Shape{3, 3, 3}, 99, -1.0)};
  th.values.at({2, 1, 1}) = 0.0;
  const DenseTensor p = tensor_from_theta(th, true);
  const double after = theta_from_tensor(best_rank1(p).tensor).values.at({2, 1, 1});
  CHECK(std::abs(after) > 1e-3);
}

}  // TEST_SUITE
