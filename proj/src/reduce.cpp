#include "ltr/reduce.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "ltr/errors.hpp"
#include "ltr/rank1.hpp"

namespace ltr {

void TuckerRank::validate(const Shape& shape) const {
  if (ranks.size() != shape.order()) {
    throw RankError("target rank has " + std::to_string(ranks.size()) +
                    " entries for an order-" + std::to_string(shape.order()) + " tensor");
  }
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    if (ranks[k] < 1 || ranks[k] > shape.dims()[k]) {
      throw RankError("target rank " + std::to_string(ranks[k]) + " on mode " +
                      std::to_string(k + 1) + " is outside [1, " +
                      std::to_string(shape.dims()[k]) + "]");
    }
  }
}

std::string TuckerRank::to_string(char sep) const {
  std::string out;
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    if (k) out += sep;
    out += std::to_string(ranks[k]);
  }
  return out;
}

void BingoSpec::validate(const Shape& shape) const {
  if (modes.size() != shape.order()) {
    throw RankError("bingo spec has " + std::to_string(modes.size()) +
                    " modes for an order-" + std::to_string(shape.order()) + " tensor");
  }
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto& c = modes[k];
    const std::string where = "bingo spec mode " + std::to_string(k + 1);
    if (c.empty() || c.front() != 1) throw RankError(where + ": index set must start at 1");
    for (std::size_t l = 1; l < c.size(); ++l) {
      if (c[l] <= c[l - 1]) throw RankError(where + ": indices must be strictly increasing");
    }
    if (c.back() > shape.dims()[k]) {
      throw RankError(where + ": index " + std::to_string(c.back()) + " exceeds extent " +
                      std::to_string(shape.dims()[k]));
    }
  }
}

TuckerRank BingoSpec::rank() const {
  TuckerRank r;
  for (const auto& c : modes) r.ranks.push_back(c.size());
  return r;
}

std::string to_json(const BingoSpec& spec) {
  nlohmann::json j;
  j["modes"] = spec.modes;
  return j.dump();
}

BingoSpec bingo_spec_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BingoSpec spec;
    spec.modes = j.at("modes").get<std::vector<std::vector<std::size_t>>>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bingo spec: ") + e.what());
  }
}

BingoSpec full_bingo_spec(const Shape& shape) {
  BingoSpec spec;
  for (std::size_t n : shape.dims()) {
    std::vector<std::size_t> c(n);
    std::iota(c.begin(), c.end(), std::size_t{1});
    spec.modes.push_back(std::move(c));
  }
  return spec;
}

BingoSpec sample_bingo_spec(const Shape& shape, const TuckerRank& target,
                            std::uint64_t seed) {
  target.validate(shape);
  std::mt19937_64 rng(seed);
  BingoSpec spec;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    std::vector<std::size_t> pool(shape.dims()[k] - 1);
    std::iota(pool.begin(), pool.end(), std::size_t{2});
    const std::size_t take = target.ranks[k] - 1;
    for (std::size_t t = 0; t < take; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
      std::swap(pool[t], pool[pick(rng)]);
    }
    std::vector<std::size_t> c{1};
    c.insert(c.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(c.begin(), c.end());
    spec.modes.push_back(std::move(c));
  }
  return spec;
}

std::vector<ModeBlock> blocks_from_spec(const BingoSpec& spec, const Shape& shape,
                                        std::size_t mode) {
  spec.validate(shape);
  const std::size_t extent = shape.extent(mode);
  const auto& c = spec.modes[mode - 1];
  std::vector<ModeBlock> blocks;
  for (std::size_t l = 0; l < c.size(); ++l) {
    const std::size_t next = l + 1 < c.size() ? c[l + 1] : extent + 1;
    if (next - 1 > c[l]) blocks.push_back({mode, c[l], next - 1});
  }
  return blocks;
}

namespace {

// Best rank-1 of the block's mode-k expansion, in place: with row sums
// r_i = sum_{p,q} P(p,i,q) and column sums c_{pq} = sum_i P(p,i,q) over the
// block, P(p,i,q) := r_i c_{pq} / sum_i r_i. Returns false (and leaves the
// block alone) when the block sums to zero.
bool project_expansion(DenseTensor& t, const ModeSplit& s, const ModeBlock& b,
                       std::vector<double>& rows, std::vector<double>& cols) {
  const std::size_t len = b.length();
  rows.assign(len, 0.0);
  cols.assign(s.outer * s.inner, 0.0);
  double* data = t.data().data();
  for (std::size_t p = 0; p < s.outer; ++p) {
    double* col = cols.data() + p * s.inner;
    for (std::size_t i = 0; i < len; ++i) {
      const double* src = data + (p * s.extent + b.lo - 1 + i) * s.inner;
      double acc = 0.0;
      for (std::size_t q = 0; q < s.inner; ++q) {
        acc += src[q];
        col[q] += src[q];
      }
      rows[i] += acc;
    }
  }
  double total = 0.0;
  for (double r : rows) total += r;
  if (!(total > 0.0)) return false;
  for (double& r : rows) r /= total;
  for (std::size_t p = 0; p < s.outer; ++p) {
    const double* col = cols.data() + p * s.inner;
    for (std::size_t i = 0; i < len; ++i) {
      double* dst = data + (p * s.extent + b.lo - 1 + i) * s.inner;
      const double r = rows[i];
      for (std::size_t q = 0; q < s.inner; ++q) dst[q] = r * col[q];
    }
  }
  return true;
}

// The block as its own subtensor; elements are laid out exactly like
// extract_block would, but written straight into the working tensor.
void write_block(DenseTensor& t, const ModeSplit& s, const ModeBlock& b, const DenseTensor& sub) {
  const std::size_t run = b.length() * s.inner;
  for (std::size_t p = 0; p < s.outer; ++p) {
    std::copy_n(sub.data().data() + p * run, run,
                t.data().data() + (p * s.extent + b.lo - 1) * s.inner);
  }
}

std::vector<std::size_t> resolve_mode_order(const ReduceOptions& options, std::size_t d) {
  std::vector<std::size_t> order = options.mode_order;
  if (order.empty()) {
    order.resize(d);
    std::iota(order.begin(), order.end(), std::size_t{1});
    return order;
  }
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == d;
  for (std::size_t k = 0; ok && k < d; ++k) ok = sorted[k] == k + 1;
  if (!ok) throw std::invalid_argument("mode order must be a permutation of 1.." + std::to_string(d));
  return order;
}

}  // namespace

ReduceResult reduce(const DenseTensor& t, const BingoSpec& spec, const ReduceOptions& options) {
  spec.validate(t.shape());
  if (!t.all_non_negative()) throw std::domain_error("reduce: negative element");
  if (!(total_sum(t) > 0.0)) throw std::domain_error("reduce: tensor sums to zero");

  ReduceResult result{t, spec, {}};
  DenseTensor& work = result.tensor;
  std::vector<double> rows, cols;
  for (std::size_t mode : resolve_mode_order(options, t.order())) {
    const ModeSplit s = split_at(t.shape(), mode);
    for (const ModeBlock& b : blocks_from_spec(spec, t.shape(), mode)) {
      if (options.rule == BlockRule::ModeExpansion) {
        if (!project_expansion(work, s, b, rows, cols)) result.skipped_blocks.push_back(b);
        continue;
      }
      DenseTensor sub = extract_block(work, b);
      if (!(total_sum(sub) > 0.0)) {
        result.skipped_blocks.push_back(b);
        continue;
      }
      write_block(work, s, b, best_rank1(sub).tensor);
    }
  }
  return result;
}

ReduceResult reduce(const DenseTensor& t, const TuckerRank& target, std::uint64_t seed,
                    const ReduceOptions& options) {
  return reduce(t, sample_bingo_spec(t.shape(), target, seed), options);
}

std::uint64_t worst_case_cost(const Shape& shape, const TuckerRank& target) {
  target.validate(shape);
  std::uint64_t cost = 1;
  auto mul = [&cost](std::uint64_t v) {
    if (cost > std::numeric_limits<std::uint64_t>::max() / v) {
      throw std::overflow_error("worst_case_cost overflows 64 bits");
    }
    cost *= v;
  };
  for (std::size_t r : target.ranks) mul(r);
  for (std::size_t n : shape.dims()) mul(n);
  return cost;
}

}  // namespace ltr
