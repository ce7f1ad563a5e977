#pragma once

// Legendre Tucker rank reduction.
//
// For every mode k a sorted index set C^(k) = {1 = c_1 < ... < c_{r_k}} splits
// [I_k] into runs [c_l, c_{l+1} - 1] (with c_{r_k + 1} = I_k + 1). Each run of
// length >= 2 is a block; inside a block every slice is made proportional to
// the first one, which caps the mode-k rank at r_k. The replacement is the
// KL-optimal one, so the result is the m-projection of the input onto the set
// of tensors carrying those proportional slices, for all modes at once.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ltr/tensor.hpp"

namespace ltr {

struct TuckerRank {
  std::vector<std::size_t> ranks;

  /// Throws RankError unless 1 <= r_k <= I_k for every mode.
  void validate(const Shape& shape) const;
  std::string to_string(char sep = 'x') const;

  friend bool operator==(const TuckerRank&, const TuckerRank&) = default;
};

/// Per-mode sorted index sets (1-based), each starting at 1.
struct BingoSpec {
  std::vector<std::vector<std::size_t>> modes;

  /// Throws RankError unless every set is strictly increasing, starts at 1
  /// and stays within its extent.
  void validate(const Shape& shape) const;
  TuckerRank rank() const;

  friend bool operator==(const BingoSpec&, const BingoSpec&) = default;
};

/// {"modes":[[1,3,7],[1,2],[1]]}
std::string to_json(const BingoSpec& spec);
/// Throws ParseError on malformed JSON or a missing "modes" array.
BingoSpec bingo_spec_from_json(std::string_view text);

/// The no-reduction spec C^(k) = [I_k] for every mode.
BingoSpec full_bingo_spec(const Shape& shape);

/// Per mode: 1 plus r_k - 1 elements of {2, ..., I_k} chosen by a seeded
/// partial Fisher-Yates shuffle, sorted. Modes draw from one generator in
/// order 1..d.
BingoSpec sample_bingo_spec(const Shape& shape, const TuckerRank& target,
                            std::uint64_t seed);

/// Blocks [c_l, c_{l+1} - 1] of length >= 2 on one mode, ascending.
std::vector<ModeBlock> blocks_from_spec(const BingoSpec& spec, const Shape& shape,
                                        std::size_t mode);

enum class BlockRule {
  // Block := best rank-1 of its mode-k expansion (slices proportional along
  // mode k). This is the m-projection; order independent, conserves eta off
  // the bingo index set.
  ModeExpansion,
  // Block := best rank-1 of the whole subtensor. Same rank bound, but for
  // order >= 3 the result depends on the mode order.
  Subtensor,
};

struct ReduceOptions {
  // Permutation of 1..d; empty means 1, 2, ..., d.
  std::vector<std::size_t> mode_order;
  BlockRule rule = BlockRule::ModeExpansion;
};

struct ReduceResult {
  DenseTensor tensor;
  BingoSpec spec;
  // Blocks whose total was zero when visited; they are left unchanged.
  std::vector<ModeBlock> skipped_blocks;
};

/// Requires non-negative input with a positive total.
ReduceResult reduce(const DenseTensor& t, const BingoSpec& spec,
                    const ReduceOptions& options = {});

/// Samples the spec from `seed` and reduces.
ReduceResult reduce(const DenseTensor& t, const TuckerRank& target, std::uint64_t seed,
                    const ReduceOptions& options = {});

/// r_1 ... r_d * I_1 ... I_d, the worst-case element-operation count.
/// Throws std::overflow_error if it does not fit in 64 bits.
std::uint64_t worst_case_cost(const Shape& shape, const TuckerRank& target);

}  // namespace ltr
