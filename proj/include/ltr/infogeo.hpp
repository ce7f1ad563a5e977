#pragma once

// Dual coordinates of a strictly positive tensor viewed as a distribution on
// the index grid [I_1] x ... x [I_d].
//
//   theta: log P_i = sum_{i' <= i} theta_{i'}           (cumulative sums)
//   eta:   eta_i   = sum_{i' >= i} P_{i'}               (tail sums)
//
// Both live in arrays congruent to the tensor. Transforms are separable:
// one backward/forward difference or cumulative sum per mode, O(d N).

#include <cstddef>
#include <optional>
#include <vector>

#include "ltr/tensor.hpp"

namespace ltr {

inline constexpr double kNormalizationTol = 1e-9;
inline constexpr double kDefaultBingoTol = 1e-8;

struct ThetaCoords {
  DenseTensor values;
};

struct EtaCoords {
  DenseTensor values;
};

enum class ParamKind { Root, OneBody, ManyBody };

/// Root is (1,...,1). OneBody carries the mode k and index j > 1 of its only
/// non-unit component.
struct ParamClass {
  ParamKind kind = ParamKind::Root;
  std::size_t mode = 0;
  std::size_t index = 0;

  friend bool operator==(const ParamClass&, const ParamClass&) = default;
};

/// Throws NonPositiveError naming `what` if any element is <= 0.
void require_positive(const DenseTensor& t, const char* what);

/// Replaces every element below `floor` with `floor`. The default floor is
/// 1e-12 times the largest element. Negative input is rejected.
DenseTensor clamp_floor(const DenseTensor& t, std::optional<double> floor = std::nullopt);

/// Tail sums. With `normalized` set the tensor must already sum to 1.
EtaCoords eta_from_tensor(const DenseTensor& t, bool normalized = false);

/// Inverse of eta_from_tensor: P_i = sum_{eps in {0,1}^d} (-1)^|eps| eta_{i+eps},
/// eta outside the grid taken as 0. Throws NonPositiveError when the result
/// has a non-positive element (the eta array was not a valid tail-sum array).
DenseTensor tensor_from_eta(const EtaCoords& eta);

/// Moebius function of the grid poset, from the recursion
/// mu(x, x) = 1, mu(x, y) = -sum_{x <= z < y} mu(x, z), 0 unless x <= y.
/// Cost grows with the volume of the box [lower, upper].
long mobius_coefficient(const MultiIndex& lower, const MultiIndex& upper);

/// Backward differences of log P along every mode. theta at (1,...,1) is
/// log P_{1,...,1}. Requires a strictly positive tensor; when
/// `require_normalized` is set it must also sum to 1 within 1e-9.
ThetaCoords theta_from_tensor(const DenseTensor& t, bool require_normalized = true);

/// P_i = exp(sum_{i' <= i} theta_{i'}). With `renormalize` set, theta at
/// (1,...,1) is first replaced by theta_normalizer(theta) so the output sums
/// to 1. Throws std::overflow_error if the result is not finite.
DenseTensor tensor_from_theta(const ThetaCoords& theta, bool renormalize = false);

/// The value of theta_{1,...,1} that normalizes the remaining entries:
/// -log sum_{i} exp(sum_{(1,...,1) != i' <= i} theta_{i'}).
double theta_normalizer(const ThetaCoords& theta);

ParamClass classify(const MultiIndex& idx);

/// Rows i in [2, I_k] of the mode-k expansion that are proportional to row
/// i - 1: max_j |r_j / r_1 - 1| <= tol with r_j = P^(k)_{i,j} / P^(k)_{i-1,j}.
std::vector<std::size_t> detect_bingos(const DenseTensor& t, std::size_t mode,
                                       double tol = kDefaultBingoTol);

/// Same rows found through the 2-D theta of the mode-k expansion: row i is a
/// bingo when |theta^(k)_{i,j}| <= tol for every column j >= 2.
std::vector<std::size_t> detect_bingos_theta(const DenseTensor& t, std::size_t mode,
                                             double tol = kDefaultBingoTol);

/// Per-mode vectors, one per mode, indexed from 0 (entry j-1 holds index j).
using ModeVectors = std::vector<std::vector<double>>;

/// Mean-field relation on the rank-1 space:
/// theta_j = log((eta_j - eta_{j+1}) / (eta_{j-1} - eta_j)), j >= 2, with
/// eta_0 = eta_{I+1} = 0. Entry 0 of each output vector is unused and set to 0.
ModeVectors rank1_theta_from_eta(const ModeVectors& one_body_eta);

/// eta_j = sum_{i >= j} exp(c_i) / sum_i exp(c_i), c_i = sum_{i'=2}^{i} theta_{i'}.
/// Entry 0 of each input vector is ignored.
ModeVectors rank1_eta_from_theta(const ModeVectors& one_body_theta);

/// One-body entries (1,...,1,j,1,...,1) of a coordinate array, j = 1..I_k.
ModeVectors one_body_values(const DenseTensor& coords);

}  // namespace ltr
