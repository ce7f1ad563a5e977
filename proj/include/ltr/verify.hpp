#pragma once

// Metrics and numerical certificates for rank reduction results.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ltr/reduce.hpp"
#include "ltr/tensor.hpp"

namespace ltr {

inline constexpr double kDefaultSvdTol = 1e-8;

struct RankEstimate {
  std::vector<std::size_t> ranks;
  std::vector<std::vector<double>> singular_values;  // per mode, descending
  double tol = kDefaultSvdTol;
};

/// Per mode, the number of singular values of the mode-k expansion above
/// tol * sigma_max. Throws std::domain_error on non-finite input.
RankEstimate numerical_tucker_rank(const DenseTensor& t, double tol = kDefaultSvdTol);

/// sum p log(p/q) - p + q, with 0 log(0/q) = 0. Returns +infinity when some
/// q is 0 where p > 0.
double kl_divergence(const DenseTensor& p, const DenseTensor& q);

/// Frobenius norm of p - q.
double ls_error(const DenseTensor& p, const DenseTensor& q);

/// Flat-offset mask of the theta entries a spec forces to zero: for each
/// mode-k block [lo, hi], every index with i_k in (lo, hi] and at least one
/// other component above 1.
std::vector<bool> bingo_index_mask(const BingoSpec& spec, const Shape& shape);

struct CertificateTolerances {
  double theta = 1e-8;
  double eta = 1e-9;
  double axis_sum = 1e-9;  // relative
};

struct ProjectionCertificate {
  double max_theta_on_omega = 0.0;
  double max_eta_drift_off_omega = 0.0;
  double max_axis_sum_drift = 0.0;
  std::size_t omega_size = 0;
  bool theta_pass = false;
  bool eta_pass = false;
  bool axis_sum_pass = false;

  bool pass() const { return theta_pass && eta_pass && axis_sum_pass; }
};

/// Checks that `output` is the m-projection of `input` onto the space fixed
/// by `spec`: theta of output vanishes on the bingo index set and eta of
/// output matches eta of input everywhere else. Both tensors are normalized
/// internally and must be strictly positive.
ProjectionCertificate certify_projection(const DenseTensor& input, const DenseTensor& output,
                                         const BingoSpec& spec,
                                         const CertificateTolerances& tols = {});

/// rank_k(t) <= I_k - |detect_bingos(t, k)|.
bool bingo_rank_bound_check(const DenseTensor& t, std::size_t mode,
                            double bingo_tol = 1e-8, double svd_tol = kDefaultSvdTol);

struct GridOracleResult {
  double best_kl = 0.0;
  double a = 0.0;  // argmin u = (a, 1 - a)
  double b = 0.0;  // argmin v = (b, 1 - b)
};

/// Exhaustive scan of (a, 1-a) (x) (b, 1-b) over a, b in {step, 2 step, ...,
/// 1 - step}. Only defined for 2 x 2 tensors; step must lie in (0, 0.1].
GridOracleResult rank1_grid_oracle(const DenseTensor& t, double step);

struct OptimalityProbe {
  double output_kl = 0.0;
  double min_candidate_kl = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
};

/// Draws `samples` tensors in the same bingo space as `output` by adding
/// N(0, sigma) noise to its free theta entries (everything off the bingo index
/// set except the root) and renormalizing; counts candidates q with
/// KL(input; q) < KL(input; output) - slack. Tensors are normalized first.
OptimalityProbe optimality_probe(const DenseTensor& input, const DenseTensor& output,
                                 const BingoSpec& spec, std::size_t samples, double sigma,
                                 std::uint64_t seed, double slack = 1e-9);

}  // namespace ltr
