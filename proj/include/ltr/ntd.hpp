#pragma once

// Non-negative Tucker decomposition by multiplicative updates, used as the
// comparison baseline in benchmarks.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ltr/reduce.hpp"
#include "ltr/tensor.hpp"

namespace ltr {

struct TuckerModel {
  DenseTensor core;                      // r_1 x ... x r_d
  std::vector<Eigen::MatrixXd> factors;  // A^(k) is I_k x r_k
};

/// core x_1 A^(1) x_2 ... x_d A^(d).
DenseTensor tucker_reconstruct(const TuckerModel& model);

enum class NtdObjective { LeastSquares, KullbackLeibler };

struct NtdOptions {
  NtdObjective objective = NtdObjective::LeastSquares;
  int max_iters = 200;
  // Stop once |f_prev - f| / f_prev drops below this.
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
};

struct NtdResult {
  TuckerModel model;
  // Objective before the first iteration and after every iteration:
  // squared Frobenius error for LS, generalized KL divergence for KL.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Core and factors start uniform in (0, 1) from `seed`. Throws
/// std::runtime_error if the objective becomes non-finite.
NtdResult ntd_fit(const DenseTensor& t, const TuckerRank& target, const NtdOptions& options = {});

}  // namespace ltr
