#pragma once

// Closed-form rank-1 approximation minimizing the generalized KL divergence
// sum p log(p/q) - p + q over non-negative rank-1 tensors q:
//
//   q = lambda * s^(1) (x) ... (x) s^(d),
//   s^(k)_i = sum of all elements with index i on mode k,
//   lambda  = (sum of all elements)^(1-d).
//
// For a tensor summing to 1 this is the product of its marginals (the
// mean-field approximation) and lambda = 1.

#include <vector>

#include "ltr/tensor.hpp"

namespace ltr {

struct Rank1Factors {
  double lambda = 1.0;
  std::vector<std::vector<double>> factors;

  DenseTensor reconstruct() const;
};

struct Rank1Approximation {
  DenseTensor tensor;
  Rank1Factors factors;
};

/// Requires non-negative input with a positive total; zeros are allowed.
Rank1Approximation best_rank1(const DenseTensor& t);

/// True when every many-body eta of normalize(t) equals the product of its
/// one-body etas to within `tol`. Requires strictly positive input.
bool is_rank1(const DenseTensor& t, double tol = 1e-9);

}  // namespace ltr
