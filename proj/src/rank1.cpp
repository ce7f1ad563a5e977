#include "ltr/rank1.hpp"

#include <cmath>
#include <stdexcept>

#include "ltr/infogeo.hpp"

namespace ltr {

DenseTensor Rank1Factors::reconstruct() const {
  DenseTensor t = outer_product(factors);
  for (double& v : t.data()) v *= lambda;
  return t;
}

Rank1Approximation best_rank1(const DenseTensor& t) {
  if (!t.all_non_negative()) throw std::domain_error("best_rank1: negative element");
  const double total = total_sum(t);
  if (!(total > 0.0)) throw std::domain_error("best_rank1: tensor sums to zero");

  const std::size_t d = t.order();
  Rank1Approximation out;
  out.factors.factors.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) out.factors.factors.push_back(axis_sums(t, k));
  out.factors.lambda = std::pow(total, 1.0 - static_cast<double>(d));

  // total * prod_k (s^(k) / total) equals lambda * prod_k s^(k) but keeps the
  // intermediate products near the scale of the data.
  std::vector<std::vector<double>> marginals = out.factors.factors;
  for (auto& m : marginals) {
    for (double& v : m) v /= total;
  }
  out.tensor = outer_product(marginals);
  for (double& v : out.tensor.data()) v *= total;
  return out;
}

bool is_rank1(const DenseTensor& t, double tol) {
  require_positive(t, "is_rank1");
  const EtaCoords eta = eta_from_tensor(normalized(t));
  const ModeVectors one_body = one_body_values(eta.values);
  MultiIndex idx(t.order(), 1);
  std::size_t off = 0;
  do {
    double prod = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) prod *= one_body[k][idx[k] - 1];
    if (std::abs(eta.values[off] - prod) > tol) return false;
    ++off;
  } while (next_index(idx, t.shape()));
  return true;
}

}  // namespace ltr
