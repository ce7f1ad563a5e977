#include "ltr/ntd.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ltr/verify.hpp"

namespace ltr {

namespace {

constexpr double kDenominatorFloor = 1e-16;

// G_(n) H_(n)^T for two tensors that agree on every mode except n.
Eigen::MatrixXd contract_all_but(const DenseTensor& a, const DenseTensor& b, std::size_t mode) {
  return mode_k_expansion(a, mode) * mode_k_expansion(b, mode).transpose();
}

DenseTensor multiply_all_but(DenseTensor t, const std::vector<Eigen::MatrixXd>& mats,
                             std::size_t skip) {
  for (std::size_t m = 1; m <= mats.size(); ++m) {
    if (m != skip) t = mode_product(t, mats[m - 1], m);
  }
  return t;
}

double objective(const DenseTensor& x, const DenseTensor& xhat, NtdObjective obj) {
  if (obj == NtdObjective::LeastSquares) {
    const double e = ls_error(x, xhat);
    return e * e;
  }
  return kl_divergence(x, xhat);
}

DenseTensor ratio(const DenseTensor& x, const DenseTensor& xhat) {
  DenseTensor z = x;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] / std::max(xhat[i], kDenominatorFloor);
  return z;
}

void update_factor_ls(const DenseTensor& x, TuckerModel& m, std::size_t n) {
  std::vector<Eigen::MatrixXd> transposed, grams;
  for (const auto& a : m.factors) {
    transposed.push_back(a.transpose());
    grams.push_back(a.transpose() * a);
  }
  const Eigen::MatrixXd num = contract_all_but(multiply_all_but(x, transposed, n), m.core, n);
  const Eigen::MatrixXd den =
      m.factors[n - 1] * contract_all_but(multiply_all_but(m.core, grams, n), m.core, n);
  auto& a = m.factors[n - 1];
  a = a.cwiseProduct(num).cwiseQuotient(den.array().max(kDenominatorFloor).matrix());
}

void update_core_ls(const DenseTensor& x, TuckerModel& m) {
  std::vector<Eigen::MatrixXd> transposed, grams;
  for (const auto& a : m.factors) {
    transposed.push_back(a.transpose());
    grams.push_back(a.transpose() * a);
  }
  const DenseTensor num = multiply_all_but(x, transposed, 0);
  const DenseTensor den = multiply_all_but(m.core, grams, 0);
  for (std::size_t i = 0; i < m.core.size(); ++i) {
    m.core[i] *= num[i] / std::max(den[i], kDenominatorFloor);
  }
}

void update_factor_kl(const DenseTensor& x, TuckerModel& m, std::size_t n) {
  const DenseTensor z = ratio(x, tucker_reconstruct(m));
  std::vector<Eigen::MatrixXd> transposed, colsums;
  for (const auto& a : m.factors) {
    transposed.push_back(a.transpose());
    colsums.push_back(a.colwise().sum());
  }
  const Eigen::MatrixXd num = contract_all_but(multiply_all_but(z, transposed, n), m.core, n);
  // Row sums of G_(n) (x_{m != n} A^(m))^T: shape r_n along mode n, 1 elsewhere.
  const DenseTensor weight = multiply_all_but(m.core, colsums, n);
  auto& a = m.factors[n - 1];
  for (Eigen::Index r = 0; r < a.cols(); ++r) {
    const double den = std::max(weight[static_cast<std::size_t>(r)], kDenominatorFloor);
    a.col(r) = a.col(r).cwiseProduct(num.col(r)) / den;
  }
}

void update_core_kl(const DenseTensor& x, TuckerModel& m) {
  const DenseTensor z = ratio(x, tucker_reconstruct(m));
  std::vector<Eigen::MatrixXd> transposed;
  std::vector<std::vector<double>> colsums;
  for (const auto& a : m.factors) {
    transposed.push_back(a.transpose());
    const Eigen::RowVectorXd c = a.colwise().sum();
    colsums.emplace_back(c.data(), c.data() + c.size());
  }
  const DenseTensor num = multiply_all_but(z, transposed, 0);
  const DenseTensor den = outer_product(colsums);
  for (std::size_t i = 0; i < m.core.size(); ++i) {
    m.core[i] *= num[i] / std::max(den[i], kDenominatorFloor);
  }
}

}  // namespace

DenseTensor tucker_reconstruct(const TuckerModel& model) {
  if (model.factors.size() != model.core.order()) {
    throw std::invalid_argument("tucker_reconstruct: need one factor per core mode");
  }
  for (std::size_t k = 0; k < model.factors.size(); ++k) {
    if (static_cast<std::size_t>(model.factors[k].cols()) != model.core.shape().dims()[k]) {
      throw std::invalid_argument("tucker_reconstruct: factor " + std::to_string(k + 1) +
                                  " does not match the core extent");
    }
  }
  return multiply_all_but(model.core, model.factors, 0);
}

NtdResult ntd_fit(const DenseTensor& t, const TuckerRank& target, const NtdOptions& options) {
  target.validate(t.shape());
  if (!t.all_non_negative()) throw std::domain_error("ntd_fit: negative element");
  if (options.max_iters < 1) throw std::invalid_argument("ntd_fit: max_iters must be >= 1");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&] {
    double v = 0.0;
    while (v == 0.0) v = unif(rng);  // open interval (0, 1)
    return v;
  };

  NtdResult res;
  const std::size_t d = t.order();
  for (std::size_t k = 0; k < d; ++k) {
    Eigen::MatrixXd a(t.shape().dims()[k], target.ranks[k]);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = draw();
    }
    res.model.factors.push_back(std::move(a));
  }
  res.model.core = DenseTensor{Shape(target.ranks)};
  for (double& v : res.model.core.data()) v = draw();

  const bool ls = options.objective == NtdObjective::LeastSquares;
  double prev = objective(t, tucker_reconstruct(res.model), options.objective);
  res.objective_trace.push_back(prev);
  for (int it = 0; it < options.max_iters; ++it) {
    for (std::size_t n = 1; n <= d; ++n) {
      ls ? update_factor_ls(t, res.model, n) : update_factor_kl(t, res.model, n);
    }
    ls ? update_core_ls(t, res.model) : update_core_kl(t, res.model);

    const double cur = objective(t, tucker_reconstruct(res.model), options.objective);
    if (!std::isfinite(cur)) {
      throw std::runtime_error("ntd_fit: objective became non-finite at iteration " +
                               std::to_string(it + 1));
    }
    res.objective_trace.push_back(cur);
    res.iterations = it + 1;
    if (prev > 0.0 && std::abs(prev - cur) / prev < options.rel_tol) {
      res.converged = true;
      break;
    }
    prev = cur;
  }
  return res;
}

}  // namespace ltr
