#include "ltr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ltr/infogeo.hpp"

namespace ltr {

namespace {

void require_same_shape(const DenseTensor& a, const DenseTensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shapes " + a.shape().to_string() +
                                " and " + b.shape().to_string() + " differ");
  }
}

}  // namespace

RankEstimate numerical_tucker_rank(const DenseTensor& t, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("svd tolerance must lie in (0, 1)");
  if (!t.all_finite()) throw std::domain_error("numerical_tucker_rank: non-finite element");
  RankEstimate est;
  est.tol = tol;
  for (std::size_t k = 1; k <= t.order(); ++k) {
    Eigen::MatrixXd m = mode_k_expansion(t, k);
    // Jacobi on the tall orientation; the QR preconditioner reduces it to a
    // square problem of size min(rows, cols).
    if (m.rows() < m.cols()) m.transposeInPlace();
    Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> values(sv.data(), sv.data() + sv.size());
    const double top = values.empty() ? 0.0 : values.front();
    std::size_t rank = 0;
    for (double v : values) {
      if (v > tol * top) ++rank;
    }
    est.ranks.push_back(rank);
    est.singular_values.push_back(std::move(values));
  }
  return est;
}

double kl_divergence(const DenseTensor& p, const DenseTensor& q) {
  require_same_shape(p, q, "kl_divergence");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi > 0.0) {
      if (!(qi > 0.0)) return std::numeric_limits<double>::infinity();
      acc += pi * std::log(pi / qi) - pi + qi;
    } else {
      acc += qi;
    }
  }
  return acc;
}

double ls_error(const DenseTensor& p, const DenseTensor& q) {
  require_same_shape(p, q, "ls_error");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<bool> bingo_index_mask(const BingoSpec& spec, const Shape& shape) {
  spec.validate(shape);
  const std::size_t d = shape.order();
  // interior[k][i-1]: index i lies strictly after the anchor of a mode-k block.
  std::vector<std::vector<bool>> interior(d);
  for (std::size_t k = 1; k <= d; ++k) {
    interior[k - 1].assign(shape.extent(k), false);
    for (const ModeBlock& b : blocks_from_spec(spec, shape, k)) {
      for (std::size_t i = b.lo + 1; i <= b.hi; ++i) interior[k - 1][i - 1] = true;
    }
  }
  std::vector<bool> mask(shape.num_elements(), false);
  MultiIndex idx(d, 1);
  std::size_t off = 0;
  do {
    std::size_t above_one = 0;
    for (std::size_t v : idx) above_one += v > 1 ? 1 : 0;
    for (std::size_t k = 0; k < d && !mask[off]; ++k) {
      // Needs i_k interior plus some other component above 1.
      if (interior[k][idx[k] - 1] && above_one >= 2) mask[off] = true;
    }
    ++off;
  } while (next_index(idx, shape));
  return mask;
}

ProjectionCertificate certify_projection(const DenseTensor& input, const DenseTensor& output,
                                         const BingoSpec& spec,
                                         const CertificateTolerances& tols) {
  require_same_shape(input, output, "certify_projection");
  spec.validate(input.shape());
  require_positive(input, "certify_projection input");
  require_positive(output, "certify_projection output");

  const DenseTensor p = normalized(input);
  const DenseTensor q = normalized(output);
  const std::vector<bool> omega = bingo_index_mask(spec, input.shape());
  const ThetaCoords theta_q = theta_from_tensor(q);
  const EtaCoords eta_p = eta_from_tensor(p);
  const EtaCoords eta_q = eta_from_tensor(q);

  ProjectionCertificate cert;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i]) {
      ++cert.omega_size;
      cert.max_theta_on_omega = std::max(cert.max_theta_on_omega, std::abs(theta_q.values[i]));
    } else {
      cert.max_eta_drift_off_omega = std::max(
          cert.max_eta_drift_off_omega, std::abs(eta_q.values[i] - eta_p.values[i]));
    }
  }
  for (std::size_t k = 1; k <= input.order(); ++k) {
    const auto in_sums = axis_sums(input, k);
    const auto out_sums = axis_sums(output, k);
    for (std::size_t i = 0; i < in_sums.size(); ++i) {
      const double scale = std::max(std::abs(in_sums[i]), std::numeric_limits<double>::min());
      cert.max_axis_sum_drift =
          std::max(cert.max_axis_sum_drift, std::abs(out_sums[i] - in_sums[i]) / scale);
    }
  }
  cert.theta_pass = cert.max_theta_on_omega <= tols.theta;
  cert.eta_pass = cert.max_eta_drift_off_omega <= tols.eta;
  cert.axis_sum_pass = cert.max_axis_sum_drift <= tols.axis_sum;
  return cert;
}

bool bingo_rank_bound_check(const DenseTensor& t, std::size_t mode, double bingo_tol,
                            double svd_tol) {
  const std::size_t bingos = detect_bingos(t, mode, bingo_tol).size();
  const std::size_t rank = numerical_tucker_rank(t, svd_tol).ranks[mode - 1];
  return rank <= t.shape().extent(mode) - bingos;
}

GridOracleResult rank1_grid_oracle(const DenseTensor& t, double step) {
  if (t.shape() != Shape{2, 2}) throw std::invalid_argument("rank1_grid_oracle: needs a 2x2 tensor");
  if (!(step > 0.0 && step <= 0.1)) throw std::invalid_argument("rank1_grid_oracle: step outside (0, 0.1]");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  GridOracleResult best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  DenseTensor q{Shape{2, 2}};
  for (std::size_t ia = 1; ia < n; ++ia) {
    const double a = static_cast<double>(ia) * step;
    for (std::size_t ib = 1; ib < n; ++ib) {
      const double b = static_cast<double>(ib) * step;
      q[0] = a * b;
      q[1] = a * (1.0 - b);
      q[2] = (1.0 - a) * b;
      q[3] = (1.0 - a) * (1.0 - b);
      const double kl = kl_divergence(t, q);
      if (kl < best.best_kl) best = {kl, a, b};
    }
  }
  return best;
}

OptimalityProbe optimality_probe(const DenseTensor& input, const DenseTensor& output,
                                 const BingoSpec& spec, std::size_t samples, double sigma,
                                 std::uint64_t seed, double slack) {
  require_same_shape(input, output, "optimality_probe");
  const DenseTensor p = normalized(input);
  const DenseTensor q = normalized(output);
  const std::vector<bool> omega = bingo_index_mask(spec, input.shape());
  const ThetaCoords theta = theta_from_tensor(q);

  OptimalityProbe probe;
  probe.output_kl = kl_divergence(p, q);
  probe.min_candidate_kl = std::numeric_limits<double>::infinity();
  probe.samples = samples;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t s = 0; s < samples; ++s) {
    ThetaCoords candidate = theta;
    for (std::size_t i = 1; i < omega.size(); ++i) {
      if (!omega[i]) candidate.values[i] += noise(rng);
    }
    const double kl = kl_divergence(p, tensor_from_theta(candidate, /*renormalize=*/true));
    probe.min_candidate_kl = std::min(probe.min_candidate_kl, kl);
    if (kl < probe.output_kl - slack) ++probe.violations;
  }
  return probe;
}

}  // namespace ltr
