#include "ltr/infogeo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ltr/errors.hpp"

namespace ltr {

namespace {

// In-place x[p,i,q] -= x[p,i-1,q] for i = n-1 .. 1.
void backward_difference(DenseTensor& t, std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  for (std::size_t p = 0; p < s.outer; ++p) {
    double* slab = t.data().data() + p * s.extent * s.inner;
    for (std::size_t i = s.extent; i-- > 1;) {
      for (std::size_t q = 0; q < s.inner; ++q) {
        slab[i * s.inner + q] -= slab[(i - 1) * s.inner + q];
      }
    }
  }
}

// In-place x[p,i,q] -= x[p,i+1,q] for i = 0 .. n-2 (x past the end is 0).
void forward_difference(DenseTensor& t, std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  for (std::size_t p = 0; p < s.outer; ++p) {
    double* slab = t.data().data() + p * s.extent * s.inner;
    for (std::size_t i = 0; i + 1 < s.extent; ++i) {
      for (std::size_t q = 0; q < s.inner; ++q) {
        slab[i * s.inner + q] -= slab[(i + 1) * s.inner + q];
      }
    }
  }
}

void cumulative_sum(DenseTensor& t, std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  for (std::size_t p = 0; p < s.outer; ++p) {
    double* slab = t.data().data() + p * s.extent * s.inner;
    for (std::size_t i = 1; i < s.extent; ++i) {
      for (std::size_t q = 0; q < s.inner; ++q) {
        slab[i * s.inner + q] += slab[(i - 1) * s.inner + q];
      }
    }
  }
}

void tail_sum(DenseTensor& t, std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  for (std::size_t p = 0; p < s.outer; ++p) {
    double* slab = t.data().data() + p * s.extent * s.inner;
    for (std::size_t i = s.extent - 1; i-- > 0;) {
      for (std::size_t q = 0; q < s.inner; ++q) {
        slab[i * s.inner + q] += slab[(i + 1) * s.inner + q];
      }
    }
  }
}

void require_normalized(const DenseTensor& t, const char* what) {
  const double s = total_sum(t);
  if (std::abs(s - 1.0) > kNormalizationTol) {
    throw std::invalid_argument(std::string(what) + ": tensor sums to " +
                                std::to_string(s) + ", expected 1");
  }
}

// log sum_i exp(x_i) without overflow.
double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

// Cumulative sums of theta with the root entry forced to zero.
DenseTensor cumulative_theta_without_root(const ThetaCoords& theta) {
  DenseTensor c = theta.values;
  c[0] = 0.0;
  for (std::size_t k = 1; k <= c.order(); ++k) cumulative_sum(c, k);
  return c;
}

}  // namespace

void require_positive(const DenseTensor& t, const char* what) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0)) {
      throw NonPositiveError(std::string(what) + ": element at offset " +
                             std::to_string(i) + " is " + std::to_string(t[i]) +
                             "; strictly positive input required");
    }
  }
}

DenseTensor clamp_floor(const DenseTensor& t, std::optional<double> floor) {
  if (!t.all_non_negative()) throw NonPositiveError("clamp_floor: negative element");
  const double f = floor.value_or(1e-12 * t.max_element());
  if (!(f > 0.0)) throw std::invalid_argument("clamp_floor: floor must be positive");
  DenseTensor out = t;
  for (double& v : out.data()) v = std::max(v, f);
  return out;
}

EtaCoords eta_from_tensor(const DenseTensor& t, bool normalized) {
  require_positive(t, "eta_from_tensor");
  if (normalized) require_normalized(t, "eta_from_tensor");
  DenseTensor e = t;
  for (std::size_t k = 1; k <= e.order(); ++k) tail_sum(e, k);
  return {std::move(e)};
}

DenseTensor tensor_from_eta(const EtaCoords& eta) {
  DenseTensor p = eta.values;
  for (std::size_t k = 1; k <= p.order(); ++k) forward_difference(p, k);
  require_positive(p, "tensor_from_eta");
  return p;
}

long mobius_coefficient(const MultiIndex& lower, const MultiIndex& upper) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw std::invalid_argument("mobius_coefficient: index lengths differ");
  }
  const std::size_t d = lower.size();
  std::vector<std::size_t> box(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (lower[k] < 1 || upper[k] < 1) throw std::out_of_range("mobius_coefficient: 1-based indices");
    if (upper[k] < lower[k]) return 0;
    box[k] = upper[k] - lower[k] + 1;
  }
  // mu(z) and down-set sums S(z) = sum_{z' <= z} mu(z') over offsets z in the
  // box, visited in row-major order so every z' < z is done before z.
  // sum_{z' < z} mu(z') is the union of the down-sets of z - e_k, expanded by
  // inclusion-exclusion over the S values.
  Shape box_shape(box);
  std::vector<long> mu(box_shape.num_elements(), 0);
  std::vector<long> down(box_shape.num_elements(), 0);
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t k = d - 1; k-- > 0;) stride[k] = stride[k + 1] * box[k + 1];

  MultiIndex z(d, 0);
  for (std::size_t off = 0; off < mu.size(); ++off) {
    long strictly_below = 0;
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      std::size_t shifted = off;
      int bits = 0;
      bool inside = true;
      for (std::size_t k = 0; k < d; ++k) {
        if (!(mask & (1u << k))) continue;
        if (z[k] == 0) {
          inside = false;
          break;
        }
        shifted -= stride[k];
        ++bits;
      }
      if (!inside) continue;
      strictly_below += (bits % 2 == 1 ? 1 : -1) * down[shifted];
    }
    mu[off] = off == 0 ? 1 : -strictly_below;
    down[off] = mu[off] + strictly_below;
    for (std::size_t k = d; k-- > 0;) {
      if (++z[k] < box[k]) break;
      z[k] = 0;
    }
  }
  return mu.back();
}

ThetaCoords theta_from_tensor(const DenseTensor& t, bool require_norm) {
  require_positive(t, "theta_from_tensor");
  if (require_norm) require_normalized(t, "theta_from_tensor");
  DenseTensor th = t;
  for (double& v : th.data()) v = std::log(v);
  for (std::size_t k = 1; k <= th.order(); ++k) backward_difference(th, k);
  return {std::move(th)};
}

double theta_normalizer(const ThetaCoords& theta) {
  const DenseTensor c = cumulative_theta_without_root(theta);
  return -log_sum_exp(c.data());
}

DenseTensor tensor_from_theta(const ThetaCoords& theta, bool renormalize) {
  DenseTensor p;
  if (renormalize) {
    p = cumulative_theta_without_root(theta);
    const double root = -log_sum_exp(p.data());
    for (double& v : p.data()) v = std::exp(v + root);
  } else {
    p = theta.values;
    for (std::size_t k = 1; k <= p.order(); ++k) cumulative_sum(p, k);
    for (double& v : p.data()) v = std::exp(v);
  }
  if (!p.all_finite()) throw std::overflow_error("tensor_from_theta: non-finite element");
  return p;
}

ParamClass classify(const MultiIndex& idx) {
  ParamClass c;
  std::size_t above_one = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 1) throw std::out_of_range("classify: 1-based indices");
    if (idx[k] > 1) {
      ++above_one;
      c.mode = k + 1;
      c.index = idx[k];
    }
  }
  if (above_one == 0) return {ParamKind::Root, 0, 0};
  if (above_one == 1) {
    c.kind = ParamKind::OneBody;
    return c;
  }
  return {ParamKind::ManyBody, 0, 0};
}

std::vector<std::size_t> detect_bingos(const DenseTensor& t, std::size_t mode,
                                       double tol) {
  require_positive(t, "detect_bingos");
  const Eigen::MatrixXd m = mode_k_expansion(t, mode);
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    const double r1 = m(i, 0) / m(i - 1, 0);
    double worst = 0.0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) / m(i - 1, j) / r1 - 1.0));
    }
    if (worst <= tol) rows.push_back(static_cast<std::size_t>(i) + 1);
  }
  return rows;
}

std::vector<std::size_t> detect_bingos_theta(const DenseTensor& t, std::size_t mode,
                                             double tol) {
  require_positive(t, "detect_bingos_theta");
  const Eigen::MatrixXd logm = mode_k_expansion(t, mode).array().log().matrix();
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 1; i < logm.rows(); ++i) {
    double worst = 0.0;
    for (Eigen::Index j = 1; j < logm.cols(); ++j) {
      const double th = logm(i, j) - logm(i - 1, j) - logm(i, j - 1) + logm(i - 1, j - 1);
      worst = std::max(worst, std::abs(th));
    }
    if (worst <= tol) rows.push_back(static_cast<std::size_t>(i) + 1);
  }
  return rows;
}

ModeVectors rank1_theta_from_eta(const ModeVectors& one_body_eta) {
  ModeVectors out;
  out.reserve(one_body_eta.size());
  for (const auto& eta : one_body_eta) {
    if (eta.empty()) throw std::invalid_argument("rank1_theta_from_eta: empty mode");
    const std::size_t n = eta.size();
    auto at = [&](std::size_t j) {  // 1-based with zero boundary
      return (j == 0 || j > n) ? 0.0 : eta[j - 1];
    };
    std::vector<double> th(n, 0.0);
    for (std::size_t j = 2; j <= n; ++j) {
      const double upper = at(j) - at(j + 1);
      const double lower = at(j - 1) - at(j);
      if (!(upper > 0.0) || !(lower > 0.0)) {
        throw std::domain_error("rank1_theta_from_eta: eta must be strictly decreasing");
      }
      th[j - 1] = std::log(upper / lower);
    }
    out.push_back(std::move(th));
  }
  return out;
}

ModeVectors rank1_eta_from_theta(const ModeVectors& one_body_theta) {
  ModeVectors out;
  out.reserve(one_body_theta.size());
  for (const auto& th : one_body_theta) {
    if (th.empty()) throw std::invalid_argument("rank1_eta_from_theta: empty mode");
    const std::size_t n = th.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + th[i];
    const double shift = *std::max_element(cum.begin(), cum.end());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(cum[i] - shift);
    std::vector<double> eta(n, 0.0);
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      tail += w[i];
      eta[i] = tail;
    }
    const double z = tail;
    for (double& e : eta) e /= z;
    for (double e : eta) {
      if (!std::isfinite(e)) throw std::overflow_error("rank1_eta_from_theta: overflow");
    }
    out.push_back(std::move(eta));
  }
  return out;
}

ModeVectors one_body_values(const DenseTensor& coords) {
  const Shape& shape = coords.shape();
  ModeVectors out(shape.order());
  for (std::size_t k = 1; k <= shape.order(); ++k) {
    const std::size_t stride = shape.stride(k);
    auto& v = out[k - 1];
    v.resize(shape.extent(k));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = coords[j * stride];
  }
  return out;
}

}  // namespace ltr
