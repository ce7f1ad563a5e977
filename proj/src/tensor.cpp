#include "ltr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ltr {

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
  if (mode < 1 || mode > shape.order()) {
    throw std::out_of_range("mode " + std::to_string(mode) +
                            " out of range for order-" +
                            std::to_string(shape.order()) + " tensor");
  }
}

}  // namespace

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("shape needs at least one mode");
  if (dims_.size() > kMaxOrder) {
    throw std::invalid_argument("tensor order " + std::to_string(dims_.size()) +
                                " exceeds the maximum of " +
                                std::to_string(kMaxOrder));
  }
  num_elements_ = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("shape extents must be positive");
    if (num_elements_ > std::numeric_limits<std::size_t>::max() / d) {
      throw std::length_error("tensor element count overflows size_t");
    }
    num_elements_ *= d;
  }
}

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::vector<std::size_t>(dims)) {}

std::size_t Shape::extent(std::size_t mode) const {
  check_mode(*this, mode);
  return dims_[mode - 1];
}

std::size_t Shape::stride(std::size_t mode) const {
  check_mode(*this, mode);
  std::size_t s = 1;
  for (std::size_t m = mode; m < dims_.size(); ++m) s *= dims_[m];
  return s;
}

std::string Shape::to_string(char sep) const {
  std::string out;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) out += sep;
    out += std::to_string(dims_[k]);
  }
  return out;
}

ModeSplit split_at(const Shape& shape, std::size_t mode) {
  check_mode(shape, mode);
  ModeSplit s;
  const auto& dims = shape.dims();
  for (std::size_t m = 0; m + 1 < mode; ++m) s.outer *= dims[m];
  s.extent = dims[mode - 1];
  for (std::size_t m = mode; m < dims.size(); ++m) s.inner *= dims[m];
  return s;
}

DenseTensor::DenseTensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_.num_elements(), fill) {
  if (shape_.order() == 0) throw std::invalid_argument("empty shape");
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.order() == 0) throw std::invalid_argument("empty shape");
  if (data_.size() != shape_.num_elements()) {
    throw std::invalid_argument("data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_.to_string());
  }
}

std::size_t DenseTensor::offset_of(const MultiIndex& idx) const {
  const auto& dims = shape_.dims();
  if (idx.size() != dims.size()) {
    throw std::out_of_range("multi-index has wrong length");
  }
  std::size_t off = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (idx[k] < 1 || idx[k] > dims[k]) {
      throw std::out_of_range("index component out of range");
    }
    off = off * dims[k] + (idx[k] - 1);
  }
  return off;
}

MultiIndex DenseTensor::index_of(std::size_t offset) const {
  if (offset >= data_.size()) throw std::out_of_range("flat offset out of range");
  const auto& dims = shape_.dims();
  MultiIndex idx(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    idx[k] = offset % dims[k] + 1;
    offset /= dims[k];
  }
  return idx;
}

bool DenseTensor::all_positive() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v > 0.0; });
}

bool DenseTensor::all_non_negative() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

bool DenseTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double DenseTensor::max_element() const {
  return *std::max_element(data_.begin(), data_.end());
}

bool next_index(MultiIndex& idx, const Shape& shape) {
  const auto& dims = shape.dims();
  for (std::size_t k = dims.size(); k-- > 0;) {
    if (idx[k] < dims[k]) {
      ++idx[k];
      return true;
    }
    idx[k] = 1;
  }
  return false;
}

namespace {

// J_l for every mode l != k (0 for l == k).
std::vector<std::size_t> expansion_strides(const Shape& shape, std::size_t mode) {
  const auto& dims = shape.dims();
  std::vector<std::size_t> j(dims.size(), 0);
  std::size_t acc = 1;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (l + 1 == mode) continue;
    j[l] = acc;
    acc *= dims[l];
  }
  return j;
}

}  // namespace

Eigen::MatrixXd mode_k_expansion(const DenseTensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  check_mode(shape, mode);
  const std::size_t rows = shape.extent(mode);
  const std::size_t cols = shape.num_elements() / rows;
  const auto jstride = expansion_strides(shape, mode);

  Eigen::MatrixXd m(rows, cols);
  MultiIndex idx(shape.order(), 1);
  std::size_t off = 0;
  do {
    std::size_t col = 0;
    for (std::size_t l = 0; l < idx.size(); ++l) col += (idx[l] - 1) * jstride[l];
    m(idx[mode - 1] - 1, col) = t[off++];
  } while (next_index(idx, shape));
  return m;
}

DenseTensor fold_mode_k(const Eigen::MatrixXd& m, const Shape& shape,
                        std::size_t mode) {
  check_mode(shape, mode);
  const std::size_t rows = shape.extent(mode);
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != shape.num_elements() / rows) {
    throw std::invalid_argument("matrix size does not match the mode-k expansion");
  }
  const auto jstride = expansion_strides(shape, mode);
  DenseTensor t(shape);
  MultiIndex idx(shape.order(), 1);
  std::size_t off = 0;
  do {
    std::size_t col = 0;
    for (std::size_t l = 0; l < idx.size(); ++l) col += (idx[l] - 1) * jstride[l];
    t[off++] = m(idx[mode - 1] - 1, col);
  } while (next_index(idx, shape));
  return t;
}

DenseTensor outer_product(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) throw std::invalid_argument("outer_product needs at least one vector");
  std::vector<std::size_t> dims;
  dims.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.empty()) throw std::invalid_argument("outer_product got an empty vector");
    dims.push_back(v.size());
  }
  DenseTensor out{Shape(std::move(dims)), 1.0};
  // Grow the product one mode at a time: after mode k the leading block holds
  // s^(1) (x) ... (x) s^(k) in row-major order.
  std::size_t filled = 1;
  for (const auto& v : vectors) {
    for (std::size_t p = filled; p-- > 0;) {
      const double base = out[p];
      for (std::size_t i = 0; i < v.size(); ++i) out[p * v.size() + i] = base * v[i];
    }
    filled *= v.size();
  }
  return out;
}

std::vector<double> axis_sums(const DenseTensor& t, std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  std::vector<double> sums(s.extent, 0.0);
  std::size_t off = 0;
  for (std::size_t p = 0; p < s.outer; ++p) {
    for (std::size_t i = 0; i < s.extent; ++i) {
      double acc = 0.0;
      for (std::size_t q = 0; q < s.inner; ++q) acc += t[off++];
      sums[i] += acc;
    }
  }
  return sums;
}

double axis_sum(const DenseTensor& t, std::size_t mode, std::size_t index) {
  const ModeSplit s = split_at(t.shape(), mode);
  if (index < 1 || index > s.extent) throw std::out_of_range("axis_sum index out of range");
  double acc = 0.0;
  for (std::size_t p = 0; p < s.outer; ++p) {
    const std::size_t base = (p * s.extent + index - 1) * s.inner;
    for (std::size_t q = 0; q < s.inner; ++q) acc += t[base + q];
  }
  return acc;
}

double total_sum(const DenseTensor& t) {
  double acc = 0.0;
  for (double v : t.data()) acc += v;
  return acc;
}

void validate_block(const Shape& shape, const ModeBlock& b) {
  check_mode(shape, b.mode);
  if (b.lo < 1 || b.lo > b.hi || b.hi > shape.extent(b.mode)) {
    throw std::out_of_range("block [" + std::to_string(b.lo) + ", " +
                            std::to_string(b.hi) + "] invalid for mode " +
                            std::to_string(b.mode) + " of extent " +
                            std::to_string(shape.extent(b.mode)));
  }
}

DenseTensor extract_block(const DenseTensor& t, const ModeBlock& b) {
  validate_block(t.shape(), b);
  const ModeSplit s = split_at(t.shape(), b.mode);
  auto dims = t.shape().dims();
  dims[b.mode - 1] = b.length();
  DenseTensor out{Shape(std::move(dims))};
  std::size_t w = 0;
  for (std::size_t p = 0; p < s.outer; ++p) {
    const std::size_t base = (p * s.extent + b.lo - 1) * s.inner;
    for (std::size_t r = 0; r < b.length() * s.inner; ++r) out[w++] = t[base + r];
  }
  return out;
}

DenseTensor replace_block(const DenseTensor& t, const ModeBlock& b,
                          const DenseTensor& sub) {
  validate_block(t.shape(), b);
  auto dims = t.shape().dims();
  dims[b.mode - 1] = b.length();
  if (sub.shape().dims() != dims) {
    throw std::invalid_argument("replacement shape " + sub.shape().to_string() +
                                " does not match block shape " +
                                Shape(dims).to_string());
  }
  const ModeSplit s = split_at(t.shape(), b.mode);
  DenseTensor out = t;
  std::size_t r = 0;
  for (std::size_t p = 0; p < s.outer; ++p) {
    const std::size_t base = (p * s.extent + b.lo - 1) * s.inner;
    for (std::size_t w = 0; w < b.length() * s.inner; ++w) out[base + w] = sub[r++];
  }
  return out;
}

DenseTensor scaled(const DenseTensor& t, double factor) {
  DenseTensor out = t;
  for (double& v : out.data()) v *= factor;
  return out;
}

DenseTensor normalized(const DenseTensor& t) {
  const double s = total_sum(t);
  if (!(s > 0.0)) throw std::domain_error("cannot normalize a tensor with non-positive sum");
  return scaled(t, 1.0 / s);
}

DenseTensor mode_product(const DenseTensor& t, const Eigen::MatrixXd& m,
                         std::size_t mode) {
  const ModeSplit s = split_at(t.shape(), mode);
  if (static_cast<std::size_t>(m.cols()) != s.extent) {
    throw std::invalid_argument("mode_product: matrix columns do not match extent");
  }
  const std::size_t rows = static_cast<std::size_t>(m.rows());
  auto dims = t.shape().dims();
  dims[mode - 1] = rows;
  DenseTensor out{Shape(std::move(dims))};
  for (std::size_t p = 0; p < s.outer; ++p) {
    // Slab p is an (extent x inner) row-major matrix; out slab = m * slab.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        in_slab(t.data().data() + p * s.extent * s.inner, s.extent, s.inner);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        out_slab(out.data().data() + p * rows * s.inner, rows, s.inner);
    out_slab.noalias() = m * in_slab;
  }
  return out;
}

DenseTensor uniform_random(const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseTensor t(shape);
  for (double& v : t.data()) v = unif(rng);
  return t;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace ltr
