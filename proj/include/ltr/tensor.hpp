#pragma once

// Dense row-major tensors and the multilinear primitives used by the rest of
// the library.
//
// Index convention: every mode number and every element index that crosses
// the public API is 1-based (mode k in [1, d], index i in [1, I_k]).
// Containers (std::vector, spans) are still indexed from 0.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ltr {

inline constexpr std::size_t kMaxOrder = 8;

/// 1-based multi-index (i_1, ..., i_d).
using MultiIndex = std::vector<std::size_t>;

class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> dims);
  Shape(std::initializer_list<std::size_t> dims);

  std::size_t order() const { return dims_.size(); }
  /// Extent I_k of a 1-based mode.
  std::size_t extent(std::size_t mode) const;
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t num_elements() const { return num_elements_; }

  /// Row-major stride (in elements) of a 1-based mode.
  std::size_t stride(std::size_t mode) const;

  /// "I1xI2x...xId".
  std::string to_string(char sep = 'x') const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t num_elements_ = 0;
};

/// A contiguous index range [lo, hi] (1-based, inclusive) along one mode.
struct ModeBlock {
  std::size_t mode = 1;
  std::size_t lo = 1;
  std::size_t hi = 1;

  std::size_t length() const { return hi - lo + 1; }
  friend bool operator==(const ModeBlock&, const ModeBlock&) = default;
};

/// Splits a row-major tensor into (outer, extent, inner) around one mode, so
/// element (p, i, q) sits at flat offset (p * extent + i) * inner + q.
struct ModeSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

ModeSplit split_at(const Shape& shape, std::size_t mode);

class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.order(); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t offset) const { return data_[offset]; }
  double& operator[](std::size_t offset) { return data_[offset]; }

  double at(const MultiIndex& idx) const { return data_[offset_of(idx)]; }
  double& at(const MultiIndex& idx) { return data_[offset_of(idx)]; }

  std::size_t offset_of(const MultiIndex& idx) const;
  MultiIndex index_of(std::size_t offset) const;

  bool all_positive() const;
  bool all_non_negative() const;
  bool all_finite() const;
  double max_element() const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Advances a 1-based multi-index in row-major order. Returns false once the
/// index wraps past the last element.
bool next_index(MultiIndex& idx, const Shape& shape);

/// The I_k x prod_{m != k} I_m matricization. Column j of element
/// (i_1, ..., i_d) is 1 + sum_{l != k} (i_l - 1) J_l with
/// J_l = prod_{m < l, m != k} I_m, so the lowest remaining mode runs fastest.
Eigen::MatrixXd mode_k_expansion(const DenseTensor& t, std::size_t mode);

/// Inverse of mode_k_expansion.
DenseTensor fold_mode_k(const Eigen::MatrixXd& m, const Shape& shape,
                        std::size_t mode);

/// s^(1) (x) ... (x) s^(d).
DenseTensor outer_product(std::span<const std::vector<double>> vectors);

/// Sum over every element whose index along `mode` equals `index`.
double axis_sum(const DenseTensor& t, std::size_t mode, std::size_t index);
/// All axis sums of one mode at once; entry i-1 holds axis_sum(t, mode, i).
std::vector<double> axis_sums(const DenseTensor& t, std::size_t mode);
double total_sum(const DenseTensor& t);

DenseTensor extract_block(const DenseTensor& t, const ModeBlock& b);
DenseTensor replace_block(const DenseTensor& t, const ModeBlock& b,
                          const DenseTensor& sub);
void validate_block(const Shape& shape, const ModeBlock& b);

DenseTensor scaled(const DenseTensor& t, double factor);
/// t / total_sum(t). Throws if the sum is not positive.
DenseTensor normalized(const DenseTensor& t);

/// t x_mode m, where m is J x I_mode. The result has extent J along `mode`.
DenseTensor mode_product(const DenseTensor& t, const Eigen::MatrixXd& m,
                         std::size_t mode);

/// Elements drawn i.i.d. from uniform [0, 1) with a seeded mt19937_64.
DenseTensor uniform_random(const Shape& shape, std::uint64_t seed);

double max_abs_diff(const DenseTensor& a, const DenseTensor& b);

}  // namespace ltr
