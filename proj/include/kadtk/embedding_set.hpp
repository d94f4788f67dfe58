#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kadtk/types.hpp"

namespace kadtk {

/// Dense row-major N x d matrix of embedding vectors plus provenance.
/// Payloads keep their source precision (f32 or f64); all arithmetic in the
/// toolkit promotes to double. Construction validates shape, finiteness and
/// label hygiene, so downstream code can assume a well-formed set.
class EmbeddingSet {
 public:
  EmbeddingSet(std::vector<double> data, std::size_t rows, std::size_t cols,
               std::string label, std::string source);
  EmbeddingSet(std::vector<float> data, std::size_t rows, std::size_t cols,
               std::string label, std::string source);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Dtype dtype() const { return dtype_; }
  const std::string& label() const { return label_; }
  const std::string& source() const { return source_; }
  void set_label(std::string label);

  /// Entry (i, j) promoted to double. Convenience accessor; hot loops use
  /// the typed spans instead.
  double value(std::size_t i, std::size_t j) const {
    return dtype_ == Dtype::f32 ? static_cast<double>(f32_[i * cols_ + j])
                                : f64_[i * cols_ + j];
  }

  std::span<const float> f32_values() const { return {f32_.data(), f32_.size()}; }
  std::span<const double> f64_values() const { return {f64_.data(), f64_.size()}; }

  /// Same rows re-encoded at the requested precision (f64 -> f32 rounds).
  EmbeddingSet cast(Dtype target) const;

  /// Gather of the given rows, in the given order, same dtype.
  EmbeddingSet take_rows(std::span<const std::size_t> indices) const;

  /// Promoted copy as an Eigen matrix (for the moment/eigen stages).
  Mat to_matrix() const;

  /// Exact payload equality: same shape, dtype and bit pattern.
  bool bitwise_equal(const EmbeddingSet& other) const;

 private:
  void validate() const;

  Dtype dtype_;
  std::vector<float> f32_;
  std::vector<double> f64_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::string label_;
  std::string source_;
};

}  // namespace kadtk
