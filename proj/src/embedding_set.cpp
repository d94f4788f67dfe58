#include "kadtk/embedding_set.hpp"

#include <cmath>
#include <cstring>
#include <utility>

namespace kadtk {

namespace {

void check_label_text(const std::string& text, const char* field) {
  if (text.find(',') != std::string::npos || text.find('\n') != std::string::npos ||
      text.find('\r') != std::string::npos) {
    throw InputError(std::string(field) + " must not contain commas or line breaks: \"" +
                     text + "\"");
  }
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::vector<double> data, std::size_t rows, std::size_t cols,
                           std::string label, std::string source)
    : dtype_(Dtype::f64),
      f64_(std::move(data)),
      rows_(rows),
      cols_(cols),
      label_(std::move(label)),
      source_(std::move(source)) {
  validate();
}

EmbeddingSet::EmbeddingSet(std::vector<float> data, std::size_t rows, std::size_t cols,
                           std::string label, std::string source)
    : dtype_(Dtype::f32),
      f32_(std::move(data)),
      rows_(rows),
      cols_(cols),
      label_(std::move(label)),
      source_(std::move(source)) {
  validate();
}

void EmbeddingSet::validate() const {
  if (rows_ < 1 || cols_ < 1) {
    throw InputError("embedding set must have N >= 1 rows and d >= 1 columns (got " +
                     std::to_string(rows_) + " x " + std::to_string(cols_) + ")");
  }
  const std::size_t expect = rows_ * cols_;
  const std::size_t got = dtype_ == Dtype::f32 ? f32_.size() : f64_.size();
  if (got != expect) {
    throw InputError("embedding payload holds " + std::to_string(got) +
                     " values, shape requires " + std::to_string(expect));
  }
  check_label_text(label_, "label");
  check_label_text(source_, "source");

  if (dtype_ == Dtype::f32) {
    for (std::size_t i = 0; i < f32_.size(); ++i) {
      if (!std::isfinite(f32_[i])) {
        throw InputError("non-finite embedding entry at flat index " + std::to_string(i) +
                         " in \"" + label_ + "\"");
      }
    }
  } else {
    for (std::size_t i = 0; i < f64_.size(); ++i) {
      if (!std::isfinite(f64_[i])) {
        throw InputError("non-finite embedding entry at flat index " + std::to_string(i) +
                         " in \"" + label_ + "\"");
      }
    }
  }
}

void EmbeddingSet::set_label(std::string label) {
  check_label_text(label, "label");
  label_ = std::move(label);
}

EmbeddingSet EmbeddingSet::cast(Dtype target) const {
  if (target == dtype_) return *this;
  if (target == Dtype::f32) {
    std::vector<float> out(f64_.size());
    for (std::size_t i = 0; i < f64_.size(); ++i) out[i] = static_cast<float>(f64_[i]);
    return EmbeddingSet(std::move(out), rows_, cols_, label_, source_);
  }
  std::vector<double> out(f32_.size());
  for (std::size_t i = 0; i < f32_.size(); ++i) out[i] = static_cast<double>(f32_[i]);
  return EmbeddingSet(std::move(out), rows_, cols_, label_, source_);
}

EmbeddingSet EmbeddingSet::take_rows(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw InputError("row selection must not be empty");
  for (std::size_t idx : indices) {
    if (idx >= rows_) {
      throw InputError("row index " + std::to_string(idx) + " out of range (N = " +
                       std::to_string(rows_) + ")");
    }
  }
  if (dtype_ == Dtype::f32) {
    std::vector<float> out(indices.size() * cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
      std::memcpy(out.data() + r * cols_, f32_.data() + indices[r] * cols_,
                  cols_ * sizeof(float));
    }
    return EmbeddingSet(std::move(out), indices.size(), cols_, label_, source_);
  }
  std::vector<double> out(indices.size() * cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::memcpy(out.data() + r * cols_, f64_.data() + indices[r] * cols_,
                cols_ * sizeof(double));
  }
  return EmbeddingSet(std::move(out), indices.size(), cols_, label_, source_);
}

Mat EmbeddingSet::to_matrix() const {
  Mat m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  if (dtype_ == Dtype::f64) {
    std::memcpy(m.data(), f64_.data(), f64_.size() * sizeof(double));
  } else {
    for (std::size_t i = 0; i < f32_.size(); ++i) m.data()[i] = static_cast<double>(f32_[i]);
  }
  return m;
}

bool EmbeddingSet::bitwise_equal(const EmbeddingSet& other) const {
  if (dtype_ != other.dtype_ || rows_ != other.rows_ || cols_ != other.cols_) return false;
  if (dtype_ == Dtype::f32) {
    return std::memcmp(f32_.data(), other.f32_.data(), f32_.size() * sizeof(float)) == 0;
  }
  return std::memcmp(f64_.data(), other.f64_.data(), f64_.size() * sizeof(double)) == 0;
}

}  // namespace kadtk
