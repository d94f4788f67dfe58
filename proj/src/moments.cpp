#include "kadtk/moments.hpp"

namespace kadtk {

Vec mean_vector(const EmbeddingSet& x) {
  const std::size_t n = x.rows(), d = x.cols();
  Vec mean = Vec::Zero(static_cast<Eigen::Index>(d));
  if (x.dtype() == Dtype::f32) {
    const float* p = x.f32_values().data();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[static_cast<Eigen::Index>(j)] += static_cast<double>(p[i * d + j]);
      }
    }
  } else {
    const double* p = x.f64_values().data();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[static_cast<Eigen::Index>(j)] += p[i * d + j];
      }
    }
  }
  mean /= static_cast<double>(n);
  return mean;
}

GaussianStats covariance(const EmbeddingSet& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) {
    throw InputError("covariance undefined for N = " + std::to_string(n) +
                     " (need at least 2 samples)");
  }
  GaussianStats stats;
  stats.mean = mean_vector(x);
  stats.n = static_cast<std::int64_t>(n);

  Mat centered = x.to_matrix();
  centered.rowwise() -= stats.mean.transpose();

  Mat cov = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  cov = cov.selfadjointView<Eigen::Lower>();  // mirror: exactly symmetric
  cov /= static_cast<double>(n - 1);
  stats.cov = std::move(cov);
  return stats;
}

}  // namespace kadtk
