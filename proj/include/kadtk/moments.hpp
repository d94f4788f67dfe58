#pragma once

#include <cstdint>

#include "kadtk/embedding_set.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// Moment summary of an embedding set: the mu / Sigma pair the Frechet
/// metric is defined on. cov is symmetrized on construction.
struct GaussianStats {
  Vec mean;
  Mat cov;
  std::int64_t n = 0;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

/// Column-wise arithmetic mean, accumulated in double regardless of the
/// payload precision.
Vec mean_vector(const EmbeddingSet& x);

/// Sample covariance with divisor N-1 and mean from mean_vector. The
/// returned matrix is (C + C^T)/2 by construction. Requires N >= 2.
GaussianStats covariance(const EmbeddingSet& x);

}  // namespace kadtk
