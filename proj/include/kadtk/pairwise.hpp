#pragma once

#include <cstddef>
#include <vector>

#include "kadtk/embedding_set.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// Cache-blocking plan for the O(d N^2) pairwise stage. Entry values depend
/// only on the input data (the per-entry reduction order is fixed), so any
/// plan geometry and any worker count give the same squared distances when
/// accumulate_wide is on. With accumulate_wide off, f32 payloads are reduced
/// in single precision for speed and the cross-plan guarantee is waived.
struct DistanceBlockPlan {
  std::size_t block_rows = 256;
  std::size_t block_cols = 256;
  bool accumulate_wide = true;

  void validate() const {
    if (block_rows < 1 || block_cols < 1) {
      throw InputError("block plan dimensions must be >= 1");
    }
  }
};

/// All squared Euclidean distances between rows of a and rows of b,
/// via the ||x||^2 + ||y||^2 - 2 x.y expansion with negatives clamped to 0.
Mat pairwise_sq_dists(const EmbeddingSet& a, const EmbeddingSet& b,
                      const DistanceBlockPlan& plan = {}, int threads = 0);

/// The strict upper triangle (i < j) of pairwise_sq_dists(s, s), flattened
/// row-major. Backs the exact median-distance heuristic without
/// materializing the full N x N matrix.
std::vector<double> upper_tri_sq_dists(const EmbeddingSet& s,
                                       const DistanceBlockPlan& plan = {}, int threads = 0);

}  // namespace kadtk
