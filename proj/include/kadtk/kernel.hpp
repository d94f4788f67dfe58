#pragma once

#include <vector>

#include "kadtk/embedding_set.hpp"
#include "kadtk/pairwise.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// Kernel family plus bandwidth. The effective bandwidth fed to the kernel
/// is sigma * scale; scale exists so sweeps can explore multiples of a
/// heuristic sigma without losing track of the baseline.
struct KernelSpec {
  enum class Family { gaussian_rbf };

  Family family = Family::gaussian_rbf;
  double sigma = 1.0;
  double scale = 1.0;

  double effective_bandwidth() const { return sigma * scale; }

  void validate() const {
    if (!(sigma > 0.0) || !(scale > 0.0)) {
      throw InputError("kernel bandwidth requires sigma > 0 and scale > 0");
    }
  }
};

/// Entry-wise exp(-D / (2 (sigma*scale)^2)) over a squared-distance matrix.
/// Rejects negative distances.
Mat rbf_kernel_matrix(const Mat& sq_dists, const KernelSpec& spec);

/// Median of the N(N-1)/2 pairwise Euclidean distances within the reference
/// set (mean of the two central order statistics when the count is even).
/// Exact for N <= 16384; larger sets must be subsampled by the caller.
/// A zero median (all points coincident) is reported as a degenerate
/// bandwidth so the caller can supply sigma explicitly.
double median_bandwidth(const EmbeddingSet& reference, int threads = 0);

/// {10^k : min_exp <= k <= max_exp}; (-3, 3) gives 0.001x .. 1000x.
std::vector<double> bandwidth_scale_grid(int min_exp, int max_exp);

}  // namespace kadtk
