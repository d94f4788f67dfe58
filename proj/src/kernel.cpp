#include "kadtk/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace kadtk {

Mat rbf_kernel_matrix(const Mat& sq_dists, const KernelSpec& spec) {
  spec.validate();
  const double bw = spec.effective_bandwidth();
  const double inv = 1.0 / (2.0 * bw * bw);
  Mat out(sq_dists.rows(), sq_dists.cols());
  const double* src = sq_dists.data();
  double* dst = out.data();
  const std::size_t total = static_cast<std::size_t>(sq_dists.size());
  for (std::size_t i = 0; i < total; ++i) {
    if (src[i] < 0.0) {
      throw InputError("negative squared distance " + std::to_string(src[i]) +
                       " passed to rbf_kernel_matrix");
    }
    dst[i] = std::exp(-src[i] * inv);
  }
  return out;
}

double median_bandwidth(const EmbeddingSet& reference, int threads) {
  const std::size_t n = reference.rows();
  if (n < 2) throw InputError("median bandwidth needs at least 2 reference rows");
  if (n > 16384) {
    throw InputError("median bandwidth is exact O(N^2) and capped at N = 16384; "
                     "subsample the reference set explicitly for N = " +
                     std::to_string(n));
  }

  std::vector<double> tri = upper_tri_sq_dists(reference, DistanceBlockPlan{}, threads);
  const std::size_t count = tri.size();
  const std::size_t mid = count / 2;

  std::nth_element(tri.begin(), tri.begin() + static_cast<std::ptrdiff_t>(mid), tri.end());
  double median_dist;
  if (count % 2 == 1) {
    median_dist = std::sqrt(tri[mid]);
  } else {
    const double upper = tri[mid];
    const double lower =
        *std::max_element(tri.begin(), tri.begin() + static_cast<std::ptrdiff_t>(mid));
    // Average of the two central distances, not of the squared values.
    median_dist = 0.5 * (std::sqrt(lower) + std::sqrt(upper));
  }

  if (median_dist <= 0.0) {
    throw InputError("degenerate bandwidth: the median pairwise distance in \"" +
                     reference.label() +
                     "\" is 0 (all points coincide); pass an explicit sigma instead");
  }
  return median_dist;
}

std::vector<double> bandwidth_scale_grid(int min_exp, int max_exp) {
  if (min_exp > max_exp) {
    throw InputError("bandwidth grid needs min_exp <= max_exp (got " +
                     std::to_string(min_exp) + " > " + std::to_string(max_exp) + ")");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(max_exp - min_exp + 1));
  for (int k = min_exp; k <= max_exp; ++k) {
    double p = 1.0;
    for (int i = 0; i < std::abs(k); ++i) p *= 10.0;
    grid.push_back(k >= 0 ? p : 1.0 / p);
  }
  return grid;
}

}  // namespace kadtk
