#include "kadtk/pairwise.hpp"

#include <algorithm>
#include <vector>

#include "kadtk/threading.hpp"
#include "pairwise_kernels.hpp"

namespace kadtk {

namespace detail {

template <typename T>
std::vector<double> row_sq_norms_impl(const T* data, std::size_t n, std::size_t d,
                                      bool narrow) {
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T* x = data + i * d;
    if constexpr (std::is_same_v<T, float>) {
      norms[i] = narrow ? dot_narrow(x, x, d) : dot_wide(x, x, d);
    } else {
      norms[i] = dot_wide(x, x, d);
    }
  }
  return norms;
}

std::vector<double> row_sq_norms(const EmbeddingSet& s, bool narrow) {
  if (s.dtype() == Dtype::f32) {
    return row_sq_norms_impl(s.f32_values().data(), s.rows(), s.cols(), narrow);
  }
  return row_sq_norms_impl(s.f64_values().data(), s.rows(), s.cols(), false);
}

}  // namespace detail

namespace {

struct BlockGrid {
  std::size_t nbr, nbc, br, bc;
  std::size_t count() const { return nbr * nbc; }
};

BlockGrid make_grid(std::size_t n, std::size_t m, const DistanceBlockPlan& plan) {
  const std::size_t br = std::min(plan.block_rows, n);
  const std::size_t bc = std::min(plan.block_cols, m);
  return {(n + br - 1) / br, (m + bc - 1) / bc, br, bc};
}

void check_compatible(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.cols() != b.cols()) {
    throw InputError("dimension mismatch: \"" + a.label() + "\" has d = " +
                     std::to_string(a.cols()) + ", \"" + b.label() + "\" has d = " +
                     std::to_string(b.cols()));
  }
}

template <typename T>
void fill_blocks(const T* pa, const T* pb, std::size_t n, std::size_t m, std::size_t d,
                 const std::vector<double>& na, const std::vector<double>& nb,
                 const DistanceBlockPlan& plan, bool narrow, int threads, Mat& out) {
  const BlockGrid g = make_grid(n, m, plan);
  parallel_for(g.count(), threads, [&](std::size_t blk) {
    const std::size_t bi = blk / g.nbc;
    const std::size_t bj = blk % g.nbc;
    const std::size_t r0 = bi * g.br, r1 = std::min(r0 + g.br, n);
    const std::size_t c0 = bj * g.bc, c1 = std::min(c0 + g.bc, m);
    detail::sq_dist_block(pa, pb, d, na.data(), nb.data(), r0, r1, c0, c1, narrow,
                          out.data() + r0 * m + c0, m);
  });
}

}  // namespace

Mat pairwise_sq_dists(const EmbeddingSet& a, const EmbeddingSet& b,
                      const DistanceBlockPlan& plan, int threads) {
  plan.validate();
  check_compatible(a, b);
  const std::size_t n = a.rows(), m = b.rows(), d = a.cols();
  const bool narrow =
      !plan.accumulate_wide && a.dtype() == Dtype::f32 && b.dtype() == Dtype::f32;

  Mat out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const auto na = detail::row_sq_norms(a, narrow);
  const auto nb = detail::row_sq_norms(b, narrow);

  if (a.dtype() == Dtype::f32 && b.dtype() == Dtype::f32) {
    fill_blocks(a.f32_values().data(), b.f32_values().data(), n, m, d, na, nb, plan,
                narrow, threads, out);
  } else if (a.dtype() == Dtype::f64 && b.dtype() == Dtype::f64) {
    fill_blocks(a.f64_values().data(), b.f64_values().data(), n, m, d, na, nb, plan,
                false, threads, out);
  } else {
    // Mixed precision: promote the f32 side once.
    const EmbeddingSet ap = a.dtype() == Dtype::f64 ? a : a.cast(Dtype::f64);
    const EmbeddingSet bp = b.dtype() == Dtype::f64 ? b : b.cast(Dtype::f64);
    return pairwise_sq_dists(ap, bp, plan, threads);
  }
  return out;
}

std::vector<double> upper_tri_sq_dists(const EmbeddingSet& s, const DistanceBlockPlan& plan,
                                       int threads) {
  plan.validate();
  const std::size_t n = s.rows(), d = s.cols();
  if (n < 2) throw InputError("need at least 2 rows for pairwise distances");

  const bool narrow = !plan.accumulate_wide && s.dtype() == Dtype::f32;
  const auto norms = detail::row_sq_norms(s, narrow);

  // Row-major layout of the strict upper triangle: row i starts at
  // offset(i) = sum_{r<i} (n-1-r) and holds columns i+1 .. n-1.
  auto row_offset = [n](std::size_t i) { return i * (n - 1) - (i * (i - 1)) / 2; };
  std::vector<double> tri(n * (n - 1) / 2);

  const std::size_t br = std::min(plan.block_rows, n);
  const std::size_t nbr = (n + br - 1) / br;

  parallel_for(nbr, threads, [&](std::size_t bi) {
    const std::size_t r0 = bi * br, r1 = std::min(r0 + br, n);
    std::vector<double> buf(plan.block_cols);
    for (std::size_t i = r0; i < r1; ++i) {
      double* dst = tri.data() + row_offset(i);
      for (std::size_t c0 = i + 1; c0 < n; c0 += plan.block_cols) {
        const std::size_t c1 = std::min(c0 + plan.block_cols, n);
        if (s.dtype() == Dtype::f32) {
          detail::sq_dist_block(s.f32_values().data(), s.f32_values().data(), d,
                                norms.data(), norms.data(), i, i + 1, c0, c1, narrow,
                                buf.data(), c1 - c0);
        } else {
          detail::sq_dist_block(s.f64_values().data(), s.f64_values().data(), d,
                                norms.data(), norms.data(), i, i + 1, c0, c1, false,
                                buf.data(), c1 - c0);
        }
        std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(c1 - c0),
                  dst + (c0 - (i + 1)));
      }
    }
  });
  return tri;
}

}  // namespace kadtk
