// Internal micro-kernels for the pairwise stage. Not installed.
//
// Every kernel computes dot products of one row x against four rows y0..y3
// with an explicitly fixed lane-accumulation order: lane l accumulates the
// terms with k % L == l, and lanes are combined pairwise at the end. The
// order never depends on blocking or threading, which is what makes scores
// reproducible across worker counts. The AVX2 variants implement the exact
// same lane pattern with FMA; a build either uses them everywhere or not at
// all, so results are self-consistent per build.
#pragma once

#include <cstddef>
#include <type_traits>
#include <vector>

#include "kadtk/embedding_set.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define KADTK_HAVE_AVX2_FMA 1
#else
#define KADTK_HAVE_AVX2_FMA 0
#endif

namespace kadtk::detail {

#if KADTK_HAVE_AVX2_FMA

// f32 input, f64 accumulation: two 4-lane double accumulators per rhs row.
inline void dots4_wide(const float* x, const float* const y[4], std::size_t d,
                       double* out) {
  __m256d acc[4][2];
  for (int j = 0; j < 4; ++j) {
    acc[j][0] = _mm256_setzero_pd();
    acc[j][1] = _mm256_setzero_pd();
  }
  std::size_t k = 0;
  for (; k + 8 <= d; k += 8) {
    const __m256 xv = _mm256_loadu_ps(x + k);
    const __m256d xlo = _mm256_cvtps_pd(_mm256_castps256_ps128(xv));
    const __m256d xhi = _mm256_cvtps_pd(_mm256_extractf128_ps(xv, 1));
    for (int j = 0; j < 4; ++j) {
      const __m256 yv = _mm256_loadu_ps(y[j] + k);
      acc[j][0] = _mm256_fmadd_pd(xlo, _mm256_cvtps_pd(_mm256_castps256_ps128(yv)), acc[j][0]);
      acc[j][1] = _mm256_fmadd_pd(xhi, _mm256_cvtps_pd(_mm256_extractf128_ps(yv, 1)), acc[j][1]);
    }
  }
  for (int j = 0; j < 4; ++j) {
    const __m256d s = _mm256_add_pd(acc[j][0], acc[j][1]);
    const __m128d h = _mm_add_pd(_mm256_castpd256_pd128(s), _mm256_extractf128_pd(s, 1));
    double r = _mm_cvtsd_f64(_mm_add_sd(h, _mm_unpackhi_pd(h, h)));
    for (std::size_t kk = k; kk < d; ++kk) {
      r += static_cast<double>(x[kk]) * static_cast<double>(y[j][kk]);
    }
    out[j] = r;
  }
}

// f64 input, f64 accumulation.
inline void dots4_wide(const double* x, const double* const y[4], std::size_t d,
                       double* out) {
  __m256d acc[4][2];
  for (int j = 0; j < 4; ++j) {
    acc[j][0] = _mm256_setzero_pd();
    acc[j][1] = _mm256_setzero_pd();
  }
  std::size_t k = 0;
  for (; k + 8 <= d; k += 8) {
    const __m256d x0 = _mm256_loadu_pd(x + k);
    const __m256d x1 = _mm256_loadu_pd(x + k + 4);
    for (int j = 0; j < 4; ++j) {
      acc[j][0] = _mm256_fmadd_pd(x0, _mm256_loadu_pd(y[j] + k), acc[j][0]);
      acc[j][1] = _mm256_fmadd_pd(x1, _mm256_loadu_pd(y[j] + k + 4), acc[j][1]);
    }
  }
  for (int j = 0; j < 4; ++j) {
    const __m256d s = _mm256_add_pd(acc[j][0], acc[j][1]);
    const __m128d h = _mm_add_pd(_mm256_castpd256_pd128(s), _mm256_extractf128_pd(s, 1));
    double r = _mm_cvtsd_f64(_mm_add_sd(h, _mm_unpackhi_pd(h, h)));
    for (std::size_t kk = k; kk < d; ++kk) r += x[kk] * y[j][kk];
    out[j] = r;
  }
}

// f32 input, f32 accumulation (narrow plan).
inline void dots4_narrow(const float* x, const float* const y[4], std::size_t d,
                         double* out) {
  __m256 acc[4][2];
  for (int j = 0; j < 4; ++j) {
    acc[j][0] = _mm256_setzero_ps();
    acc[j][1] = _mm256_setzero_ps();
  }
  std::size_t k = 0;
  for (; k + 16 <= d; k += 16) {
    const __m256 x0 = _mm256_loadu_ps(x + k);
    const __m256 x1 = _mm256_loadu_ps(x + k + 8);
    for (int j = 0; j < 4; ++j) {
      acc[j][0] = _mm256_fmadd_ps(x0, _mm256_loadu_ps(y[j] + k), acc[j][0]);
      acc[j][1] = _mm256_fmadd_ps(x1, _mm256_loadu_ps(y[j] + k + 8), acc[j][1]);
    }
  }
  for (int j = 0; j < 4; ++j) {
    const __m256 s = _mm256_add_ps(acc[j][0], acc[j][1]);
    __m128 h = _mm_add_ps(_mm256_castps256_ps128(s), _mm256_extractf128_ps(s, 1));
    h = _mm_add_ps(h, _mm_movehl_ps(h, h));
    float r = _mm_cvtss_f32(_mm_add_ss(h, _mm_shuffle_ps(h, h, 1)));
    for (std::size_t kk = k; kk < d; ++kk) r += x[kk] * y[j][kk];
    out[j] = static_cast<double>(r);
  }
}

#else  // scalar fallbacks, same lane-accumulation structure

template <typename T>
inline void dots4_wide(const T* x, const T* const y[4], std::size_t d, double* out) {
  for (int j = 0; j < 4; ++j) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    const T* yr = y[j];
    std::size_t k = 0;
    for (; k + 4 <= d; k += 4) {
      a0 += static_cast<double>(x[k]) * static_cast<double>(yr[k]);
      a1 += static_cast<double>(x[k + 1]) * static_cast<double>(yr[k + 1]);
      a2 += static_cast<double>(x[k + 2]) * static_cast<double>(yr[k + 2]);
      a3 += static_cast<double>(x[k + 3]) * static_cast<double>(yr[k + 3]);
    }
    double r = (a0 + a1) + (a2 + a3);
    for (; k < d; ++k) r += static_cast<double>(x[k]) * static_cast<double>(yr[k]);
    out[j] = r;
  }
}

inline void dots4_narrow(const float* x, const float* const y[4], std::size_t d,
                         double* out) {
  for (int j = 0; j < 4; ++j) {
    float a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    const float* yr = y[j];
    std::size_t k = 0;
    for (; k + 4 <= d; k += 4) {
      a0 += x[k] * yr[k];
      a1 += x[k + 1] * yr[k + 1];
      a2 += x[k + 2] * yr[k + 2];
      a3 += x[k + 3] * yr[k + 3];
    }
    float r = (a0 + a1) + (a2 + a3);
    for (; k < d; ++k) r += x[k] * yr[k];
    out[j] = static_cast<double>(r);
  }
}

#endif

// Single-row wrappers.
template <typename T>
inline double dot_wide(const T* x, const T* y, std::size_t d) {
  const T* ys[4] = {y, y, y, y};
  double tmp[4];
  dots4_wide(x, ys, d, tmp);
  return tmp[0];
}

inline double dot_narrow(const float* x, const float* y, std::size_t d) {
  const float* ys[4] = {y, y, y, y};
  double tmp[4];
  dots4_narrow(x, ys, d, tmp);
  return tmp[0];
}

// Squared-distance block [r0,r1) x [c0,c1) into out (leading dimension ldo,
// out indexed from (r0, c0)): D_ij = max(0, nx_i + ny_j - 2 x_i . y_j).
template <typename T>
void sq_dist_block(const T* a, const T* b, std::size_t d, const double* nx,
                   const double* ny, std::size_t r0, std::size_t r1, std::size_t c0,
                   std::size_t c1, bool narrow, double* out, std::size_t ldo) {
  for (std::size_t i = r0; i < r1; ++i) {
    const T* x = a + i * d;
    double* row = out + (i - r0) * ldo - c0;
    std::size_t j = c0;
    for (; j + 4 <= c1; j += 4) {
      const T* ys[4] = {b + j * d, b + (j + 1) * d, b + (j + 2) * d, b + (j + 3) * d};
      double dots[4];
      if constexpr (std::is_same_v<T, float>) {
        if (narrow) {
          dots4_narrow(x, ys, d, dots);
        } else {
          dots4_wide(x, ys, d, dots);
        }
      } else {
        dots4_wide(x, ys, d, dots);
      }
      for (int u = 0; u < 4; ++u) {
        const double v = nx[i] + ny[j + u] - 2.0 * dots[u];
        row[j + u] = v > 0.0 ? v : 0.0;
      }
    }
    for (; j < c1; ++j) {
      double dot;
      if constexpr (std::is_same_v<T, float>) {
        dot = narrow ? dot_narrow(x, b + j * d, d) : dot_wide(x, b + j * d, d);
      } else {
        dot = dot_wide(x, b + j * d, d);
      }
      const double v = nx[i] + ny[j] - 2.0 * dot;
      row[j] = v > 0.0 ? v : 0.0;
    }
  }
}

// Row norms ||x_i||^2 computed with the same dot kernel as the distance
// stage, so a row's distance to itself cancels to exactly zero.
std::vector<double> row_sq_norms(const EmbeddingSet& s, bool narrow);

}  // namespace kadtk::detail
