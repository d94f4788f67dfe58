#include "kadtk/metric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "kadtk/sym_eigen.hpp"
#include "kadtk/threading.hpp"
#include "pairwise_kernels.hpp"

namespace kadtk {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::kad: return "kad";
    case Metric::fad: return "fad";
    case Metric::mmd2: return "mmd2";
  }
  return "?";
}

Metric metric_from_name(const std::string& name) {
  if (name == "kad") return Metric::kad;
  if (name == "fad") return Metric::fad;
  if (name == "mmd2") return Metric::mmd2;
  throw InputError("unknown metric \"" + name + "\" (expected kad, fad or mmd2)");
}

namespace {

// Sum of exp(-D_ij / (2 bw^2)) over the full a x b grid, one partial per
// block, partials combined in block order so the result is independent of
// the worker count.
template <typename T>
double sum_rbf_cross_impl(const T* pa, std::size_t n, const T* pb, std::size_t m,
                          std::size_t d, const std::vector<double>& na,
                          const std::vector<double>& nb, double bw, bool narrow,
                          const DistanceBlockPlan& plan, int threads) {
  const std::size_t br = std::min(plan.block_rows, n);
  const std::size_t bc = std::min(plan.block_cols, m);
  const std::size_t nbr = (n + br - 1) / br;
  const std::size_t nbc = (m + bc - 1) / bc;
  const double inv = 1.0 / (2.0 * bw * bw);

  std::vector<double> partial(nbr * nbc, 0.0);
  parallel_for(nbr * nbc, threads, [&](std::size_t blk) {
    const std::size_t bi = blk / nbc;
    const std::size_t bj = blk % nbc;
    const std::size_t r0 = bi * br, r1 = std::min(r0 + br, n);
    const std::size_t c0 = bj * bc, c1 = std::min(c0 + bc, m);
    std::vector<double> buf((r1 - r0) * (c1 - c0));
    detail::sq_dist_block(pa, pb, d, na.data(), nb.data(), r0, r1, c0, c1, narrow,
                          buf.data(), c1 - c0);
    double s = 0.0;
    const double* cell = buf.data();
    const std::size_t count = (r1 - r0) * (c1 - c0);
    for (std::size_t idx = 0; idx < count; ++idx) s += std::exp(-cell[idx] * inv);
    partial[blk] = s;
  });

  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Sum over i != j within one set. The kernel matrix is exactly symmetric
// (the dot kernel is commutative in its arguments), so this sums the strict
// upper triangle and doubles, which both halves the work and keeps the
// combine order fixed.
template <typename T>
double sum_rbf_within_impl(const T* pa, std::size_t n, std::size_t d,
                           const std::vector<double>& na, double bw, bool narrow,
                           const DistanceBlockPlan& plan, int threads) {
  const std::size_t br = std::min(plan.block_rows, n);
  const std::size_t nbr = (n + br - 1) / br;
  const double inv = 1.0 / (2.0 * bw * bw);

  // one partial per (bi, bj) with bi <= bj; others stay zero
  std::vector<double> partial(nbr * nbr, 0.0);
  parallel_for(nbr * nbr, threads, [&](std::size_t blk) {
    const std::size_t bi = blk / nbr;
    const std::size_t bj = blk % nbr;
    if (bj < bi) return;
    const std::size_t r0 = bi * br, r1 = std::min(r0 + br, n);
    const std::size_t c0 = bj * br, c1 = std::min(c0 + br, n);
    std::vector<double> buf(r1 - r0 > 0 ? (r1 - r0) * (c1 - c0) : 0);
    double s = 0.0;
    if (bi == bj) {
      // strict upper triangle of the diagonal block, row by row
      for (std::size_t i = r0; i < r1; ++i) {
        if (i + 1 >= c1) continue;
        detail::sq_dist_block(pa, pa, d, na.data(), na.data(), i, i + 1, i + 1, c1,
                              narrow, buf.data(), c1 - (i + 1));
        const std::size_t count = c1 - (i + 1);
        for (std::size_t idx = 0; idx < count; ++idx) s += std::exp(-buf[idx] * inv);
      }
    } else {
      detail::sq_dist_block(pa, pa, d, na.data(), na.data(), r0, r1, c0, c1, narrow,
                            buf.data(), c1 - c0);
      const std::size_t count = (r1 - r0) * (c1 - c0);
      for (std::size_t idx = 0; idx < count; ++idx) s += std::exp(-buf[idx] * inv);
    }
    partial[blk] = s;
  });

  double upper = 0.0;
  for (double p : partial) upper += p;
  return 2.0 * upper;  // doubling is exact
}

double sum_rbf_within(const EmbeddingSet& a, double bw, const DistanceBlockPlan& plan,
                      int threads) {
  const bool narrow = !plan.accumulate_wide && a.dtype() == Dtype::f32;
  if (a.dtype() == Dtype::f32) {
    const auto na = detail::row_sq_norms(a, narrow);
    return sum_rbf_within_impl(a.f32_values().data(), a.rows(), a.cols(), na, bw, narrow,
                               plan, threads);
  }
  const auto na = detail::row_sq_norms(a, false);
  return sum_rbf_within_impl(a.f64_values().data(), a.rows(), a.cols(), na, bw, false,
                             plan, threads);
}

double sum_rbf_cross(const EmbeddingSet& a, const EmbeddingSet& b, double bw,
                     const DistanceBlockPlan& plan, int threads) {
  const bool narrow =
      !plan.accumulate_wide && a.dtype() == Dtype::f32 && b.dtype() == Dtype::f32;
  if (a.dtype() == Dtype::f32 && b.dtype() == Dtype::f32) {
    const auto na = detail::row_sq_norms(a, narrow);
    const auto nb = detail::row_sq_norms(b, narrow);
    return sum_rbf_cross_impl(a.f32_values().data(), a.rows(), b.f32_values().data(),
                              b.rows(), a.cols(), na, nb, bw, narrow, plan, threads);
  }
  const EmbeddingSet ap = a.dtype() == Dtype::f64 ? a : a.cast(Dtype::f64);
  const EmbeddingSet bp = b.dtype() == Dtype::f64 ? b : b.cast(Dtype::f64);
  const auto na = detail::row_sq_norms(ap, false);
  const auto nb = detail::row_sq_norms(bp, false);
  return sum_rbf_cross_impl(ap.f64_values().data(), ap.rows(), bp.f64_values().data(),
                            bp.rows(), ap.cols(), na, nb, bw, false, plan, threads);
}

// Deterministic orientation for the cross sum so mmd2(x, y) == mmd2(y, x)
// exactly: larger set as rows, ties broken by label, then source, then raw
// payload bytes.
bool first_as_rows(const EmbeddingSet& x, const EmbeddingSet& y) {
  if (x.rows() != y.rows()) return x.rows() > y.rows();
  if (x.label() != y.label()) return x.label() < y.label();
  if (x.source() != y.source()) return x.source() < y.source();
  if (x.dtype() != y.dtype()) return x.dtype() == Dtype::f64;
  if (x.dtype() == Dtype::f32) {
    const auto xv = x.f32_values(), yv = y.f32_values();
    return !std::lexicographical_compare(yv.begin(), yv.end(), xv.begin(), xv.end());
  }
  const auto xv = x.f64_values(), yv = y.f64_values();
  return !std::lexicographical_compare(yv.begin(), yv.end(), xv.begin(), xv.end());
}

}  // namespace

double mmd2_unbiased(const EmbeddingSet& x, const EmbeddingSet& y, const KernelSpec& spec,
                     const DistanceBlockPlan& plan, int threads) {
  spec.validate();
  plan.validate();
  if (x.cols() != y.cols()) {
    throw InputError("dimension mismatch: \"" + x.label() + "\" has d = " +
                     std::to_string(x.cols()) + ", \"" + y.label() + "\" has d = " +
                     std::to_string(y.cols()));
  }
  const std::size_t n = x.rows(), m = y.rows();
  if (n < 2 || m < 2) {
    throw InputError("unbiased estimator undefined: both sets need N >= 2 (got " +
                     std::to_string(n) + " and " + std::to_string(m) + ")");
  }

  const double bw = spec.effective_bandwidth();
  const double sxx = sum_rbf_within(x, bw, plan, threads);
  const double syy = sum_rbf_within(y, bw, plan, threads);
  const double sxy = first_as_rows(x, y) ? sum_rbf_cross(x, y, bw, plan, threads)
                                         : sum_rbf_cross(y, x, bw, plan, threads);

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return sxx / (nn * (nn - 1.0)) + syy / (mm * (mm - 1.0)) - 2.0 * sxy / (nn * mm);
}

ScoreRecord kad_score(const EmbeddingSet& x, const EmbeddingSet& y, const KernelSpec& spec,
                      double alpha, const DistanceBlockPlan& plan, int threads) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  ScoreRecord rec;
  rec.metric = Metric::kad;
  rec.value = alpha * mmd2_unbiased(x, y, spec, plan, threads);
  rec.reference_label = x.label();
  rec.eval_label = y.label();
  rec.n_ref = static_cast<std::int64_t>(x.rows());
  rec.n_eval = static_cast<std::int64_t>(y.rows());
  rec.dim = static_cast<std::int64_t>(x.cols());
  rec.kernel = spec;
  rec.alpha = alpha;
  return rec;
}

namespace {

ScoreRecord fad_from_stats(const GaussianStats& sx, const GaussianStats& sy,
                           const std::string& ref_label, const std::string& eval_label) {
  if (sx.dim() != sy.dim()) {
    throw InputError("fad_score dimension mismatch: " + std::to_string(sx.dim()) +
                     " vs " + std::to_string(sy.dim()));
  }
  double mean_term = 0.0;
  for (Eigen::Index k = 0; k < sx.mean.size(); ++k) {
    const double dm = sx.mean[k] - sy.mean[k];
    mean_term += dm * dm;
  }
  const double value =
      mean_term + sx.cov.trace() + sy.cov.trace() - 2.0 * trace_sqrt_product(sx.cov, sy.cov);

  ScoreRecord rec;
  rec.metric = Metric::fad;
  rec.value = value > 0.0 ? value : 0.0;  // round-off only; FAD is a squared distance
  rec.reference_label = ref_label;
  rec.eval_label = eval_label;
  rec.n_ref = sx.n;
  rec.n_eval = sy.n;
  rec.dim = static_cast<std::int64_t>(sx.dim());
  return rec;
}

}  // namespace

ScoreRecord fad_score(const EmbeddingSet& x, const EmbeddingSet& y) {
  if (x.cols() != y.cols()) {
    throw InputError("dimension mismatch: \"" + x.label() + "\" has d = " +
                     std::to_string(x.cols()) + ", \"" + y.label() + "\" has d = " +
                     std::to_string(y.cols()));
  }
  return fad_from_stats(covariance(x), covariance(y), x.label(), y.label());
}

ScoreRecord fad_score(const GaussianStats& sx, const GaussianStats& sy,
                      const std::string& reference_label, const std::string& eval_label) {
  return fad_from_stats(sx, sy, reference_label, eval_label);
}

double fad_bias_estimate(const GaussianStats& sx, const GaussianStats& sy, std::int64_t n) {
  if (n < 2) throw InputError("bias estimate needs n >= 2");
  if (sx.dim() != sy.dim()) {
    throw InputError("bias estimate dimension mismatch: " + std::to_string(sx.dim()) +
                     " vs " + std::to_string(sy.dim()));
  }
  return (sx.cov.trace() + sy.cov.trace()) / static_cast<double>(n);
}

LinearFit fad_inf_extrapolate(std::span<const std::pair<std::int64_t, double>> points,
                              int min_points) {
  if (min_points < 2) throw InputError("min_points must be >= 2");
  std::set<std::int64_t> distinct;
  for (const auto& [n, fad] : points) {
    if (n < 2) throw InputError("extrapolation sample counts must be >= 2");
    distinct.insert(n);
  }
  if (static_cast<int>(distinct.size()) < min_points) {
    throw InputError("extrapolation needs at least " + std::to_string(min_points) +
                     " distinct sample counts (got " + std::to_string(distinct.size()) +
                     ")");
  }

  const double count = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, fad] : points) {
    sx += 1.0 / static_cast<double>(n);
    sy += fad;
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, fad] : points) {
    const double dx = 1.0 / static_cast<double>(n) - mx;
    const double dy = fad - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InputError("extrapolation needs variance in 1/n");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (const auto& [n, fad] : points) {
      const double pred = fit.intercept + fit.slope / static_cast<double>(n);
      ss_res += (fad - pred) * (fad - pred);
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;  // constant series: the flat fit is exact
  }
  return fit;
}

}  // namespace kadtk
