#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "kadtk/embedding_set.hpp"
#include "kadtk/kernel.hpp"
#include "kadtk/moments.hpp"
#include "kadtk/pairwise.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

enum class Metric { kad, fad, mmd2 };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// One score with everything needed to reproduce it. kernel/alpha are only
/// present for the kernel metrics; wall_ms only when a caller timed the run.
struct ScoreRecord {
  Metric metric = Metric::fad;
  double value = 0.0;
  std::string reference_label;
  std::string eval_label;
  std::int64_t n_ref = 0;
  std::int64_t n_eval = 0;
  std::int64_t dim = 0;
  std::optional<KernelSpec> kernel;
  std::optional<double> alpha;
  std::optional<double> wall_ms;
};

/// Unbiased squared-MMD estimator: diagonal terms excluded from the two
/// within-set sums, and the value deliberately left unclamped (it may be
/// negative). Both sets need at least two rows.
///
/// The three pairwise sums are streamed block-by-block (the full kernel
/// matrices are never materialized) and combined in a fixed order, so the
/// result is independent of the worker count. The cross sum is evaluated in
/// a canonical orientation, making mmd2_unbiased(x, y) == mmd2_unbiased(y, x)
/// bit-for-bit.
double mmd2_unbiased(const EmbeddingSet& x, const EmbeddingSet& y, const KernelSpec& spec,
                     const DistanceBlockPlan& plan = {}, int threads = 0);

/// alpha * mmd2_unbiased, packaged with the resolved kernel parameters.
ScoreRecord kad_score(const EmbeddingSet& x, const EmbeddingSet& y, const KernelSpec& spec,
                      double alpha = 100.0, const DistanceBlockPlan& plan = {},
                      int threads = 0);

/// Squared Frechet distance between the moment-matched Gaussians of the two
/// sets: ||mu_x - mu_y||^2 + tr(Sx) + tr(Sy) - 2 tr(sqrt(Sx Sy)). Reported
/// as "FAD" (the squared form, as the common toolkits do). Tiny negative
/// round-off is clamped to zero; the value is never negative.
ScoreRecord fad_score(const EmbeddingSet& x, const EmbeddingSet& y);

/// Same, on precomputed moments; analytic fixtures use this to bypass
/// sampling noise.
ScoreRecord fad_score(const GaussianStats& sx, const GaussianStats& sy,
                      const std::string& reference_label = "moments",
                      const std::string& eval_label = "moments");

/// First-order finite-sample bias magnitude of FAD:
/// (tr(Sx) + tr(Sy)) / n. Assumes the divisor-N covariance convention, so it
/// is an O(1/n) guide rather than an exact correction for this library's
/// divisor-(N-1) estimates.
double fad_bias_estimate(const GaussianStats& sx, const GaussianStats& sy, std::int64_t n);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of fad against 1/n. The intercept estimates the
/// infinite-sample FAD. Needs at least min_points distinct sample counts.
LinearFit fad_inf_extrapolate(std::span<const std::pair<std::int64_t, double>> points,
                              int min_points = 2);

}  // namespace kadtk
