#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kadtk/embedding_set.hpp"
#include "kadtk/metric.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// One curve produced by a study: ordered (x, mean, lo, hi) points plus
/// free-form metadata (seed, trials, sigma policy, fit results, ...).
struct StudyPoint {
  double x = 0.0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct StudySeries {
  std::string x_label;
  std::string y_label;
  std::vector<StudyPoint> points;
  std::map<std::string, std::string> meta;
};

/// Per-system (metric score, human rating) pairs for rank correlation.
struct RatingsRow {
  std::string system_id;
  double metric_score = 0.0;
  double human_rating = 0.0;
};

struct RatingsTable {
  std::vector<RatingsRow> rows;
  void validate() const;
};

enum class StudyMetric { kad, fad };
enum class DegradeKind { gaussian_noise, mean_shrink };

/// Convergence-with-sample-size study: for each size, draws `trials`
/// subsamples of the evaluation set without replacement (stream keyed by
/// (seed, size, trial), so adding trials never disturbs earlier draws),
/// scores each against the full reference, and reports mean +/- one sample
/// standard deviation. sigma for KAD is resolved once from the reference
/// and reused at every size. Meta carries the 1/N extrapolation (intercept,
/// slope, r_squared) over the size means and the intercept-normalized curve.
StudySeries convergence_study(const EmbeddingSet& reference, const EmbeddingSet& evaluation,
                              std::span<const std::size_t> sizes, int trials,
                              std::uint64_t seed, StudyMetric metric, int threads = 0);

/// Embedding-space degradations standing in for audio-level ones:
///  - gaussian_noise: adds N(0, (level * median_bandwidth(clean) / sqrt(d))^2)
///    per coordinate, so `level` is roughly the noise-to-typical-distance ratio;
///  - mean_shrink: moves every row toward the global mean by fraction
///    level in [0, 1] (1 collapses the set onto its mean).
/// level = 0 returns the input unchanged, bit for bit.
EmbeddingSet degrade_embeddings(const EmbeddingSet& clean, DegradeKind kind, double level,
                                std::uint64_t seed);

/// For each scale factor, the MMD^2 of every degraded set against the
/// reference at sigma = scale * median_bandwidth(reference). Each series is
/// clipped below at 1e-12 and max-normalized to 1; meta records whether it
/// is nondecreasing ("monotone") along the degradation axis.
std::vector<StudySeries> bandwidth_sweep(const EmbeddingSet& reference,
                                         std::span<const EmbeddingSet> degraded,
                                         std::span<const double> scales, int threads = 0);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  bool exact = false;  // exhaustive permutation (n <= 8) vs t-approximation
  std::int64_t n = 0;
};

/// Spearman rank correlation with mid-rank ties. Two-sided p-value by
/// exhaustive permutation for n <= 8, otherwise by the t-approximation
/// t = rho sqrt((n-2)/(1-rho^2)) with n-2 degrees of freedom (|rho| = 1
/// reports p = 0).
SpearmanResult spearman_correlation(const RatingsTable& table);

struct BenchmarkConfig {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> sizes;
  int trials = 200;
  int warmup = 10;
  std::uint64_t seed = 42;
  int threads = 1;  // timing defaults to serial; raise explicitly to override
};

/// Wall-clock benchmark over the (d, N) grid: synthesizes two f32
/// standard-Gaussian sets per cell, resolves the KAD sigma once outside the
/// timed region, and times kad_score and fad_score end-to-end from
/// embeddings. One series per (metric, d) with x = N, mean in ms, and
/// (lo, hi) the 5th/95th percentiles over trials.
std::vector<StudySeries> timing_benchmark(const BenchmarkConfig& config);

}  // namespace kadtk
