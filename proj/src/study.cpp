#include "kadtk/study.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <new>
#include <numeric>
#include <set>
#include <sstream>

#include "kadtk/kernel.hpp"
#include "kadtk/rng.hpp"
#include "kadtk/synth.hpp"

namespace kadtk {

namespace {

std::string fmt_double(double v) {
  std::ostringstream oss;
  oss.precision(17);
  oss << v;
  return oss.str();
}

// First k of 0..n-1 drawn without replacement (partial Fisher-Yates), then
// sorted so a full-size draw is the identity selection.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_and_std(const std::vector<double>& v) {
  MeanStd out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

}  // namespace

void RatingsTable::validate() const {
  if (rows.size() < 3) {
    throw InputError("ratings table needs at least 3 rows (got " +
                     std::to_string(rows.size()) + ")");
  }
  std::set<std::string> ids;
  for (const auto& r : rows) {
    if (!ids.insert(r.system_id).second) {
      throw InputError("duplicate system_id \"" + r.system_id + "\" in ratings table");
    }
    if (!std::isfinite(r.metric_score) || !std::isfinite(r.human_rating)) {
      throw InputError("non-finite value for system \"" + r.system_id + "\"");
    }
  }
}

StudySeries convergence_study(const EmbeddingSet& reference, const EmbeddingSet& evaluation,
                              std::span<const std::size_t> sizes, int trials,
                              std::uint64_t seed, StudyMetric metric, int threads) {
  if (sizes.empty()) throw InputError("convergence study needs at least one size");
  if (trials < 2) throw InputError("convergence study needs trials >= 2");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw InputError("subsample sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw InputError("subsample sizes must be strictly increasing");
    }
    if (sizes[i] > evaluation.rows()) {
      throw InputError("subsample size " + std::to_string(sizes[i]) +
                       " exceeds evaluation set size " + std::to_string(evaluation.rows()));
    }
  }

  StudySeries series;
  series.x_label = "N";
  series.y_label = metric == StudyMetric::kad ? "kad" : "fad";
  series.meta["seed"] = std::to_string(seed);
  series.meta["trials"] = std::to_string(trials);
  series.meta["metric"] = metric == StudyMetric::kad ? "kad" : "fad";

  KernelSpec spec;
  if (metric == StudyMetric::kad) {
    spec.sigma = median_bandwidth(reference, threads);
    series.meta["sigma"] = fmt_double(spec.sigma);
    series.meta["sigma_policy"] = "median(reference), resolved once";
  }

  std::vector<std::pair<std::int64_t, double>> size_means;
  for (std::size_t size : sizes) {
    std::vector<double> values(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      RngStream rng(seed, {hash_tag("study.subsample"), size, static_cast<std::uint64_t>(t)});
      const auto idx = subsample_indices(evaluation.rows(), size, rng);
      const EmbeddingSet sub = evaluation.take_rows(idx);
      values[static_cast<std::size_t>(t)] =
          metric == StudyMetric::kad
              ? kad_score(reference, sub, spec, 100.0, DistanceBlockPlan{}, threads).value
              : fad_score(reference, sub).value;
    }
    const MeanStd ms = mean_and_std(values);
    series.points.push_back({static_cast<double>(size), ms.mean, ms.mean - ms.std,
                             ms.mean + ms.std});
    size_means.emplace_back(static_cast<std::int64_t>(size), ms.mean);
  }

  if (size_means.size() >= 2) {
    const LinearFit fit = fad_inf_extrapolate(size_means, 2);
    series.meta["inf_intercept"] = fmt_double(fit.intercept);
    series.meta["inf_slope"] = fmt_double(fit.slope);
    series.meta["inf_r_squared"] = fmt_double(fit.r_squared);
    std::ostringstream norm;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      if (i) norm << " ";
      norm << fmt_double(series.points[i].mean / fit.intercept);
    }
    series.meta["normalized_means"] = norm.str();
  }
  return series;
}

EmbeddingSet degrade_embeddings(const EmbeddingSet& clean, DegradeKind kind, double level,
                                std::uint64_t seed) {
  if (level < 0.0) throw InputError("degradation level must be >= 0");
  if (level == 0.0) return clean;

  const std::size_t n = clean.rows(), d = clean.cols();
  std::vector<double> data(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = clean.value(i, j);
  }

  if (kind == DegradeKind::gaussian_noise) {
    const double noise_std =
        level * median_bandwidth(clean) / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      RngStream rng(seed, {hash_tag("study.degrade.noise"), i});
      for (std::size_t j = 0; j < d; ++j) data[i * d + j] += noise_std * rng.next_normal();
    }
  } else {
    if (level > 1.0) throw InputError("mean_shrink level must be in [0, 1]");
    const Vec mean = mean_vector(clean);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double m = mean[static_cast<Eigen::Index>(j)];
        data[i * d + j] = m + (1.0 - level) * (data[i * d + j] - m);
      }
    }
  }

  const char* kind_name = kind == DegradeKind::gaussian_noise ? "gaussian_noise" : "mean_shrink";
  EmbeddingSet out(std::move(data), n, d, clean.label(),
                   clean.source() + " + " + kind_name + "(" + fmt_double(level) + ")");
  if (clean.dtype() == Dtype::f32) return out.cast(Dtype::f32);
  return out;
}

std::vector<StudySeries> bandwidth_sweep(const EmbeddingSet& reference,
                                         std::span<const EmbeddingSet> degraded,
                                         std::span<const double> scales, int threads) {
  if (degraded.empty()) throw InputError("bandwidth sweep needs at least one degraded set");
  if (scales.empty()) throw InputError("bandwidth sweep needs at least one scale");
  for (double s : scales) {
    if (!(s > 0.0)) throw InputError("bandwidth scales must be positive");
  }

  const double sigma = median_bandwidth(reference, threads);
  constexpr double kClipFloor = 1e-12;

  std::vector<StudySeries> out;
  out.reserve(scales.size());
  for (double scale : scales) {
    KernelSpec spec;
    spec.sigma = sigma;
    spec.scale = scale;

    std::vector<double> values;
    values.reserve(degraded.size());
    std::size_t clipped = 0;
    for (const auto& set : degraded) {
      double v = mmd2_unbiased(reference, set, spec, DistanceBlockPlan{}, threads);
      if (v < kClipFloor) {
        v = kClipFloor;
        ++clipped;
      }
      values.push_back(v);
    }
    const double peak = *std::max_element(values.begin(), values.end());

    StudySeries series;
    series.x_label = "degradation_level";
    series.y_label = "normalized_mmd2";
    series.meta["scale"] = fmt_double(scale);
    series.meta["sigma"] = fmt_double(sigma);
    series.meta["clipped_points"] = std::to_string(clipped);
    bool monotone = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double norm = values[i] / peak;
      if (i > 0 && norm < series.points.back().mean) monotone = false;
      series.points.push_back({static_cast<double>(i), norm, norm, norm});
    }
    series.meta["monotone"] = monotone ? "true" : "false";
    out.push_back(std::move(series));
  }
  return out;
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mid-rank
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (!(da > 0.0) || !(db > 0.0)) {
    throw InputError("rank correlation undefined: a column is constant");
  }
  return num / std::sqrt(da * db);
}

}  // namespace

SpearmanResult spearman_correlation(const RatingsTable& table) {
  table.validate();
  const std::size_t n = table.rows.size();
  std::vector<double> scores(n), ratings(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = table.rows[i].metric_score;
    ratings[i] = table.rows[i].human_rating;
  }
  const auto rs = mid_ranks(scores);
  const auto rr = mid_ranks(ratings);
  const double rho = pearson(rs, rr);

  SpearmanResult result;
  result.rho = std::clamp(rho, -1.0, 1.0);
  result.n = static_cast<std::int64_t>(n);

  if (n <= 8) {
    // Exhaustive two-sided permutation test over all n! orderings.
    result.exact = true;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> permuted(n);
    std::size_t total = 0, at_least = 0;
    const double threshold = std::abs(result.rho) - 1e-12;
    do {
      for (std::size_t i = 0; i < n; ++i) permuted[i] = rr[perm[i]];
      ++total;
      if (std::abs(pearson(rs, permuted)) >= threshold) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.p_value = static_cast<double>(at_least) / static_cast<double>(total);
  } else {
    result.exact = false;
    const double r2 = result.rho * result.rho;
    if (r2 >= 1.0) {
      result.p_value = 0.0;  // t diverges; smaller than any representable p
    } else {
      const double dof = static_cast<double>(n - 2);
      const double t = result.rho * std::sqrt(dof / (1.0 - r2));
      boost::math::students_t_distribution<double> dist(dof);
      result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
  }
  return result;
}

std::vector<StudySeries> timing_benchmark(const BenchmarkConfig& config) {
  if (config.dims.empty() || config.sizes.empty()) {
    throw InputError("benchmark needs at least one dimension and one size");
  }
  if (config.trials < 1) throw InputError("benchmark needs trials >= 1");
  if (config.warmup < 0) throw InputError("benchmark warmup must be >= 0");
  for (std::size_t i = 1; i < config.dims.size(); ++i) {
    if (config.dims[i] <= config.dims[i - 1]) {
      throw InputError("benchmark dims must be strictly increasing");
    }
  }
  for (std::size_t i = 1; i < config.sizes.size(); ++i) {
    if (config.sizes[i] <= config.sizes[i - 1]) {
      throw InputError("benchmark sizes must be strictly increasing");
    }
  }
  const bool low_trials = config.trials < 10;

  using Clock = std::chrono::steady_clock;
  auto to_ms = [](Clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
  };
  auto percentile = [](std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
  };

  std::vector<StudySeries> out;
  for (Metric metric : {Metric::kad, Metric::fad}) {
    for (std::size_t d : config.dims) {
      StudySeries series;
      series.x_label = "N";
      series.y_label = "wall_ms";
      series.meta["metric"] = metric_name(metric);
      series.meta["d"] = std::to_string(d);
      series.meta["trials"] = std::to_string(config.trials);
      series.meta["warmup"] = std::to_string(config.warmup);
      series.meta["seed"] = std::to_string(config.seed);
      series.meta["threads"] = std::to_string(config.threads);
      series.meta["dtype"] = "f32";
      if (low_trials) series.meta["warning"] = "trials < 10; percentiles are coarse";

      for (std::size_t n : config.sizes) {
        try {
          const auto unit = DistributionSpec::gaussian(std::vector<double>(d, 0.0),
                                                       std::vector<double>(d, 1.0));
          const std::uint64_t cell = hash_tag("bench.cell") ^ (d * 1000003ull + n);
          const EmbeddingSet x =
              sample(unit, n, config.seed ^ mix64(cell), "bench_ref").cast(Dtype::f32);
          const EmbeddingSet y =
              sample(unit, n, config.seed ^ mix64(cell + 1), "bench_eval").cast(Dtype::f32);

          KernelSpec spec;
          spec.sigma = median_bandwidth(x, config.threads);  // untimed, once per cell

          auto run_once = [&]() -> double {
            const auto t0 = Clock::now();
            if (metric == Metric::kad) {
              (void)kad_score(x, y, spec, 100.0, DistanceBlockPlan{}, config.threads);
            } else {
              (void)fad_score(x, y);
            }
            return to_ms(Clock::now() - t0);
          };

          for (int w = 0; w < config.warmup; ++w) (void)run_once();
          std::vector<double> times(static_cast<std::size_t>(config.trials));
          for (int t = 0; t < config.trials; ++t) times[static_cast<std::size_t>(t)] = run_once();

          const double mean =
              std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
          // Percentile bands widened to include the mean so lo <= mean <= hi
          // holds even for skewed timing samples.
          series.points.push_back({static_cast<double>(n), mean,
                                   std::min(mean, percentile(times, 0.05)),
                                   std::max(mean, percentile(times, 0.95))});
        } catch (const std::bad_alloc&) {
          throw ResourceError("benchmark allocation failure at d = " + std::to_string(d) +
                              ", N = " + std::to_string(n));
        }
      }
      out.push_back(std::move(series));
    }
  }
  return out;
}

}  // namespace kadtk
