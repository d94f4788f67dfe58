// kadtk command-line tool: KAD/FAD scores and the surrounding studies
// (bandwidth sweeps, convergence curves, rank correlation, benchmarks) over
// precomputed embedding files.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kadtk/io.hpp"
#include "kadtk/kernel.hpp"
#include "kadtk/metric.hpp"
#include "kadtk/study.hpp"
#include "kadtk/synth.hpp"
#include "kadtk/threading.hpp"
#include "kadtk/types.hpp"

namespace fs = std::filesystem;
using namespace kadtk;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct CommonOpts {
  std::uint64_t seed = 42;
  int threads = 0;  // 0 = KADTK_THREADS env or all cores
  std::string output;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool output_required = true) {
  cmd->add_option("--seed", opts.seed, "Seed for every random draw")->capture_default_str();
  cmd->add_option("-t,--threads", opts.threads,
                  "Worker threads (default: KADTK_THREADS env or all cores)");
  auto* out = cmd->add_option("-o,--output", opts.output, "Output CSV path");
  if (output_required) out->required();
  cmd->add_flag("-v,--verbose", opts.verbose, "Chatty progress on stderr");
}

int resolve_thread_opt(const CommonOpts& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("KADTK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string join_args(int argc, char** argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += ' ';
    line += argv[i];
  }
  return line;
}

void write_text_file(const std::string& path, const std::string& content) {
  if (path.empty()) throw InputError("output path is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

EmbeddingSet load_set(const std::string& path, bool frame_level, bool verbose = false) {
  EmbeddingSet set = fs::is_directory(path) ? read_embedding_dir(path, frame_level)
                                            : read_embeddings(path);
  if (verbose) {
    std::fprintf(stderr, "loaded %s: %zu x %zu (%s)\n", path.c_str(), set.rows(),
                 set.cols(), dtype_name(set.dtype()));
  }
  return set;
}

RunManifest base_manifest(const std::string& command_line, std::uint64_t seed,
                          const std::vector<std::string>& input_paths) {
  RunManifest m;
  m.tool_version = kToolVersion;
  m.command_line = command_line;
  m.seed = seed;
  m.timestamp_utc = utc_timestamp();
  for (const auto& p : input_paths) {
    if (fs::exists(p) && fs::is_regular_file(p)) {
      m.inputs.emplace_back(p, sha256_file(p));
    } else if (fs::is_directory(p)) {
      m.inputs.emplace_back(p, "directory");
    }
  }
  return m;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::istringstream iss(text);
  std::string tok;
  while (std::getline(iss, tok, ',')) {
    try {
      const long long v = std::stoll(tok);
      if (v < 1) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw InputError(std::string("cannot parse ") + what + " entry \"" + tok + "\"");
    }
  }
  if (out.empty()) throw InputError(std::string(what) + " list is empty");
  return out;
}

// ---------------------------------------------------------------- score ---

struct ScoreOpts {
  CommonOpts common;
  std::string ref, eval, metric = "both", bandwidth = "median";
  double alpha = 100.0;
  bool frame_level = false;
};

int run_score(const ScoreOpts& opts, const std::string& command_line) {
  const int threads = resolve_thread_opt(opts.common);
  const EmbeddingSet ref = load_set(opts.ref, opts.frame_level, opts.common.verbose);
  const EmbeddingSet eval = load_set(opts.eval, opts.frame_level, opts.common.verbose);

  const bool want_kad = opts.metric == "kad" || opts.metric == "both";
  const bool want_fad = opts.metric == "fad" || opts.metric == "both";
  if (!want_kad && !want_fad) {
    throw InputError("metric must be kad, fad or both (got \"" + opts.metric + "\")");
  }

  std::vector<ScoreRecord> records;
  std::optional<KernelSpec> spec;
  if (want_kad) {
    KernelSpec k;
    if (opts.bandwidth == "median") {
      k.sigma = median_bandwidth(ref, threads);
    } else {
      try {
        k.sigma = std::stod(opts.bandwidth);
      } catch (const std::exception&) {
        throw InputError("bandwidth must be \"median\" or a positive number (got \"" +
                         opts.bandwidth + "\")");
      }
      if (!(k.sigma > 0.0)) throw InputError("explicit bandwidth must be positive");
    }
    spec = k;
    records.push_back(kad_score(ref, eval, k, opts.alpha, DistanceBlockPlan{}, threads));
  }
  if (want_fad) records.push_back(fad_score(ref, eval));

  for (const auto& r : records) {
    std::printf("%-4s %s\n", metric_name(r.metric), format_double(r.value, 6).c_str());
    if (r.value < 0.0) {
      std::printf("     note: negative value; the unbiased estimator is reported unclamped\n");
    }
  }

  write_scores(records, opts.common.output);
  RunManifest manifest = base_manifest(command_line, opts.common.seed, {opts.ref, opts.eval});
  manifest.extra.emplace_back("metric", opts.metric);
  manifest.extra.emplace_back("alpha", format_double(opts.alpha));
  manifest.extra.emplace_back("threads", std::to_string(resolve_threads(threads)));
  if (spec) {
    manifest.extra.emplace_back("sigma", format_double(spec->sigma));
    manifest.extra.emplace_back("bandwidth_policy", opts.bandwidth);
  }
  write_manifest(manifest, opts.common.output);
  return 0;
}

// ---------------------------------------------------------------- sweep ---

struct SweepOpts {
  CommonOpts common;
  std::string ref;
  std::vector<std::string> degraded;
  std::string recipe;  // gaussian_noise | mean_shrink
  std::string levels = "0,0.1,0.2,0.4,0.8";
  std::string scales = "-3:3";
  bool frame_level = false;
};

std::pair<int, int> parse_exponent_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError("scales must be an exponent range \"min:max\" (got \"" + text + "\")");
  }
  try {
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputError("cannot parse exponent range \"" + text + "\"");
  }
}

int run_sweep(const SweepOpts& opts, const std::string& command_line) {
  const int threads = resolve_thread_opt(opts.common);
  const EmbeddingSet ref = load_set(opts.ref, opts.frame_level, opts.common.verbose);

  std::vector<EmbeddingSet> degraded;
  std::vector<std::string> level_names;
  if (!opts.recipe.empty()) {
    if (!opts.degraded.empty()) {
      throw InputError("pass either --recipe or --degraded, not both");
    }
    DegradeKind kind;
    if (opts.recipe == "gaussian_noise") {
      kind = DegradeKind::gaussian_noise;
    } else if (opts.recipe == "mean_shrink") {
      kind = DegradeKind::mean_shrink;
    } else {
      throw InputError("unknown recipe \"" + opts.recipe +
                       "\" (expected gaussian_noise or mean_shrink)");
    }
    std::istringstream iss(opts.levels);
    std::string tok;
    while (std::getline(iss, tok, ',')) {
      double level = 0.0;
      try {
        level = std::stod(tok);
      } catch (const std::exception&) {
        throw InputError("cannot parse degradation level \"" + tok + "\"");
      }
      degraded.push_back(degrade_embeddings(ref, kind, level, opts.common.seed));
      level_names.push_back(tok);
    }
  } else {
    for (const auto& p : opts.degraded) {
      degraded.push_back(load_set(p, opts.frame_level, opts.common.verbose));
      level_names.push_back(p);
    }
  }
  if (degraded.empty()) throw InputError("nothing to sweep: no degraded sets given");

  const auto [min_exp, max_exp] = parse_exponent_range(opts.scales);
  const auto scales = bandwidth_scale_grid(min_exp, max_exp);
  const auto series = bandwidth_sweep(ref, degraded, scales, threads);

  write_sweep_csv(series, opts.common.output);
  std::printf("scale      monotone  clipped\n");
  for (const auto& s : series) {
    std::printf("%-10s %-9s %s\n", s.meta.at("scale").c_str(), s.meta.at("monotone").c_str(),
                s.meta.at("clipped_points").c_str());
  }

  RunManifest manifest = base_manifest(command_line, opts.common.seed, {opts.ref});
  manifest.extra.emplace_back("sigma", series.front().meta.at("sigma"));
  manifest.extra.emplace_back("scales", opts.scales);
  manifest.extra.emplace_back("recipe", opts.recipe.empty() ? "files" : opts.recipe);
  manifest.extra.emplace_back("levels", opts.levels);
  manifest.extra.emplace_back("threads", std::to_string(resolve_threads(threads)));
  write_manifest(manifest, opts.common.output);
  return 0;
}

// --------------------------------------------------------- convergence ---

struct ConvergenceOpts {
  CommonOpts common;
  std::string ref, eval, metric = "both";
  std::string sizes = "100,200,400,800";
  int trials = 20;
  bool frame_level = false;
};

int run_convergence(const ConvergenceOpts& opts, const std::string& command_line) {
  const int threads = resolve_thread_opt(opts.common);
  const EmbeddingSet ref = load_set(opts.ref, opts.frame_level, opts.common.verbose);
  const EmbeddingSet eval = load_set(opts.eval, opts.frame_level, opts.common.verbose);
  const auto sizes = parse_size_list(opts.sizes, "sizes");

  std::vector<StudySeries> series;
  if (opts.metric == "kad" || opts.metric == "both") {
    series.push_back(convergence_study(ref, eval, sizes, opts.trials, opts.common.seed,
                                       StudyMetric::kad, threads));
  }
  if (opts.metric == "fad" || opts.metric == "both") {
    series.push_back(convergence_study(ref, eval, sizes, opts.trials, opts.common.seed,
                                       StudyMetric::fad, threads));
  }
  if (series.empty()) {
    throw InputError("metric must be kad, fad or both (got \"" + opts.metric + "\")");
  }

  write_convergence_csv(series, opts.common.output);
  RunManifest manifest = base_manifest(command_line, opts.common.seed, {opts.ref, opts.eval});
  for (const auto& s : series) {
    const std::string& m = s.meta.at("metric");
    if (auto it = s.meta.find("inf_intercept"); it != s.meta.end()) {
      manifest.extra.emplace_back(m + "_inf_intercept", it->second);
      manifest.extra.emplace_back(m + "_inf_slope", s.meta.at("inf_slope"));
      manifest.extra.emplace_back(m + "_inf_r_squared", s.meta.at("inf_r_squared"));
    }
    if (auto it = s.meta.find("sigma"); it != s.meta.end()) {
      manifest.extra.emplace_back("sigma", it->second);
    }
  }
  manifest.extra.emplace_back("sizes", opts.sizes);
  manifest.extra.emplace_back("trials", std::to_string(opts.trials));
  manifest.extra.emplace_back("threads", std::to_string(resolve_threads(threads)));
  write_manifest(manifest, opts.common.output);

  for (const auto& s : series) {
    std::printf("%s: ", s.meta.at("metric").c_str());
    if (auto it = s.meta.find("inf_intercept"); it != s.meta.end()) {
      std::printf("N=inf intercept %s (r^2 %s)\n", format_double(std::stod(it->second), 6).c_str(),
                  format_double(std::stod(s.meta.at("inf_r_squared")), 4).c_str());
    } else {
      std::printf("single size, no extrapolation\n");
    }
  }
  return 0;
}

// ----------------------------------------------------------- correlate ---

struct CorrelateOpts {
  CommonOpts common;
  std::string scores, ratings;
};

int run_correlate(const CorrelateOpts& opts, const std::string& command_line) {
  const RatingsFile ratings = read_ratings_csv(opts.ratings);

  // metric name -> rows for that metric
  std::vector<std::pair<std::string, RatingsTable>> tables;
  if (ratings.has_scores) {
    RatingsTable t;
    t.rows = ratings.rows;
    tables.emplace_back("metric_score", std::move(t));
  } else {
    if (opts.scores.empty()) {
      throw InputError("ratings file has no metric_score column; pass --scores to join");
    }
    const auto records = read_scores(opts.scores);
    std::vector<std::string> metrics;
    for (const auto& r : records) {
      if (std::find(metrics.begin(), metrics.end(), metric_name(r.metric)) == metrics.end()) {
        metrics.push_back(metric_name(r.metric));
      }
    }
    for (const auto& metric : metrics) {
      RatingsTable t;
      std::vector<std::string> unmatched;
      for (const auto& row : ratings.rows) {
        bool found = false;
        for (const auto& r : records) {
          if (metric_name(r.metric) == metric && r.eval_label == row.system_id) {
            t.rows.push_back({row.system_id, r.value, row.human_rating});
            found = true;
            break;
          }
        }
        if (!found) unmatched.push_back(row.system_id);
      }
      if (!unmatched.empty()) {
        std::string msg = "no " + metric + " score for system_id:";
        for (const auto& id : unmatched) msg += " " + id;
        throw InputError(msg);
      }
      tables.emplace_back(metric, std::move(t));
    }
  }

  std::ostringstream out;
  out << "metric,rho,p_value,method,n,significant\n";
  for (const auto& [metric, table] : tables) {
    const SpearmanResult r = spearman_correlation(table);
    const char* method = r.exact ? "exact" : "t-approx";
    const bool significant = r.p_value <= 0.05;
    out << metric << ',' << format_double(r.rho) << ',' << format_double(r.p_value) << ','
        << method << ',' << r.n << ',' << (significant ? "true" : "false") << '\n';
    std::printf("%-12s rho %-10s p %-10s (%s, n=%lld)%s\n", metric.c_str(),
                format_double(r.rho, 6).c_str(), format_double(r.p_value, 6).c_str(), method,
                static_cast<long long>(r.n), significant ? "" : "  [not significant]");
  }
  write_text_file(opts.common.output, out.str());

  RunManifest manifest = base_manifest(command_line, opts.common.seed,
                                       opts.scores.empty()
                                           ? std::vector<std::string>{opts.ratings}
                                           : std::vector<std::string>{opts.scores, opts.ratings});
  write_manifest(manifest, opts.common.output);
  return 0;
}

// ---------------------------------------------------------------- bench ---

struct BenchOpts {
  CommonOpts common;
  std::string dims = "128,512,2048";
  std::string sizes = "100,5000,10000";
  int trials = 200;
  int warmup = 10;
  int bench_threads = 1;
};

int run_bench(const BenchOpts& opts, const std::string& command_line) {
  BenchmarkConfig config;
  config.dims = parse_size_list(opts.dims, "dims");
  config.sizes = parse_size_list(opts.sizes, "sizes");
  config.trials = opts.trials;
  config.warmup = opts.warmup;
  config.seed = opts.common.seed;
  config.threads = opts.bench_threads;
  if (config.trials < 10) {
    std::fprintf(stderr, "warning: trials = %d < 10; percentiles will be coarse\n",
                 config.trials);
  }

  const auto series = timing_benchmark(config);
  write_bench_csv(series, opts.common.output);

  std::printf("%-6s %6s %8s %12s %12s %12s\n", "metric", "d", "N", "mean_ms", "p5_ms", "p95_ms");
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      std::printf("%-6s %6s %8.0f %12.3f %12.3f %12.3f\n", s.meta.at("metric").c_str(),
                  s.meta.at("d").c_str(), p.x, p.mean, p.lo, p.hi);
    }
  }

  RunManifest manifest = base_manifest(command_line, opts.common.seed, {});
  manifest.extra.emplace_back("dims", opts.dims);
  manifest.extra.emplace_back("sizes", opts.sizes);
  manifest.extra.emplace_back("trials", std::to_string(opts.trials));
  manifest.extra.emplace_back("warmup", std::to_string(opts.warmup));
  manifest.extra.emplace_back("bench_threads", std::to_string(opts.bench_threads));
  write_manifest(manifest, opts.common.output);
  return 0;
}

// ---------------------------------------------------------------- synth ---

struct SynthOpts {
  CommonOpts common;
  std::string spec;
  long long n = 0;
  std::string dtype = "f64";
};

int run_synth(const SynthOpts& opts, const std::string& command_line) {
  const DistributionSpec spec = load_distribution_spec(opts.spec);
  if (opts.n < 1) throw InputError("n must be >= 1");
  EmbeddingSet set = sample(spec, static_cast<std::size_t>(opts.n), opts.common.seed,
                            fs::path(opts.common.output).stem().string());

  Dtype dtype;
  if (opts.dtype == "f32") {
    dtype = Dtype::f32;
  } else if (opts.dtype == "f64") {
    dtype = Dtype::f64;
  } else {
    throw InputError("dtype must be f32 or f64 (got \"" + opts.dtype + "\")");
  }
  write_embeddings(set, opts.common.output, dtype);

  std::vector<double> mean, var;
  spec.population_moments(mean, var);
  std::printf("wrote %lld x %zu (%s) to %s\n", opts.n, spec.dim, dtype_name(dtype),
              opts.common.output.c_str());
  std::printf("population mean:");
  for (double m : mean) std::printf(" %s", format_double(m, 6).c_str());
  std::printf("\npopulation var: ");
  for (double v : var) std::printf(" %s", format_double(v, 6).c_str());
  std::printf("\n");

  RunManifest manifest = base_manifest(command_line, opts.common.seed, {opts.spec});
  manifest.extra.emplace_back("n", std::to_string(opts.n));
  manifest.extra.emplace_back("dtype", opts.dtype);
  write_manifest(manifest, opts.common.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KAD / FAD scores and studies over embedding sets"};
  app.require_subcommand(1);

  ScoreOpts score;
  auto* score_cmd = app.add_subcommand("score", "Compute KAD and/or FAD between two sets");
  score_cmd->add_option("--ref", score.ref, "Reference embeddings (file or directory)")->required();
  score_cmd->add_option("--eval", score.eval, "Evaluation embeddings (file or directory)")->required();
  score_cmd->add_option("--metric", score.metric, "kad | fad | both")->capture_default_str();
  score_cmd->add_option("--bandwidth", score.bandwidth, "\"median\" or an explicit sigma")
      ->capture_default_str();
  score_cmd->add_option("--alpha", score.alpha, "KAD resolution scale factor")->capture_default_str();
  score_cmd->add_flag("--frame-level", score.frame_level,
                      "Treat every frame of rank-2 per-clip files as a sample");
  add_common(score_cmd, score.common);

  SweepOpts sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Bandwidth sweep over a degradation series");
  sweep_cmd->add_option("--ref", sweep.ref, "Reference embeddings")->required();
  sweep_cmd->add_option("--degraded", sweep.degraded, "Degraded sets, in severity order");
  sweep_cmd->add_option("--recipe", sweep.recipe,
                        "Built-in degradation: gaussian_noise | mean_shrink");
  sweep_cmd->add_option("--levels", sweep.levels, "Severity levels for --recipe")
      ->capture_default_str();
  sweep_cmd->add_option("--scales", sweep.scales, "Bandwidth scale exponents, min:max")
      ->capture_default_str();
  sweep_cmd->add_flag("--frame-level", sweep.frame_level, "Frame-level directory reads");
  add_common(sweep_cmd, sweep.common);

  ConvergenceOpts conv;
  auto* conv_cmd = app.add_subcommand("convergence", "Score vs evaluation sample size");
  conv_cmd->add_option("--ref", conv.ref, "Reference embeddings")->required();
  conv_cmd->add_option("--eval", conv.eval, "Evaluation embeddings")->required();
  conv_cmd->add_option("--metric", conv.metric, "kad | fad | both")->capture_default_str();
  conv_cmd->add_option("--sizes", conv.sizes, "Comma list of subsample sizes")
      ->capture_default_str();
  conv_cmd->add_option("--trials", conv.trials, "Subsample trials per size")->capture_default_str();
  conv_cmd->add_flag("--frame-level", conv.frame_level, "Frame-level directory reads");
  add_common(conv_cmd, conv.common);

  CorrelateOpts corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Spearman correlation against ratings");
  corr_cmd->add_option("--scores", corr.scores, "Score CSV (from `score`), joined by eval label");
  corr_cmd->add_option("--ratings", corr.ratings, "Ratings CSV")->required();
  add_common(corr_cmd, corr.common);

  BenchOpts bench;
  auto* bench_cmd = app.add_subcommand("bench", "Wall-clock benchmark over a (d, N) grid");
  bench_cmd->add_option("--dims", bench.dims, "Comma list of dimensions")->capture_default_str();
  bench_cmd->add_option("--sizes", bench.sizes, "Comma list of sample sizes")->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Timed trials per cell")->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup, "Untimed warmup runs per cell")
      ->capture_default_str();
  bench_cmd->add_option("--bench-threads", bench.bench_threads,
                        "Threads inside the timed region (default 1 for low noise)")
      ->capture_default_str();
  add_common(bench_cmd, bench.common);

  SynthOpts synth;
  auto* synth_cmd = app.add_subcommand("synth", "Sample a synthetic embedding set");
  synth_cmd->add_option("--spec", synth.spec, "Distribution spec file")->required();
  synth_cmd->add_option("-n,--samples", synth.n, "Number of rows")->required();
  synth_cmd->add_option("--dtype", synth.dtype, "f32 | f64")->capture_default_str();
  add_common(synth_cmd, synth.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command_line = join_args(argc, argv);
  try {
    set_default_threads(0);  // per-command values flow through explicit args
    if (score_cmd->parsed()) return run_score(score, command_line);
    if (sweep_cmd->parsed()) return run_sweep(sweep, command_line);
    if (conv_cmd->parsed()) return run_convergence(conv, command_line);
    if (corr_cmd->parsed()) return run_correlate(corr, command_line);
    if (bench_cmd->parsed()) return run_bench(bench, command_line);
    if (synth_cmd->parsed()) return run_synth(synth, command_line);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 3;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "resource error: allocation failure\n");
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
