// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// ran criterion fails. Criteria 10 and 11 exercise the command-line tool and
// need --cli <path-to-kadtk>.
//
// Usage: kadtk_acceptance --cli <path> [criterion numbers...]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "kadtk/io.hpp"
#include "kadtk/kernel.hpp"
#include "kadtk/metric.hpp"
#include "kadtk/rng.hpp"
#include "kadtk/study.hpp"
#include "kadtk/synth.hpp"
#include "kadtk/types.hpp"

using namespace kadtk;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("kadtk_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path file(const std::string& name) const { return dir / name; }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = g_cli_path + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DistributionSpec two_lobe(std::size_t dim, double offset) {
  DistributionSpec spec;
  spec.kind = DistributionSpec::Kind::gaussian_mixture;
  spec.dim = dim;
  std::vector<double> up(dim, 0.0), down(dim, 0.0), unit(dim, 1.0);
  up[0] = offset;
  down[0] = -offset;
  spec.components.push_back({0.5, up, unit});
  spec.components.push_back({0.5, down, unit});
  return spec;
}

bool close_rel(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::abs(want);
}

// --- criterion 1: MMD oracle equivalence --------------------------------

double mmd2_triple_loop(const EmbeddingSet& x, const EmbeddingSet& y, double sigma) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto k = [&](const EmbeddingSet& a, std::size_t i, const EmbeddingSet& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double diff = a.value(i, c) - b.value(j, c);
      s += diff * diff;
    }
    return std::exp(-s * inv);
  };
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  const std::size_t n = x.rows(), m = y.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sxx += k(x, i, x, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) syy += k(y, i, y, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) sxy += k(x, i, y, j);
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return sxx / (nn * (nn - 1.0)) + syy / (mm * (mm - 1.0)) - 2.0 * sxy / (nn * mm);
}

bool criterion_1(std::string& detail) {
  RngStream rng(101, {hash_tag("acc.c1")});
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.next_below(49);
    const std::size_t m = 2 + rng.next_below(49);
    const std::size_t d = 1 + rng.next_below(8);
    const double sigma = 0.5 + 4.5 * rng.next_uniform();

    // mean-shifted pairs keep the estimator away from zero so the relative
    // comparison is meaningful
    std::vector<double> mx(d, 0.0), my(d, 0.5), unit(d, 1.0);
    const auto sx = sample(DistributionSpec::gaussian(mx, unit), n,
                           3000 + 2 * static_cast<std::uint64_t>(rep), "x");
    const auto sy = sample(DistributionSpec::gaussian(my, unit), m,
                           3001 + 2 * static_cast<std::uint64_t>(rep), "y");
    KernelSpec spec;
    spec.sigma = sigma;
    const double got = mmd2_unbiased(sx, sy, spec);
    const double want = mmd2_triple_loop(sx, sy, sigma);
    const double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-10)) {
      detail = "pair " + std::to_string(rep) + ": relative error " + std::to_string(rel);
      return false;
    }
  }
  detail = "100 random pairs, worst relative error " + format_double(worst, 3);
  return true;
}

// --- criterion 2: FAD oracle equivalence --------------------------------

bool criterion_2(std::string& detail) {
  RngStream rng(102, {hash_tag("acc.c2")});
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + rng.next_below(8);
    std::vector<double> mx(d), my(d), sx(d), sy(d);
    for (std::size_t k = 0; k < d; ++k) {
      mx[k] = 2.0 * rng.next_uniform() - 1.0;
      my[k] = 2.0 * rng.next_uniform() - 1.0;
      sx[k] = 0.5 + rng.next_uniform();
      sy[k] = 0.5 + rng.next_uniform();
    }
    const auto spec_x = DistributionSpec::gaussian(mx, sx);
    const auto spec_y = DistributionSpec::gaussian(my, sy);

    GaussianStats gx, gy;
    gx.mean = Eigen::Map<const Vec>(mx.data(), static_cast<Eigen::Index>(d));
    gy.mean = Eigen::Map<const Vec>(my.data(), static_cast<Eigen::Index>(d));
    gx.cov = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    gy.cov = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      gx.cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = sx[k] * sx[k];
      gy.cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = sy[k] * sy[k];
    }
    gx.n = gy.n = 2;

    const double got = fad_score(gx, gy).value;
    const double want = analytic_fad(spec_x, spec_y);
    const double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-10)) {
      detail = "moment pair " + std::to_string(rep) + ": relative error " +
               std::to_string(rel);
      return false;
    }
  }

  for (std::size_t d : {2ull, 5ull, 8ull}) {
    std::vector<double> mx(d, 0.0), my(d, 0.0), sx(d, 1.0), sy(d, 1.0);
    my[0] = 1.0;
    sy[d - 1] = 1.5;
    const auto spec_x = DistributionSpec::gaussian(mx, sx);
    const auto spec_y = DistributionSpec::gaussian(my, sy);
    const auto xs = sample(spec_x, 20000, 900 + d, "x");
    const auto ys = sample(spec_y, 20000, 901 + d, "y");
    const double got = fad_score(xs, ys).value;
    const double want = analytic_fad(spec_x, spec_y);
    if (std::abs(got - want) >= 0.05) {
      detail = "sampled d=" + std::to_string(d) + ": |" + format_double(got, 6) + " - " +
               format_double(want, 6) + "| >= 0.05";
      return false;
    }
  }
  detail = "100 moment pairs (worst rel " + format_double(worst, 3) +
           "), 3 sampled pairs within 0.05";
  return true;
}

// --- criteria 3 and 4: convergence fixtures ------------------------------

bool criterion_3(std::string& detail) {
  const auto mix = two_lobe(16, 2.5);
  const EmbeddingSet ref = sample(mix, 2000, 1234, "ref");
  const EmbeddingSet eval = sample(mix, 2000, 1235, "eval");
  const std::vector<std::size_t> sizes = {100, 200, 400, 800, 1600};
  const StudySeries s = convergence_study(ref, eval, sizes, 20, 1236, StudyMetric::kad);

  const StudyPoint& last = s.points.back();
  const double sd_last = last.mean - last.lo;
  std::ostringstream info;
  for (const StudyPoint& p : s.points) {
    const double sd = p.mean - p.lo;
    const double pooled = std::sqrt((sd * sd + sd_last * sd_last) / 2.0);
    const double dev = std::abs(p.mean - last.mean);
    info << " N=" << p.x << ":" << format_double(dev, 2) << "/" << format_double(pooled, 2);
    if (&p != &last && dev >= pooled) {
      detail = "N=" + std::to_string(static_cast<long long>(p.x)) + ": |mean - mean(1600)| = " +
               format_double(dev, 4) + " >= pooled sd " + format_double(pooled, 4);
      return false;
    }
  }
  detail = "kad mean flat within pooled sd at every N (dev/sd:" + info.str() + ")";
  return true;
}

bool criterion_4(std::string& detail) {
  const auto mix = two_lobe(16, 2.5);
  const EmbeddingSet ref = sample(mix, 2000, 1234, "ref");
  const EmbeddingSet eval = sample(mix, 2000, 1235, "eval");
  const std::vector<std::size_t> sizes = {100, 200, 400, 800, 1600};
  const StudySeries s = convergence_study(ref, eval, sizes, 20, 1237, StudyMetric::fad);

  const double intercept = std::stod(s.meta.at("inf_intercept"));
  const double r2 = std::stod(s.meta.at("inf_r_squared"));
  if (!(r2 >= 0.9)) {
    detail = "r^2 of the 1/N fit is " + format_double(r2, 4) + " < 0.9";
    return false;
  }
  double ratio_sum = 0.0;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    ratio_sum += (s.points[i].mean - intercept) / (s.points[i - 1].mean - intercept);
  }
  const double mean_ratio = ratio_sum / static_cast<double>(s.points.size() - 1);
  if (!(mean_ratio >= 0.35 && mean_ratio <= 0.65)) {
    detail = "mean doubling ratio " + format_double(mean_ratio, 4) + " outside [0.35, 0.65]";
    return false;
  }
  detail = "r^2 = " + format_double(r2, 4) + ", mean doubling ratio " +
           format_double(mean_ratio, 3);
  return true;
}

// --- criterion 5: normality-assumption failure demo ----------------------

bool criterion_5(std::string& detail) {
  const auto mix = two_lobe(8, 4.0);
  std::vector<double> mean, var;
  mix.population_moments(mean, var);
  std::vector<double> sd(var.size());
  for (std::size_t i = 0; i < var.size(); ++i) sd[i] = std::sqrt(var[i]);
  const auto matched = DistributionSpec::gaussian(mean, sd);

  const EmbeddingSet xs = sample(mix, 4000, 42, "mix");
  const EmbeddingSet ys = sample(matched, 4000, 43, "gauss");
  KernelSpec spec;
  spec.sigma = median_bandwidth(xs);

  const double fad = fad_score(xs, ys).value;
  const double kad = kad_score(xs, ys, spec).value;

  double m = 0.0, m2 = 0.0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const auto a = sample(mix, 4000, 7000 + 2 * static_cast<std::uint64_t>(r), "a");
    const auto b = sample(mix, 4000, 7001 + 2 * static_cast<std::uint64_t>(r), "b");
    const double v = kad_score(a, b, spec).value;
    m += v;
    m2 += v * v;
  }
  m /= reps;
  const double null_sd = std::sqrt((m2 / reps - m * m) * reps / (reps - 1.0));

  if (!(fad <= 0.05)) {
    detail = "fad " + format_double(fad, 4) + " > 0.05";
    return false;
  }
  if (!(kad >= 10.0 * null_sd)) {
    detail = "kad " + format_double(kad, 4) + " < 10 x null sd " + format_double(null_sd, 4);
    return false;
  }
  detail = "fad " + format_double(fad, 3) + " <= 0.05; kad " + format_double(kad, 3) + " = " +
           format_double(kad / null_sd, 3) + " x null sd";
  return true;
}

// --- criterion 6: bandwidth sweep ----------------------------------------

bool criterion_6(std::string& detail) {
  const auto gauss = DistributionSpec::gaussian(std::vector<double>(6, 0.0),
                                                std::vector<double>(6, 1.0));
  const EmbeddingSet ref = sample(gauss, 600, 61, "ref");
  std::vector<EmbeddingSet> degraded;
  for (double level : {0.0, 0.1, 0.2, 0.4, 0.8}) {
    degraded.push_back(degrade_embeddings(ref, DegradeKind::gaussian_noise, level, 62));
  }
  const auto scales = bandwidth_scale_grid(-3, 3);
  const auto series = bandwidth_sweep(ref, degraded, scales);

  for (const auto& s : series) {
    const double scale = std::stod(s.meta.at("scale"));
    const bool monotone = s.meta.at("monotone") == "true";
    const int clipped = std::stoi(s.meta.at("clipped_points"));
    if ((scale == 1.0 || scale == 10.0 || scale == 100.0) && !monotone) {
      detail = "scale " + format_double(scale, 3) + " is not monotone nondecreasing";
      return false;
    }
    if (scale <= 0.1 && clipped < 1) {
      detail = "scale " + format_double(scale, 3) + " has no clipped values";
      return false;
    }
  }
  detail = "median/10x/100x monotone; every scale <= 0.1x clipped at least one value";
  return true;
}

// --- criterion 7: extrapolation ------------------------------------------

bool criterion_7(std::string& detail) {
  std::vector<std::pair<std::int64_t, double>> pts;
  for (std::int64_t n : {100, 200, 400}) pts.emplace_back(n, 1.0 + 50.0 / static_cast<double>(n));
  const LinearFit fit = fad_inf_extrapolate(pts);
  if (!close_rel(fit.intercept, 1.0, 1e-9) || !close_rel(fit.slope, 50.0, 1e-9)) {
    detail = "intercept " + format_double(fit.intercept) + ", slope " + format_double(fit.slope);
    return false;
  }
  detail = "intercept and slope recovered to 1e-9 relative (r^2 = " +
           format_double(fit.r_squared, 10) + ")";
  return true;
}

// --- criterion 8: Spearman fixtures --------------------------------------

bool criterion_8(std::string& detail) {
  RatingsTable up, down;
  for (int i = 1; i <= 5; ++i) {
    up.rows.push_back({"s" + std::to_string(i), double(i), double(10 * i)});
    down.rows.push_back({"s" + std::to_string(i), double(i), double(60 - 10 * i)});
  }
  const SpearmanResult r_up = spearman_correlation(up);
  const SpearmanResult r_down = spearman_correlation(down);
  if (std::abs(r_up.rho - 1.0) > 1e-14 || std::abs(r_down.rho + 1.0) > 1e-14) {
    detail = "rho = " + format_double(r_up.rho) + " / " + format_double(r_down.rho);
    return false;
  }
  if (std::abs(r_down.p_value - 2.0 / 120.0) > 1e-15 || !r_down.exact) {
    detail = "anti-ordered n=5 p = " + format_double(r_down.p_value) + " != 2/120";
    return false;
  }

  RatingsTable ties;
  ties.rows.push_back({"a", 1.0, 1.0});
  ties.rows.push_back({"b", 2.0, 2.0});
  ties.rows.push_back({"c", 2.0, 3.0});
  ties.rows.push_back({"d", 4.0, 4.0});
  const SpearmanResult r_ties = spearman_correlation(ties);
  // rank-then-Pearson oracle on mid-ranks (1, 2.5, 2.5, 4) vs (1, 2, 3, 4)
  const std::vector<double> rs = {1.0, 2.5, 2.5, 4.0}, rr = {1.0, 2.0, 3.0, 4.0};
  double ms = 0, mr = 0;
  for (int i = 0; i < 4; ++i) {
    ms += rs[i];
    mr += rr[i];
  }
  ms /= 4;
  mr /= 4;
  double num = 0, ds = 0, dr = 0;
  for (int i = 0; i < 4; ++i) {
    num += (rs[i] - ms) * (rr[i] - mr);
    ds += (rs[i] - ms) * (rs[i] - ms);
    dr += (rr[i] - mr) * (rr[i] - mr);
  }
  const double want = num / std::sqrt(ds * dr);
  if (std::abs(r_ties.rho - want) > 1e-12) {
    detail = "tie fixture rho " + format_double(r_ties.rho) + " vs oracle " + format_double(want);
    return false;
  }
  detail = "rho = +/-1 exact, n=5 exact p = 2/120, tie fixture matches oracle to 1e-12";
  return true;
}

// --- criterion 9: complexity gap ------------------------------------------

bool criterion_9(std::string& detail) {
  BenchmarkConfig config;
  config.dims = {128, 512, 2048};
  config.sizes = {1000};
  config.trials = 3;
  config.warmup = 1;
  config.seed = 91;
  const auto series = timing_benchmark(config);

  // series order: kad x dims, then fad x dims
  auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += std::log(xs[i]);
      my += std::log(ys[i]);
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
      sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    }
    return sxy / sxx;
  };

  std::vector<double> dims, kad_ms, fad_ms;
  for (const auto& s : series) {
    const double mean = s.points.at(0).mean;
    if (s.meta.at("metric") == "kad") {
      dims.push_back(std::stod(s.meta.at("d")));
      kad_ms.push_back(mean);
    } else {
      fad_ms.push_back(mean);
    }
  }
  const double kad_slope = slope(dims, kad_ms);
  const double fad_slope = slope(dims, fad_ms);
  const double ratio = fad_ms.back() / kad_ms.back();

  std::ostringstream info;
  info << "kad ms {" << format_double(kad_ms[0], 4) << ", " << format_double(kad_ms[1], 4)
       << ", " << format_double(kad_ms[2], 4) << "} slope " << format_double(kad_slope, 3)
       << "; fad ms {" << format_double(fad_ms[0], 4) << ", " << format_double(fad_ms[1], 4)
       << ", " << format_double(fad_ms[2], 4) << "} slope " << format_double(fad_slope, 3)
       << "; d=2048 ratio " << format_double(ratio, 3);

  if (!(fad_slope - kad_slope >= 1.0)) {
    detail = "slope gap " + format_double(fad_slope - kad_slope, 3) + " < 1.0 (" + info.str() + ")";
    return false;
  }
  if (!(kad_ms.back() <= fad_ms.back() / 10.0)) {
    detail = "kad not 10x faster at d=2048 (" + info.str() + ")";
    return false;
  }
  detail = info.str();
  return true;
}

// --- criterion 10: I/O round-trips and corrupt files ----------------------

bool criterion_10(std::string& detail) {
  Scratch tmp;
  RngStream rng(110, {hash_tag("acc.c10")});
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t rows = 1 + rng.next_below(60);
    const std::size_t cols = 1 + rng.next_below(24);
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = rng.next_normal();
    const EmbeddingSet f64(std::move(data), rows, cols, "rt", "acc");
    const EmbeddingSet f32 = f64.cast(Dtype::f32);

    for (const char* ext : {"npy", "csv"}) {
      const fs::path p64 = tmp.file("a." + std::string(ext));
      write_embeddings(f64, p64, Dtype::f64);
      if (!read_embeddings(p64).cast(Dtype::f64).bitwise_equal(f64)) {
        detail = std::string("f64 ") + ext + " round-trip not bit-exact (rep " +
                 std::to_string(rep) + ")";
        return false;
      }
      const fs::path p32 = tmp.file("b." + std::string(ext));
      write_embeddings(f32, p32, Dtype::f32);
      if (!read_embeddings(p32).cast(Dtype::f32).bitwise_equal(f32)) {
        detail = std::string("f32 ") + ext + " round-trip not bit-exact (rep " +
                 std::to_string(rep) + ")";
        return false;
      }
    }
  }

  // corrupt fixtures through the CLI: exit 2 plus a diagnostic
  const fs::path good = tmp.file("good.npy");
  {
    std::vector<double> data = {1, 2, 3, 4};
    write_embeddings(EmbeddingSet(std::move(data), 2, 2, "g", "acc"), good, Dtype::f64);
  }
  const fs::path corrupt = tmp.file("corrupt.npy");
  {
    std::string bytes = slurp(good);
    bytes.resize(bytes.size() - 8);  // truncate the payload
    std::ofstream out(corrupt, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  const fs::path log = tmp.file("log");
  const int code = run_cli("score --ref " + corrupt.string() + " --eval " + good.string() +
                               " -o " + tmp.file("out.csv").string(),
                           log);
  if (code != 2) {
    detail = "corrupt file gave exit " + std::to_string(code) + ", want 2";
    return false;
  }
  const std::string msg = slurp(log);
  if (msg.find("bytes") == std::string::npos) {
    detail = "diagnostic does not mention the byte counts: " + msg;
    return false;
  }
  detail = "50 seeded shapes round-trip bit-exact in both formats; corrupt file exits 2";
  return true;
}

// --- criterion 11: CLI determinism ----------------------------------------

bool criterion_11(std::string& detail) {
  Scratch tmp;
  const auto gauss = DistributionSpec::gaussian(std::vector<double>(5, 0.0),
                                                std::vector<double>(5, 1.0));
  write_embeddings(sample(gauss, 300, 111, "ref"), tmp.file("ref.npy"), Dtype::f64);
  write_embeddings(sample(gauss, 250, 112, "eval"), tmp.file("eval.npy"), Dtype::f64);

  const std::string refs = " --ref " + tmp.file("ref.npy").string() + " --eval " +
                           tmp.file("eval.npy").string();
  struct Case {
    std::string name;
    std::string args;
  };
  const std::vector<Case> cases = {
      {"score", "score" + refs + " --metric both --seed 5 -o "},
      {"sweep", "sweep --ref " + tmp.file("ref.npy").string() +
                    " --recipe gaussian_noise --levels 0,0.2,0.5 --scales 0:1 --seed 5 -o "},
      {"convergence", "convergence" + refs + " --sizes 50,100 --trials 4 --seed 5 -o "},
  };
  for (const auto& c : cases) {
    const fs::path a = tmp.file(c.name + "_t1.csv");
    const fs::path b = tmp.file(c.name + "_t8.csv");
    const fs::path b2 = tmp.file(c.name + "_t8_again.csv");
    if (run_cli(c.args + a.string() + " --threads 1", tmp.file("log")) != 0 ||
        run_cli(c.args + b.string() + " --threads 8", tmp.file("log")) != 0 ||
        run_cli(c.args + b2.string() + " --threads 8", tmp.file("log")) != 0) {
      detail = c.name + " run failed";
      return false;
    }
    if (slurp(a) != slurp(b)) {
      detail = c.name + ": --threads 1 vs --threads 8 CSVs differ";
      return false;
    }
    if (slurp(b) != slurp(b2)) {
      detail = c.name + ": consecutive identical runs differ";
      return false;
    }
  }
  detail = "score/sweep/convergence CSVs byte-identical across threads and repeat runs";
  return true;
}

struct Criterion {
  int number;
  const char* title;
  std::function<bool(std::string&)> run;
  bool needs_cli;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else {
      selected.push_back(std::atoi(argv[i]));
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "MMD oracle equivalence", criterion_1, false},
      {2, "FAD oracle equivalence", criterion_2, false},
      {3, "KAD unbiasedness across sample sizes", criterion_3, false},
      {4, "FAD 1/N bias law", criterion_4, false},
      {5, "normality-assumption failure demo", criterion_5, false},
      {6, "bandwidth sweep monotonicity and clipping", criterion_6, false},
      {7, "FAD-infinity extrapolation", criterion_7, false},
      {8, "Spearman fixtures", criterion_8, false},
      {9, "complexity gap (FAD d-scaling vs KAD)", criterion_9, false},
      {10, "I/O round-trips and corrupt-file handling", criterion_10, true},
      {11, "CLI determinism across threads and runs", criterion_11, true},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.number) == selected.end()) {
      continue;
    }
    if (c.needs_cli && g_cli_path.empty()) {
      std::printf("[FAIL] criterion %2d: %s — needs --cli <path-to-kadtk>\n", c.number,
                  c.title);
      ++failures;
      continue;
    }
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.number, c.title,
                detail.c_str());
    if (!ok) ++failures;
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
