// Subprocess tests for the kadtk binary. The harness passes the binary path
// in the KADTK_BIN environment variable (set by the ctest registration).

#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("KADTK_BIN");
  REQUIRE_MESSAGE(env != nullptr, "KADTK_BIN must point at the kadtk binary");
  return env;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = cli_path() + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("kadtk_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kUnitGaussSpec =
    "kind = gaussian\n"
    "dim = 3\n"
    "[component]\n"
    "mean = 0 0 0\n"
    "scale = 1 1 1\n";

}  // namespace

TEST_CASE("cli: synth is deterministic and score self-comparison is tiny") {
  TempDir tmp;
  write_text(tmp.file("g.spec"), kUnitGaussSpec);

  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 200 --seed 5 -o " +
                      tmp.file("a.npy").string(),
                  tmp.file("log1")) == 0);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 200 --seed 5 -o " +
                      tmp.file("b.npy").string(),
                  tmp.file("log2")) == 0);
  CHECK(slurp(tmp.file("a.npy")) == slurp(tmp.file("b.npy")));

  REQUIRE(run_cli("score --ref " + tmp.file("a.npy").string() + " --eval " +
                      tmp.file("b.npy").string() + " --metric both -o " +
                      tmp.file("scores.csv").string(),
                  tmp.file("log3")) == 0);
  const std::string csv = slurp(tmp.file("scores.csv"));
  CHECK(csv.find("metric,value,") == 0);

  // identical sets: fad vanishes; kad equals (2 alpha / n)(Kbar - 1), so
  // |kad| <= 2 * 100 / 200 = 1 and it is never positive
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string metric, value;
    std::getline(cells, metric, ',');
    std::getline(cells, value, ',');
    const double v = std::stod(value);
    if (metric == "kad") {
      CHECK(v <= 0.0);
      CHECK(v >= -1.0);
    } else {
      CHECK(v >= 0.0);
      CHECK(v <= 1e-8);
    }
  }
  CHECK(fs::exists(tmp.file("scores.csv.manifest.json")));
}

TEST_CASE("cli: fad between synthesized (0,1) and (1,2) fixtures lands near 2") {
  TempDir tmp;
  write_text(tmp.file("a.spec"),
             "kind = gaussian\ndim = 1\n[component]\nmean = 0\nscale = 1\n");
  write_text(tmp.file("b.spec"),
             "kind = gaussian\ndim = 1\n[component]\nmean = 1\nscale = 2\n");
  REQUIRE(run_cli("synth --spec " + tmp.file("a.spec").string() + " -n 20000 --seed 21 -o " +
                      tmp.file("a.npy").string(),
                  tmp.file("log1")) == 0);
  REQUIRE(run_cli("synth --spec " + tmp.file("b.spec").string() + " -n 20000 --seed 22 -o " +
                      tmp.file("b.npy").string(),
                  tmp.file("log2")) == 0);
  REQUIRE(run_cli("score --ref " + tmp.file("a.npy").string() + " --eval " +
                      tmp.file("b.npy").string() + " --metric fad -o " +
                      tmp.file("s.csv").string(),
                  tmp.file("log3")) == 0);
  std::istringstream csv(slurp(tmp.file("s.csv")));
  std::string line;
  std::getline(csv, line);  // header
  std::getline(csv, line);
  const auto second_cell = line.substr(line.find(',') + 1);
  const double fad = std::stod(second_cell);
  CHECK(std::abs(fad - 2.0) < 0.05);
}

TEST_CASE("cli: directories of per-clip files work as ref and eval") {
  TempDir tmp;
  fs::create_directories(tmp.file("clips"));
  write_text(tmp.file("clips") / "c0.csv", "0.0,0.0\n");
  write_text(tmp.file("clips") / "c1.csv", "1.0,0.5\n");
  write_text(tmp.file("clips") / "c2.csv", "0.5,1.5\n");
  write_text(tmp.file("clips") / "c3.csv", "2.0,1.0\n");
  REQUIRE(run_cli("score --ref " + tmp.file("clips").string() + " --eval " +
                      tmp.file("clips").string() + " --metric both -o " +
                      tmp.file("s.csv").string(),
                  tmp.file("log")) == 0);
  const std::string csv = slurp(tmp.file("s.csv"));
  CHECK(csv.find("kad,") != std::string::npos);
  CHECK(csv.find("fad,") != std::string::npos);
  CHECK(csv.find(",clips,clips,4,4,2,") != std::string::npos);
}

TEST_CASE("cli: exit 2 on a degenerate median bandwidth, no partial CSV") {
  TempDir tmp;
  write_text(tmp.file("flat.csv"), "1,2\n1,2\n1,2\n");
  const int code = run_cli("score --ref " + tmp.file("flat.csv").string() + " --eval " +
                               tmp.file("flat.csv").string() + " --metric kad -o " +
                               tmp.file("out.csv").string(),
                           tmp.file("log"));
  CHECK(code == 2);
  CHECK(slurp(tmp.file("log")).find("degenerate bandwidth") != std::string::npos);
  CHECK(!fs::exists(tmp.file("out.csv")));
}

TEST_CASE("cli: exit 2 on malformed inputs") {
  TempDir tmp;
  write_text(tmp.file("bad.csv"), "1,2\n3,oops\n");
  write_text(tmp.file("ok.csv"), "1,2\n3,4\n");
  CHECK(run_cli("score --ref " + tmp.file("bad.csv").string() + " --eval " +
                    tmp.file("ok.csv").string() + " -o " + tmp.file("out.csv").string(),
                tmp.file("log")) == 2);
  CHECK(run_cli("score --ref " + tmp.file("nothere.csv").string() + " --eval " +
                    tmp.file("ok.csv").string() + " -o " + tmp.file("out.csv").string(),
                tmp.file("log2")) == 2);
  // bad flag usage is also an input error
  CHECK(run_cli("score --nonsense", tmp.file("log3")) == 2);
  // weights not summing to one
  write_text(tmp.file("bad.spec"),
             "kind = gaussian_mixture\ndim = 1\n[component]\nweight = 0.5\nmean = 0\n"
             "scale = 1\n[component]\nweight = 0.4\nmean = 1\nscale = 1\n");
  CHECK(run_cli("synth --spec " + tmp.file("bad.spec").string() + " -n 10 -o " +
                    tmp.file("x.npy").string(),
                tmp.file("log4")) == 2);
}

TEST_CASE("cli: sweep with the built-in recipe flags the stable scales") {
  TempDir tmp;
  write_text(tmp.file("g.spec"), kUnitGaussSpec);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 300 --seed 6 -o " +
                      tmp.file("ref.npy").string(),
                  tmp.file("log1")) == 0);
  REQUIRE(run_cli("sweep --ref " + tmp.file("ref.npy").string() +
                      " --recipe gaussian_noise --levels 0,0.1,0.2,0.4,0.8 --scales 0:2 -o " +
                      tmp.file("sweep.csv").string(),
                  tmp.file("log2")) == 0);
  const std::string csv = slurp(tmp.file("sweep.csv"));
  CHECK(csv.find("scale,level,normalized_mmd2,monotone") == 0);
  // 3 scales x 5 levels = 15 data rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);

  CHECK(run_cli("sweep --ref " + tmp.file("ref.npy").string() + " -o " +
                    tmp.file("empty.csv").string(),
                tmp.file("log3")) == 2);  // nothing to sweep
}

TEST_CASE("cli: convergence emits the long-format CSV and intercepts") {
  TempDir tmp;
  write_text(tmp.file("g.spec"), kUnitGaussSpec);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 300 --seed 7 -o " +
                      tmp.file("ref.npy").string(),
                  tmp.file("log1")) == 0);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 300 --seed 8 -o " +
                      tmp.file("eval.npy").string(),
                  tmp.file("log2")) == 0);
  REQUIRE(run_cli("convergence --ref " + tmp.file("ref.npy").string() + " --eval " +
                      tmp.file("eval.npy").string() +
                      " --sizes 50,100,200 --trials 4 --metric both -o " +
                      tmp.file("conv.csv").string(),
                  tmp.file("log3")) == 0);
  const std::string csv = slurp(tmp.file("conv.csv"));
  CHECK(csv.find("metric,N,mean,std,normalized_mean") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 2 metrics x 3 sizes
  const std::string manifest = slurp(tmp.file("conv.csv.manifest.json"));
  CHECK(manifest.find("kad_inf_intercept") != std::string::npos);
  CHECK(manifest.find("fad_inf_intercept") != std::string::npos);

  CHECK(run_cli("convergence --ref " + tmp.file("ref.npy").string() + " --eval " +
                    tmp.file("eval.npy").string() + " --sizes 250,400 --trials 4 -o " +
                    tmp.file("x.csv").string(),
                tmp.file("log4")) == 2);  // size exceeds eval N
}

TEST_CASE("cli: correlate joins scores by system id") {
  TempDir tmp;
  // synthetic per-system scores: three systems, anti-ordered ratings
  write_text(tmp.file("scores.csv"),
             "metric,value,reference,eval,n_ref,n_eval,dim,sigma,scale,alpha,wall_ms\n"
             "kad,1.5,ref,sysA,10,10,4,2,1,100,\n"
             "kad,2.5,ref,sysB,10,10,4,2,1,100,\n"
             "kad,3.5,ref,sysC,10,10,4,2,1,100,\n"
             "kad,4.5,ref,sysD,10,10,4,2,1,100,\n"
             "kad,5.5,ref,sysE,10,10,4,2,1,100,\n");
  write_text(tmp.file("ratings.csv"),
             "system_id,human_rating\nsysA,5\nsysB,4\nsysC,3\nsysD,2\nsysE,1\n");
  REQUIRE(run_cli("correlate --scores " + tmp.file("scores.csv").string() + " --ratings " +
                      tmp.file("ratings.csv").string() + " -o " + tmp.file("corr.csv").string(),
                  tmp.file("log1")) == 0);
  const std::string csv = slurp(tmp.file("corr.csv"));
  CHECK(csv.find("metric,rho,p_value,method,n,significant") == 0);
  CHECK(csv.find("kad,-1,") != std::string::npos);
  CHECK(csv.find("exact") != std::string::npos);

  // unmatched system id
  write_text(tmp.file("ratings_bad.csv"),
             "system_id,human_rating\nsysA,5\nsysB,4\nmystery,3\n");
  const int code = run_cli("correlate --scores " + tmp.file("scores.csv").string() +
                               " --ratings " + tmp.file("ratings_bad.csv").string() + " -o " +
                               tmp.file("corr2.csv").string(),
                           tmp.file("log2"));
  CHECK(code == 2);
  CHECK(slurp(tmp.file("log2")).find("mystery") != std::string::npos);
}

TEST_CASE("cli: bench runs a tiny grid and reports the schema") {
  TempDir tmp;
  REQUIRE(run_cli("bench --dims 4,8 --sizes 16,32 --trials 3 --warmup 1 -o " +
                      tmp.file("bench.csv").string(),
                  tmp.file("log")) == 0);
  const std::string csv = slurp(tmp.file("bench.csv"));
  CHECK(csv.find("metric,d,N,mean_ms,p5_ms,p95_ms") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // 2 metrics x 2 dims x 2 sizes
  CHECK(slurp(tmp.file("log")).find("warning") != std::string::npos);  // trials < 10
}

TEST_CASE("cli: KADTK_THREADS env supplies the default worker count") {
  TempDir tmp;
  write_text(tmp.file("g.spec"), kUnitGaussSpec);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 100 --seed 3 -o " +
                      tmp.file("a.npy").string(),
                  tmp.file("log1")) == 0);

  const std::string cmd = "KADTK_THREADS=3 " + cli_path() + " score --ref " +
                          tmp.file("a.npy").string() + " --eval " +
                          tmp.file("a.npy").string() + " --metric fad -o " +
                          tmp.file("s.csv").string() + " >" + tmp.file("log2").string() +
                          " 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string manifest = slurp(tmp.file("s.csv.manifest.json"));
  CHECK(manifest.find("\"threads\": \"3\"") != std::string::npos);

  // an explicit --threads flag wins over the environment
  const std::string cmd2 = "KADTK_THREADS=3 " + cli_path() + " score --ref " +
                           tmp.file("a.npy").string() + " --eval " +
                           tmp.file("a.npy").string() + " --metric fad --threads 2 -o " +
                           tmp.file("s2.csv").string() + " >" + tmp.file("log3").string() +
                           " 2>&1";
  REQUIRE(std::system(cmd2.c_str()) == 0);
  CHECK(slurp(tmp.file("s2.csv.manifest.json")).find("\"threads\": \"2\"") !=
        std::string::npos);
}

TEST_CASE("cli: score CSVs are byte-identical across thread counts and runs") {
  TempDir tmp;
  write_text(tmp.file("g.spec"), kUnitGaussSpec);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 150 --seed 9 -o " +
                      tmp.file("ref.npy").string(),
                  tmp.file("log1")) == 0);
  REQUIRE(run_cli("synth --spec " + tmp.file("g.spec").string() + " -n 120 --seed 10 -o " +
                      tmp.file("eval.npy").string(),
                  tmp.file("log2")) == 0);

  const std::string base = "score --ref " + tmp.file("ref.npy").string() + " --eval " +
                           tmp.file("eval.npy").string() + " --metric both -o ";
  REQUIRE(run_cli(base + tmp.file("t1.csv").string() + " --threads 1", tmp.file("log3")) == 0);
  REQUIRE(run_cli(base + tmp.file("t8.csv").string() + " --threads 8", tmp.file("log4")) == 0);
  REQUIRE(run_cli(base + tmp.file("t8b.csv").string() + " --threads 8", tmp.file("log5")) == 0);
  CHECK(slurp(tmp.file("t1.csv")) == slurp(tmp.file("t8.csv")));
  CHECK(slurp(tmp.file("t8.csv")) == slurp(tmp.file("t8b.csv")));
}
