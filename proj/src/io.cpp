#include "kadtk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sha256.hpp"

namespace fs = std::filesystem;

namespace kadtk {

namespace {

constexpr char kNpyMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Tagged rank-1/rank-2 array payload shared by the format readers.
struct RawArray {
  Dtype dtype = Dtype::f64;
  std::vector<std::size_t> shape;
  std::vector<float> f32;
  std::vector<double> f64;

  std::size_t count() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
  }
};

std::string dict_value(const std::string& header, const std::string& key,
                       const fs::path& path) {
  const auto pos = header.find("'" + key + "'");
  if (pos == std::string::npos) {
    throw InputError(path.string() + ": array header lacks '" + key + "'");
  }
  return header.substr(pos);
}

RawArray read_npy(const std::string& bytes, const fs::path& path) {
  if (bytes.size() < 10) {
    throw InputError(path.string() + ": truncated array header (only " +
                     std::to_string(bytes.size()) + " bytes)");
  }
  if (std::memcmp(bytes.data(), kNpyMagic, 6) != 0) {
    throw InputError(path.string() + ": bad magic bytes at offset 0");
  }
  const unsigned major = static_cast<unsigned char>(bytes[6]);
  const unsigned minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw InputError(path.string() + ": unsupported array format version " +
                     std::to_string(major) + "." + std::to_string(minor) +
                     " (only 1.0 is supported)");
  }
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  const std::size_t payload_off = 10 + header_len;
  if (bytes.size() < payload_off) {
    throw InputError(path.string() + ": header claims " + std::to_string(header_len) +
                     " bytes but file ends at offset " + std::to_string(bytes.size()));
  }
  const std::string header = bytes.substr(10, header_len);

  RawArray arr;
  // descr
  {
    const std::string rest = dict_value(header, "descr", path);
    const auto q1 = rest.find('\'', 7);
    const auto q2 = rest.find('\'', q1 + 1);
    if (q1 == std::string::npos || q2 == std::string::npos) {
      throw InputError(path.string() + ": malformed 'descr' entry");
    }
    const std::string descr = rest.substr(q1 + 1, q2 - q1 - 1);
    if (descr == "<f4") {
      arr.dtype = Dtype::f32;
    } else if (descr == "<f8") {
      arr.dtype = Dtype::f64;
    } else {
      throw InputError(path.string() + ": unsupported element type '" + descr +
                       "' (expected <f4 or <f8)");
    }
  }
  // fortran_order
  {
    const std::string rest = dict_value(header, "fortran_order", path);
    const auto t = rest.find("True");
    const auto f = rest.find("False");
    if (f == std::string::npos || (t != std::string::npos && t < f)) {
      throw InputError(path.string() + ": Fortran-ordered arrays are not supported");
    }
  }
  // shape
  {
    const std::string rest = dict_value(header, "shape", path);
    const auto open = rest.find('(');
    const auto close = rest.find(')', open);
    if (open == std::string::npos || close == std::string::npos) {
      throw InputError(path.string() + ": malformed 'shape' entry");
    }
    std::string inside = rest.substr(open + 1, close - open - 1);
    std::replace(inside.begin(), inside.end(), ',', ' ');
    std::istringstream iss(inside);
    std::size_t v;
    while (iss >> v) arr.shape.push_back(v);
    if (arr.shape.empty()) {
      throw InputError(path.string() + ": zero-dimensional arrays are not supported");
    }
    for (std::size_t s : arr.shape) {
      if (s == 0) throw InputError(path.string() + ": zero-length axis in shape");
    }
  }

  const std::size_t expect_bytes = arr.count() * dtype_size(arr.dtype);
  const std::size_t have_bytes = bytes.size() - payload_off;
  if (have_bytes != expect_bytes) {
    throw InputError(path.string() + ": payload holds " + std::to_string(have_bytes) +
                     " bytes at offset " + std::to_string(payload_off) + ", shape requires " +
                     std::to_string(expect_bytes) + " bytes");
  }
  if (arr.dtype == Dtype::f32) {
    arr.f32.resize(arr.count());
    std::memcpy(arr.f32.data(), bytes.data() + payload_off, expect_bytes);
  } else {
    arr.f64.resize(arr.count());
    std::memcpy(arr.f64.data(), bytes.data() + payload_off, expect_bytes);
  }
  return arr;
}

RawArray read_raw_f32(const fs::path& path) {
  const fs::path sidecar = path.string() + ".shape";
  std::ifstream side(sidecar);
  if (!side) throw InputError("cannot open shape sidecar: " + sidecar.string());
  std::size_t n = 0, d = 0;
  if (!(side >> n >> d) || n == 0 || d == 0) {
    throw InputError(sidecar.string() + ": expected two positive integers \"N d\"");
  }
  const std::string bytes = read_file_bytes(path);
  const std::size_t expect = n * d * sizeof(float);
  if (bytes.size() != expect) {
    throw InputError(path.string() + ": raw payload holds " + std::to_string(bytes.size()) +
                     " bytes, sidecar shape (" + std::to_string(n) + ", " + std::to_string(d) +
                     ") requires " + std::to_string(expect) + " bytes");
  }
  RawArray arr;
  arr.dtype = Dtype::f32;
  arr.shape = {n, d};
  arr.f32.resize(n * d);
  std::memcpy(arr.f32.data(), bytes.data(), expect);
  return arr;
}

RawArray read_csv_array(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  RawArray arr;
  arr.dtype = Dtype::f64;
  std::string line;
  std::size_t cols = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      const std::string cell = line.substr(start, end - start);
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        arr.f64.push_back(v);
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": cannot parse \"" + cell + "\" as a number");
      }
      ++row_cols;
      if (end == line.size()) break;
      start = end + 1;
    }
    if (cols == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": row has " +
                       std::to_string(row_cols) + " columns, expected " +
                       std::to_string(cols));
    }
  }
  if (arr.f64.empty()) throw InputError(path.string() + ": no data rows");
  arr.shape = {arr.f64.size() / cols, cols};
  return arr;
}

RawArray read_array_any(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("file does not exist: " + path.string());
  {
    std::ifstream probe(path, std::ios::binary);
    char magic[6] = {};
    probe.read(magic, 6);
    if (probe.gcount() == 6 && std::memcmp(magic, kNpyMagic, 6) == 0) {
      return read_npy(read_file_bytes(path), path);
    }
  }
  if (path.extension() == ".npy") {
    throw InputError(path.string() + ": bad magic bytes at offset 0 (not an array file)");
  }
  if (fs::exists(fs::path(path.string() + ".shape"))) return read_raw_f32(path);
  return read_csv_array(path);
}

EmbeddingSet set_from_array(RawArray&& arr, const fs::path& path) {
  if (arr.shape.size() != 2) {
    throw InputError(path.string() + ": expected a rank-2 array (N, d), got rank " +
                     std::to_string(arr.shape.size()));
  }
  const std::string label = path.stem().string();
  if (arr.dtype == Dtype::f32) {
    return EmbeddingSet(std::move(arr.f32), arr.shape[0], arr.shape[1], label,
                        path.string());
  }
  return EmbeddingSet(std::move(arr.f64), arr.shape[0], arr.shape[1], label, path.string());
}

void write_file_bytes(const fs::path& path, const std::string& bytes) {
  if (path.empty()) throw InputError("output path is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed: " + path.string());
}

std::string npy_bytes(const EmbeddingSet& set, Dtype dtype) {
  std::string header = "{'descr': '";
  header += dtype == Dtype::f32 ? "<f4" : "<f8";
  header += "', 'fortran_order': False, 'shape': (";
  header += std::to_string(set.rows()) + ", " + std::to_string(set.cols()) + "), }";
  // pad with spaces so magic+version+len+header is a multiple of 64
  const std::size_t base = 10 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header += '\n';

  std::string out;
  out.reserve(10 + header.size() + set.rows() * set.cols() * dtype_size(dtype));
  out.append(kNpyMagic, 6);
  out += '\x01';
  out += '\x00';
  const std::size_t hlen = header.size();
  out += static_cast<char>(hlen & 0xff);
  out += static_cast<char>((hlen >> 8) & 0xff);
  out += header;

  const EmbeddingSet source = set.cast(dtype);
  if (dtype == Dtype::f32) {
    const auto vals = source.f32_values();
    out.append(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(float));
  } else {
    const auto vals = source.f64_values();
    out.append(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(double));
  }
  return out;
}

}  // namespace

std::string format_double(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

EmbeddingSet read_embeddings(const fs::path& path) {
  return set_from_array(read_array_any(path), path);
}

void write_embeddings(const EmbeddingSet& set, const fs::path& path, Dtype dtype) {
  if (path.empty()) throw InputError("output path is empty");
  const auto ext = path.extension();
  if (ext == ".npy") {
    write_file_bytes(path, npy_bytes(set, dtype));
    return;
  }
  if (ext == ".csv") {
    std::ostringstream out;
    const EmbeddingSet source = set.cast(dtype);
    // 9 significant digits round-trip f32 exactly, 17 round-trip f64.
    const int digits = dtype == Dtype::f32 ? 9 : 17;
    for (std::size_t i = 0; i < source.rows(); ++i) {
      for (std::size_t j = 0; j < source.cols(); ++j) {
        if (j) out << ',';
        out << format_double(source.value(i, j), digits);
      }
      out << '\n';
    }
    write_file_bytes(path, out.str());
    return;
  }
  if (dtype != Dtype::f32) {
    throw InputError("raw format stores f32 only; use a .npy or .csv extension for f64le");
  }
  const EmbeddingSet source = set.cast(Dtype::f32);
  const auto vals = source.f32_values();
  std::string bytes(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(float));
  write_file_bytes(path, bytes);
  write_file_bytes(fs::path(path.string() + ".shape"),
                   std::to_string(set.rows()) + " " + std::to_string(set.cols()) + "\n");
}

EmbeddingSet read_embedding_dir(const fs::path& dir, bool frame_level) {
  if (!fs::is_directory(dir)) {
    throw InputError("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() > 6 && name.ends_with(".shape")) continue;
    if (name.ends_with(".manifest.json")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (files.empty()) {
    throw InputError("no embedding files in directory: " + dir.string());
  }

  std::vector<double> rows;
  std::size_t d = 0;
  std::string first_file;
  std::vector<std::string> mismatched;
  std::size_t n_rows = 0;

  for (const auto& file : files) {
    RawArray arr = read_array_any(file);
    std::size_t file_d = 0;
    std::size_t frames = 1;
    if (arr.shape.size() == 1) {
      file_d = arr.shape[0];
    } else if (arr.shape.size() == 2) {
      frames = arr.shape[0];
      file_d = arr.shape[1];
    } else {
      throw InputError(file.string() + ": expected rank 1 or 2, got rank " +
                       std::to_string(arr.shape.size()));
    }
    if (d == 0) {
      d = file_d;
      first_file = file.filename().string();
    } else if (file_d != d) {
      mismatched.push_back(file.filename().string() + " (d = " + std::to_string(file_d) + ")");
      continue;
    }

    auto value = [&](std::size_t flat) {
      return arr.dtype == Dtype::f32 ? static_cast<double>(arr.f32[flat]) : arr.f64[flat];
    };
    if (arr.shape.size() == 1 || frame_level) {
      for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t k = 0; k < d; ++k) rows.push_back(value(f * file_d + k));
        ++n_rows;
      }
    } else {
      // temporal mean over frames
      for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t f = 0; f < frames; ++f) acc += value(f * file_d + k);
        rows.push_back(acc / static_cast<double>(frames));
      }
      ++n_rows;
    }
  }
  if (!mismatched.empty()) {
    std::string msg = dir.string() + ": mixed embedding dimensions; " + first_file +
                      " has d = " + std::to_string(d) + " but: ";
    for (std::size_t i = 0; i < mismatched.size(); ++i) {
      if (i) msg += ", ";
      msg += mismatched[i];
    }
    throw InputError(msg);
  }
  return EmbeddingSet(std::move(rows), n_rows, d, dir.filename().string(), dir.string());
}

namespace {

constexpr const char* kScoreHeader =
    "metric,value,reference,eval,n_ref,n_eval,dim,sigma,scale,alpha,wall_ms";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (start <= line.size()) {
    auto end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    cells.push_back(line.substr(start, end - start));
    if (end == line.size()) break;
    start = end + 1;
  }
  return cells;
}

}  // namespace

void write_scores(std::span<const ScoreRecord> records, const fs::path& path) {
  if (records.empty()) throw InputError("no score records to write");
  std::ostringstream out;
  out << kScoreHeader << '\n';
  for (const auto& r : records) {
    out << metric_name(r.metric) << ',' << format_double(r.value) << ',' << r.reference_label
        << ',' << r.eval_label << ',' << r.n_ref << ',' << r.n_eval << ',' << r.dim << ',';
    if (r.kernel) out << format_double(r.kernel->sigma);
    out << ',';
    if (r.kernel) out << format_double(r.kernel->scale);
    out << ',';
    if (r.alpha) out << format_double(*r.alpha);
    out << ',';
    if (r.wall_ms) out << format_double(*r.wall_ms);
    out << '\n';
  }
  write_file_bytes(path, out.str());
}

std::vector<ScoreRecord> read_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open score CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty score CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScoreHeader) {
    throw InputError(path.string() + ": unexpected header \"" + line + "\"");
  }
  std::vector<ScoreRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 11) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 11 cells, got " +
                       std::to_string(cells.size()));
    }
    ScoreRecord r;
    r.metric = metric_from_name(cells[0]);
    r.value = std::stod(cells[1]);
    r.reference_label = cells[2];
    r.eval_label = cells[3];
    r.n_ref = std::stoll(cells[4]);
    r.n_eval = std::stoll(cells[5]);
    r.dim = std::stoll(cells[6]);
    if (!cells[7].empty()) {
      KernelSpec spec;
      spec.sigma = std::stod(cells[7]);
      spec.scale = cells[8].empty() ? 1.0 : std::stod(cells[8]);
      r.kernel = spec;
    }
    if (!cells[9].empty()) r.alpha = std::stod(cells[9]);
    if (!cells[10].empty()) r.wall_ms = std::stod(cells[10]);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw InputError(path.string() + ": no score rows");
  return records;
}

RatingsFile read_ratings_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ratings CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty ratings CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  RatingsFile file;
  if (line == "system_id,metric_score,human_rating") {
    file.has_scores = true;
  } else if (line == "system_id,human_rating") {
    file.has_scores = false;
  } else {
    throw InputError(path.string() + ": unexpected header \"" + line +
                     "\" (expected system_id,metric_score,human_rating or "
                     "system_id,human_rating)");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::size_t expect = file.has_scores ? 3 : 2;
    if (cells.size() != expect) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(expect) + " cells, got " + std::to_string(cells.size()));
    }
    RatingsRow row;
    row.system_id = cells[0];
    try {
      if (file.has_scores) {
        row.metric_score = std::stod(cells[1]);
        row.human_rating = std::stod(cells[2]);
      } else {
        row.human_rating = std::stod(cells[1]);
      }
    } catch (const std::exception&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": cannot parse number");
    }
    file.rows.push_back(std::move(row));
  }
  if (file.rows.empty()) throw InputError(path.string() + ": no ratings rows");
  return file;
}

void write_sweep_csv(std::span<const StudySeries> series, const fs::path& path) {
  std::ostringstream out;
  out << "scale,level,normalized_mmd2,monotone\n";
  for (const auto& s : series) {
    const std::string scale = s.meta.at("scale");
    const std::string monotone = s.meta.at("monotone");
    for (const auto& p : s.points) {
      out << scale << ',' << format_double(p.x) << ',' << format_double(p.mean) << ','
          << monotone << '\n';
    }
  }
  write_file_bytes(path, out.str());
}

void write_convergence_csv(std::span<const StudySeries> series, const fs::path& path) {
  std::ostringstream out;
  out << "metric,N,mean,std,normalized_mean\n";
  for (const auto& s : series) {
    const std::string metric = s.meta.at("metric");
    std::vector<std::string> normalized;
    if (auto it = s.meta.find("normalized_means"); it != s.meta.end()) {
      std::istringstream iss(it->second);
      std::string tok;
      while (iss >> tok) normalized.push_back(tok);
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      out << metric << ',' << format_double(p.x) << ',' << format_double(p.mean) << ','
          << format_double(p.mean - p.lo) << ','
          << (i < normalized.size() ? normalized[i] : "") << '\n';
    }
  }
  write_file_bytes(path, out.str());
}

void write_bench_csv(std::span<const StudySeries> series, const fs::path& path) {
  std::ostringstream out;
  out << "metric,d,N,mean_ms,p5_ms,p95_ms\n";
  for (const auto& s : series) {
    const std::string metric = s.meta.at("metric");
    const std::string d = s.meta.at("d");
    for (const auto& p : s.points) {
      out << metric << ',' << d << ',' << format_double(p.x) << ',' << format_double(p.mean)
          << ',' << format_double(p.lo) << ',' << format_double(p.hi) << '\n';
    }
  }
  write_file_bytes(path, out.str());
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot hash missing file: " + path.string());
  detail::Sha256 hasher;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) hasher.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return hasher.hex_digest();
}

void write_manifest(const RunManifest& manifest, const fs::path& output_path) {
  nlohmann::ordered_json doc;
  doc["tool_version"] = manifest.tool_version;
  doc["command_line"] = manifest.command_line;
  doc["seed"] = manifest.seed;
  doc["timestamp_utc"] = manifest.timestamp_utc;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : manifest.inputs) {
    inputs.push_back({{"path", path}, {"sha256", digest}});
  }
  doc["inputs"] = std::move(inputs);
  for (const auto& [key, value] : manifest.extra) doc[key] = value;

  const fs::path path = output_path.string() + ".manifest.json";
  write_file_bytes(path, doc.dump(2) + "\n");
}

}  // namespace kadtk
