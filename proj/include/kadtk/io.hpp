#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kadtk/embedding_set.hpp"
#include "kadtk/metric.hpp"
#include "kadtk/study.hpp"
#include "kadtk/types.hpp"

namespace kadtk {

/// Reads one embedding matrix. Formats, auto-detected in this order:
///  1. binary array container v1.0 ("\x93NUMPY" magic, <f4 or <f8,
///     C-order, shape (N, d)) — the magic bytes win over any extension;
///  2. raw little-endian f32 with a "<name>.shape" sidecar holding "N d";
///  3. headerless CSV of reals.
/// The label defaults to the file stem.
EmbeddingSet read_embeddings(const std::filesystem::path& path);

/// Writes by extension: .npy -> binary array container, .csv -> CSV,
/// anything else -> raw f32 + sidecar (f32le only). Round-trips are
/// bit-exact at matching dtype.
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                      Dtype dtype);

/// One row per embedding file in the directory, ordered by file name.
/// Rank-1 files contribute their vector; rank-2 files (frames x d) are
/// mean-pooled over frames, or appended as individual rows with
/// frame_level = true. All files must agree on d.
EmbeddingSet read_embedding_dir(const std::filesystem::path& dir, bool frame_level = false);

/// Score CSV with the fixed header
/// metric,value,reference,eval,n_ref,n_eval,dim,sigma,scale,alpha,wall_ms
/// and empty cells for inapplicable fields. Numbers carry 17 significant
/// digits so a parse-back reproduces them exactly.
void write_scores(std::span<const ScoreRecord> records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);

/// Ratings CSV: either system_id,metric_score,human_rating, or
/// system_id,human_rating (scores joined later from a score CSV).
struct RatingsFile {
  bool has_scores = false;
  std::vector<RatingsRow> rows;  // metric_score is 0 when !has_scores
};
RatingsFile read_ratings_csv(const std::filesystem::path& path);

// Plot-ready study CSV writers.
void write_sweep_csv(std::span<const StudySeries> series, const std::filesystem::path& path);
void write_convergence_csv(std::span<const StudySeries> series,
                           const std::filesystem::path& path);
void write_bench_csv(std::span<const StudySeries> series, const std::filesystem::path& path);

/// Reproducibility record written next to every output as
/// "<output>.manifest.json".
struct RunManifest {
  std::string tool_version;
  std::string command_line;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)
  std::uint64_t seed = 0;
  std::string timestamp_utc;
  std::vector<std::pair<std::string, std::string>> extra;  // effective config echo
};

std::string sha256_file(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& output_path);

std::string format_double(double v, int significant_digits = 17);

}  // namespace kadtk
