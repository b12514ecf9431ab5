#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "covr/backend.h"
#include "covr/model.h"
#include "covr/pooling.h"

namespace covr {

struct GalleryEntry {
  VideoRef video;
  EmbeddingVector embedding;  // normalized, float32-representable
  PoolingKind strategy = PoolingKind::kWeighted;
  std::string description_text;
};

// Immutable-after-build set of unit-norm gallery embeddings, also kept as a
// packed row-major float32 matrix for the scoring kernels.
class GalleryIndex {
 public:
  GalleryIndex(std::size_t dim, PoolingKind strategy);

  // Rounds the embedding to float32 precision. Throws kDimensionMismatch on
  // dim or strategy disagreement and kContract on duplicate ids or an
  // unnormalized embedding.
  void add(GalleryEntry entry);

  std::size_t dim() const noexcept { return dim_; }
  PoolingKind strategy() const noexcept { return strategy_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<GalleryEntry>& entries() const noexcept { return entries_; }
  std::span<const float> matrix() const noexcept { return matrix_; }
  std::optional<std::size_t> find(std::string_view id) const;

  // Compares what the cache persists: dim, strategy, and per entry the id,
  // description and embedding values (URIs are not persisted).
  friend bool operator==(const GalleryIndex& a, const GalleryIndex& b);

 private:
  std::size_t dim_;
  PoolingKind strategy_;
  std::vector<GalleryEntry> entries_;
  std::vector<float> matrix_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct GalleryDiagnostic {
  std::string video_id;
  std::string error;
  std::string message;

  nlohmann::json to_json() const;
};

struct GalleryBuild {
  GalleryIndex index;
  std::vector<GalleryDiagnostic> diagnostics;
};

struct EncodeOptions {
  SamplingParams describe = SamplingParams::describe_defaults();
  PoolOptions pool;
  int parallelism = 1;
};

// describe -> pool -> l2_normalize per video; per-video failures become
// diagnostics. Results merge in input order. Throws kAllVideosFailed when
// nothing succeeds.
GalleryBuild encode_gallery(std::span<const VideoRef> videos, Backend& backend, const PoolingStrategy& strategy,
                            const EncodeOptions& options = {});

// Entry for an already-described video (pool + normalize).
GalleryEntry make_gallery_entry(const VideoRef& video, const GenerationResult& description,
                                const PoolingStrategy& strategy, const PoolOptions& options = {});

struct RankedResult {
  std::vector<std::pair<std::string, double>> ranking;

  // 1-based rank of `id`, nullopt when absent.
  std::optional<std::size_t> rank_of(std::string_view id) const;
};

struct ScoreOptions {
  int threads = 1;  // 1 uses the serial kernel
};

// Exhaustive dot-product scoring, sorted by score descending then id
// ascending. Scores are clamped to [-1, 1].
RankedResult score(const EmbeddingVector& query, const GalleryIndex& index, const ScoreOptions& options = {});

// Binary cache, little-endian throughout:
//   "CVRR" | u32 version=1 | u32 dim | u8 strategy | u64 count |
//   count x ( u16 id_len | id | u32 desc_len | desc | dim x f32 )
inline constexpr std::uint32_t kCacheVersion = 1;

std::string serialize_cache(const GalleryIndex& index);
GalleryIndex deserialize_cache(std::string_view bytes, std::optional<std::size_t> expected_dim = std::nullopt);

void save_cache(const GalleryIndex& index, std::ostream& sink);
GalleryIndex load_cache(std::istream& source, std::optional<std::size_t> expected_dim = std::nullopt);
void save_cache(const GalleryIndex& index, const std::string& path);
GalleryIndex load_cache(const std::string& path, std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace covr
