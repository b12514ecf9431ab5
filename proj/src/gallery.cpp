#include "covr/gallery.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

#include "covr/error.h"
#include "covr/kernels.h"
#include "text_util.h"

namespace covr {
namespace {

constexpr std::string_view kMagic = "CVRR";

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) throw Error(ErrorCode::kCorruptCache, std::string("truncated while reading ") + what);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GalleryIndex::GalleryIndex(std::size_t dim, PoolingKind strategy) : dim_(dim), strategy_(strategy) {
  if (dim_ == 0) throw Error(ErrorCode::kContract, "gallery dim must be positive");
}

void GalleryIndex::add(GalleryEntry entry) {
  if (entry.embedding.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "entry '" + entry.video.id + "' has dim " +
                                                   std::to_string(entry.embedding.dim()) + ", index has " +
                                                   std::to_string(dim_));
  }
  if (entry.strategy != strategy_) {
    throw Error(ErrorCode::kDimensionMismatch, "entry '" + entry.video.id + "' pooled with " +
                                                   std::string(pooling_kind_name(entry.strategy)) + ", index uses " +
                                                   std::string(pooling_kind_name(strategy_)));
  }
  if (!entry.embedding.normalized) throw Error(ErrorCode::kContract, "entry '" + entry.video.id + "' is not normalized");
  if (entry.video.id.empty()) throw Error(ErrorCode::kContract, "gallery entry with empty id");
  if (by_id_.count(entry.video.id)) throw Error(ErrorCode::kContract, "duplicate gallery id '" + entry.video.id + "'");

  for (double& x : entry.embedding.values) x = static_cast<double>(static_cast<float>(x));
  for (double x : entry.embedding.values) matrix_.push_back(static_cast<float>(x));
  by_id_.emplace(entry.video.id, entries_.size());
  entries_.push_back(std::move(entry));
}

std::optional<std::size_t> GalleryIndex::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const GalleryIndex& a, const GalleryIndex& b) {
  if (a.dim_ != b.dim_ || a.strategy_ != b.strategy_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.video.id != y.video.id || x.description_text != y.description_text) return false;
    // Compare bit patterns so the check is exact.
    for (std::size_t k = 0; k < a.dim_; ++k) {
      if (std::bit_cast<std::uint64_t>(x.embedding.values[k]) != std::bit_cast<std::uint64_t>(y.embedding.values[k])) {
        return false;
      }
    }
  }
  return true;
}

nlohmann::json GalleryDiagnostic::to_json() const {
  return {{"video_id", video_id}, {"error", error}, {"message", message}};
}

GalleryEntry make_gallery_entry(const VideoRef& video, const GenerationResult& description,
                                const PoolingStrategy& strategy, const PoolOptions& options) {
  if (!description.token_embeddings) throw Error(ErrorCode::kEmptySequence, "description has no tokens");
  GalleryEntry e;
  e.video = video;
  e.embedding = l2_normalize(pool(*description.token_embeddings, strategy, options));
  e.strategy = strategy.kind;
  e.description_text = description.text;
  return e;
}

GalleryBuild encode_gallery(std::span<const VideoRef> videos, Backend& backend, const PoolingStrategy& strategy,
                            const EncodeOptions& options) {
  if (videos.empty()) throw Error(ErrorCode::kContract, "no videos to encode");
  const std::size_t dim = pooled_dim(strategy.kind, backend.handshake().dim);

  std::vector<std::optional<GalleryEntry>> built(videos.size());
  std::vector<std::optional<GalleryDiagnostic>> failed(videos.size());
  const auto n = static_cast<std::ptrdiff_t>(videos.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::resolve_threads(options.parallelism))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      built[u] = make_gallery_entry(videos[u], backend.describe_video(videos[u], options.describe), strategy,
                                    options.pool);
    } catch (const Error& e) {
      failed[u] = GalleryDiagnostic{videos[u].id, std::string(error_code_name(e.code())), e.what()};
    } catch (const std::exception& e) {
      failed[u] = GalleryDiagnostic{videos[u].id, "Error", e.what()};
    }
  }

  GalleryBuild out{GalleryIndex(dim, strategy.kind), {}};
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (failed[i]) {
      out.diagnostics.push_back(std::move(*failed[i]));
      continue;
    }
    try {
      out.index.add(std::move(*built[i]));
    } catch (const Error& e) {
      out.diagnostics.push_back({videos[i].id, std::string(error_code_name(e.code())), e.what()});
    }
  }
  if (out.index.empty()) throw Error(ErrorCode::kAllVideosFailed, std::to_string(videos.size()) + " videos failed");
  return out;
}

std::optional<std::size_t> RankedResult::rank_of(std::string_view id) const {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (ranking[i].first == id) return i + 1;
  }
  return std::nullopt;
}

RankedResult score(const EmbeddingVector& query, const GalleryIndex& index, const ScoreOptions& options) {
  if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "gallery is empty");
  if (query.dim() != index.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dim " + std::to_string(query.dim()) + " vs index dim " + std::to_string(index.dim()));
  }
  if (!query.normalized) throw Error(ErrorCode::kContract, "query must be L2-normalized");

  std::vector<double> scores(index.size());
  if (options.threads == 1) {
    kernels::dot_scores_serial(query.values, index.matrix(), index.dim(), scores);
  } else {
    kernels::dot_scores_parallel(query.values, index.matrix(), index.dim(), scores, options.threads);
  }

  std::vector<std::size_t> order(index.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& entries = index.entries();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entries[a].video.id < entries[b].video.id;
  });
  RankedResult out;
  out.ranking.reserve(order.size());
  for (std::size_t i : order) out.ranking.emplace_back(entries[i].video.id, std::clamp(scores[i], -1.0, 1.0));
  return out;
}

std::string serialize_cache(const GalleryIndex& index) {
  if (index.dim() > 0xFFFFFFFFu) throw Error(ErrorCode::kContract, "dim does not fit u32");
  std::string out(kMagic);
  put_le<std::uint32_t>(out, kCacheVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(index.strategy()));
  put_le<std::uint64_t>(out, index.size());
  for (const auto& e : index.entries()) {
    if (e.video.id.size() > 0xFFFF) throw Error(ErrorCode::kContract, "video id longer than 65535 bytes");
    if (e.description_text.size() > 0xFFFFFFFFu) throw Error(ErrorCode::kContract, "description too long");
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.video.id.size()));
    out += e.video.id;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.description_text.size()));
    out += e.description_text;
    for (double x : e.embedding.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  }
  return out;
}

GalleryIndex deserialize_cache(std::string_view bytes, std::optional<std::size_t> expected_dim) {
  Reader in(bytes);
  if (in.take(kMagic.size(), "magic") != kMagic) throw Error(ErrorCode::kCorruptCache, "bad magic");
  auto version = in.get_le<std::uint32_t>("version");
  if (version != kCacheVersion) throw Error(ErrorCode::kCorruptCache, "unsupported version " + std::to_string(version));
  auto dim = in.get_le<std::uint32_t>("dim");
  if (dim == 0) throw Error(ErrorCode::kCorruptCache, "zero dim");
  auto tag = in.get_le<std::uint8_t>("strategy");
  if (tag > static_cast<std::uint8_t>(PoolingKind::kMeanConcatMax)) {
    throw Error(ErrorCode::kCorruptCache, "unknown strategy tag " + std::to_string(tag));
  }
  auto count = in.get_le<std::uint64_t>("count");
  // Smallest possible entry: 2 + 4 + 4*dim bytes.
  if (count > in.remaining() / (6 + 4ULL * dim)) throw Error(ErrorCode::kCorruptCache, "count exceeds file size");
  if (expected_dim && *expected_dim != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cache dim " + std::to_string(dim) + ", expected " + std::to_string(*expected_dim));
  }

  const auto kind = static_cast<PoolingKind>(tag);
  GalleryIndex index(dim, kind);
  for (std::uint64_t i = 0; i < count; ++i) {
    GalleryEntry e;
    auto id_len = in.get_le<std::uint16_t>("id length");
    e.video.id = std::string(in.take(id_len, "id"));
    e.video.uri = e.video.id;
    auto desc_len = in.get_le<std::uint32_t>("description length");
    e.description_text = std::string(in.take(desc_len, "description"));
    e.embedding.values.resize(dim);
    for (auto& x : e.embedding.values) {
      float f = std::bit_cast<float>(in.get_le<std::uint32_t>("embedding"));
      if (!std::isfinite(f)) throw Error(ErrorCode::kCorruptCache, "non-finite embedding value");
      x = f;
    }
    e.embedding.normalized = true;
    e.strategy = kind;
    if (e.video.id.empty() || index.find(e.video.id)) {
      throw Error(ErrorCode::kCorruptCache, "empty or duplicate id at entry " + std::to_string(i));
    }
    index.add(std::move(e));
  }
  if (in.remaining() != 0) throw Error(ErrorCode::kCorruptCache, "trailing bytes after last entry");
  return index;
}

void save_cache(const GalleryIndex& index, std::ostream& sink) {
  std::string bytes = serialize_cache(index);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorCode::kIo, "cache write failed");
}

GalleryIndex load_cache(std::istream& source, std::optional<std::size_t> expected_dim) {
  std::ostringstream ss;
  ss << source.rdbuf();
  return deserialize_cache(ss.str(), expected_dim);
}

void save_cache(const GalleryIndex& index, const std::string& path) { detail::write_file(path, serialize_cache(index)); }

GalleryIndex load_cache(const std::string& path, std::optional<std::size_t> expected_dim) {
  return deserialize_cache(detail::read_file(path), expected_dim);
}

}  // namespace covr
