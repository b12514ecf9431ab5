#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covr/lexicon.h"

namespace covr {

// Per-token hidden states, row-major (N x dim).
class TokenEmbeddingSequence {
 public:
  // Throws kEmptySequence on zero tokens, kDimensionMismatch when a vector
  // length differs from dim, kContract on non-finite entries.
  TokenEmbeddingSequence(std::vector<std::string> tokens, std::vector<std::vector<double>> vectors);
  TokenEmbeddingSequence(std::vector<std::string> tokens, std::vector<double> flat, std::size_t dim);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<double>& flat() const noexcept { return data_; }

  friend bool operator==(const TokenEmbeddingSequence&, const TokenEmbeddingSequence&) = default;

 private:
  void validate() const;

  std::vector<std::string> tokens_;
  std::vector<double> data_;
  std::size_t dim_ = 0;
};

struct EmbeddingVector {
  std::vector<double> values;
  bool normalized = false;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

enum class PoolingKind : unsigned char {
  kWeighted = 0,
  kMean = 1,
  kMax = 2,
  kLast = 3,
  kMeanConcatLast = 4,
  kMeanConcatMax = 5,
};

std::string_view pooling_kind_name(PoolingKind kind);
// Accepts "weighted", "mean", "max", "last", "mean+last", "mean+max".
PoolingKind parse_pooling_kind(std::string_view name);
std::size_t pooled_dim(PoolingKind kind, std::size_t token_dim);

struct PoolingStrategy {
  PoolingKind kind = PoolingKind::kMean;
  std::shared_ptr<const WeightingScheme> scheme;  // required for kWeighted

  static PoolingStrategy weighted(std::shared_ptr<const WeightingScheme> scheme);
  static PoolingStrategy of(PoolingKind kind, std::shared_ptr<const WeightingScheme> scheme = nullptr);
};

struct PoolOptions {
  // Kahan summation for Weighted/Mean; sequential index order either way.
  bool compensated = false;
};

// Result is not normalized.
EmbeddingVector pool(const TokenEmbeddingSequence& seq, const PoolingStrategy& strategy,
                     const PoolOptions& options = {});

// Token weights used by the Weighted strategy, in token order.
std::vector<double> token_weights(const TokenEmbeddingSequence& seq, const WeightingScheme& scheme);

// Throws kZeroVector when the norm is at or below kZeroNormThreshold.
EmbeddingVector l2_normalize(const EmbeddingVector& v);
inline constexpr double kZeroNormThreshold = std::numeric_limits<double>::epsilon();

double dot(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace covr
