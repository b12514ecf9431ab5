#include "covr/pooling.h"

#include <algorithm>
#include <cmath>

#include "covr/error.h"

namespace covr {
namespace {

// Accumulates sum_i w_i * row_i in index order.
void weighted_sum(const TokenEmbeddingSequence& seq, std::span<const double> weights, bool compensated,
                  std::span<double> out) {
  const std::size_t d = seq.dim();
  std::fill(out.begin(), out.end(), 0.0);
  if (!compensated) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      auto h = seq.row(i);
      for (std::size_t k = 0; k < d; ++k) out[k] += weights[i] * h[k];
    }
    return;
  }
  std::vector<double> carry(d, 0.0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto h = seq.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      double y = weights[i] * h[k] - carry[k];
      double t = out[k] + y;
      carry[k] = (t - out[k]) - y;
      out[k] = t;
    }
  }
}

double sum(std::span<const double> xs, bool compensated) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    if (!compensated) {
      s += x;
      continue;
    }
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

void mean_into(const TokenEmbeddingSequence& seq, bool compensated, std::span<double> out) {
  std::vector<double> ones(seq.size(), 1.0);
  weighted_sum(seq, ones, compensated, out);
  const double n = static_cast<double>(seq.size());
  for (double& x : out) x /= n;
}

void max_into(const TokenEmbeddingSequence& seq, std::span<double> out) {
  auto first = seq.row(0);
  std::copy(first.begin(), first.end(), out.begin());
  for (std::size_t i = 1; i < seq.size(); ++i) {
    auto h = seq.row(i);
    for (std::size_t k = 0; k < seq.dim(); ++k) out[k] = std::max(out[k], h[k]);
  }
}

void last_into(const TokenEmbeddingSequence& seq, std::span<double> out) {
  auto h = seq.row(seq.size() - 1);
  std::copy(h.begin(), h.end(), out.begin());
}

}  // namespace

TokenEmbeddingSequence::TokenEmbeddingSequence(std::vector<std::string> tokens,
                                               std::vector<std::vector<double>> vectors)
    : tokens_(std::move(tokens)) {
  if (tokens_.empty() || vectors.empty()) throw Error(ErrorCode::kEmptySequence, "no tokens");
  if (tokens_.size() != vectors.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "token count differs from vector count");
  }
  dim_ = vectors.front().size();
  data_.reserve(dim_ * vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "ragged token vectors");
    data_.insert(data_.end(), v.begin(), v.end());
  }
  validate();
}

TokenEmbeddingSequence::TokenEmbeddingSequence(std::vector<std::string> tokens, std::vector<double> flat,
                                               std::size_t dim)
    : tokens_(std::move(tokens)), data_(std::move(flat)), dim_(dim) {
  if (tokens_.empty()) throw Error(ErrorCode::kEmptySequence, "no tokens");
  if (dim_ == 0 || data_.size() != tokens_.size() * dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "flat buffer does not match tokens x dim");
  }
  validate();
}

void TokenEmbeddingSequence::validate() const {
  if (dim_ == 0) throw Error(ErrorCode::kDimensionMismatch, "zero-dimensional token vectors");
  for (double x : data_) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kContract, "non-finite token embedding");
  }
}

std::string_view pooling_kind_name(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kWeighted: return "weighted";
    case PoolingKind::kMean: return "mean";
    case PoolingKind::kMax: return "max";
    case PoolingKind::kLast: return "last";
    case PoolingKind::kMeanConcatLast: return "mean+last";
    case PoolingKind::kMeanConcatMax: return "mean+max";
  }
  return "mean";
}

PoolingKind parse_pooling_kind(std::string_view name) {
  for (auto k : {PoolingKind::kWeighted, PoolingKind::kMean, PoolingKind::kMax, PoolingKind::kLast,
                 PoolingKind::kMeanConcatLast, PoolingKind::kMeanConcatMax}) {
    if (name == pooling_kind_name(k)) return k;
  }
  throw Error(ErrorCode::kContract, "unknown pooling strategy '" + std::string(name) + "'");
}

std::size_t pooled_dim(PoolingKind kind, std::size_t token_dim) {
  bool concat = kind == PoolingKind::kMeanConcatLast || kind == PoolingKind::kMeanConcatMax;
  return concat ? 2 * token_dim : token_dim;
}

PoolingStrategy PoolingStrategy::weighted(std::shared_ptr<const WeightingScheme> scheme) {
  return of(PoolingKind::kWeighted, std::move(scheme));
}

PoolingStrategy PoolingStrategy::of(PoolingKind kind, std::shared_ptr<const WeightingScheme> scheme) {
  if (kind == PoolingKind::kWeighted && !scheme) {
    throw Error(ErrorCode::kContract, "weighted pooling needs a weighting scheme");
  }
  return PoolingStrategy{kind, std::move(scheme)};
}

std::vector<double> token_weights(const TokenEmbeddingSequence& seq, const WeightingScheme& scheme) {
  std::vector<double> w;
  w.reserve(seq.size());
  for (const auto& t : seq.tokens()) w.push_back(weight_of(categorize(t, scheme), scheme));
  return w;
}

EmbeddingVector pool(const TokenEmbeddingSequence& seq, const PoolingStrategy& strategy,
                     const PoolOptions& options) {
  const std::size_t d = seq.dim();
  EmbeddingVector out;
  out.values.assign(pooled_dim(strategy.kind, d), 0.0);
  std::span<double> head(out.values.data(), d);

  switch (strategy.kind) {
    case PoolingKind::kWeighted: {
      if (!strategy.scheme) throw Error(ErrorCode::kContract, "weighted pooling needs a weighting scheme");
      std::vector<double> w = token_weights(seq, *strategy.scheme);
      double total = sum(w, options.compensated);
      if (!(total > 0.0)) throw Error(ErrorCode::kZeroWeightSum, "all token weights are zero");
      weighted_sum(seq, w, options.compensated, head);
      for (double& x : head) x /= total;
      break;
    }
    case PoolingKind::kMean: mean_into(seq, options.compensated, head); break;
    case PoolingKind::kMax: max_into(seq, head); break;
    case PoolingKind::kLast: last_into(seq, head); break;
    case PoolingKind::kMeanConcatLast:
      mean_into(seq, options.compensated, head);
      last_into(seq, std::span<double>(out.values.data() + d, d));
      break;
    case PoolingKind::kMeanConcatMax:
      mean_into(seq, options.compensated, head);
      max_into(seq, std::span<double>(out.values.data() + d, d));
      break;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "dot of unequal lengths");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = std::sqrt(dot(a, a));
  double nb = std::sqrt(dot(b, b));
  if (na <= kZeroNormThreshold || nb <= kZeroNormThreshold) {
    throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  }
  return dot(a, b) / (na * nb);
}

EmbeddingVector l2_normalize(const EmbeddingVector& v) {
  double norm = std::sqrt(dot(v.values, v.values));
  if (!(norm > kZeroNormThreshold)) throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  EmbeddingVector out;
  out.values.reserve(v.values.size());
  for (double x : v.values) out.values.push_back(x / norm);
  out.normalized = true;
  return out;
}

}  // namespace covr
