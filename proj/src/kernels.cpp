#include "covr/kernels.h"

#include <omp.h>

#include "covr/error.h"

namespace covr::kernels {
namespace {

void check_shapes(std::span<const double> query, std::span<const float> matrix, std::size_t dim,
                  std::span<double> out) {
  if (query.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "query length differs from dim");
  if (matrix.size() != out.size() * dim) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix size differs from rows x dim");
  }
}

inline double row_dot(const double* q, const float* row, std::size_t dim) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) s += q[k] * static_cast<double>(row[k]);
  return s;
}

void pool_one(const TokenEmbeddingSequence& seq, const PoolingStrategy& strategy, const PoolOptions& options,
              EmbeddingVector& out, std::string& error) {
  try {
    out = pool(seq, strategy, options);
  } catch (const std::exception& e) {
    error = e.what();
  }
}

}  // namespace

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

void dot_scores_serial(std::span<const double> query, std::span<const float> matrix, std::size_t dim,
                       std::span<double> out) {
  check_shapes(query, matrix, dim, out);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = row_dot(query.data(), matrix.data() + r * dim, dim);
}

void dot_scores_parallel(std::span<const double> query, std::span<const float> matrix, std::size_t dim,
                         std::span<double> out, int threads) {
  check_shapes(query, matrix, dim, out);
  const auto rows = static_cast<std::ptrdiff_t>(out.size());
  const double* q = query.data();
  const float* m = matrix.data();
  double* o = out.data();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    o[r] = row_dot(q, m + static_cast<std::size_t>(r) * dim, dim);
  }
}

BatchPoolResult pool_batch_serial(std::span<const TokenEmbeddingSequence> batch, const PoolingStrategy& strategy,
                                  const PoolOptions& options) {
  BatchPoolResult res;
  res.embeddings.resize(batch.size());
  res.errors.resize(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) pool_one(batch[i], strategy, options, res.embeddings[i], res.errors[i]);
  return res;
}

BatchPoolResult pool_batch_parallel(std::span<const TokenEmbeddingSequence> batch,
                                    const PoolingStrategy& strategy, const PoolOptions& options, int threads) {
  BatchPoolResult res;
  res.embeddings.resize(batch.size());
  res.errors.resize(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto u = static_cast<std::size_t>(i);
    pool_one(batch[u], strategy, options, res.embeddings[u], res.errors[u]);
  }
  return res;
}

}  // namespace covr::kernels
