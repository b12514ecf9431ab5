#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "covr/pooling.h"

// Data-parallel inner loops. Each *_parallel kernel computes exactly what
// its *_serial reference computes, element for element, so tests can
// compare them bitwise.
namespace covr::kernels {

// out[r] = sum_k query[k] * matrix[r * dim + k], accumulated in double in
// index order.
void dot_scores_serial(std::span<const double> query, std::span<const float> matrix, std::size_t dim,
                       std::span<double> out);
void dot_scores_parallel(std::span<const double> query, std::span<const float> matrix, std::size_t dim,
                         std::span<double> out, int threads = 0);

struct BatchPoolResult {
  std::vector<EmbeddingVector> embeddings;
  // Empty string on success, otherwise the failure message for that row.
  std::vector<std::string> errors;
};

BatchPoolResult pool_batch_serial(std::span<const TokenEmbeddingSequence> batch, const PoolingStrategy& strategy,
                                  const PoolOptions& options = {});
BatchPoolResult pool_batch_parallel(std::span<const TokenEmbeddingSequence> batch,
                                    const PoolingStrategy& strategy, const PoolOptions& options = {},
                                    int threads = 0);

// threads <= 0 means the OpenMP default.
int resolve_threads(int threads);

}  // namespace covr::kernels
