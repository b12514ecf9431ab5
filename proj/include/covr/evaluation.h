#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covr/gallery.h"
#include "covr/http_backend.h"
#include "covr/model.h"
#include "covr/reasoner.h"

namespace covr {

struct RetrievalOutcome {
  std::string triplet_id;
  std::size_t target_rank = 1;  // 1-based
  std::size_t gallery_size = 1;
};

inline constexpr std::array<int, 4> kDefaultRecallKs = {1, 5, 10, 50};

struct EvalReport {
  std::map<int, double> recall_at;
  double mean_recall = 0.0;  // mean over the requested K values
  std::size_t n = 0;

  nlohmann::json to_json() const;
};

// Throws kEmptyOutcomes on no outcomes, kContract on an empty or
// non-positive K list or a rank outside [1, gallery_size].
EvalReport recall_at_k(std::span<const RetrievalOutcome> outcomes, std::span<const int> ks = kDefaultRecallKs);

inline constexpr std::size_t kJudgeDimensions = 10;

struct ReasoningScore {
  std::array<double, kJudgeDimensions> per_dimension{};
  double overall = 0.0;
};

// "<slot>_coverage", "<slot>_correctness" for each slot in canonical order.
std::vector<std::string> default_judge_dimensions();

// Returns the judge's raw text response; judge_trace parses it.
class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual std::string judge(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                            std::span<const std::string> dimensions) = 0;
};

// Overlap heuristic over canonical assertion texts. Per slot, coverage is
// |G n T| / |T| and correctness |G n T| / |G|, mapped to 1 + 9 * ratio; a
// slot empty on both sides takes the record-level Jaccard instead.
class MockJudge : public JudgeClient {
 public:
  std::string judge(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                    std::span<const std::string> dimensions) override;
};

// Chat-completions judge with temperature pinned to 0.0.
class HttpJudge : public JudgeClient {
 public:
  explicit HttpJudge(HttpBackendConfig config);
  std::string judge(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                    std::span<const std::string> dimensions) override;

 private:
  HttpBackend client_;
};

std::string judge_prompt(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                         std::span<const std::string> dimensions);

// Extracts numbers from the response; exactly ten are required. Values are
// clamped to [1, 10].
ReasoningScore parse_judge_response(std::string_view raw);

ReasoningScore judge_trace(const ReasoningRecord& generated, const ReasoningRecord& ground_truth, JudgeClient& judge,
                           std::span<const std::string> dimensions = {});

struct ScoreSummary {
  double mean = 0.0;
  double sem = 0.0;  // sample std / sqrt(n); 0 when n == 1
  std::size_t n = 0;

  nlohmann::json to_json() const;
};

ScoreSummary summarize_scores(std::span<const double> values);

struct BenchmarkConfig {
  bool reasoning = true;
  int refinement_rounds = 0;
  ReasonerOptions reasoner;
  int parallelism = 1;
  bool skip_missing = false;
  JudgeClient* judge = nullptr;
  std::vector<int> ks{kDefaultRecallKs.begin(), kDefaultRecallKs.end()};
};

struct BenchmarkResult {
  std::string variant;  // "base" or "plus_r"
  EvalReport report;
  std::optional<ScoreSummary> reasoning_score;
  std::vector<RetrievalOutcome> outcomes;
  std::vector<std::string> missing;                  // skipped triplet ids
  std::vector<std::pair<std::string, std::string>> failures;  // (triplet id, error)
};

std::string_view variant_name(bool reasoning);

// Encodes each triplet's query, scores it against the index and records the
// target rank. Throws kMissingTarget listing every absent target unless
// skip_missing is set, and kDimensionMismatch when the pooling strategy
// differs from the index strategy.
BenchmarkResult run_benchmark(std::span<const Triplet> triplets, const GalleryIndex& index, Backend& backend,
                              const PoolingStrategy& strategy, const BenchmarkConfig& config);

}  // namespace covr
