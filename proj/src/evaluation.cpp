#include "covr/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>

#include "covr/error.h"
#include "covr/kernels.h"

namespace covr {
namespace {

using SlotTexts = std::array<std::set<std::string>, kSlotCount>;

SlotTexts active_texts(const ReasoningRecord& r) {
  SlotTexts out;
  r.for_each([&](const Assertion& a) {
    if (!a.verify_only) out[static_cast<std::size_t>(a.slot)].insert(a.canonical_text());
  });
  return out;
}

std::size_t common(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

double to_score(double ratio) { return 1.0 + 9.0 * ratio; }

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json recalls = nlohmann::json::object();
  for (const auto& [k, v] : recall_at) recalls["R@" + std::to_string(k)] = v;
  return {{"n", n}, {"recall_at", recalls}, {"mean_recall", mean_recall}};
}

EvalReport recall_at_k(std::span<const RetrievalOutcome> outcomes, std::span<const int> ks) {
  if (outcomes.empty()) throw Error(ErrorCode::kEmptyOutcomes, "no retrieval outcomes");
  if (ks.empty()) throw Error(ErrorCode::kContract, "no K values");
  for (const auto& o : outcomes) {
    if (o.target_rank < 1 || o.target_rank > o.gallery_size) {
      throw Error(ErrorCode::kContract, "rank out of range for '" + o.triplet_id + "'");
    }
  }
  EvalReport rep;
  rep.n = outcomes.size();
  for (int k : ks) {
    if (k <= 0) throw Error(ErrorCode::kContract, "K must be positive");
    std::size_t hits = static_cast<std::size_t>(std::count_if(
        outcomes.begin(), outcomes.end(), [k](const RetrievalOutcome& o) { return o.target_rank <= static_cast<std::size_t>(k); }));
    rep.recall_at[k] = static_cast<double>(hits) / static_cast<double>(rep.n);
  }
  double total = 0.0;
  for (const auto& [k, v] : rep.recall_at) total += v;
  rep.mean_recall = total / static_cast<double>(rep.recall_at.size());
  return rep;
}

std::vector<std::string> default_judge_dimensions() {
  std::vector<std::string> dims;
  for (Slot s : kSlotOrder) {
    dims.push_back(std::string(slot_name(s)) + "_coverage");
    dims.push_back(std::string(slot_name(s)) + "_correctness");
  }
  return dims;
}

std::string MockJudge::judge(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                             std::span<const std::string>) {
  SlotTexts g = active_texts(generated);
  SlotTexts t = active_texts(ground_truth);
  std::set<std::string> g_all, t_all;
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    g_all.insert(g[s].begin(), g[s].end());
    t_all.insert(t[s].begin(), t[s].end());
  }
  std::size_t inter = common(g_all, t_all);
  std::size_t uni = g_all.size() + t_all.size() - inter;
  double record_jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);

  std::string out;
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    double coverage, correctness;
    if (g[s].empty() && t[s].empty()) {
      coverage = correctness = record_jaccard;
    } else {
      double hit = static_cast<double>(common(g[s], t[s]));
      coverage = t[s].empty() ? 1.0 : hit / static_cast<double>(t[s].size());
      correctness = g[s].empty() ? 0.0 : hit / static_cast<double>(g[s].size());
    }
    if (!out.empty()) out += ',';
    out += std::to_string(to_score(coverage)) + ',' + std::to_string(to_score(correctness));
  }
  return out;
}

std::string judge_prompt(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                         std::span<const std::string> dimensions) {
  std::string p =
      "Compare the generated reasoning trace against the ground-truth trace. Score each of the following "
      "dimensions from 1 to 10 and answer with exactly ten comma-separated numbers in this order: ";
  for (std::size_t i = 0; i < dimensions.size(); ++i) {
    if (i) p += ", ";
    p += dimensions[i];
  }
  p += ".\n\nGround truth:\n" + render_effect_query(ground_truth).text;
  p += "\n\nGenerated:\n" + render_effect_query(generated).text + "\n";
  return p;
}

HttpJudge::HttpJudge(HttpBackendConfig config) : client_([&] {
  config.return_hidden_states = false;
  return config;
}()) {}

std::string HttpJudge::judge(const ReasoningRecord& generated, const ReasoningRecord& ground_truth,
                             std::span<const std::string> dimensions) {
  SamplingParams params{0.0, 1.0, 64};
  try {
    return client_.complete_text(nullptr, judge_prompt(generated, ground_truth, dimensions), params);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBackendUnavailable || e.code() == ErrorCode::kVideoUnreadable) {
      throw Error(ErrorCode::kJudgeUnavailable, e.what());
    }
    throw;
  }
}

ReasoningScore parse_judge_response(std::string_view raw) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    bool starts = (c >= '0' && c <= '9') || ((c == '-' || c == '+' || c == '.') && i + 1 < raw.size() &&
                                             ((raw[i + 1] >= '0' && raw[i + 1] <= '9') || raw[i + 1] == '.'));
    if (!starts) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '+') ++start;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data() + start, raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr == raw.data() + start) {
      ++i;
      continue;
    }
    values.push_back(v);
    i = static_cast<std::size_t>(ptr - raw.data());
  }
  if (values.size() != kJudgeDimensions) {
    throw Error(ErrorCode::kMalformedJudgeResponse,
                "expected 10 scores, found " + std::to_string(values.size()) + " in '" + std::string(raw) + "'");
  }
  ReasoningScore s;
  for (std::size_t k = 0; k < kJudgeDimensions; ++k) {
    if (!std::isfinite(values[k])) throw Error(ErrorCode::kMalformedJudgeResponse, "non-finite score");
    s.per_dimension[k] = std::clamp(values[k], 1.0, 10.0);
  }
  s.overall = std::accumulate(s.per_dimension.begin(), s.per_dimension.end(), 0.0) / kJudgeDimensions;
  return s;
}

ReasoningScore judge_trace(const ReasoningRecord& generated, const ReasoningRecord& ground_truth, JudgeClient& judge,
                           std::span<const std::string> dimensions) {
  std::vector<std::string> dims;
  if (dimensions.empty()) {
    dims = default_judge_dimensions();
  } else {
    dims.assign(dimensions.begin(), dimensions.end());
  }
  if (dims.size() != kJudgeDimensions) throw Error(ErrorCode::kContract, "judge rubric needs exactly ten dimensions");
  return parse_judge_response(judge.judge(generated, ground_truth, dims));
}

nlohmann::json ScoreSummary::to_json() const { return {{"mean", mean}, {"sem", sem}, {"n", n}}; }

ScoreSummary summarize_scores(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "no scores to summarize");
  ScoreSummary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n == 1) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.sem = sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

std::string_view variant_name(bool reasoning) { return reasoning ? "plus_r" : "base"; }

BenchmarkResult run_benchmark(std::span<const Triplet> triplets, const GalleryIndex& index, Backend& backend,
                              const PoolingStrategy& strategy, const BenchmarkConfig& config) {
  if (strategy.kind != index.strategy()) {
    throw Error(ErrorCode::kDimensionMismatch, "query strategy " + std::string(pooling_kind_name(strategy.kind)) +
                                                   " differs from index strategy " +
                                                   std::string(pooling_kind_name(index.strategy())));
  }
  BenchmarkResult res;
  res.variant = std::string(variant_name(config.reasoning));

  std::vector<const Triplet*> work;
  for (const Triplet& t : triplets) {
    if (index.find(t.target.id)) {
      work.push_back(&t);
    } else {
      res.missing.push_back(t.id);
    }
  }
  if (!res.missing.empty() && !config.skip_missing) {
    std::string ids;
    for (const auto& id : res.missing) ids += (ids.empty() ? "" : ",") + id;
    throw Error(ErrorCode::kMissingTarget, ids);
  }

  struct Row {
    std::optional<RetrievalOutcome> outcome;
    std::optional<double> judged;
    std::string error;
  };
  std::vector<Row> rows(work.size());
  const auto n = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::resolve_threads(config.parallelism))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Triplet& t = *work[static_cast<std::size_t>(i)];
    Row& row = rows[static_cast<std::size_t>(i)];
    try {
      QueryArtifacts art;
      if (!config.reasoning) {
        art = encode_query_no_reasoning(t.reference, t.edit, backend, strategy, config.reasoner);
      } else if (config.refinement_rounds > 0) {
        art = encode_query_refined(t.reference, t.edit, backend, strategy, config.refinement_rounds, config.reasoner);
      } else {
        art = encode_query(t.reference, t.edit, backend, strategy, config.reasoner);
      }
      RankedResult ranked = score(art.query_embedding, index);
      row.outcome = RetrievalOutcome{t.id, *ranked.rank_of(t.target.id), index.size()};
      if (config.judge && t.reasoning_detailed) {
        ParseOptions lenient;
        lenient.strict = false;
        lenient.vocabulary = config.reasoner.vocabulary;
        ReasoningRecord truth = canonicalize(parse_trace(*t.reasoning_detailed, lenient).record);
        row.judged = judge_trace(art.trace, truth, *config.judge).overall;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  std::vector<double> judged;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].error.empty()) {
      res.failures.emplace_back(work[i]->id, rows[i].error);
      continue;
    }
    res.outcomes.push_back(*rows[i].outcome);
    if (rows[i].judged) judged.push_back(*rows[i].judged);
  }
  if (res.outcomes.empty()) {
    std::string why = res.failures.empty() ? "no triplets evaluated" : res.failures.front().second;
    throw Error(ErrorCode::kEmptyOutcomes, why);
  }
  res.report = recall_at_k(res.outcomes, config.ks);
  if (!judged.empty()) res.reasoning_score = summarize_scores(judged);
  return res;
}

}  // namespace covr
