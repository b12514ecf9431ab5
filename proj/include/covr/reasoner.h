#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "covr/backend.h"
#include "covr/pooling.h"
#include "covr/reasoning.h"

namespace covr {

struct ReasonerOptions {
  SamplingParams trace = SamplingParams::trace_defaults();
  SamplingParams target = SamplingParams::target_defaults();
  // Strict: unparseable traces, unknown slots and slot overflow raise.
  // Otherwise they degrade to warnings and the trace keeps what parsed.
  bool strict = false;
  PoolOptions pool;
  const PredicateVocabulary* vocabulary = nullptr;
};

struct QueryArtifacts {
  ReasoningRecord trace;
  std::string trace_text;
  std::string target_description;
  EmbeddingVector query_embedding;  // normalized
  int refinement_rounds = 0;
  PoolingKind strategy = PoolingKind::kWeighted;
  bool reasoning = true;
  std::map<std::string, std::string> backend_meta;
  std::vector<std::string> warnings;

  // Audit record; byte-identical across runs for a fixed mock seed.
  nlohmann::json to_json() const;
};

// (V_r, E) -> trace -> D_target -> normalized pooled D_target tokens.
// The trace conditions generation only; it is never embedded.
QueryArtifacts encode_query(const VideoRef& reference, const EditText& edit, Backend& backend,
                            const PoolingStrategy& strategy, const ReasonerOptions& options = {});

// Same pipeline with the reasoning step skipped (empty trace).
QueryArtifacts encode_query_no_reasoning(const VideoRef& reference, const EditText& edit, Backend& backend,
                                         const PoolingStrategy& strategy, const ReasonerOptions& options = {});

// Initial trace plus `rounds` refinement calls, each fed the previous
// round's canonical trace; only the last trace conditions D_target.
QueryArtifacts encode_query_refined(const VideoRef& reference, const EditText& edit, Backend& backend,
                                    const PoolingStrategy& strategy, int rounds, const ReasonerOptions& options = {});

}  // namespace covr
