#include "covr/reasoner.h"

#include "covr/error.h"

namespace covr {
namespace {

ReasoningRecord read_trace(const std::string& text, const ReasonerOptions& options,
                           std::vector<std::string>& warnings) {
  ParseOptions po;
  po.strict = options.strict;
  po.vocabulary = options.vocabulary;
  TraceParse parsed = parse_trace(text, po);
  for (const auto& d : parsed.diagnostics) {
    warnings.push_back("trace line " + std::to_string(d.line_number) + ": " + d.reason);
  }
  if (parsed.record.empty() && !parsed.diagnostics.empty()) {
    if (options.strict) {
      throw Error(ErrorCode::kTraceUnparseable, std::to_string(parsed.diagnostics.size()) + " malformed lines");
    }
    warnings.push_back("trace unparseable; continuing with an empty trace");
    return {};
  }
  return canonicalize(parsed.record);
}

QueryArtifacts finish(const VideoRef& reference, const EditText& edit, Backend& backend,
                      const PoolingStrategy& strategy, const ReasonerOptions& options, QueryArtifacts art) {
  GenerationResult target = backend.generate_target_description(reference, edit, art.trace, options.target);
  art.target_description = target.text;
  art.query_embedding = l2_normalize(pool(*target.token_embeddings, strategy, options.pool));
  art.strategy = strategy.kind;
  art.backend_meta = target.backend_meta;
  return art;
}

}  // namespace

nlohmann::json QueryArtifacts::to_json() const {
  nlohmann::json checklist = nlohmann::json::array();
  for (const auto& item : derive_checklist(trace).items) checklist.push_back(item.assertion_canonical_text);
  return {{"reasoning", reasoning},
          {"trace_text", trace_text},
          {"effect_query", render_effect_query(trace).text},
          {"checklist", checklist},
          {"target_description", target_description},
          {"strategy", pooling_kind_name(strategy)},
          {"refinement_rounds", refinement_rounds},
          {"backend_meta", backend_meta},
          {"warnings", warnings},
          {"query_embedding", query_embedding.values}};
}

QueryArtifacts encode_query(const VideoRef& reference, const EditText& edit, Backend& backend,
                            const PoolingStrategy& strategy, const ReasonerOptions& options) {
  QueryArtifacts art;
  GenerationResult trace = backend.reason_after_effects(reference, edit, options.trace);
  art.trace_text = trace.text;
  art.trace = read_trace(trace.text, options, art.warnings);
  return finish(reference, edit, backend, strategy, options, std::move(art));
}

QueryArtifacts encode_query_no_reasoning(const VideoRef& reference, const EditText& edit, Backend& backend,
                                         const PoolingStrategy& strategy, const ReasonerOptions& options) {
  QueryArtifacts art;
  art.reasoning = false;
  return finish(reference, edit, backend, strategy, options, std::move(art));
}

QueryArtifacts encode_query_refined(const VideoRef& reference, const EditText& edit, Backend& backend,
                                    const PoolingStrategy& strategy, int rounds, const ReasonerOptions& options) {
  if (rounds < 1) throw Error(ErrorCode::kContract, "refinement needs at least one round");
  QueryArtifacts art;
  GenerationResult trace = backend.reason_after_effects(reference, edit, options.trace);
  art.trace_text = trace.text;
  art.trace = read_trace(trace.text, options, art.warnings);
  for (int k = 1; k <= rounds; ++k) {
    GenerationResult refined = backend.refine_trace(reference, edit, art.trace, options.trace);
    art.trace_text = refined.text;
    art.trace = read_trace(refined.text, options, art.warnings);
  }
  art.refinement_rounds = rounds;
  return finish(reference, edit, backend, strategy, options, std::move(art));
}

}  // namespace covr
