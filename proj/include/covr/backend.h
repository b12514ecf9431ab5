#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covr/model.h"
#include "covr/pooling.h"
#include "covr/reasoning.h"

namespace covr {

struct SamplingParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 1;

  // Throws kContract when out of range.
  void validate() const;

  static SamplingParams trace_defaults() { return {0.8, 0.9, 128}; }
  static SamplingParams target_defaults() { return {0.6, 0.9, 256}; }
  static SamplingParams describe_defaults() { return {0.6, 0.9, 256}; }

  friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

nlohmann::json to_json(const SamplingParams& params);
SamplingParams sampling_from_json(const nlohmann::json& doc, SamplingParams fallback);

// Trace token budgets for the granularity ablation presets.
enum class Granularity { kMinimal, kCompact, kStandard, kVerbose };

int granularity_token_budget(Granularity g);
std::string_view granularity_name(Granularity g);
Granularity parse_granularity(std::string_view name);

struct GenerationResult {
  std::string text;
  // Absent only when the text produced no tokens (an empty trace).
  std::optional<TokenEmbeddingSequence> token_embeddings;
  std::map<std::string, std::string> backend_meta;

  nlohmann::json to_json() const;
};

enum class PromptKind { kDescribeVideo, kReasonAfterEffects, kGenerateTarget, kRefineTrace };

class PromptTemplate {
 public:
  // Throws kContract when the placeholders required by `kind` are missing
  // (or, for DescribeVideo, when any placeholder is present).
  PromptTemplate(PromptKind kind, std::string text);

  PromptKind kind() const noexcept { return kind_; }
  const std::string& text() const noexcept { return text_; }

  // Substitutes {edit} and {trace}.
  std::string render(std::string_view edit = {}, std::string_view trace = {}) const;

  static const PromptTemplate& standard(PromptKind kind);

 private:
  PromptKind kind_;
  std::string text_;
};

struct Handshake {
  std::size_t dim = 0;
  std::string model_id;
  std::string layer_selector;

  friend bool operator==(const Handshake&, const Handshake&) = default;
};

// Splits text into tokens that keep their leading whitespace, so that
// concatenating the tokens reproduces the text exactly. Word runs and
// single punctuation marks are separate tokens.
std::vector<std::string> split_generation_tokens(std::string_view text);

// Contract to a multimodal model. Public calls validate inputs, bound the
// number of in-flight requests and check every returned token vector
// against the handshake dimension; subclasses implement the do_* hooks
// and must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;

  Handshake handshake();

  GenerationResult describe_video(const VideoRef& video, const SamplingParams& params);
  GenerationResult reason_after_effects(const VideoRef& reference, const EditText& edit,
                                        const SamplingParams& params);
  GenerationResult refine_trace(const VideoRef& reference, const EditText& edit, const ReasoningRecord& previous,
                                const SamplingParams& params);
  GenerationResult generate_target_description(const VideoRef& reference, const EditText& edit,
                                               const ReasoningRecord& trace, const SamplingParams& params);

  void set_max_in_flight(int limit);

 protected:
  virtual Handshake do_handshake() = 0;
  virtual GenerationResult do_describe_video(const VideoRef& video, const SamplingParams& params) = 0;
  virtual GenerationResult do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                                   const SamplingParams& params) = 0;
  virtual GenerationResult do_refine_trace(const VideoRef& reference, const EditText& edit,
                                           const ReasoningRecord& previous, const SamplingParams& params) = 0;
  virtual GenerationResult do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                          const ReasoningRecord& trace,
                                                          const SamplingParams& params) = 0;

 private:
  class Slot;
  void check(const GenerationResult& result, bool require_tokens);

  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<Handshake> handshake_;
  int max_in_flight_ = 0;  // 0 = unbounded
  int in_flight_ = 0;
};

struct MockTargetFixture {
  std::string video;
  std::string edit;
  // Effect-query text the trace must render to; nullopt matches any trace.
  std::optional<std::string> trace;
  std::string text;
};

struct MockRefinementFixture {
  std::string video;
  std::string edit;
  std::string previous;  // effect-query text of the previous round
  std::string text;
};

struct MockFixtures {
  std::size_t dim = 8;
  std::string model_id = "mock-v1";
  std::string layer_selector = "final";
  std::map<std::string, std::string> descriptions;
  std::map<std::pair<std::string, std::string>, std::string> traces;
  std::vector<MockTargetFixture> targets;
  std::vector<MockRefinementFixture> refinements;

  // Format: see data/mock_fixtures.json.
  static MockFixtures from_json(const nlohmann::json& doc);
  static MockFixtures load(const std::string& path);
  nlohmann::json to_json() const;
};

// Deterministic unit-norm vector for (seed, token, position).
std::vector<double> mock_token_vector(std::uint64_t seed, std::string_view token, std::size_t position,
                                      std::size_t dim);

// Fixture-driven backend. Token vectors are keyed pseudo-random functions
// of (seed, token, position); generated text is truncated to max_tokens.
class MockBackend : public Backend {
 public:
  MockBackend(MockFixtures fixtures, std::uint64_t seed);

  const MockFixtures& fixtures() const noexcept { return fixtures_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Embeds `text` the way every mock generation does (exposed for tests).
  GenerationResult embed_text(const std::string& text, int max_tokens, std::string_view prompt_kind) const;

 protected:
  Handshake do_handshake() override;
  GenerationResult do_describe_video(const VideoRef& video, const SamplingParams& params) override;
  GenerationResult do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                           const SamplingParams& params) override;
  GenerationResult do_refine_trace(const VideoRef& reference, const EditText& edit, const ReasoningRecord& previous,
                                   const SamplingParams& params) override;
  GenerationResult do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                  const ReasoningRecord& trace,
                                                  const SamplingParams& params) override;

 private:
  const std::string& description_of(const VideoRef& video) const;

  MockFixtures fixtures_;
  std::uint64_t seed_;
};

// Forwards to another backend and counts calls per operation.
class CountingBackend : public Backend {
 public:
  explicit CountingBackend(Backend& inner) : inner_(inner) {}

  struct Counts {
    long handshake = 0;
    long describe = 0;
    long reason = 0;
    long refine = 0;
    long target = 0;
    long generations() const { return describe + reason + refine + target; }
  };
  Counts counts() const;
  void reset();

 protected:
  Handshake do_handshake() override;
  GenerationResult do_describe_video(const VideoRef& video, const SamplingParams& params) override;
  GenerationResult do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                           const SamplingParams& params) override;
  GenerationResult do_refine_trace(const VideoRef& reference, const EditText& edit, const ReasoningRecord& previous,
                                   const SamplingParams& params) override;
  GenerationResult do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                  const ReasoningRecord& trace,
                                                  const SamplingParams& params) override;

 private:
  Backend& inner_;
  std::atomic<long> handshake_{0}, describe_{0}, reason_{0}, refine_{0}, target_{0};
};

nlohmann::json to_json(const CountingBackend::Counts& counts);

}  // namespace covr
