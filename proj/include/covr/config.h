#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "covr/backend.h"
#include "covr/lexicon.h"
#include "covr/pooling.h"
#include "covr/reasoning.h"

namespace covr {

// Directory holding the shipped lexicon, predicate vocabulary and mock
// fixtures.
std::string default_data_dir();

struct EngineConfig {
  std::string backend = "mock";  // "mock" or "remote"
  std::uint64_t seed = 0;
  std::string fixtures_path;     // mock only
  std::string remote_url;
  std::string embed_url;         // set: wrap the remote in the re-embed shim
  std::string auth_env = "COVR_API_KEY";
  std::string model;
  std::string layer_selector = "final";
  PoolingKind strategy = PoolingKind::kWeighted;
  std::string scheme_path;
  std::string vocabulary_path;   // empty: built-in predicate vocabulary
  SamplingParams describe = SamplingParams::describe_defaults();
  SamplingParams trace = SamplingParams::trace_defaults();
  SamplingParams target = SamplingParams::target_defaults();
  std::optional<Granularity> granularity;
  int refinement_rounds = 0;
  int parallelism = 1;
  bool strict = false;

  // Trace params with the granularity budget applied.
  SamplingParams effective_trace() const;

  nlohmann::json to_json() const;
  // Fields absent from `doc` keep their current values.
  void merge_json(const nlohmann::json& doc);
  void validate() const;
};

EngineConfig load_engine_config(const std::string& path);

// "mock", "mock:<seed>", "remote:<url>".
void apply_backend_spec(EngineConfig& config, const std::string& spec);

std::unique_ptr<Backend> make_backend(const EngineConfig& config);
std::shared_ptr<const WeightingScheme> load_scheme(const EngineConfig& config);

}  // namespace covr
