#include "covr/config.h"

#include "covr/error.h"
#include "covr/http_backend.h"
#include "text_util.h"

#ifndef COVR_DATA_DIR
#define COVR_DATA_DIR "data"
#endif

namespace covr {

std::string default_data_dir() { return COVR_DATA_DIR; }

SamplingParams EngineConfig::effective_trace() const {
  SamplingParams p = trace;
  if (granularity) p.max_tokens = granularity_token_budget(*granularity);
  return p;
}

nlohmann::json EngineConfig::to_json() const {
  nlohmann::json j = {{"backend", backend},
                      {"seed", seed},
                      {"layer_selector", layer_selector},
                      {"strategy", pooling_kind_name(strategy)},
                      {"scheme_path", scheme_path},
                      {"sampling",
                       {{"describe", covr::to_json(describe)},
                        {"trace", covr::to_json(effective_trace())},
                        {"target", covr::to_json(target)}}},
                      {"granularity", granularity ? nlohmann::json(granularity_name(*granularity)) : nlohmann::json()},
                      {"refinement_rounds", refinement_rounds},
                      {"parallelism", parallelism},
                      {"strict", strict}};
  if (backend == "mock") {
    j["fixtures_path"] = fixtures_path;
  } else {
    j["remote_url"] = remote_url;
    j["auth_env"] = auth_env;
    j["model"] = model;
    if (!embed_url.empty()) j["embed_url"] = embed_url;
  }
  if (!vocabulary_path.empty()) j["vocabulary_path"] = vocabulary_path;
  return j;
}

void EngineConfig::merge_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "config must be an object");
  try {
    backend = doc.value("backend", backend);
    seed = doc.value("seed", seed);
    fixtures_path = doc.value("fixtures_path", fixtures_path);
    remote_url = doc.value("remote_url", remote_url);
    embed_url = doc.value("embed_url", embed_url);
    auth_env = doc.value("auth_env", auth_env);
    model = doc.value("model", model);
    layer_selector = doc.value("layer_selector", layer_selector);
    if (doc.contains("strategy")) strategy = parse_pooling_kind(doc["strategy"].get<std::string>());
    scheme_path = doc.value("scheme_path", scheme_path);
    vocabulary_path = doc.value("vocabulary_path", vocabulary_path);
    if (doc.contains("sampling")) {
      const auto& s = doc["sampling"];
      describe = sampling_from_json(s.value("describe", nlohmann::json()), describe);
      trace = sampling_from_json(s.value("trace", nlohmann::json()), trace);
      target = sampling_from_json(s.value("target", nlohmann::json()), target);
    }
    if (doc.contains("granularity")) {
      if (doc["granularity"].is_null()) {
        granularity.reset();
      } else {
        granularity = parse_granularity(doc["granularity"].get<std::string>());
      }
    }
    refinement_rounds = doc.value("refinement_rounds", refinement_rounds);
    parallelism = doc.value("parallelism", parallelism);
    strict = doc.value("strict", strict);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("config: ") + e.what());
  }
}

void EngineConfig::validate() const {
  if (backend != "mock" && backend != "remote") throw Error(ErrorCode::kContract, "backend must be mock or remote");
  if (backend == "remote" && remote_url.empty()) throw Error(ErrorCode::kContract, "remote backend needs remote_url");
  if (refinement_rounds < 0) throw Error(ErrorCode::kContract, "refinement_rounds must be >= 0");
  if (parallelism < 1) throw Error(ErrorCode::kContract, "parallelism must be >= 1");
  describe.validate();
  trace.validate();
  target.validate();
}

EngineConfig load_engine_config(const std::string& path) {
  EngineConfig c;
  try {
    c.merge_json(nlohmann::json::parse(detail::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
  }
  return c;
}

void apply_backend_spec(EngineConfig& config, const std::string& spec) {
  if (spec == "mock") {
    config.backend = "mock";
  } else if (spec.starts_with("mock:")) {
    config.backend = "mock";
    try {
      config.seed = std::stoull(spec.substr(5));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kContract, "bad mock seed in '" + spec + "'");
    }
  } else if (spec.starts_with("remote:")) {
    config.backend = "remote";
    config.remote_url = spec.substr(7);
  } else if (spec == "remote") {
    config.backend = "remote";
  } else {
    throw Error(ErrorCode::kContract, "unknown backend '" + spec + "'");
  }
}

std::unique_ptr<Backend> make_backend(const EngineConfig& config) {
  config.validate();
  std::unique_ptr<Backend> b;
  if (config.backend == "mock") {
    std::string path = config.fixtures_path.empty() ? default_data_dir() + "/mock_fixtures.json" : config.fixtures_path;
    b = std::make_unique<MockBackend>(MockFixtures::load(path), config.seed);
  } else {
    HttpBackendConfig http{config.remote_url, config.auth_env, config.model, config.layer_selector, true, 120};
    if (config.embed_url.empty()) {
      b = std::make_unique<HttpBackend>(std::move(http));
    } else {
      b = std::make_unique<ReembedBackend>(std::move(http),
                                           EmbeddingEndpointConfig{config.embed_url, config.auth_env, config.model, 60});
    }
  }
  b->set_max_in_flight(config.parallelism);
  return b;
}

std::shared_ptr<const WeightingScheme> load_scheme(const EngineConfig& config) {
  std::string path = config.scheme_path.empty() ? default_data_dir() + "/lexicon.json" : config.scheme_path;
  return std::make_shared<const WeightingScheme>(load_category_dict(path));
}

}  // namespace covr
