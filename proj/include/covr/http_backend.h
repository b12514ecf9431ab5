#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "covr/backend.h"

namespace covr {

struct HttpBackendConfig {
  std::string base_url;              // e.g. "http://127.0.0.1:8080"
  std::string auth_env;              // env var holding a bearer token; empty = none
  std::string model;                 // request "model" field
  std::string layer_selector = "final";
  bool return_hidden_states = true;
  int timeout_seconds = 120;
};

// Wire contract (chat-completions style):
//   GET  /v1/handshake        -> {"dim", "model_id", "layer_selector"}
//   POST /v1/chat/completions -> request {model, messages, temperature,
//        top_p, max_tokens, return_hidden_states, layer_selector}; response
//        {"choices":[{"message":{"content":...}}],
//         "hidden_states":{"tokens":[...], "vectors":[[...], ...]}}
// Messages carry the video as a {"type":"video_url"} part.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  // Builds the request body for one generation (exposed for tests).
  nlohmann::json build_request(const VideoRef& video, const std::string& prompt, const SamplingParams& params) const;
  // Plain completion without hidden states; used by the judge and shim.
  std::string complete_text(const VideoRef* video, const std::string& prompt, const SamplingParams& params);

  const HttpBackendConfig& config() const noexcept { return config_; }

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
  GenerationResult generate(const VideoRef& video, const std::string& prompt, const SamplingParams& params,
                            const char* kind);

  HttpBackendConfig config_;
};

// POSTs the request JSON to base_url + path; maps transport failures to
// kBackendUnavailable and 404/422 responses to kVideoUnreadable.
nlohmann::json http_post_json(const std::string& base_url, const std::string& path, const nlohmann::json& body,
                              const std::string& auth_env, int timeout_seconds);
nlohmann::json http_get_json(const std::string& base_url, const std::string& path, const std::string& auth_env,
                             int timeout_seconds);

struct EmbeddingEndpointConfig {
  std::string base_url;
  std::string auth_env;
  std::string model;
  int timeout_seconds = 60;
};

// For generation backends that cannot return hidden states: text comes
// from `generator` (asked with return_hidden_states=false) and each
// generated token is embedded through POST /v1/embeddings
// {model, input:[...]} -> {"data":[{"embedding":[...]}, ...]}.
class ReembedBackend : public Backend {
 public:
  ReembedBackend(HttpBackendConfig generator, EmbeddingEndpointConfig embedder);

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
  GenerationResult embed(std::string text, const char* kind);

  HttpBackend generator_;
  EmbeddingEndpointConfig embedder_;
};

}  // namespace covr
