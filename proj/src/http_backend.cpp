#include "covr/http_backend.h"

#include <cstdlib>

#include <httplib.h>

#include "covr/error.h"

namespace covr {
namespace {

httplib::Headers auth_headers(const std::string& auth_env) {
  httplib::Headers headers;
  if (auth_env.empty()) return headers;
  const char* token = std::getenv(auth_env.c_str());
  if (token && *token) headers.emplace("Authorization", std::string("Bearer ") + token);
  return headers;
}

nlohmann::json decode(const httplib::Result& res, const std::string& what) {
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable, what + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 404 || res->status == 422) {
    throw Error(ErrorCode::kVideoUnreadable, what + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kBackendUnavailable, what + ": HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, what + ": malformed response body: " + e.what());
  }
}

std::string message_content(const nlohmann::json& body) {
  try {
    return body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("response lacks choices[0].message.content: ") + e.what());
  }
}

}  // namespace

nlohmann::json http_post_json(const std::string& base_url, const std::string& path, const nlohmann::json& body,
                              const std::string& auth_env, int timeout_seconds) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(timeout_seconds, 0);
  cli.set_read_timeout(timeout_seconds, 0);
  auto res = cli.Post(path, auth_headers(auth_env), body.dump(), "application/json");
  return decode(res, "POST " + base_url + path);
}

nlohmann::json http_get_json(const std::string& base_url, const std::string& path, const std::string& auth_env,
                             int timeout_seconds) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(timeout_seconds, 0);
  cli.set_read_timeout(timeout_seconds, 0);
  auto res = cli.Get(path, auth_headers(auth_env));
  return decode(res, "GET " + base_url + path);
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::kContract, "remote backend needs a base URL");
}

nlohmann::json HttpBackend::build_request(const VideoRef& video, const std::string& prompt,
                                          const SamplingParams& params) const {
  nlohmann::json content = nlohmann::json::array();
  nlohmann::json video_part = {{"type", "video_url"}, {"video_url", {{"url", video.uri}, {"fps", 1}}}};
  content.push_back(std::move(video_part));
  content.push_back({{"type", "text"}, {"text", prompt}});
  return {{"model", config_.model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}})},
          {"temperature", params.temperature},
          {"top_p", params.top_p},
          {"max_tokens", params.max_tokens},
          {"return_hidden_states", config_.return_hidden_states},
          {"layer_selector", config_.layer_selector}};
}

std::string HttpBackend::complete_text(const VideoRef* video, const std::string& prompt, const SamplingParams& params) {
  nlohmann::json req;
  if (video) {
    req = build_request(*video, prompt, params);
  } else {
    req = {{"model", config_.model},
           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
           {"temperature", params.temperature},
           {"top_p", params.top_p},
           {"max_tokens", params.max_tokens}};
  }
  req["return_hidden_states"] = false;
  return message_content(http_post_json(config_.base_url, "/v1/chat/completions", req, config_.auth_env,
                                        config_.timeout_seconds));
}

Handshake HttpBackend::do_handshake() {
  auto body = http_get_json(config_.base_url, "/v1/handshake", config_.auth_env, config_.timeout_seconds);
  try {
    Handshake h;
    h.dim = body.at("dim").get<std::size_t>();
    h.model_id = body.value("model_id", config_.model);
    h.layer_selector = body.value("layer_selector", config_.layer_selector);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("malformed handshake: ") + e.what());
  }
}

GenerationResult HttpBackend::generate(const VideoRef& video, const std::string& prompt, const SamplingParams& params,
                                       const char* kind) {
  auto body = http_post_json(config_.base_url, "/v1/chat/completions", build_request(video, prompt, params),
                             config_.auth_env, config_.timeout_seconds);
  GenerationResult r;
  r.text = message_content(body);
  if (body.contains("hidden_states") && !body["hidden_states"].is_null()) {
    try {
      const auto& hs = body["hidden_states"];
      auto tokens = hs.at("tokens").get<std::vector<std::string>>();
      auto vectors = hs.at("vectors").get<std::vector<std::vector<double>>>();
      if (!tokens.empty()) r.token_embeddings.emplace(std::move(tokens), std::move(vectors));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBackendUnavailable, std::string("malformed hidden_states: ") + e.what());
    }
  }
  r.backend_meta = {{"model_id", body.value("model", config_.model)},
                    {"layer_selector", config_.layer_selector},
                    {"frame_sampling", "1fps"},
                    {"prompt_kind", kind}};
  return r;
}

GenerationResult HttpBackend::do_describe_video(const VideoRef& video, const SamplingParams& params) {
  return generate(video, PromptTemplate::standard(PromptKind::kDescribeVideo).render(), params, "describe_video");
}

GenerationResult HttpBackend::do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                                      const SamplingParams& params) {
  return generate(reference, PromptTemplate::standard(PromptKind::kReasonAfterEffects).render(edit.text()), params,
                  "reason_after_effects");
}

GenerationResult HttpBackend::do_refine_trace(const VideoRef& reference, const EditText& edit,
                                              const ReasoningRecord& previous, const SamplingParams& params) {
  return generate(reference,
                  PromptTemplate::standard(PromptKind::kRefineTrace).render(edit.text(), format_record(previous)),
                  params, "refine_trace");
}

GenerationResult HttpBackend::do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                             const ReasoningRecord& trace,
                                                             const SamplingParams& params) {
  return generate(reference,
                  PromptTemplate::standard(PromptKind::kGenerateTarget)
                      .render(edit.text(), render_effect_query(trace).text),
                  params, "generate_target_description");
}

ReembedBackend::ReembedBackend(HttpBackendConfig generator, EmbeddingEndpointConfig embedder)
    : generator_([&] {
        generator.return_hidden_states = false;
        return generator;
      }()),
      embedder_(std::move(embedder)) {}

GenerationResult ReembedBackend::embed(std::string text, const char* kind) {
  GenerationResult r;
  r.text = std::move(text);
  std::vector<std::string> tokens = split_generation_tokens(r.text);
  if (!tokens.empty()) {
    nlohmann::json req = {{"model", embedder_.model}, {"input", tokens}};
    auto body = http_post_json(embedder_.base_url, "/v1/embeddings", req, embedder_.auth_env,
                               embedder_.timeout_seconds);
    std::vector<std::vector<double>> vectors;
    try {
      for (const auto& item : body.at("data")) vectors.push_back(item.at("embedding").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBackendUnavailable, std::string("malformed embeddings response: ") + e.what());
    }
    r.token_embeddings.emplace(std::move(tokens), std::move(vectors));
  }
  r.backend_meta = {{"model_id", generator_.config().model},
                    {"embedding_model", embedder_.model},
                    {"layer_selector", "reembed"},
                    {"frame_sampling", "1fps"},
                    {"prompt_kind", kind}};
  return r;
}

Handshake ReembedBackend::do_handshake() {
  nlohmann::json req = {{"model", embedder_.model}, {"input", {"probe"}}};
  auto body = http_post_json(embedder_.base_url, "/v1/embeddings", req, embedder_.auth_env, embedder_.timeout_seconds);
  try {
    return {body.at("data").at(0).at("embedding").size(), generator_.config().model, "reembed"};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("malformed embeddings response: ") + e.what());
  }
}

GenerationResult ReembedBackend::do_describe_video(const VideoRef& video, const SamplingParams& params) {
  return embed(generator_.complete_text(&video, PromptTemplate::standard(PromptKind::kDescribeVideo).render(), params),
               "describe_video");
}

GenerationResult ReembedBackend::do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                                         const SamplingParams& params) {
  return embed(generator_.complete_text(
                   &reference, PromptTemplate::standard(PromptKind::kReasonAfterEffects).render(edit.text()), params),
               "reason_after_effects");
}

GenerationResult ReembedBackend::do_refine_trace(const VideoRef& reference, const EditText& edit,
                                                 const ReasoningRecord& previous, const SamplingParams& params) {
  return embed(generator_.complete_text(&reference,
                                        PromptTemplate::standard(PromptKind::kRefineTrace)
                                            .render(edit.text(), format_record(previous)),
                                        params),
               "refine_trace");
}

GenerationResult ReembedBackend::do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                                const ReasoningRecord& trace,
                                                                const SamplingParams& params) {
  return embed(generator_.complete_text(&reference,
                                        PromptTemplate::standard(PromptKind::kGenerateTarget)
                                            .render(edit.text(), render_effect_query(trace).text),
                                        params),
               "generate_target_description");
}

}  // namespace covr
