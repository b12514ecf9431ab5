#include "covr/backend.h"

#include <bit>
#include <cmath>
#include <random>

#include "covr/error.h"
#include "text_util.h"

namespace covr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '\'' || c == '_' || c >= 0x80;
}

std::string normalize_trace_key(const std::string& text) {
  ParseOptions lenient;
  lenient.strict = false;
  return render_effect_query(canonicalize(parse_trace(text, lenient).record)).text;
}

}  // namespace

void SamplingParams::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kContract, "temperature must be >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kContract, "top_p must lie in (0,1]");
  if (max_tokens <= 0) throw Error(ErrorCode::kContract, "max_tokens must be positive");
}

nlohmann::json to_json(const SamplingParams& p) {
  return {{"temperature", p.temperature}, {"top_p", p.top_p}, {"max_tokens", p.max_tokens}};
}

SamplingParams sampling_from_json(const nlohmann::json& doc, SamplingParams fallback) {
  if (doc.is_null()) return fallback;
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "sampling params must be an object");
  SamplingParams p = fallback;
  p.temperature = doc.value("temperature", p.temperature);
  p.top_p = doc.value("top_p", p.top_p);
  p.max_tokens = doc.value("max_tokens", p.max_tokens);
  p.validate();
  return p;
}

int granularity_token_budget(Granularity g) {
  switch (g) {
    case Granularity::kMinimal: return 15;
    case Granularity::kCompact: return 45;
    case Granularity::kStandard: return 89;
    case Granularity::kVerbose: return 186;
  }
  return 89;
}

std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kMinimal: return "minimal";
    case Granularity::kCompact: return "compact";
    case Granularity::kStandard: return "standard";
    case Granularity::kVerbose: return "verbose";
  }
  return "standard";
}

Granularity parse_granularity(std::string_view name) {
  for (auto g : {Granularity::kMinimal, Granularity::kCompact, Granularity::kStandard, Granularity::kVerbose}) {
    if (name == granularity_name(g)) return g;
  }
  throw Error(ErrorCode::kContract, "unknown granularity '" + std::string(name) + "'");
}

nlohmann::json GenerationResult::to_json() const {
  nlohmann::json j = {{"text", text}, {"meta", backend_meta}};
  if (token_embeddings) {
    j["dim"] = token_embeddings->dim();
    j["tokens"] = token_embeddings->tokens();
    j["vectors"] = token_embeddings->flat();
  } else {
    j["tokens"] = nlohmann::json::array();
  }
  return j;
}

PromptTemplate::PromptTemplate(PromptKind kind, std::string text) : kind_(kind), text_(std::move(text)) {
  bool has_edit = text_.find("{edit}") != std::string::npos;
  bool has_trace = text_.find("{trace}") != std::string::npos;
  switch (kind_) {
    case PromptKind::kDescribeVideo:
      if (has_edit || has_trace) throw Error(ErrorCode::kContract, "describe prompt takes no placeholders");
      break;
    case PromptKind::kReasonAfterEffects:
      if (!has_edit) throw Error(ErrorCode::kContract, "reasoning prompt needs {edit}");
      break;
    case PromptKind::kGenerateTarget:
    case PromptKind::kRefineTrace:
      if (!has_edit || !has_trace) throw Error(ErrorCode::kContract, "prompt needs {edit} and {trace}");
      break;
  }
}

std::string PromptTemplate::render(std::string_view edit, std::string_view trace) const {
  std::string out;
  out.reserve(text_.size() + edit.size() + trace.size());
  for (std::size_t i = 0; i < text_.size();) {
    if (text_.compare(i, 6, "{edit}") == 0) {
      out += edit;
      i += 6;
    } else if (text_.compare(i, 7, "{trace}") == 0) {
      out += trace;
      i += 7;
    } else {
      out += text_[i++];
    }
  }
  return out;
}

const PromptTemplate& PromptTemplate::standard(PromptKind kind) {
  static const PromptTemplate describe(PromptKind::kDescribeVideo,
                                       "Describe the content and actions in this video in detail.");
  static const PromptTemplate reason(
      PromptKind::kReasonAfterEffects,
      "Given this reference video and the edit instruction '{edit}', reason about what specific visual "
      "changes would occur. List the expected changes in: (1) object states, (2) actions or phases, "
      "(3) scene or background, (4) camera or framing, (5) tempo or pacing. Provide a structured "
      "reasoning trace.\n"
      "Answer with one 'slot: value' line per change, using the slots states, actions, scene, camera "
      "and tempo, with at most four lines per slot.");
  static const PromptTemplate target(
      PromptKind::kGenerateTarget,
      "Based on the reference video, edit instruction '{edit}', and the reasoning trace, describe what "
      "the target video after the edit would look like.\n"
      "Reasoning trace:\n{trace}");
  static const PromptTemplate refine(
      PromptKind::kRefineTrace,
      "Given this reference video and the edit instruction '{edit}'. Here is your previous reasoning "
      "trace: {trace}. Refine it: correct errors, remove redundancy, and keep at most four atomic "
      "assertions per slot.");
  switch (kind) {
    case PromptKind::kDescribeVideo: return describe;
    case PromptKind::kReasonAfterEffects: return reason;
    case PromptKind::kGenerateTarget: return target;
    case PromptKind::kRefineTrace: return refine;
  }
  return describe;
}

std::vector<std::string> split_generation_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    while (i < text.size() && detail::is_space(text[i])) ++i;
    if (i == text.size()) {
      if (!tokens.empty()) tokens.back().append(text.substr(start));
      break;
    }
    if (is_word_byte(static_cast<unsigned char>(text[i]))) {
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;
    }
    tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

// RAII in-flight slot.
class Backend::Slot {
 public:
  explicit Slot(Backend& b) : b_(b) {
    std::unique_lock lock(b_.mu_);
    b_.cv_.wait(lock, [&] { return b_.max_in_flight_ <= 0 || b_.in_flight_ < b_.max_in_flight_; });
    ++b_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(b_.mu_);
      --b_.in_flight_;
    }
    b_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Backend& b_;
};

void Backend::set_max_in_flight(int limit) {
  {
    std::lock_guard lock(mu_);
    max_in_flight_ = limit;
  }
  cv_.notify_all();
}

Handshake Backend::handshake() {
  {
    std::lock_guard lock(mu_);
    if (handshake_) return *handshake_;
  }
  Handshake h = do_handshake();
  if (h.dim == 0) throw Error(ErrorCode::kBackendUnavailable, "backend advertised dim 0");
  std::lock_guard lock(mu_);
  if (!handshake_) handshake_ = h;
  return *handshake_;
}

void Backend::check(const GenerationResult& result, bool require_tokens) {
  const std::size_t dim = handshake().dim;
  if (result.token_embeddings) {
    if (result.token_embeddings->dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "backend returned " + std::to_string(result.token_embeddings->dim()) +
                                                     "-dim tokens, handshake said " + std::to_string(dim));
    }
  } else if (require_tokens) {
    throw Error(ErrorCode::kBackendUnavailable, "backend returned no token embeddings");
  }
  if (require_tokens && detail::trim(result.text).empty()) {
    throw Error(ErrorCode::kBackendUnavailable, "backend returned empty text");
  }
}

GenerationResult Backend::describe_video(const VideoRef& video, const SamplingParams& params) {
  validate(video);
  params.validate();
  handshake();
  Slot slot(*this);
  GenerationResult r = do_describe_video(video, params);
  check(r, true);
  return r;
}

GenerationResult Backend::reason_after_effects(const VideoRef& reference, const EditText& edit,
                                               const SamplingParams& params) {
  validate(reference);
  params.validate();
  handshake();
  Slot slot(*this);
  GenerationResult r = do_reason_after_effects(reference, edit, params);
  check(r, false);
  return r;
}

GenerationResult Backend::refine_trace(const VideoRef& reference, const EditText& edit,
                                       const ReasoningRecord& previous, const SamplingParams& params) {
  validate(reference);
  params.validate();
  handshake();
  Slot slot(*this);
  GenerationResult r = do_refine_trace(reference, edit, previous, params);
  check(r, false);
  return r;
}

GenerationResult Backend::generate_target_description(const VideoRef& reference, const EditText& edit,
                                                       const ReasoningRecord& trace, const SamplingParams& params) {
  validate(reference);
  params.validate();
  handshake();
  Slot slot(*this);
  GenerationResult r = do_generate_target_description(reference, edit, trace, params);
  check(r, true);
  return r;
}

// ---- mock ----------------------------------------------------------------

MockFixtures MockFixtures::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "mock fixtures must be an object");
  try {
    MockFixtures f;
    f.dim = doc.value("dim", f.dim);
    if (f.dim == 0) throw Error(ErrorCode::kSchemaError, "mock dim must be positive");
    f.model_id = doc.value("model_id", f.model_id);
    f.layer_selector = doc.value("layer_selector", f.layer_selector);
    if (doc.contains("descriptions")) {
      for (auto& [id, text] : doc["descriptions"].items()) f.descriptions[id] = text.get<std::string>();
    }
    for (const auto& t : doc.value("traces", nlohmann::json::array())) {
      f.traces[{t.at("video").get<std::string>(), t.at("edit").get<std::string>()}] =
          t.at("trace").get<std::string>();
    }
    for (const auto& t : doc.value("targets", nlohmann::json::array())) {
      MockTargetFixture tf;
      tf.video = t.at("video").get<std::string>();
      tf.edit = t.at("edit").get<std::string>();
      if (t.contains("trace") && !t["trace"].is_null()) tf.trace = normalize_trace_key(t["trace"].get<std::string>());
      tf.text = t.at("text").get<std::string>();
      f.targets.push_back(std::move(tf));
    }
    for (const auto& t : doc.value("refinements", nlohmann::json::array())) {
      MockRefinementFixture rf;
      rf.video = t.at("video").get<std::string>();
      rf.edit = t.at("edit").get<std::string>();
      rf.previous = normalize_trace_key(t.at("previous").get<std::string>());
      rf.text = t.at("text").get<std::string>();
      f.refinements.push_back(std::move(rf));
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("mock fixtures: ") + e.what());
  }
}

MockFixtures MockFixtures::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(detail::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
  }
}

nlohmann::json MockFixtures::to_json() const {
  nlohmann::json j = {{"dim", dim}, {"model_id", model_id}, {"layer_selector", layer_selector},
                      {"descriptions", descriptions}};
  j["traces"] = nlohmann::json::array();
  for (const auto& [key, trace] : traces) j["traces"].push_back({{"video", key.first}, {"edit", key.second}, {"trace", trace}});
  j["targets"] = nlohmann::json::array();
  for (const auto& t : targets) {
    nlohmann::json e = {{"video", t.video}, {"edit", t.edit}, {"text", t.text}};
    if (t.trace) e["trace"] = *t.trace;
    j["targets"].push_back(std::move(e));
  }
  j["refinements"] = nlohmann::json::array();
  for (const auto& r : refinements) {
    j["refinements"].push_back({{"video", r.video}, {"edit", r.edit}, {"previous", r.previous}, {"text", r.text}});
  }
  return j;
}

std::vector<double> mock_token_vector(std::uint64_t seed, std::string_view token, std::size_t position,
                                      std::size_t dim) {
  std::uint64_t key = splitmix64(seed ^ splitmix64(fnv1a(token) ^ splitmix64(static_cast<std::uint64_t>(position))));
  std::mt19937_64 gen(key);
  std::vector<double> v(dim);
  double norm2 = 0.0;
  for (double& x : v) {
    // 53 random mantissa bits mapped to [-1, 1); mt19937_64 output is
    // fully specified, so this is identical on every platform.
    x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
    norm2 += x * x;
  }
  if (norm2 == 0.0) {
    v[0] = 1.0;
    return v;
  }
  double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

MockBackend::MockBackend(MockFixtures fixtures, std::uint64_t seed) : fixtures_(std::move(fixtures)), seed_(seed) {}

GenerationResult MockBackend::embed_text(const std::string& text, int max_tokens, std::string_view prompt_kind) const {
  std::vector<std::string> tokens = split_generation_tokens(text);
  if (max_tokens > 0 && tokens.size() > static_cast<std::size_t>(max_tokens)) tokens.resize(static_cast<std::size_t>(max_tokens));
  GenerationResult r;
  for (const auto& t : tokens) r.text += t;
  if (!tokens.empty()) {
    std::vector<double> flat;
    flat.reserve(tokens.size() * fixtures_.dim);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto v = mock_token_vector(seed_, tokens[i], i, fixtures_.dim);
      flat.insert(flat.end(), v.begin(), v.end());
    }
    r.token_embeddings.emplace(std::move(tokens), std::move(flat), fixtures_.dim);
  }
  r.backend_meta = {{"model_id", fixtures_.model_id},
                    {"layer_selector", fixtures_.layer_selector},
                    {"seed", std::to_string(seed_)},
                    {"frame_sampling", "1fps"},
                    {"prompt_kind", std::string(prompt_kind)}};
  return r;
}

Handshake MockBackend::do_handshake() { return {fixtures_.dim, fixtures_.model_id, fixtures_.layer_selector}; }

const std::string& MockBackend::description_of(const VideoRef& video) const {
  auto it = fixtures_.descriptions.find(video.id);
  if (it == fixtures_.descriptions.end()) throw Error(ErrorCode::kVideoUnreadable, video.id);
  return it->second;
}

GenerationResult MockBackend::do_describe_video(const VideoRef& video, const SamplingParams& params) {
  return embed_text(description_of(video), params.max_tokens, "describe_video");
}

GenerationResult MockBackend::do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                                      const SamplingParams& params) {
  description_of(reference);
  auto it = fixtures_.traces.find({reference.id, edit.text()});
  return embed_text(it == fixtures_.traces.end() ? std::string() : it->second, params.max_tokens,
                    "reason_after_effects");
}

GenerationResult MockBackend::do_refine_trace(const VideoRef& reference, const EditText& edit,
                                              const ReasoningRecord& previous, const SamplingParams& params) {
  description_of(reference);
  std::string prev = render_effect_query(previous).text;
  for (const auto& r : fixtures_.refinements) {
    if (r.video == reference.id && r.edit == edit.text() && r.previous == prev) {
      return embed_text(r.text, params.max_tokens, "refine_trace");
    }
  }
  // Unscripted refinement is a fixpoint.
  return embed_text(format_record(previous), params.max_tokens, "refine_trace");
}

GenerationResult MockBackend::do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                             const ReasoningRecord& trace,
                                                             const SamplingParams& params) {
  const std::string& ref_description = description_of(reference);
  std::string key = render_effect_query(trace).text;
  const MockTargetFixture* wildcard = nullptr;
  for (const auto& t : fixtures_.targets) {
    if (t.video != reference.id || t.edit != edit.text()) continue;
    if (t.trace && *t.trace == key) return embed_text(t.text, params.max_tokens, "generate_target_description");
    if (!t.trace && !wildcard) wildcard = &t;
  }
  std::string text = wildcard ? wildcard->text : ref_description + " " + edit.text();
  return embed_text(text, params.max_tokens, "generate_target_description");
}

// ---- counting --------------------------------------------------------------

CountingBackend::Counts CountingBackend::counts() const {
  return {handshake_.load(), describe_.load(), reason_.load(), refine_.load(), target_.load()};
}

void CountingBackend::reset() {
  handshake_ = describe_ = reason_ = refine_ = target_ = 0;
}

Handshake CountingBackend::do_handshake() {
  ++handshake_;
  return inner_.handshake();
}

GenerationResult CountingBackend::do_describe_video(const VideoRef& video, const SamplingParams& params) {
  ++describe_;
  return inner_.describe_video(video, params);
}

GenerationResult CountingBackend::do_reason_after_effects(const VideoRef& reference, const EditText& edit,
                                                          const SamplingParams& params) {
  ++reason_;
  return inner_.reason_after_effects(reference, edit, params);
}

GenerationResult CountingBackend::do_refine_trace(const VideoRef& reference, const EditText& edit,
                                                  const ReasoningRecord& previous, const SamplingParams& params) {
  ++refine_;
  return inner_.refine_trace(reference, edit, previous, params);
}

GenerationResult CountingBackend::do_generate_target_description(const VideoRef& reference, const EditText& edit,
                                                                 const ReasoningRecord& trace,
                                                                 const SamplingParams& params) {
  ++target_;
  return inner_.generate_target_description(reference, edit, trace, params);
}

nlohmann::json to_json(const CountingBackend::Counts& c) {
  return {{"describe_video", c.describe},
          {"reason_after_effects", c.reason},
          {"refine_trace", c.refine},
          {"generate_target_description", c.target},
          {"total", c.generations()}};
}

}  // namespace covr
