#include "covr/corpus.h"

#include "covr/error.h"
#include "text_util.h"

namespace covr {
namespace {

using nlohmann::json;

json video_to_json(const VideoRef& v) {
  json j = {{"id", v.id}, {"uri", v.uri}};
  if (v.fps_hint) j["fps_hint"] = *v.fps_hint;
  return j;
}

VideoRef video_from_json(const json& j, const char* field) {
  VideoRef v;
  if (j.is_string()) {
    v.id = j.get<std::string>();
    v.uri = v.id;
  } else if (j.is_object()) {
    v.id = j.at("id").get<std::string>();
    v.uri = j.value("uri", v.id);
    if (j.contains("fps_hint") && !j["fps_hint"].is_null()) v.fps_hint = j["fps_hint"].get<double>();
  } else {
    throw Error(ErrorCode::kSchemaError, std::string("field '") + field + "' must be an object or id string");
  }
  validate(v);
  return v;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

}  // namespace

json flags_to_json(const AcceptanceFlags& f) {
  return {{"temporal_dependency", f.temporal_dependency},
          {"state_transition", f.state_transition},
          {"cinematography", f.cinematography},
          {"implicit_cause_effect", f.implicit_cause_effect},
          {"lexical_overlap", f.lexical_overlap}};
}

AcceptanceFlags flags_from_json(const json& j) {
  AcceptanceFlags f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "criteria_flags must be an object");
  f.temporal_dependency = j.value("temporal_dependency", false);
  f.state_transition = j.value("state_transition", false);
  f.cinematography = j.value("cinematography", false);
  f.implicit_cause_effect = j.value("implicit_cause_effect", false);
  f.lexical_overlap = j.value("lexical_overlap", 1.0);
  if (!(f.lexical_overlap >= 0.0 && f.lexical_overlap <= 1.0)) {
    throw Error(ErrorCode::kSchemaError, "lexical_overlap must lie in [0,1]");
  }
  return f;
}

json triplet_to_json(const Triplet& t) {
  json j = {{"id", t.id},
            {"reference", video_to_json(t.reference)},
            {"edit", t.edit.text()},
            {"target", video_to_json(t.target)},
            {"criteria_flags", flags_to_json(t.criteria_flags)}};
  if (t.modification_text) j["modification_text"] = *t.modification_text;
  if (t.reasoning_brief) j["reasoning"] = *t.reasoning_brief;
  if (t.reasoning_detailed) j["reasoning_detailed"] = *t.reasoning_detailed;
  if (t.reference_description) j["reference_description"] = *t.reference_description;
  if (t.target_description) j["target_description"] = *t.target_description;
  return j;
}

Triplet triplet_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "triplet record must be an object");
  try {
    Triplet t;
    t.id = j.at("id").get<std::string>();
    if (t.id.empty()) throw Error(ErrorCode::kSchemaError, "triplet id is empty");
    t.reference = video_from_json(j.at("reference"), "reference");
    t.edit = EditText(j.at("edit").get<std::string>());
    t.target = video_from_json(j.at("target"), "target");
    t.modification_text = optional_string(j, "modification_text");
    t.reasoning_brief = optional_string(j, "reasoning");
    t.reasoning_detailed = optional_string(j, "reasoning_detailed");
    t.reference_description = optional_string(j, "reference_description");
    t.target_description = optional_string(j, "target_description");
    if (j.contains("criteria_flags")) t.criteria_flags = flags_from_json(j["criteria_flags"]);
    validate(t);
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what());
  }
}

CorpusRead parse_triplets(std::string_view text) {
  CorpusRead out;
  auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = detail::trim(lines[n]);
    if (line.empty()) continue;
    try {
      out.triplets.push_back(triplet_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      out.errors.push_back({n + 1, e.what()});
    } catch (const Error& e) {
      out.errors.push_back({n + 1, e.what()});
    }
  }
  return out;
}

CorpusRead read_triplets(const std::string& path) { return parse_triplets(detail::read_file(path)); }

std::string format_triplets(const std::vector<Triplet>& triplets) {
  std::string out;
  for (const Triplet& t : triplets) {
    out += triplet_to_json(t).dump();
    out += '\n';
  }
  return out;
}

void write_triplets(const std::string& path, const std::vector<Triplet>& triplets) {
  detail::write_file(path, format_triplets(triplets));
}

}  // namespace covr
