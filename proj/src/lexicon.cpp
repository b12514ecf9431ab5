#include "covr/lexicon.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "covr/error.h"
#include "text_util.h"

namespace covr {
namespace {

int priority(LexicalCategory c) {
  switch (c) {
    case LexicalCategory::kSalient: return 3;
    case LexicalCategory::kContext: return 2;
    case LexicalCategory::kGeneric: return 1;
    case LexicalCategory::kPunctuation: return 0;
  }
  return 0;
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '\'' || c == '_' || c >= 0x80;
}

bool is_punct_byte(unsigned char c) { return c < 0x80 && !is_word_byte(c) && !detail::is_space(static_cast<char>(c)); }

LexicalCategory category_from_name(const std::string& name) {
  std::string l = detail::to_lower(name);
  if (l == "salient") return LexicalCategory::kSalient;
  if (l == "context") return LexicalCategory::kContext;
  if (l == "generic") return LexicalCategory::kGeneric;
  if (l == "punctuation") return LexicalCategory::kPunctuation;
  throw Error(ErrorCode::kSchemaError, "unknown category '" + name + "'");
}

}  // namespace

std::string_view category_name(LexicalCategory category) {
  switch (category) {
    case LexicalCategory::kSalient: return "salient";
    case LexicalCategory::kContext: return "context";
    case LexicalCategory::kGeneric: return "generic";
    case LexicalCategory::kPunctuation: return "punctuation";
  }
  return "context";
}

WeightingScheme::WeightingScheme() : WeightingScheme(Alphas{}) {}

WeightingScheme::WeightingScheme(Alphas alphas, LexicalCategory default_category)
    : alphas_(alphas),
      context_weight_(alphas.context.value_or(alphas.mid)),
      generic_weight_(alphas.generic.value_or(alphas.mid)),
      default_category_(default_category) {
  validate();
}

void WeightingScheme::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(alphas_.high) || !finite(context_weight_) || !finite(generic_weight_) ||
      !finite(alphas_.low)) {
    throw Error(ErrorCode::kValidationError, "alpha values must be finite");
  }
  if (!(alphas_.high > 0.0)) throw Error(ErrorCode::kValidationError, "alpha_high must be > 0");
  if (!(context_weight_ > 0.0 && generic_weight_ > 0.0)) {
    throw Error(ErrorCode::kValidationError, "alpha_mid must be > 0");
  }
  if (alphas_.low < 0.0) throw Error(ErrorCode::kValidationError, "alpha_low must be >= 0");
  if (!(alphas_.high >= context_weight_ && context_weight_ >= generic_weight_ &&
        generic_weight_ >= alphas_.low)) {
    throw Error(ErrorCode::kValidationError,
                "alphas must satisfy high >= context >= generic >= low");
  }
}

void WeightingScheme::set_weight(LexicalCategory category, double weight) {
  WeightingScheme copy = *this;
  switch (category) {
    case LexicalCategory::kSalient: copy.alphas_.high = weight; break;
    case LexicalCategory::kContext: copy.context_weight_ = weight; break;
    case LexicalCategory::kGeneric: copy.generic_weight_ = weight; break;
    case LexicalCategory::kPunctuation: copy.alphas_.low = weight; break;
  }
  copy.validate();
  *this = std::move(copy);
}

double WeightingScheme::weight(LexicalCategory category) const {
  switch (category) {
    case LexicalCategory::kSalient: return alphas_.high;
    case LexicalCategory::kContext: return context_weight_;
    case LexicalCategory::kGeneric: return generic_weight_;
    case LexicalCategory::kPunctuation: return alphas_.low;
  }
  return context_weight_;
}

void WeightingScheme::add_token(std::string_view token, LexicalCategory category) {
  std::string key = fold_token(token);
  if (key.empty()) return;
  auto it = dict_.find(key);
  if (it == dict_.end()) {
    dict_.emplace(std::move(key), category);
  } else if (priority(category) > priority(it->second)) {
    it->second = category;
  }
}

const LexicalCategory* WeightingScheme::lookup(std::string_view folded) const {
  auto it = dict_.find(folded);
  return it == dict_.end() ? nullptr : &it->second;
}

std::string fold_token(std::string_view token) { return detail::to_lower(detail::trim(token)); }

LexicalCategory categorize(std::string_view token, const WeightingScheme& scheme) {
  std::string folded = fold_token(token);
  if (const LexicalCategory* hit = scheme.lookup(folded)) return *hit;
  if (std::all_of(folded.begin(), folded.end(),
                  [](char c) { return is_punct_byte(static_cast<unsigned char>(c)); })) {
    return LexicalCategory::kPunctuation;  // also covers whitespace-only tokens
  }
  return scheme.default_category();
}

double weight_of(LexicalCategory category, const WeightingScheme& scheme) {
  return scheme.weight(category);
}

WeightingScheme scheme_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("category dictionary: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "category dictionary must be an object");

  auto number = [&](const char* key) -> double {
    if (!doc.contains(key)) throw Error(ErrorCode::kSchemaError, std::string("missing '") + key + "'");
    if (!doc[key].is_number()) throw Error(ErrorCode::kSchemaError, std::string("'") + key + "' must be a number");
    return doc[key].get<double>();
  };
  WeightingScheme::Alphas alphas{number("alpha_high"), number("alpha_mid"), number("alpha_low")};
  if (doc.contains("alpha_context")) alphas.context = number("alpha_context");
  if (doc.contains("alpha_generic")) alphas.generic = number("alpha_generic");
  LexicalCategory fallback = LexicalCategory::kContext;
  if (doc.contains("default_category")) {
    if (!doc["default_category"].is_string()) throw Error(ErrorCode::kSchemaError, "default_category must be a string");
    fallback = category_from_name(doc["default_category"].get<std::string>());
  }
  WeightingScheme scheme(alphas, fallback);

  const std::pair<const char*, LexicalCategory> lists[] = {
      {"salient", LexicalCategory::kSalient},
      {"context", LexicalCategory::kContext},
      {"generic", LexicalCategory::kGeneric},
  };
  for (const auto& [key, category] : lists) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_array()) throw Error(ErrorCode::kSchemaError, std::string("'") + key + "' must be an array");
    for (const auto& tok : doc[key]) {
      if (!tok.is_string()) throw Error(ErrorCode::kSchemaError, std::string("'") + key + "' holds a non-string");
      scheme.add_token(tok.get<std::string>(), category);
    }
  }
  return scheme;
}

WeightingScheme load_category_dict(const std::string& path) {
  return scheme_from_json_text(detail::read_file(path));
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      std::string_view w = text.substr(start, i - start);
      while (!w.empty() && (w.front() == '-' || w.front() == '\'')) w.remove_prefix(1);
      while (!w.empty() && (w.back() == '-' || w.back() == '\'')) w.remove_suffix(1);
      if (!w.empty()) out.push_back(detail::to_lower(w));
    }
  }
  return out;
}

std::set<std::string> salient_tokens(std::string_view text, const WeightingScheme& scheme) {
  std::set<std::string> out;
  for (std::string& w : word_tokens(text)) {
    if (categorize(w, scheme) == LexicalCategory::kSalient) out.insert(std::move(w));
  }
  return out;
}

}  // namespace covr
