#include "covr/reasoning.h"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <json.hpp>

#include "covr/error.h"
#include "text_util.h"

namespace covr {
namespace {

using detail::to_lower;
using detail::trim;

constexpr std::array<std::string_view, kSlotCount> kSlotNames = {
    "actions", "camera", "states", "scene", "tempo"};

// Mirrors data/predicates.json; a unit test keeps the two in sync.
constexpr std::string_view kBuiltinVocabulary = R"json({
  "actions": {},
  "camera": {
    "zoom": ["zoom-in", "zoom-out"],
    "shot-scale": ["extreme-close-up", "close-up", "medium-shot", "wide-shot", "long-shot", "tighter", "wider"],
    "pan": ["pan-left", "pan-right"],
    "tilt": ["tilt-up", "tilt-down"],
    "motion": ["static", "handheld", "tracking"]
  },
  "states": {
    "fill-level": ["empty", "half-full", "full"],
    "doneness": ["raw", "browned", "cooked", "burnt"],
    "wetness": ["dry", "wet"],
    "aperture": ["open", "closed"]
  },
  "scene": {
    "location": ["indoor", "outdoor"],
    "lighting": ["daylight", "night", "dim", "bright"],
    "weather": ["sunny", "rainy", "snowy", "cloudy"]
  },
  "tempo": {
    "speed": ["faster", "slower", "slow-motion", "time-lapse", "real-time"],
    "duration": ["shorter", "longer"]
  }
})json";

bool is_slot_token(std::string_view s) {
  if (s.empty() || s.size() > 40) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == ' ' || c == '_' ||
              c == '-' || c == '/';
    if (!ok) return false;
  }
  return true;
}

// Drops "- ", "* ", "1. ", "1) ", "(1) " prefixes.
std::string_view strip_list_marker(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && detail::is_space(s[1])) {
    return trim(s.substr(2));
  }
  if (s.starts_with("\xE2\x80\xA2")) return trim(s.substr(3));  // bullet
  std::size_t i = 0;
  bool paren = !s.empty() && s[0] == '(';
  if (paren) ++i;
  std::size_t digits = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i > digits && i < s.size()) {
    if ((paren && s[i] == ')') || (!paren && (s[i] == '.' || s[i] == ')'))) {
      return trim(s.substr(i + 1));
    }
  }
  return s;
}

std::optional<Relation> relation_from_symbol(std::string_view s) {
  if (s == ">") return Relation::kGreaterThanRef;
  if (s == "<") return Relation::kLessThanRef;
  if (s == "=") return Relation::kEqualToRef;
  return std::nullopt;
}

bool is_ref_word(std::string_view s) {
  std::string l = to_lower(s);
  return l == "ref" || l == "v_r" || l == "vr" || l == "reference";
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view slot_name(Slot slot) { return kSlotNames[static_cast<std::size_t>(slot)]; }

std::optional<Slot> slot_from_name(std::string_view name) {
  std::string l = to_lower(trim(name));
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    if (l == kSlotNames[i]) return static_cast<Slot>(i);
  }
  static const std::map<std::string, Slot, std::less<>> kAliases = {
      {"state", Slot::kStates},          {"object states", Slot::kStates},
      {"object state", Slot::kStates},   {"action", Slot::kActions},
      {"actions or phases", Slot::kActions}, {"phases", Slot::kActions},
      {"scene or background", Slot::kScene}, {"background", Slot::kScene},
      {"scene context", Slot::kScene},   {"camera or framing", Slot::kCamera},
      {"framing", Slot::kCamera},        {"camera viewpoint", Slot::kCamera},
      {"tempo or pacing", Slot::kTempo}, {"pacing", Slot::kTempo},
  };
  auto it = kAliases.find(l);
  if (it != kAliases.end()) return it->second;
  return std::nullopt;
}

std::string_view relation_symbol(Relation relation) {
  switch (relation) {
    case Relation::kGreaterThanRef: return ">";
    case Relation::kLessThanRef: return "<";
    case Relation::kEqualToRef: return "=";
  }
  return "=";
}

Evidence parse_evidence(std::string_view raw) {
  Evidence ev;
  ev.raw = std::string(raw);
  std::string_view body = raw;
  if (body.ends_with('s')) body.remove_suffix(1);
  std::size_t dash = body.find('-', 1);
  if (dash != std::string_view::npos) {
    auto a = parse_double(body.substr(0, dash));
    auto b = parse_double(body.substr(dash + 1));
    if (a && b && *a >= 0.0 && *b >= *a) ev.seconds = std::make_pair(*a, *b);
    return ev;
  }
  if (!raw.empty() && std::all_of(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    long frame = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), frame);
    if (ec == std::errc() && ptr == raw.data() + raw.size()) ev.frame = frame;
  }
  return ev;
}

std::string Assertion::canonical_text() const {
  std::string out(slot_name(slot));
  out += ": ";
  out += value;
  if (relation) {
    out += ' ';
    out += relation_symbol(*relation);
    out += " ref";
  }
  return out;
}

void ReasoningRecord::add(Assertion a) {
  auto& slot_list = slots_[static_cast<std::size_t>(a.slot)];
  if (slot_list.size() >= kMaxAssertionsPerSlot) {
    throw Error(ErrorCode::kSlotOverflow, std::string(slot_name(a.slot)));
  }
  slot_list.push_back(std::move(a));
}

std::size_t ReasoningRecord::size() const {
  std::size_t n = 0;
  for (const auto& s : slots_) n += s.size();
  return n;
}

std::size_t ReasoningRecord::active_count() const {
  std::size_t n = 0;
  for (const auto& s : slots_) {
    n += static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](const Assertion& a) { return !a.verify_only; }));
  }
  return n;
}

void PredicateVocabulary::add(Slot slot, std::string value, std::string predicate) {
  table_[static_cast<std::size_t>(slot)][to_lower(value)] = std::move(predicate);
}

std::string PredicateVocabulary::predicate_for(Slot slot, std::string_view value) const {
  std::string key = to_lower(value);
  const auto& m = table_[static_cast<std::size_t>(slot)];
  auto it = m.find(key);
  return it == m.end() ? key : it->second;
}

std::size_t PredicateVocabulary::size() const {
  std::size_t n = 0;
  for (const auto& m : table_) n += m.size();
  return n;
}

PredicateVocabulary PredicateVocabulary::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("predicate vocabulary: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "predicate vocabulary must be an object");
  PredicateVocabulary vocab;
  for (auto& [slot_key, predicates] : doc.items()) {
    auto slot = slot_from_name(slot_key);
    if (!slot) throw Error(ErrorCode::kSchemaError, "unknown slot '" + slot_key + "' in vocabulary");
    if (!predicates.is_object()) {
      throw Error(ErrorCode::kSchemaError, "slot '" + slot_key + "' must map predicates to value lists");
    }
    for (auto& [predicate, values] : predicates.items()) {
      if (!values.is_array()) throw Error(ErrorCode::kSchemaError, "predicate '" + predicate + "' needs a list");
      for (const auto& v : values) {
        if (!v.is_string()) throw Error(ErrorCode::kSchemaError, "predicate '" + predicate + "' has a non-string value");
        vocab.add(*slot, v.get<std::string>(), predicate);
      }
    }
  }
  return vocab;
}

PredicateVocabulary PredicateVocabulary::load(const std::string& path) {
  return from_json_text(detail::read_file(path));
}

const PredicateVocabulary& PredicateVocabulary::builtin() {
  static const PredicateVocabulary vocab = from_json_text(kBuiltinVocabulary);
  return vocab;
}

TraceParse parse_trace(std::string_view raw, const ParseOptions& options) {
  const PredicateVocabulary& vocab =
      options.vocabulary ? *options.vocabulary : PredicateVocabulary::builtin();
  TraceParse result;
  auto lines = detail::split_lines(raw);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty()) continue;
    auto diag = [&](std::string reason) {
      result.diagnostics.push_back({n + 1, std::string(line), std::move(reason)});
    };

    std::string_view body = strip_list_marker(line);
    std::size_t colon = body.find(':');
    if (colon == std::string_view::npos) {
      diag("missing ':' separator");
      continue;
    }
    std::string_view slot_token = trim(body.substr(0, colon));
    if (!is_slot_token(slot_token)) {
      diag("malformed slot token");
      continue;
    }
    auto slot = slot_from_name(slot_token);
    if (!slot) {
      if (options.strict) throw Error(ErrorCode::kUnknownSlot, std::string(line));
      diag("unknown slot '" + std::string(slot_token) + "'");
      continue;
    }

    Assertion a;
    a.slot = *slot;
    auto words = detail::split_whitespace(body.substr(colon + 1));
    bool bad = false;
    // Suffix markers may appear in any order after the value.
    while (!words.empty() && !bad) {
      std::string_view last = words.back();
      if (last == "verify-only") {
        a.verify_only = true;
        words.pop_back();
      } else if (last.starts_with("conf=")) {
        auto c = parse_double(last.substr(5));
        if (!c || *c < 0.0 || *c > 1.0) {
          diag("confidence outside [0,1]");
          bad = true;
        }
        if (c) a.confidence = *c;
        words.pop_back();
      } else if (last.size() > 1 && last[0] == '@') {
        a.evidence = parse_evidence(last.substr(1));
        words.pop_back();
      } else if (words.size() >= 2 && is_ref_word(last) && relation_from_symbol(words[words.size() - 2])) {
        a.relation = relation_from_symbol(words[words.size() - 2]);
        words.pop_back();
        words.pop_back();
      } else {
        break;
      }
    }
    if (bad) continue;
    if (words.empty()) {
      diag("empty value");
      continue;
    }
    bool compound = false;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) a.value += ' ';
      a.value += words[i];
      std::string l = to_lower(words[i]);
      if (l == "and" || l == "then") compound = true;
    }
    if (compound) {
      diag("compound assertion (and/then)");
      continue;
    }
    a.predicate = vocab.predicate_for(a.slot, a.value);

    if (result.record.slot(a.slot).size() >= kMaxAssertionsPerSlot) {
      if (options.strict) throw Error(ErrorCode::kSlotOverflow, std::string(slot_name(a.slot)));
      diag("slot '" + std::string(slot_name(a.slot)) + "' already holds four assertions");
      continue;
    }
    result.record.add(std::move(a));
  }
  return result;
}

bool contradicts(const Assertion& a, const Assertion& b) {
  if (a.slot != b.slot || a.predicate != b.predicate) return false;
  if (a.value != b.value) return true;
  return a.relation && b.relation && *a.relation != *b.relation;
}

ReasoningRecord canonicalize(const ReasoningRecord& record) {
  ReasoningRecord out;
  for (Slot s : kSlotOrder) {
    std::vector<Assertion> merged;
    std::vector<std::string> texts;
    for (const Assertion& a : record.slot(s)) {
      std::string text = a.canonical_text();
      auto it = std::find(texts.begin(), texts.end(), text);
      if (it == texts.end()) {
        texts.push_back(std::move(text));
        merged.push_back(a);
        continue;
      }
      Assertion& kept = merged[static_cast<std::size_t>(it - texts.begin())];
      kept.confidence = std::max(kept.confidence, a.confidence);
      kept.verify_only = kept.verify_only && a.verify_only;
      if (!kept.evidence && a.evidence) kept.evidence = a.evidence;
    }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (!merged[i].verify_only) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
      return merged[l].confidence > merged[r].confidence;
    });
    std::vector<std::size_t> survivors;
    for (std::size_t i : order) {
      bool clash = std::any_of(survivors.begin(), survivors.end(),
                               [&](std::size_t k) { return contradicts(merged[i], merged[k]); });
      if (clash) {
        merged[i].verify_only = true;
      } else {
        survivors.push_back(i);
      }
    }
    for (Assertion& a : merged) out.add(std::move(a));
  }
  return out;
}

EffectQuery render_effect_query(const ReasoningRecord& record) {
  EffectQuery q;
  record.for_each([&](const Assertion& a) {
    if (a.verify_only) return;
    if (!q.text.empty()) q.text += '\n';
    q.text += a.canonical_text();
  });
  return q;
}

std::string format_record(const ReasoningRecord& record) {
  std::string out;
  record.for_each([&](const Assertion& a) {
    if (!out.empty()) out += '\n';
    out += a.canonical_text();
    if (a.evidence) {
      out += " @";
      out += a.evidence->raw;
    }
    if (a.confidence != 1.0) {
      out += " conf=";
      out += format_double(a.confidence);
    }
    if (a.verify_only) out += " verify-only";
  });
  return out;
}

Checklist derive_checklist(const ReasoningRecord& record) {
  Checklist list;
  record.for_each([&](const Assertion& a) {
    if (!a.verify_only) list.items.push_back({a.canonical_text(), false});
  });
  return list;
}

}  // namespace covr
