#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace covr {

// Enumerator order is the emission order of canonical records.
enum class Slot { kActions = 0, kCamera, kStates, kScene, kTempo };

inline constexpr std::size_t kSlotCount = 5;
inline constexpr std::size_t kMaxAssertionsPerSlot = 4;
inline constexpr std::array<Slot, kSlotCount> kSlotOrder = {
    Slot::kActions, Slot::kCamera, Slot::kStates, Slot::kScene, Slot::kTempo};

std::string_view slot_name(Slot slot);
// Accepts the five slot names plus the reasoning prompt's dimension labels
// ("object states", "camera or framing", ...), case-insensitively.
std::optional<Slot> slot_from_name(std::string_view name);

// Relative operator against the reference video.
enum class Relation { kGreaterThanRef, kLessThanRef, kEqualToRef };

std::string_view relation_symbol(Relation relation);

struct Evidence {
  std::string raw;
  std::optional<std::pair<double, double>> seconds;
  std::optional<long> frame;

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

// Parses "2.0-4.5", "2.0-4.5s" or "12"; anything else keeps only `raw`.
Evidence parse_evidence(std::string_view raw);

struct Assertion {
  Slot slot = Slot::kActions;
  std::string predicate;
  std::string value;
  std::optional<Relation> relation;
  std::optional<Evidence> evidence;
  double confidence = 1.0;
  bool verify_only = false;

  // "slot: value" with an optional " > ref" style suffix.
  std::string canonical_text() const;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

class ReasoningRecord {
 public:
  ReasoningRecord() = default;

  const std::vector<Assertion>& slot(Slot s) const {
    return slots_[static_cast<std::size_t>(s)];
  }
  // Appends to a.slot; throws kSlotOverflow past four assertions.
  void add(Assertion a);

  std::size_t size() const;
  std::size_t active_count() const;
  bool empty() const { return size() == 0; }

  // Visits assertions in canonical slot order, input order within a slot.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (Slot s : kSlotOrder) {
      for (const Assertion& a : slot(s)) fn(a);
    }
  }

  friend bool operator==(const ReasoningRecord&, const ReasoningRecord&) = default;

 private:
  std::array<std::vector<Assertion>, kSlotCount> slots_;
};

// Per-slot map from surface value to controlled predicate. Values without
// an entry are their own predicate.
class PredicateVocabulary {
 public:
  PredicateVocabulary() = default;

  void add(Slot slot, std::string value, std::string predicate);
  std::string predicate_for(Slot slot, std::string_view value) const;
  std::size_t size() const;

  // JSON object: { "<slot>": { "<predicate>": ["value", ...] } }.
  static PredicateVocabulary from_json_text(std::string_view text);
  static PredicateVocabulary load(const std::string& path);
  // Small built-in table covering camera, tempo and scene opposites.
  static const PredicateVocabulary& builtin();

 private:
  std::array<std::map<std::string, std::string, std::less<>>, kSlotCount> table_;
};

struct TraceDiagnostic {
  std::size_t line_number = 0;  // 1-based
  std::string line;
  std::string reason;
};

struct TraceParse {
  ReasoningRecord record;
  std::vector<TraceDiagnostic> diagnostics;
};

struct ParseOptions {
  // Strict: unknown slots and overflow raise. Lenient: both become
  // diagnostics, overflow keeps the first four assertions of the slot.
  bool strict = true;
  const PredicateVocabulary* vocabulary = nullptr;  // builtin() when null
};

TraceParse parse_trace(std::string_view raw, const ParseOptions& options = {});

// Dedup, contradiction demotion (higher confidence survives, first wins on
// ties), fixed slot order. Idempotent.
ReasoningRecord canonicalize(const ReasoningRecord& record);

// Two assertions contradict when slot and predicate match and either the
// values differ or both carry different relations.
bool contradicts(const Assertion& a, const Assertion& b);

struct EffectQuery {
  std::string text;
  friend bool operator==(const EffectQuery&, const EffectQuery&) = default;
};

// One line per active assertion, no trailing newline.
EffectQuery render_effect_query(const ReasoningRecord& record);

// Full-fidelity text form: every assertion, with evidence, confidence and
// verify-only markers. parse_trace reads it back losslessly.
std::string format_record(const ReasoningRecord& record);

struct ChecklistItem {
  std::string assertion_canonical_text;
  std::optional<bool> satisfied;

  friend bool operator==(const ChecklistItem&, const ChecklistItem&) = default;
};

struct Checklist {
  std::vector<ChecklistItem> items;
};

Checklist derive_checklist(const ReasoningRecord& record);

}  // namespace covr
