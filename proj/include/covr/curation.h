#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covr/lexicon.h"
#include "covr/model.h"

namespace covr {

struct CurationConfig {
  int min_criteria = 2;
  // Criterion (v) fires when overlap is strictly below this value.
  double overlap_threshold = 0.3;

  void validate() const;
};

inline constexpr std::string_view kCriterionTemporal = "temporal_dependency";
inline constexpr std::string_view kCriterionState = "state_transition";
inline constexpr std::string_view kCriterionCinematography = "cinematography";
inline constexpr std::string_view kCriterionImplicitCause = "implicit_cause_effect";
inline constexpr std::string_view kCriterionLowLexical = "low_lexical_sufficiency";

// Jaccard similarity of the Salient tokens of both texts; 0 when both sets
// are empty.
double lexical_overlap(const EditText& edit, std::string_view target_description, const WeightingScheme& scheme);

struct AcceptanceDecision {
  bool accepted = false;
  std::vector<std::string> satisfied;  // criterion labels, in (i)..(v) order
};

AcceptanceDecision accept_triplet(const AcceptanceFlags& flags, const CurationConfig& config);

// Synthetic-pair filter: the two clips share a Salient token, a phase or
// state flag is set, and no Salient edit token is present in the target
// description while absent from the reference description. Throws
// kMissingDescriptions when either description is absent.
bool ssv2_pair_filter(const Triplet& candidate, const AcceptanceFlags& flags, const CurationConfig& config,
                      const WeightingScheme& scheme);

// Ids of candidates that share at least one Salient token with the
// anchor's target description but carry neither phase nor state flag.
std::vector<std::string> mine_hard_negatives(const Triplet& anchor, std::span<const Triplet> candidates,
                                             const WeightingScheme& scheme);

}  // namespace covr
