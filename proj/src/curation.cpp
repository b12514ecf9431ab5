#include "covr/curation.h"

#include <algorithm>
#include <iterator>
#include <set>

#include "covr/error.h"
#include "text_util.h"

namespace covr {
namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

}  // namespace

void CurationConfig::validate() const {
  if (min_criteria < 1 || min_criteria > 5) throw Error(ErrorCode::kContract, "min_criteria must lie in [1,5]");
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
    throw Error(ErrorCode::kContract, "overlap_threshold must lie in [0,1]");
  }
}

double lexical_overlap(const EditText& edit, std::string_view target_description, const WeightingScheme& scheme) {
  if (detail::trim(target_description).empty()) throw Error(ErrorCode::kContract, "target description is empty");
  auto a = salient_tokens(edit.text(), scheme);
  auto b = salient_tokens(target_description, scheme);
  std::size_t inter = intersection_size(a, b);
  std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

AcceptanceDecision accept_triplet(const AcceptanceFlags& flags, const CurationConfig& config) {
  config.validate();
  AcceptanceDecision d;
  if (flags.temporal_dependency) d.satisfied.emplace_back(kCriterionTemporal);
  if (flags.state_transition) d.satisfied.emplace_back(kCriterionState);
  if (flags.cinematography) d.satisfied.emplace_back(kCriterionCinematography);
  if (flags.implicit_cause_effect) d.satisfied.emplace_back(kCriterionImplicitCause);
  if (flags.lexical_overlap < config.overlap_threshold) d.satisfied.emplace_back(kCriterionLowLexical);
  d.accepted = static_cast<int>(d.satisfied.size()) >= config.min_criteria;
  return d;
}

bool ssv2_pair_filter(const Triplet& candidate, const AcceptanceFlags& flags, const CurationConfig& config,
                      const WeightingScheme& scheme) {
  config.validate();
  if (!candidate.reference_description || !candidate.target_description) {
    throw Error(ErrorCode::kMissingDescriptions, candidate.id);
  }
  auto ref = salient_tokens(*candidate.reference_description, scheme);
  auto tgt = salient_tokens(*candidate.target_description, scheme);
  if (intersection_size(ref, tgt) == 0) return false;
  if (!flags.temporal_dependency && !flags.state_transition) return false;
  for (const auto& w : salient_tokens(candidate.edit.text(), scheme)) {
    if (tgt.count(w) && !ref.count(w)) return false;  // one keyword resolves the pair
  }
  return true;
}

std::vector<std::string> mine_hard_negatives(const Triplet& anchor, std::span<const Triplet> candidates,
                                             const WeightingScheme& scheme) {
  if (!anchor.target_description) throw Error(ErrorCode::kMissingDescriptions, anchor.id);
  auto anchor_tokens = salient_tokens(*anchor.target_description, scheme);
  std::vector<std::string> out;
  for (const Triplet& c : candidates) {
    if (c.id == anchor.id || !c.target_description) continue;
    if (c.criteria_flags.temporal_dependency || c.criteria_flags.state_transition) continue;
    if (intersection_size(anchor_tokens, salient_tokens(*c.target_description, scheme)) > 0) out.push_back(c.id);
  }
  return out;
}

}  // namespace covr
