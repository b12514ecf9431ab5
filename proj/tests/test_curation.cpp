#include <gtest/gtest.h>

#include "covr/curation.h"
#include "covr/error.h"
#include "oracles.h"

using namespace covr;

namespace {

WeightingScheme scheme() {
  WeightingScheme s;
  for (const char* w : {"stir", "pepper", "pan", "stove", "cup", "full", "pink", "dog", "cat", "water"}) {
    s.add_token(w, LexicalCategory::kSalient);
  }
  return s;
}

AcceptanceFlags flags_from_mask(unsigned mask, double overlap) {
  return {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8), overlap};
}

}  // namespace

TEST(Overlap, SetArithmetic) {
  auto s = scheme();
  EXPECT_DOUBLE_EQ(lexical_overlap(EditText("stir the pepper in the pan"), "stir the pan on the stove", s), 0.5);
  EXPECT_DOUBLE_EQ(lexical_overlap(EditText("a dog and a cup"), "a dog and a cup", s), 1.0);
  EXPECT_DOUBLE_EQ(lexical_overlap(EditText("the dog"), "the cat", s), 0.0);
  EXPECT_DOUBLE_EQ(lexical_overlap(EditText("make it so"), "it is so", s), 0.0);
  EXPECT_THROW(lexical_overlap(EditText("dog"), "  ", s), Error);
}

TEST(Accept, EnumerationOracle) {
  for (double threshold : {0.3, 0.5, 0.0, 1.0}) {
    for (int min_criteria = 1; min_criteria <= 5; ++min_criteria) {
      CurationConfig cfg{min_criteria, threshold};
      for (unsigned mask = 0; mask < 16; ++mask) {
        for (double overlap : {std::max(0.0, threshold - 0.05), threshold, std::min(1.0, threshold + 0.05)}) {
          auto f = flags_from_mask(mask, overlap);
          auto d = accept_triplet(f, cfg);
          ASSERT_EQ(d.accepted, oracle::acceptance_oracle(f, threshold, min_criteria))
              << "mask " << mask << " overlap " << overlap << " min " << min_criteria;
          std::size_t bits = std::popcount(mask) + (overlap < threshold ? 1 : 0);
          ASSERT_EQ(d.satisfied.size(), bits);
        }
      }
    }
  }
}

TEST(Accept, SpecCases) {
  CurationConfig cfg;
  auto two = accept_triplet({true, true, false, false, 0.9}, cfg);
  EXPECT_TRUE(two.accepted);
  EXPECT_EQ(two.satisfied, (std::vector<std::string>{"temporal_dependency", "state_transition"}));
  auto none = accept_triplet({false, false, false, false, 0.9}, cfg);
  EXPECT_FALSE(none.accepted);
  EXPECT_TRUE(none.satisfied.empty());
  auto one_low = accept_triplet({false, false, true, false, 0.1}, cfg);
  EXPECT_TRUE(one_low.accepted);
  EXPECT_EQ(one_low.satisfied.back(), "low_lexical_sufficiency");
  // Boundary: overlap exactly at the threshold does not count.
  EXPECT_FALSE(accept_triplet({false, false, true, false, 0.3}, cfg).accepted);
  CurationConfig three{3, 0.3};
  EXPECT_FALSE(accept_triplet({true, true, false, false, 0.9}, three).accepted);
  EXPECT_THROW(accept_triplet({}, CurationConfig{0, 0.3}), Error);
  EXPECT_THROW(accept_triplet({}, CurationConfig{2, 1.5}), Error);
}

TEST(Ssv2, PairFilter) {
  auto s = scheme();
  CurationConfig cfg;
  Triplet t;
  t.id = "p";
  t.edit = EditText("make it full");
  t.reference_description = "an empty cup on a table";
  t.target_description = "a cup of water on a table";
  AcceptanceFlags state{false, true, false, false, 0.0};
  EXPECT_TRUE(ssv2_pair_filter(t, state, cfg, s));

  Triplet no_shared = t;
  no_shared.target_description = "a dog on a table";
  EXPECT_FALSE(ssv2_pair_filter(no_shared, state, cfg, s));

  Triplet keyword = t;
  keyword.edit = EditText("make it pink");
  keyword.target_description = "a pink cup";
  EXPECT_FALSE(ssv2_pair_filter(keyword, state, cfg, s));
  keyword.reference_description = "a pink cup, empty";
  EXPECT_TRUE(ssv2_pair_filter(keyword, state, cfg, s));

  EXPECT_FALSE(ssv2_pair_filter(t, AcceptanceFlags{false, false, true, true, 0.0}, cfg, s));
  Triplet missing = t;
  missing.reference_description.reset();
  try {
    ssv2_pair_filter(missing, state, cfg, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingDescriptions);
  }
}

TEST(HardNegatives, SharedTokensWithoutPhaseFlags) {
  auto s = scheme();
  Triplet anchor;
  anchor.id = "a";
  anchor.target_description = "water fills the cup";
  auto make = [](std::string id, std::string desc, bool state) {
    Triplet t;
    t.id = std::move(id);
    t.target_description = std::move(desc);
    t.criteria_flags.state_transition = state;
    return t;
  };
  std::vector<Triplet> cands = {make("a", "water fills the cup", false), make("b", "a cup on a shelf", false),
                                make("c", "a cup fills with water", true), make("d", "a dog barks", false)};
  EXPECT_EQ(mine_hard_negatives(anchor, cands, s), std::vector<std::string>{"b"});
}
