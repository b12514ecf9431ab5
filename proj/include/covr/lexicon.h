#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace covr {

enum class LexicalCategory { kSalient, kContext, kGeneric, kPunctuation };

std::string_view category_name(LexicalCategory category);

// Importance weights per category plus the token dictionary. Context and
// Generic each carry their own weight; both default to alpha_mid.
class WeightingScheme {
 public:
  struct Alphas {
    double high = 1.0;  // Salient
    double mid = 0.3;   // Context / Generic
    double low = 0.1;   // Punctuation
    std::optional<double> context;  // overrides mid for Context
    std::optional<double> generic;  // overrides mid for Generic
  };

  WeightingScheme();
  // Throws kValidationError unless high >= context >= generic >= low >= 0
  // with high, context and generic strictly positive.
  explicit WeightingScheme(Alphas alphas,
                           LexicalCategory default_category = LexicalCategory::kContext);

  const Alphas& alphas() const noexcept { return alphas_; }
  LexicalCategory default_category() const noexcept { return default_category_; }

  // Overrides the weight of one category; re-validates monotonicity.
  void set_weight(LexicalCategory category, double weight);
  double weight(LexicalCategory category) const;

  // Keys are case-folded. A token already mapped keeps the higher-priority
  // category (Salient > Context > Generic > Punctuation).
  void add_token(std::string_view token, LexicalCategory category);
  std::size_t dictionary_size() const noexcept { return dict_.size(); }
  const LexicalCategory* lookup(std::string_view folded) const;

 private:
  void validate() const;

  Alphas alphas_;
  double context_weight_;
  double generic_weight_;
  LexicalCategory default_category_;
  std::map<std::string, LexicalCategory, std::less<>> dict_;
};

// Folds case and strips surrounding whitespace (generated tokens often
// carry a leading space).
std::string fold_token(std::string_view token);

LexicalCategory categorize(std::string_view token, const WeightingScheme& scheme);
double weight_of(LexicalCategory category, const WeightingScheme& scheme);

// Document keys: alpha_high, alpha_mid, alpha_low, optional
// alpha_context / alpha_generic, optional default_category, and token
// arrays salient / context / generic.
WeightingScheme scheme_from_json_text(std::string_view text);
WeightingScheme load_category_dict(const std::string& path);

// Splits free text into case-folded word tokens (letters, digits, '-', '\'',
// and any non-ASCII byte).
std::vector<std::string> word_tokens(std::string_view text);

// Case-folded words of `text` that fall into the Salient category.
std::set<std::string> salient_tokens(std::string_view text, const WeightingScheme& scheme);

}  // namespace covr
