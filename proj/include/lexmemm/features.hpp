#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexmemm/corpus.hpp"
#include "lexmemm/lexicon.hpp"

namespace lexmemm {

// Word read at positions before the first and after the last token.
inline constexpr std::string_view kBeginWord = "<s>";
inline constexpr std::string_view kEndWord = "</s>";

struct FeatureConfig {
  bool standard = true;
  bool lexical = false;
  bool case_fallback = true;  // lowercase retry in lexicon lookups
  int prefix_max = 4;         // pref^k, k in [1..prefix_max]
  int suffix_max = 5;         // suff^k, k in [1..suffix_max]
  int next_affix_max = 3;     // pref+1^k and suff+1^k

  // Throws ConfigError for lexical-only or disabled configs and bad ranges.
  void validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

// Number of distinct predicate templates the config activates (k-ranges expanded).
std::size_t template_count(const FeatureConfig& cfg);

struct DecisionContext {
  const Sentence& sentence;
  std::size_t position;  // 1-based
  std::string_view prev_tag;
  std::string_view prevprev_tag;
};

// Sorted, duplicate-free predicate strings ("name=value").
using PredicateVector = std::vector<std::string>;

PredicateVector extract_predicates(const DecisionContext& ctx, const Lexicon& lexicon, const FeatureConfig& cfg);

// Disjunction of a tag set in canonical order, "A|B|C".
std::string disjunction(const LexTags& tags);

// Predicates for one position split into the part that does not depend on
// previously assigned tags and the part that does. Decoders build this once
// per position and query the history part per hypothesis.
class PositionFeatures {
 public:
  PositionFeatures(const Sentence& sentence, std::size_t position, const Lexicon& lexicon, const FeatureConfig& cfg);

  const std::vector<std::string>& static_predicates() const { return static_; }
  // Appends ptag-2, ptag-1, ptags and (when lexical) the hybrid predicate.
  void history_predicates(std::string_view prev_tag, std::string_view prevprev_tag, std::vector<std::string>& out) const;

 private:
  std::vector<std::string> static_;
  std::string next_lex_disj_;
  bool lexical_;
};

}  // namespace lexmemm
