#pragma once

#include <cstddef>
#include <vector>

#include "lexmemm/corpus.hpp"
#include "lexmemm/model.hpp"

namespace lexmemm {

using TagSequence = std::vector<TagId>;

// Stand-in tag id for positions before the sentence start.
inline constexpr TagId kBoundaryTagId = -1;

struct DecodeResult {
  TagSequence tags;
  double log_prob = 0.0;  // sum of per-position log p, accumulated left to right
};

// Memoized log p(tag | position, t-1, t-2) for one sentence. All decoders
// read their scores through this class, so equal sequences get bit-equal
// scores whichever decoder produced them.
class SentenceScorer {
 public:
  SentenceScorer(const TaggerModel& model, const Sentence& sentence);

  // `position` is 1-based; prev/prevprev may be kBoundaryTagId.
  const std::vector<double>& log_probs(std::size_t position, TagId prev, TagId prevprev);
  std::size_t size() const { return positions_.size(); }
  std::size_t tag_count() const { return tags_; }

 private:
  struct Position {
    PositionFeatures features;
    std::vector<double> base_scores;
  };
  const TaggerModel& model_;
  std::size_t tags_;
  std::vector<Position> positions_;
  std::vector<std::vector<double>> cache_;
  std::vector<std::string> scratch_;
};

// Score of a full tag sequence, in the same summation order the decoders use.
double sequence_log_prob(SentenceScorer& scorer, const TagSequence& tags);

// Left-to-right beam search. Ties go to the lexicographically smaller tag-id sequence.
DecodeResult beam_decode(const TaggerModel& model, const Sentence& sentence, const DecodeConfig& config);
TagSequence tag_sentence(const TaggerModel& model, const Sentence& sentence);

// Exact argmax by dynamic programming over (t-1, t) state pairs.
DecodeResult exact_decode(const TaggerModel& model, const Sentence& sentence);

inline constexpr double kBruteForceLimit = 1e6;
// Exhaustive enumeration; throws CapacityError when |tags|^n exceeds 10^6.
DecodeResult brute_force_decode(const TaggerModel& model, const Sentence& sentence);

// Tags every sentence; output is independent of `threads`.
std::vector<TagSequence> tag_corpus(const TaggerModel& model, const Corpus& corpus, const DecodeConfig& config,
                                    unsigned threads = 1);

}  // namespace lexmemm
