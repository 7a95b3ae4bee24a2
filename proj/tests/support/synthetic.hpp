#pragma once

#include <cstdint>
#include <string>

namespace lexmemm::testing {

// Morphologically rich toy language. Open-class tags are signalled by word
// suffixes, but several suffixes are shared between two classes, so suffix
// features alone cannot identify the tag of an unseen word; the lexicon can.
struct SyntheticConfig {
  std::uint64_t seed = 20160817;
  int train_sentences = 3000;
  int test_sentences = 500;
  double zipf_exponent = 1.0;
  double ambiguous_lexicon_rate = 0.1;  // fraction of types listed with a spurious second tag
};

struct SyntheticData {
  std::string train_conllu;
  std::string test_conllu;
  // `form<TAB>tag` with morphology-bearing tags ("nc:m:sg"); load with projection.
  std::string lexicon_tsv;
  int tag_count = 0;
  int type_count = 0;
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg = {});

}  // namespace lexmemm::testing
