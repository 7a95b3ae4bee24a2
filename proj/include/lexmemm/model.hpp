#pragma once

#include <memory>
#include <optional>
#include <string>

#include "lexmemm/corpus.hpp"
#include "lexmemm/features.hpp"
#include "lexmemm/lexicon.hpp"
#include "lexmemm/maxent.hpp"

namespace lexmemm {

struct DecodeConfig {
  int beam_width = 3;
  bool merge_states = true;  // keep only the best hypothesis per (t-1, t-2)

  void validate() const;
  bool operator==(const DecodeConfig&) const = default;
};

// How the lexicon file was turned into the Lexicon the model was trained with.
struct LexiconPreparation {
  bool project = false;
  std::string separators = std::string(kDefaultProjectionSeparators);
  std::string punct_tag;  // empty: no punctuation entries added

  bool operator==(const LexiconPreparation&) const = default;
};

struct TaggerModel {
  FeatureConfig features;
  TagSet tagset;
  PredicateIndex index;
  WeightMatrix weights;
  LexiconPreparation lexicon_prep;
  std::string lexicon_fingerprint;  // empty when trained without lexical features
  bool embed_lexicon = false;
  TrainConfig train_config;
  TrainStats train_stats;
  DecodeConfig decode;

  // Lexicon used for feature extraction. Never null once the model is usable.
  std::shared_ptr<const Lexicon> lexicon = std::make_shared<const Lexicon>();

  // Dimension and config consistency; throws DimensionError/ConfigError.
  void validate() const;
};

// Builds events from `corpus`, trains, and packages a model.
TaggerModel train_tagger(const Corpus& corpus, std::shared_ptr<const Lexicon> lexicon, const FeatureConfig& features,
                         const TrainConfig& train_config, const DecodeConfig& decode = {});

// Attaches `lexicon` to a model. Lexical models require a matching
// fingerprint unless `allow_mismatch` is set.
void attach_lexicon(TaggerModel& model, std::shared_ptr<const Lexicon> lexicon, bool allow_mismatch = false);

// Reads and prepares a lexicon file the way `prep` says.
Lexicon prepare_lexicon_file(const std::string& path, const LexiconPreparation& prep);

}  // namespace lexmemm
