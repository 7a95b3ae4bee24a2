#include "lexmemm/model.hpp"

#include "lexmemm/error.hpp"

namespace lexmemm {

void DecodeConfig::validate() const {
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
}

void TaggerModel::validate() const {
  features.validate();
  decode.validate();
  if (tagset.empty()) throw DimensionError("model has an empty tagset");
  if (weights.predicates() != index.size() || weights.tags() != tagset.size()) {
    throw DimensionError("weight matrix is " + std::to_string(weights.predicates()) + "x" +
                         std::to_string(weights.tags()) + ", expected " + std::to_string(index.size()) + "x" +
                         std::to_string(tagset.size()));
  }
  if (weights.data().size() != weights.predicates() * weights.tags()) throw DimensionError("weight storage size mismatch");
  if (!weights.all_finite()) throw DimensionError("non-finite weight");
  if (features.lexical == lexicon_fingerprint.empty()) {
    throw ConfigError("lexicon fingerprint must be present exactly when lexical features are on");
  }
}

TaggerModel train_tagger(const Corpus& corpus, std::shared_ptr<const Lexicon> lexicon, const FeatureConfig& features,
                         const TrainConfig& train_config, const DecodeConfig& decode) {
  features.validate();
  train_config.validate();
  decode.validate();
  if (!lexicon) lexicon = std::make_shared<const Lexicon>();
  auto events = build_events(corpus, *lexicon, features, train_config.cutoff);
  auto result = train(events.events, events.index, corpus.tagset, train_config);

  TaggerModel model;
  model.features = features;
  model.tagset = corpus.tagset;
  model.index = std::move(events.index);
  model.weights = std::move(result.weights);
  model.train_config = train_config;
  model.train_stats = result.stats;
  model.decode = decode;
  if (features.lexical) model.lexicon_fingerprint = lexicon->fingerprint();
  model.lexicon = std::move(lexicon);
  return model;
}

void attach_lexicon(TaggerModel& model, std::shared_ptr<const Lexicon> lexicon, bool allow_mismatch) {
  if (!lexicon) throw ConfigError("null lexicon");
  if (model.features.lexical && !allow_mismatch) {
    const auto fp = lexicon->fingerprint();
    if (fp != model.lexicon_fingerprint) {
      throw FingerprintMismatchError("lexicon fingerprint " + fp + " does not match the model's " +
                                     model.lexicon_fingerprint);
    }
  }
  model.lexicon = std::move(lexicon);
}

Lexicon prepare_lexicon_file(const std::string& path, const LexiconPreparation& prep) {
  LexiconLoadOptions opts;
  opts.project = prep.project;
  opts.separators = prep.separators;
  auto lexicon = load_lexicon_file(path, opts);
  if (!prep.punct_tag.empty()) lexicon = ensure_punctuation(std::move(lexicon), prep.punct_tag);
  return lexicon;
}

}  // namespace lexmemm
