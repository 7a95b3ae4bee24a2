#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace lexmemm::testing {

namespace {

// Only raw engine output is used so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

struct WordClass {
  std::string tag;
  std::string lexicon_tag;  // coarse category used by the lexicon
  std::vector<std::string> lexicon_features;
  std::vector<std::string> suffixes;
  int types;
  std::vector<std::string> words;
  std::vector<double> cdf;
};

struct Transition {
  std::string to;
  double weight;
};

std::string make_stem(Rng& rng) {
  static const char* const onsets[] = {"b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "kr"};
  static const char* const vowels[] = {"a", "e", "i", "o", "u"};
  const std::size_t syllables = 1 + rng.below(3);
  std::string stem;
  for (std::size_t s = 0; s < syllables; ++s) {
    stem += onsets[rng.below(std::size(onsets))];
    stem += vowels[rng.below(std::size(vowels))];
  }
  return stem;
}

std::string pick(Rng& rng, const std::vector<Transition>& options) {
  double total = 0.0;
  for (const auto& o : options) total += o.weight;
  double u = rng.uniform() * total;
  for (const auto& o : options) {
    if (u < o.weight) return o.to;
    u -= o.weight;
  }
  return options.back().to;
}

std::string capitalize(const std::string& w) {
  std::string out = w;
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);

  // Most suffixes are shared by two classes: on/ar (NOUN, PROPN), is (NOUN, VERB),
  // um (NOUN, ADJ), at (VERB, ADJ), an (VERB, PROPN), ny/el (ADJ, ADV).
  std::vector<WordClass> open{
      {"NOUN", "nc", {"m:sg", "f:sg", "m:pl"}, {"on", "is", "um", "ar"}, 2000, {}, {}},
      {"VERB", "v", {"pres:3s", "past:3p", "inf"}, {"is", "at", "an", "ez"}, 1500, {}, {}},
      {"ADJ", "adj", {"m:sg", "f:pl"}, {"um", "ny", "el", "at"}, 1000, {}, {}},
      {"ADV", "adv", {""}, {"el", "ke", "ny"}, 300, {}, {}},
      {"PROPN", "np", {"sg"}, {"an", "on", "ar"}, 400, {}, {}},
  };
  const std::map<std::string, std::vector<std::string>> closed{
      {"DET", {"ta", "ti", "tu", "sa", "so", "me", "mi", "le"}},
      {"ADP", {"ab", "ex", "in", "od", "ku", "na", "po", "za", "ve", "ot"}},
      {"PUNCT", {".", ",", ";", "!"}},
  };
  const std::map<std::string, std::string> closed_lexicon_tag{{"DET", "det"}, {"ADP", "prep"}, {"PUNCT", "ponct"}};

  std::set<std::string> used;
  for (const auto& [tag, words] : closed) used.insert(words.begin(), words.end());
  std::map<std::string, std::vector<std::string>> lexicon;  // form -> raw tags
  for (const auto& [tag, words] : closed) {
    for (const auto& w : words) lexicon[w].push_back(closed_lexicon_tag.at(tag));
  }

  int type_count = 0;
  for (auto& wc : open) {
    while (static_cast<int>(wc.words.size()) < wc.types) {
      std::string w = make_stem(rng) + wc.suffixes[rng.below(wc.suffixes.size())];
      if (wc.tag == "PROPN") w = capitalize(w);
      if (!used.insert(w).second) continue;
      wc.words.push_back(w);
      std::string raw = wc.lexicon_tag;
      const auto& feat = wc.lexicon_features[rng.below(wc.lexicon_features.size())];
      if (!feat.empty()) raw += ":" + feat;
      lexicon[w].push_back(raw);
      if (rng.uniform() < cfg.ambiguous_lexicon_rate) {
        const auto& other = open[rng.below(open.size())];
        if (other.lexicon_tag != wc.lexicon_tag) lexicon[w].push_back(other.lexicon_tag);
      }
    }
    type_count += wc.types;
    double acc = 0.0;
    for (int r = 0; r < wc.types; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_exponent);
      wc.cdf.push_back(acc);
    }
  }
  for (const auto& [tag, words] : closed) type_count += static_cast<int>(words.size());

  // Deliberately weak syntax: open classes follow each other almost freely.
  const std::map<std::string, std::vector<Transition>> next{
      {"<s>", {{"DET", 3}, {"NOUN", 2}, {"ADJ", 2}, {"VERB", 2}, {"ADV", 1}, {"PROPN", 1}}},
      {"DET", {{"NOUN", 3}, {"ADJ", 3}, {"VERB", 1}}},
      {"ADJ", {{"NOUN", 3}, {"VERB", 2}, {"ADJ", 2}, {"ADV", 1}, {"PUNCT", 1}}},
      {"NOUN", {{"VERB", 3}, {"NOUN", 2}, {"ADJ", 2}, {"ADP", 1}, {"PUNCT", 1}}},
      {"VERB", {{"NOUN", 2}, {"ADJ", 2}, {"VERB", 1}, {"ADV", 2}, {"DET", 2}, {"ADP", 1}, {"PROPN", 1}}},
      {"ADP", {{"DET", 2}, {"NOUN", 2}, {"ADJ", 2}, {"PROPN", 1}}},
      {"ADV", {{"VERB", 2}, {"ADJ", 2}, {"ADV", 1}, {"NOUN", 1}}},
      {"PROPN", {{"VERB", 3}, {"NOUN", 1}, {"ADP", 1}, {"PUNCT", 1}}},
      {"PUNCT", {{"DET", 2}, {"NOUN", 1}, {"ADJ", 1}, {"VERB", 1}, {"PROPN", 1}}},
  };

  const auto sample_word = [&](const std::string& tag) -> std::string {
    if (auto it = closed.find(tag); it != closed.end()) {
      const auto& words = it->second;
      // Sentence-internal punctuation never uses the final stop.
      if (tag == "PUNCT") return words[1 + rng.below(words.size() - 1)];
      return words[rng.below(words.size())];
    }
    const auto& wc = *std::find_if(open.begin(), open.end(), [&](const WordClass& c) { return c.tag == tag; });
    const double u = rng.uniform() * wc.cdf.back();
    const auto pos = std::upper_bound(wc.cdf.begin(), wc.cdf.end(), u) - wc.cdf.begin();
    return wc.words[std::min<std::size_t>(static_cast<std::size_t>(pos), wc.words.size() - 1)];
  };

  const auto make_corpus = [&](int sentences) {
    std::ostringstream out;
    for (int s = 0; s < sentences; ++s) {
      const std::size_t target = 6 + rng.below(12);
      std::vector<std::pair<std::string, std::string>> toks;
      std::string state = "<s>";
      while (toks.size() + 1 < target) {
        state = pick(rng, next.at(state));
        toks.emplace_back(sample_word(state), state);
      }
      toks.emplace_back(".", "PUNCT");
      toks[0].first = capitalize(toks[0].first);
      for (std::size_t i = 0; i < toks.size(); ++i) {
        out << (i + 1) << '\t' << toks[i].first << "\t_\t" << toks[i].second << "\t_\t_\t_\t_\t_\t_\n";
      }
      out << '\n';
    }
    return out.str();
  };

  SyntheticData data;
  data.train_conllu = make_corpus(cfg.train_sentences);
  data.test_conllu = make_corpus(cfg.test_sentences);
  std::ostringstream lex;
  for (const auto& [form, tags] : lexicon) {
    for (const auto& t : tags) lex << form << '\t' << t << '\n';
  }
  data.lexicon_tsv = lex.str();
  data.tag_count = static_cast<int>(open.size() + closed.size());
  data.type_count = type_count;
  return data;
}

}  // namespace lexmemm::testing
