#include "lexmemm/features.hpp"

#include <algorithm>

#include "lexmemm/error.hpp"
#include "lexmemm/text.hpp"

namespace lexmemm {

void FeatureConfig::validate() const {
  if (!standard && lexical) throw ConfigError("lexical features require the standard feature set");
  if (!standard) throw ConfigError("the standard feature set cannot be disabled");
  if (prefix_max < 0 || suffix_max < 0 || next_affix_max < 0) throw ConfigError("affix lengths must be non-negative");
}

std::size_t template_count(const FeatureConfig& cfg) {
  cfg.validate();
  // wd, pref^k, suff^k, nb, hyph, uc, niuc, auc
  const std::size_t local = 1 + static_cast<std::size_t>(cfg.prefix_max) + static_cast<std::size_t>(cfg.suffix_max) + 5;
  // wd-2, wd-1, wd+1, wd+2, swds, pref+1^k, suff+1^k, ptag-2, ptag-1, ptags
  const std::size_t contextual = 5 + 2 * static_cast<std::size_t>(cfg.next_affix_max) + 3;
  std::size_t n = local + contextual;
  // lexu, lexin, lexdisj; lex+1, lex+2, lex+1.2; ptag-1.lex+1
  if (cfg.lexical) n += 3 + 3 + 1;
  return n;
}

std::string disjunction(const LexTags& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += '|';
    out += tags[i];
  }
  return out;
}

namespace {

std::string_view word_at(const Sentence& s, long position) {
  if (position < 1) return kBeginWord;
  if (position > static_cast<long>(s.size())) return kEndWord;
  return s.form(static_cast<std::size_t>(position));
}

bool is_boundary(const Sentence& s, long position) { return position < 1 || position > static_cast<long>(s.size()); }

const LexTags& lex_at(const Sentence& s, long position, const Lexicon& lexicon, bool fallback) {
  static const LexTags unk{std::string(Lexicon::kUnknownTag)};
  if (is_boundary(s, position)) return unk;
  return lexicon.lex(s.form(static_cast<std::size_t>(position)), fallback);
}

std::string join(std::string_view a, std::string_view b) {
  std::string out;
  out.reserve(a.size() + b.size() + 1);
  out.append(a);
  out.push_back(kFieldJoiner);
  out.append(b);
  return out;
}

void add_affixes(std::vector<std::string>& out, const std::vector<char32_t>& cps, int max_k,
                 const std::string& pref_name, const std::string& suff_name, bool prefixes, bool suffixes) {
  const auto n = static_cast<int>(cps.size());
  for (int k = 1; k <= max_k && k <= n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (prefixes) out.push_back(pref_name + std::to_string(k) + "=" + text::encode_utf8(cps, 0, ku));
    if (suffixes) out.push_back(suff_name + std::to_string(k) + "=" + text::encode_utf8(cps, cps.size() - ku, cps.size()));
  }
}

}  // namespace

PositionFeatures::PositionFeatures(const Sentence& sentence, std::size_t position, const Lexicon& lexicon,
                                   const FeatureConfig& cfg)
    : lexical_(cfg.lexical) {
  const auto i = static_cast<long>(position);
  const std::string w(word_at(sentence, i));
  const auto cps = text::decode_utf8(w);

  static_.reserve(48);
  static_.push_back("wd=" + w);
  add_affixes(static_, cps, cfg.prefix_max, "pref^", "suff^", true, false);
  add_affixes(static_, cps, cfg.suffix_max, "pref^", "suff^", false, true);
  if (text::contains_digit(w)) static_.push_back("nb=1");
  if (w.find('-') != std::string::npos) static_.push_back("hyph=1");
  const bool uc = text::contains_upper(w);
  if (uc) static_.push_back("uc=1");
  if (uc && i > 1) static_.push_back("niuc=1");
  if (text::all_upper(w)) static_.push_back("auc=1");

  const auto wm2 = word_at(sentence, i - 2);
  const auto wm1 = word_at(sentence, i - 1);
  const auto wp1 = word_at(sentence, i + 1);
  const auto wp2 = word_at(sentence, i + 2);
  static_.push_back("wd-2=" + std::string(wm2));
  static_.push_back("wd-1=" + std::string(wm1));
  static_.push_back("wd+1=" + std::string(wp1));
  static_.push_back("wd+2=" + std::string(wp2));
  static_.push_back("swds=" + join(wm1, wp1));
  if (!is_boundary(sentence, i + 1)) {
    const auto next_cps = text::decode_utf8(wp1);
    add_affixes(static_, next_cps, cfg.next_affix_max, "pref+1^", "suff+1^", true, true);
  }

  if (cfg.lexical) {
    const auto& lex_w = lex_at(sentence, i, lexicon, cfg.case_fallback);
    if (lex_w.size() == 1) {
      static_.push_back("lexu=" + lex_w.front());
    } else {
      for (const auto& t : lex_w) static_.push_back("lexin=" + t);
      static_.push_back("lexdisj=" + disjunction(lex_w));
    }
    next_lex_disj_ = disjunction(lex_at(sentence, i + 1, lexicon, cfg.case_fallback));
    const auto next2 = disjunction(lex_at(sentence, i + 2, lexicon, cfg.case_fallback));
    static_.push_back("lex+1=" + next_lex_disj_);
    static_.push_back("lex+2=" + next2);
    static_.push_back("lex+1.2=" + join(next_lex_disj_, next2));
  }
}

void PositionFeatures::history_predicates(std::string_view prev_tag, std::string_view prevprev_tag,
                                          std::vector<std::string>& out) const {
  out.push_back("ptag-2=" + std::string(prevprev_tag));
  out.push_back("ptag-1=" + std::string(prev_tag));
  out.push_back("ptags=" + join(prevprev_tag, prev_tag));
  if (lexical_) out.push_back("ptag-1.lex+1=" + join(prev_tag, next_lex_disj_));
}

PredicateVector extract_predicates(const DecisionContext& ctx, const Lexicon& lexicon, const FeatureConfig& cfg) {
  cfg.validate();
  PositionFeatures pf(ctx.sentence, ctx.position, lexicon, cfg);
  PredicateVector out = pf.static_predicates();
  pf.history_predicates(ctx.prev_tag, ctx.prevprev_tag, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace lexmemm
