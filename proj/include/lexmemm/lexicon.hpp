#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexmemm {

// Sorted, duplicate-free, non-empty tag list.
using LexTags = std::vector<std::string>;

// External morphosyntactic lexicon: form -> set of lexicon tags. The tag
// inventory is independent of the corpus tagset.
class Lexicon {
 public:
  static constexpr std::string_view kUnknownTag = "_unk_";

  // Merges `tag` into the entry for `form`, keeping tags sorted and unique.
  void add(const std::string& form, const std::string& tag);
  bool contains(std::string_view form) const;

  // Tags for `form`; falls back to the lowercased form when `case_fallback`
  // is set, and returns {"_unk_"} when neither is present. Never empty.
  const LexTags& lex(std::string_view form, bool case_fallback = true) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::set<std::string> tag_inventory() const;
  // Forms in byte order.
  std::vector<std::string> sorted_forms() const;
  const LexTags* find(std::string_view form) const;

  // Hash of the canonical serialization.
  std::string fingerprint() const;

  bool operator==(const Lexicon& other) const { return entries_ == other.entries_; }

 private:
  std::unordered_map<std::string, LexTags> entries_;
};

// Coarse projection: prefix of `raw_tag` up to the first separator character.
inline constexpr std::string_view kDefaultProjectionSeparators = ":+.-";
std::string project_coarse(std::string_view raw_tag, std::string_view separators = kDefaultProjectionSeparators);

struct LexiconLoadOptions {
  bool project = false;
  std::string separators = std::string(kDefaultProjectionSeparators);
};

// Reads `form<TAB>tag[<TAB>...]` lines. Blank lines are ignored.
Lexicon load_lexicon(std::istream& in, const LexiconLoadOptions& opts = {}, const std::string& source = "<lexicon>");
Lexicon load_lexicon_file(const std::string& path, const LexiconLoadOptions& opts = {});

// Canonical TSV: forms in byte order, one `form<TAB>tag` line per tag.
void save_lexicon(std::ostream& out, const Lexicon& lexicon);

// Punctuation symbols guaranteed an entry by ensure_punctuation.
const std::vector<std::string>& punctuation_symbols();

// Adds `symbol -> {punct_tag}` for every listed symbol that has no entry.
Lexicon ensure_punctuation(Lexicon lexicon, const std::string& punct_tag);

}  // namespace lexmemm
