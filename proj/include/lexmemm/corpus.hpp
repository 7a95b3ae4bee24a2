#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexmemm {

using TagId = int;

// Joins the parts of concatenated feature values. Never allowed in forms or tags.
inline constexpr char kFieldJoiner = '\x1f';

// Bijection between tag strings and contiguous ids starting at 0.
class TagSet {
 public:
  // Tag string reserved for positions before the start of a sentence.
  static constexpr std::string_view kBoundaryTag = "<bos>";

  TagSet() = default;
  // Ids follow the order of `tags`; throws ConfigError on duplicates or the boundary tag.
  explicit TagSet(std::vector<std::string> tags);

  // Adds `tag` if new and returns its id.
  TagId intern(const std::string& tag);
  std::optional<TagId> find(std::string_view tag) const;
  const std::string& name(TagId id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const TagSet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TagId> ids_;
};

struct Token {
  std::string form;
  std::optional<TagId> gold_tag;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  // 1-based access; positions outside 1..n are boundaries and handled by callers.
  const std::string& form(std::size_t position) const { return tokens[position - 1].form; }
};

struct Corpus {
  std::vector<Sentence> sentences;
  TagSet tagset;
  std::set<std::string> vocabulary;

  std::size_t token_count() const;
  bool has_gold_tags() const;
};

// Throws ParseError when a form cannot be stored (empty, tab, newline, or
// the reserved feature joiner).
void validate_form(std::string_view form, const std::string& source, std::size_t line);

// Reads UPOS (column 4) for every single-word token line. Range lines (ID
// with '-') and empty nodes (ID with '.') are skipped. A UPOS of "_" leaves
// the token untagged. Tag ids are assigned in sorted tag-string order.
Corpus parse_conllu(std::istream& in, const std::string& source = "<conllu>");
Corpus parse_conllu_file(const std::string& path);

// Writes a minimal 10-column CoNLL-U rendering (form and UPOS, "_" elsewhere).
void write_conllu(std::ostream& out, const Corpus& corpus);

// One sentence per line, tokens separated by single spaces. Blank lines are
// skipped; `line_numbers` (if non-null) receives the 1-based source line of
// each sentence.
Corpus parse_raw(std::istream& in, const std::string& source = "<raw>",
                 std::vector<std::size_t>* line_numbers = nullptr);

std::set<std::string> vocabulary(const Corpus& corpus);

struct TypeTokenRatio {
  double ratio = 0.0;
  std::size_t tokens = 0;  // number of tokens actually read
  std::size_t types = 0;
  bool truncated = false;  // corpus shorter than the window
};

inline constexpr std::size_t kDefaultTtrWindow = 60000;

// Distinct forms among the first min(window, total) tokens, divided by that count.
TypeTokenRatio normalized_type_token_ratio(const Corpus& corpus, std::size_t window = kDefaultTtrWindow);

}  // namespace lexmemm
