#include "lexmemm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "lexmemm/error.hpp"
#include "lexmemm/text.hpp"

namespace lexmemm {

TagSet::TagSet(std::vector<std::string> tags) {
  for (auto& t : tags) {
    if (t == kBoundaryTag) throw ConfigError("tag '" + t + "' is reserved");
    if (ids_.count(t)) throw ConfigError("duplicate tag '" + t + "'");
    intern(t);
  }
}

TagId TagSet::intern(const std::string& tag) {
  auto it = ids_.find(tag);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TagId>(names_.size());
  names_.push_back(tag);
  ids_.emplace(tag, id);
  return id;
}

std::optional<TagId> TagSet::find(std::string_view tag) const {
  auto it = ids_.find(std::string(tag));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

bool Corpus::has_gold_tags() const {
  if (sentences.empty()) return false;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (!t.gold_tag) return false;
    }
  }
  return true;
}

void validate_form(std::string_view form, const std::string& source, std::size_t line) {
  if (form.empty()) throw ParseError(source, line, "empty token form");
  if (form.find_first_of(std::string_view("\t\n\r\x1f", 4)) != std::string_view::npos) {
    throw ParseError(source, line, "token form contains a reserved control character");
  }
}

namespace {

void validate_tag(std::string_view tag, const std::string& source, std::size_t line) {
  if (tag.empty()) throw ParseError(source, line, "empty tag");
  if (tag == TagSet::kBoundaryTag) throw ParseError(source, line, "tag '<bos>' is reserved");
  if (tag.find_first_of(std::string_view("\t\n\r\x1f", 4)) != std::string_view::npos) {
    throw ParseError(source, line, "tag contains a reserved control character");
  }
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

Corpus parse_conllu(std::istream& in, const std::string& source) {
  struct PendingToken {
    std::string form;
    std::optional<std::string> tag;
  };
  std::vector<std::vector<PendingToken>> sentences;
  std::vector<PendingToken> current;
  std::string raw;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp_cr(raw);
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(source, line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    const std::string_view id = cols[0];
    if (id.empty()) throw ParseError(source, line_no, "empty ID column");
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;
    validate_form(cols[1], source, line_no);
    PendingToken tok{std::string(cols[1]), std::nullopt};
    if (cols[3] != "_") {
      validate_tag(cols[3], source, line_no);
      tok.tag = std::string(cols[3]);
    }
    current.push_back(std::move(tok));
  }
  flush();
  if (sentences.empty()) throw ParseError(source + ": empty input (no token lines)");

  std::set<std::string> tags;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (t.tag) tags.insert(*t.tag);
    }
  }
  Corpus corpus;
  corpus.tagset = TagSet(std::vector<std::string>(tags.begin(), tags.end()));
  corpus.sentences.reserve(sentences.size());
  for (auto& s : sentences) {
    Sentence out;
    out.tokens.reserve(s.size());
    for (auto& t : s) {
      Token tok{std::move(t.form), std::nullopt};
      if (t.tag) tok.gold_tag = *corpus.tagset.find(*t.tag);
      corpus.vocabulary.insert(tok.form);
      out.tokens.push_back(std::move(tok));
    }
    corpus.sentences.push_back(std::move(out));
  }
  return corpus;
}

Corpus parse_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_conllu(in, path);
}

void write_conllu(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& tok = s.tokens[i];
      out << (i + 1) << '\t' << tok.form << "\t_\t"
          << (tok.gold_tag ? corpus.tagset.name(*tok.gold_tag) : std::string("_"))
          << "\t_\t_\t_\t_\t_\t_\n";
    }
    out << '\n';
  }
}

Corpus parse_raw(std::istream& in, const std::string& source, std::vector<std::size_t>* line_numbers) {
  Corpus corpus;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp_cr(raw);
    if (line.empty()) continue;
    Sentence s;
    for (auto tok : text::split(line, ' ')) {
      validate_form(tok, source, line_no);
      corpus.vocabulary.insert(std::string(tok));
      s.tokens.push_back(Token{std::string(tok), std::nullopt});
    }
    corpus.sentences.push_back(std::move(s));
    if (line_numbers) line_numbers->push_back(line_no);
  }
  return corpus;
}

std::set<std::string> vocabulary(const Corpus& corpus) {
  std::set<std::string> vocab;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) vocab.insert(t.form);
  }
  return vocab;
}

TypeTokenRatio normalized_type_token_ratio(const Corpus& corpus, std::size_t window) {
  if (window == 0) throw ConfigError("type/token window must be positive");
  if (corpus.token_count() == 0) throw ConfigError("type/token ratio of an empty corpus");
  TypeTokenRatio r;
  std::unordered_set<std::string_view> seen;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s.tokens) {
      if (r.tokens == window) break;
      seen.insert(t.form);
      ++r.tokens;
    }
    if (r.tokens == window) break;
  }
  r.types = seen.size();
  r.truncated = r.tokens < window;
  r.ratio = static_cast<double>(r.types) / static_cast<double>(r.tokens);
  return r;
}

}  // namespace lexmemm
