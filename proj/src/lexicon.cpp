#include "lexmemm/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lexmemm/corpus.hpp"
#include "lexmemm/error.hpp"
#include "lexmemm/text.hpp"

namespace lexmemm {

namespace {

const LexTags& unknown_tags() {
  static const LexTags unk{std::string(Lexicon::kUnknownTag)};
  return unk;
}

}  // namespace

void Lexicon::add(const std::string& form, const std::string& tag) {
  auto& tags = entries_[form];
  auto pos = std::lower_bound(tags.begin(), tags.end(), tag);
  if (pos == tags.end() || *pos != tag) tags.insert(pos, tag);
}

bool Lexicon::contains(std::string_view form) const { return find(form) != nullptr; }

const LexTags* Lexicon::find(std::string_view form) const {
  auto it = entries_.find(std::string(form));
  return it == entries_.end() ? nullptr : &it->second;
}

const LexTags& Lexicon::lex(std::string_view form, bool case_fallback) const {
  if (const auto* tags = find(form)) return *tags;
  if (case_fallback) {
    const std::string lower = text::to_lower(form);
    if (lower != form) {
      if (const auto* tags = find(lower)) return *tags;
    }
  }
  return unknown_tags();
}

std::set<std::string> Lexicon::tag_inventory() const {
  std::set<std::string> out;
  for (const auto& [form, tags] : entries_) out.insert(tags.begin(), tags.end());
  return out;
}

std::vector<std::string> Lexicon::sorted_forms() const {
  std::vector<std::string> forms;
  forms.reserve(entries_.size());
  for (const auto& kv : entries_) forms.push_back(kv.first);
  std::sort(forms.begin(), forms.end());
  return forms;
}

std::string Lexicon::fingerprint() const {
  std::ostringstream os;
  save_lexicon(os, *this);
  return text::hex64(text::fnv1a64(os.str()));
}

std::string project_coarse(std::string_view raw_tag, std::string_view separators) {
  const auto pos = raw_tag.find_first_of(separators);
  if (pos == 0) return std::string(raw_tag);  // keep tags that start with a separator, e.g. "-"
  return std::string(raw_tag.substr(0, pos));
}

Lexicon load_lexicon(std::istream& in, const LexiconLoadOptions& opts, const std::string& source) {
  Lexicon lexicon;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::chomp_cr(raw);
    if (line.empty()) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2) throw ParseError(source, line_no, "expected form<TAB>tag");
    validate_form(cols[0], source, line_no);
    std::string tag = opts.project ? project_coarse(cols[1], opts.separators) : std::string(cols[1]);
    if (tag.empty()) throw ParseError(source, line_no, "empty tag");
    if (tag == Lexicon::kUnknownTag) throw ParseError(source, line_no, "tag '_unk_' is reserved");
    if (tag.find(kFieldJoiner) != std::string::npos || tag.find('|') != std::string::npos) {
      throw ParseError(source, line_no, "tag contains a reserved character");
    }
    lexicon.add(std::string(cols[0]), tag);
  }
  return lexicon;
}

Lexicon load_lexicon_file(const std::string& path, const LexiconLoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_lexicon(in, opts, path);
}

void save_lexicon(std::ostream& out, const Lexicon& lexicon) {
  for (const auto& form : lexicon.sorted_forms()) {
    for (const auto& tag : *lexicon.find(form)) out << form << '\t' << tag << '\n';
  }
}

const std::vector<std::string>& punctuation_symbols() {
  static const std::vector<std::string> symbols{
      ".", ",", ";", ":", "!", "?", "…", "(", ")", "[", "]",
      "{", "}", "\"", "'", "«", "»", "—", "–", "-", "/"};
  return symbols;
}

Lexicon ensure_punctuation(Lexicon lexicon, const std::string& punct_tag) {
  if (punct_tag.empty()) throw ConfigError("punctuation tag must be non-empty");
  if (punct_tag == Lexicon::kUnknownTag) throw ConfigError("punctuation tag '_unk_' is reserved");
  for (const auto& sym : punctuation_symbols()) {
    if (!lexicon.contains(sym)) lexicon.add(sym, punct_tag);
  }
  return lexicon;
}

}  // namespace lexmemm
