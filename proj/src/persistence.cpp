#include "lexmemm/persistence.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "lexmemm/error.hpp"

namespace lexmemm {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void raw(std::string_view s) { buf_.append(s); }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, const char* what) : data_(data), what_(what) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() { return std::string(raw(u64())); }
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) throw ModelFormatError(std::string("malformed ") + what_ + " section");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  const char* what_;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string encode_config(const TaggerModel& m) {
  const std::pair<const char*, std::string> entries[] = {
      {"feature.standard", m.features.standard ? "1" : "0"},
      {"feature.lexical", m.features.lexical ? "1" : "0"},
      {"feature.case_fallback", m.features.case_fallback ? "1" : "0"},
      {"feature.prefix_max", std::to_string(m.features.prefix_max)},
      {"feature.suffix_max", std::to_string(m.features.suffix_max)},
      {"feature.next_affix_max", std::to_string(m.features.next_affix_max)},
      {"lexicon.project", m.lexicon_prep.project ? "1" : "0"},
      {"lexicon.separators", m.lexicon_prep.separators},
      {"lexicon.punct_tag", m.lexicon_prep.punct_tag},
      {"lexicon.fingerprint", m.lexicon_fingerprint},
      {"lexicon.embedded", m.embed_lexicon ? "1" : "0"},
      {"train.sigma2", num(m.train_config.sigma2)},
      {"train.cutoff", std::to_string(m.train_config.cutoff)},
      {"train.tolerance", num(m.train_config.tolerance)},
      {"train.max_iterations", std::to_string(m.train_config.max_iterations)},
      {"stats.iterations", std::to_string(m.train_stats.iterations)},
      {"stats.converged", m.train_stats.converged ? "1" : "0"},
      {"stats.initial_objective", num(m.train_stats.initial_objective)},
      {"stats.final_objective", num(m.train_stats.final_objective)},
      {"stats.gradient_max_norm", num(m.train_stats.gradient_max_norm)},
      {"decode.beam_width", std::to_string(m.decode.beam_width)},
      {"decode.merge_states", m.decode.merge_states ? "1" : "0"},
  };
  Writer w;
  w.u32(static_cast<std::uint32_t>(std::size(entries)));
  for (const auto& [k, v] : entries) {
    w.str(k);
    w.str(v);
  }
  return std::move(w.bytes());
}

void decode_config(std::string_view payload, TaggerModel& m) {
  Reader r(payload, "CONF");
  std::map<std::string, std::string> kv;
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto k = r.str();
    kv[k] = r.str();
  }
  if (!r.done()) throw ModelFormatError("trailing bytes in CONF section");
  const auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ModelFormatError(std::string("missing config key '") + key + "'");
    return it->second;
  };
  const auto flag = [&](const char* key) {
    const auto& v = get(key);
    if (v != "0" && v != "1") throw ModelFormatError(std::string("bad flag '") + key + "'");
    return v == "1";
  };
  const auto integer = [&](const char* key) {
    try {
      return std::stoi(get(key));
    } catch (const std::logic_error&) {
      throw ModelFormatError(std::string("bad integer '") + key + "'");
    }
  };
  const auto real = [&](const char* key) {
    try {
      return std::stod(get(key));
    } catch (const std::logic_error&) {
      throw ModelFormatError(std::string("bad number '") + key + "'");
    }
  };
  m.features.standard = flag("feature.standard");
  m.features.lexical = flag("feature.lexical");
  m.features.case_fallback = flag("feature.case_fallback");
  m.features.prefix_max = integer("feature.prefix_max");
  m.features.suffix_max = integer("feature.suffix_max");
  m.features.next_affix_max = integer("feature.next_affix_max");
  m.lexicon_prep.project = flag("lexicon.project");
  m.lexicon_prep.separators = get("lexicon.separators");
  m.lexicon_prep.punct_tag = get("lexicon.punct_tag");
  m.lexicon_fingerprint = get("lexicon.fingerprint");
  m.embed_lexicon = flag("lexicon.embedded");
  m.train_config.sigma2 = real("train.sigma2");
  m.train_config.cutoff = integer("train.cutoff");
  m.train_config.tolerance = real("train.tolerance");
  m.train_config.max_iterations = integer("train.max_iterations");
  m.train_stats.iterations = integer("stats.iterations");
  m.train_stats.converged = flag("stats.converged");
  m.train_stats.initial_objective = real("stats.initial_objective");
  m.train_stats.final_objective = real("stats.final_objective");
  m.train_stats.gradient_max_norm = real("stats.gradient_max_norm");
  m.decode.beam_width = integer("decode.beam_width");
  m.decode.merge_states = flag("decode.merge_states");
}

void section(Writer& w, std::string_view tag, const std::string& payload) {
  w.raw(tag);
  w.u64(payload.size());
  w.raw(payload);
}

}  // namespace

std::string serialize_model(const TaggerModel& model) {
  model.validate();
  Writer w;
  w.raw(kModelMagic);
  w.u32(kModelFormatVersion);
  section(w, "CONF", encode_config(model));

  Writer tags;
  tags.u64(model.tagset.size());
  for (const auto& t : model.tagset.names()) tags.str(t);
  section(w, "TAGS", tags.bytes());

  Writer preds;
  preds.u64(model.index.size());
  for (const auto& p : model.index.names()) preds.str(p);
  section(w, "PRED", preds.bytes());

  Writer weights;
  weights.u64(model.weights.predicates());
  weights.u64(model.weights.tags());
  for (double v : model.weights.data()) weights.f64(v);
  section(w, "WGHT", weights.bytes());

  if (model.embed_lexicon) {
    std::ostringstream lex;
    save_lexicon(lex, *model.lexicon);
    Writer l;
    l.str(lex.str());
    section(w, "LEXI", l.bytes());
  }
  return std::move(w.bytes());
}

std::size_t save_model(std::ostream& out, const TaggerModel& model) {
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write model");
  return bytes.size();
}

std::size_t save_model_file(const std::string& path, const TaggerModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto n = save_model(out, model);
  out.close();
  if (!out) throw IoError("failed to write '" + path + "'");
  return n;
}

TaggerModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kModelMagic.size() || bytes.substr(0, kModelMagic.size()) != kModelMagic) {
    throw VersionError("not a LEXMEMM1 model (bad magic)");
  }
  bytes.remove_prefix(kModelMagic.size());
  if (bytes.size() < 4) throw TruncatedFileError("truncated file: missing format version");
  Reader head(bytes.substr(0, 4), "header");
  const auto version = head.u32();
  if (version != kModelFormatVersion) {
    throw VersionError("unsupported model format version " + std::to_string(version));
  }
  bytes.remove_prefix(4);

  // Split into sections, detecting truncation before interpreting anything.
  std::vector<std::pair<std::string, std::string_view>> sections;
  while (!bytes.empty()) {
    if (bytes.size() < 12) throw TruncatedFileError("truncated file: incomplete section header");
    const std::string tag(bytes.substr(0, 4));
    Reader len(bytes.substr(4, 8), "header");
    const auto size = len.u64();
    bytes.remove_prefix(12);
    if (size > bytes.size()) {
      throw TruncatedFileError("truncated file: section " + tag + " declares " + std::to_string(size) +
                               " bytes, " + std::to_string(bytes.size()) + " remain");
    }
    sections.emplace_back(tag, bytes.substr(0, size));
    bytes.remove_prefix(size);
  }
  const char* expected[] = {"CONF", "TAGS", "PRED", "WGHT"};
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= sections.size()) throw TruncatedFileError(std::string("truncated file: missing section ") + expected[i]);
    if (sections[i].first != expected[i]) {
      throw ModelFormatError("expected section " + std::string(expected[i]) + ", found " + sections[i].first);
    }
  }

  TaggerModel m;
  decode_config(sections[0].second, m);

  Reader tags(sections[1].second, "TAGS");
  const auto ntags = tags.u64();
  std::vector<std::string> tag_names;
  for (std::uint64_t i = 0; i < ntags; ++i) tag_names.push_back(tags.str());
  if (!tags.done()) throw ModelFormatError("trailing bytes in TAGS section");
  try {
    m.tagset = TagSet(std::move(tag_names));
  } catch (const ConfigError& e) {
    throw ModelFormatError(e.what());
  }

  Reader preds(sections[2].second, "PRED");
  const auto npreds = preds.u64();
  for (std::uint64_t i = 0; i < npreds; ++i) {
    const auto p = preds.str();
    if (m.index.find(p)) throw ModelFormatError("duplicate predicate in PRED section");
    m.index.intern(p);
  }
  if (!preds.done()) throw ModelFormatError("trailing bytes in PRED section");
  m.index.freeze();

  const auto wpayload = sections[3].second;
  if (wpayload.size() < 16) throw DimensionError("weights section shorter than its dimension header");
  Reader weights(wpayload, "WGHT");
  const auto rows = weights.u64();
  const auto cols = weights.u64();
  if (rows != m.index.size() || cols != m.tagset.size()) {
    throw DimensionError("weights declared " + std::to_string(rows) + "x" + std::to_string(cols) + ", model has " +
                         std::to_string(m.index.size()) + " predicates and " + std::to_string(m.tagset.size()) +
                         " tags");
  }
  if (cols != 0 && rows > (weights.remaining() / 8) / cols) {
    throw DimensionError("weights section holds fewer values than its declared dimensions");
  }
  if (weights.remaining() != rows * cols * 8) {
    throw DimensionError("weights section length disagrees with declared dimensions");
  }
  m.weights = WeightMatrix(rows, cols);
  for (auto& v : m.weights.data()) v = weights.f64();

  std::size_t next = 4;
  if (m.embed_lexicon) {
    if (sections.size() <= next || sections[next].first != "LEXI") {
      throw TruncatedFileError("truncated file: missing embedded lexicon");
    }
    Reader lex(sections[next].second, "LEXI");
    std::istringstream in(lex.str());
    if (!lex.done()) throw ModelFormatError("trailing bytes in LEXI section");
    auto lexicon = std::make_shared<const Lexicon>(load_lexicon(in, {}, "<embedded lexicon>"));
    if (m.features.lexical && lexicon->fingerprint() != m.lexicon_fingerprint) {
      throw FingerprintMismatchError("embedded lexicon does not match the recorded fingerprint");
    }
    m.lexicon = std::move(lexicon);
    ++next;
  }
  if (next != sections.size()) throw ModelFormatError("unexpected section " + sections[next].first);

  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ModelFormatError(std::string("invalid model configuration: ") + e.what());
  }
  return m;
}

TaggerModel load_model(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

TaggerModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_model(in);
}

void dump_weights(std::ostream& out, const TaggerModel& model) {
  for (std::size_t p = 0; p < model.weights.predicates(); ++p) {
    for (std::size_t t = 0; t < model.weights.tags(); ++t) {
      const double w = model.weights.at(p, t);
      if (w == 0.0) continue;
      out << model.index.name(static_cast<PredicateId>(p)) << '\t' << model.tagset.name(static_cast<TagId>(t)) << '\t'
          << num(w) << '\n';
    }
  }
}

}  // namespace lexmemm
