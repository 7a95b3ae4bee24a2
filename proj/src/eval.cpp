#include "lexmemm/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "lexmemm/error.hpp"
#include "lexmemm/text.hpp"

namespace lexmemm {

double EvalReport::overall_accuracy() const {
  if (total_tokens == 0) return 0.0;
  return 100.0 * static_cast<double>(correct_tokens) / static_cast<double>(total_tokens);
}

std::optional<double> EvalReport::oov_accuracy() const {
  if (oov_tokens == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct_oov_tokens) / static_cast<double>(oov_tokens);
}

EvalReport evaluate(const Corpus& gold, const std::vector<std::vector<std::string>>& predicted,
                    const std::set<std::string>& train_vocab, std::string label) {
  if (predicted.size() != gold.sentences.size()) {
    throw ConfigError("prediction has " + std::to_string(predicted.size()) + " sentences, gold has " +
                      std::to_string(gold.sentences.size()));
  }
  EvalReport r;
  r.corpus_label = std::move(label);
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto& sent = gold.sentences[s];
    if (predicted[s].size() != sent.size()) {
      throw ConfigError("length mismatch in sentence " + std::to_string(s) + ": " +
                        std::to_string(predicted[s].size()) + " predicted vs " + std::to_string(sent.size()) +
                        " gold tokens");
    }
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const auto& tok = sent.tokens[i];
      if (!tok.gold_tag) throw ConfigError("gold token without tag in sentence " + std::to_string(s));
      const bool correct = predicted[s][i] == gold.tagset.name(*tok.gold_tag);
      const bool oov = !train_vocab.count(tok.form);
      ++r.total_tokens;
      r.correct_tokens += correct;
      r.oov_tokens += oov;
      r.correct_oov_tokens += correct && oov;
    }
  }
  return r;
}

MacroAverage macro_average(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ConfigError("macro average of no reports");
  MacroAverage m;
  m.corpora = reports.size();
  double oov_sum = 0.0;
  std::size_t oov_n = 0;
  for (const auto& r : reports) {
    m.overall += r.overall_accuracy();
    if (auto oov = r.oov_accuracy()) {
      oov_sum += *oov;
      ++oov_n;
    }
  }
  m.overall /= static_cast<double>(reports.size());
  if (oov_n) m.oov = oov_sum / static_cast<double>(oov_n);
  return m;
}

std::pair<double, double> macro_average(const std::vector<std::pair<double, double>>& accuracies) {
  if (accuracies.empty()) throw ConfigError("macro average of no reports");
  double a = 0.0, b = 0.0;
  for (const auto& [x, y] : accuracies) {
    a += x;
    b += y;
  }
  const auto n = static_cast<double>(accuracies.size());
  return {a / n, b / n};
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::size_t parse_count(const std::string& v, const std::string& source, std::size_t line) {
  try {
    std::size_t pos = 0;
    const auto n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ParseError(source, line, "not a count: '" + v + "'");
  }
}

}  // namespace

void write_report(std::ostream& out, const EvalReport& r) {
  out << "corpus\t" << r.corpus_label << '\n';
  out << "overall_acc\t" << fixed(r.overall_accuracy(), 4) << '\n';
  const auto oov = r.oov_accuracy();
  out << "oov_acc\t" << (oov ? fixed(*oov, 4) : "n/a") << '\n';
  out << "total\t" << r.total_tokens << '\n';
  out << "correct\t" << r.correct_tokens << '\n';
  out << "oov_total\t" << r.oov_tokens << '\n';
  out << "oov_correct\t" << r.correct_oov_tokens << '\n';
  out << "ratio_norm\t" << (r.ratio_norm ? fixed(*r.ratio_norm, 6) : "n/a") << '\n';
  out << "vocab_match\tcase-sensitive\n";
}

EvalReport read_report(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::chomp_cr(raw);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(source, line_no, "expected key<TAB>value");
    kv[std::string(line.substr(0, tab))] = std::string(line.substr(tab + 1));
  }
  for (const char* key : {"total", "correct", "oov_total", "oov_correct"}) {
    if (!kv.count(key)) throw ParseError(source + ": missing key '" + key + "'");
  }
  EvalReport r;
  r.corpus_label = kv["corpus"];
  r.total_tokens = parse_count(kv["total"], source, 0);
  r.correct_tokens = parse_count(kv["correct"], source, 0);
  r.oov_tokens = parse_count(kv["oov_total"], source, 0);
  r.correct_oov_tokens = parse_count(kv["oov_correct"], source, 0);
  if (!(r.correct_oov_tokens <= r.oov_tokens && r.oov_tokens <= r.total_tokens && r.correct_tokens <= r.total_tokens)) {
    throw ParseError(source + ": inconsistent counts");
  }
  if (kv.count("ratio_norm") && kv["ratio_norm"] != "n/a") {
    try {
      r.ratio_norm = std::stod(kv["ratio_norm"]);
    } catch (const std::exception&) {
      throw ParseError(source + ": bad ratio_norm");
    }
  }
  return r;
}

void print_report(std::ostream& out, const EvalReport& r) {
  const auto oov = r.oov_accuracy();
  out << (r.corpus_label.empty() ? std::string("corpus") : r.corpus_label) << ": overall "
      << fixed(r.overall_accuracy(), 2) << "% (" << r.correct_tokens << "/" << r.total_tokens << "), OOV "
      << (oov ? fixed(*oov, 2) + "%" : std::string("n/a")) << " (" << r.correct_oov_tokens << "/" << r.oov_tokens
      << ")\n";
}

std::vector<VariabilityRow> lexical_variability_table(const std::vector<VariabilityInput>& inputs,
                                                      std::size_t window) {
  std::vector<VariabilityRow> rows;
  rows.reserve(inputs.size());
  for (const auto& in : inputs) {
    if (!in.corpus) throw ConfigError("variability input without corpus");
    const auto ttr = normalized_type_token_ratio(*in.corpus, window);
    VariabilityRow row{in.label, ttr.ratio, ttr.truncated, std::nullopt};
    if (in.accuracies) row.delta = in.accuracies->first - in.accuracies->second;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const VariabilityRow& a, const VariabilityRow& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return a.label < b.label;
  });
  return rows;
}

void write_variability_table(std::ostream& out, const std::vector<VariabilityRow>& rows) {
  out << "label\tratio_norm\ttruncated\tdelta\n";
  for (const auto& r : rows) {
    out << r.label << '\t' << fixed(r.ratio, 6) << '\t' << (r.truncated ? "yes" : "no") << '\t'
        << (r.delta ? fixed(*r.delta, 4) : "n/a") << '\n';
  }
}

}  // namespace lexmemm
