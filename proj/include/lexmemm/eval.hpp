#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexmemm/corpus.hpp"

namespace lexmemm {

struct EvalReport {
  std::string corpus_label;
  std::size_t total_tokens = 0;
  std::size_t correct_tokens = 0;
  std::size_t oov_tokens = 0;
  std::size_t correct_oov_tokens = 0;
  std::optional<double> ratio_norm;  // normalized type/token ratio of the training set, if known

  double overall_accuracy() const;
  // Empty when there are no OOV tokens.
  std::optional<double> oov_accuracy() const;
};

// A token is OOV iff its exact form is not in `train_vocab`. `predicted`
// holds one tag string per gold token.
EvalReport evaluate(const Corpus& gold, const std::vector<std::vector<std::string>>& predicted,
                    const std::set<std::string>& train_vocab, std::string label = {});

struct MacroAverage {
  double overall = 0.0;
  std::optional<double> oov;  // mean over reports that have OOV tokens; empty if none do
  std::size_t corpora = 0;
};

MacroAverage macro_average(const std::vector<EvalReport>& reports);
// Plain unweighted mean of accuracy pairs.
std::pair<double, double> macro_average(const std::vector<std::pair<double, double>>& accuracies);

// `key<TAB>value` lines; oov_acc is "n/a" when undefined.
void write_report(std::ostream& out, const EvalReport& report);
EvalReport read_report(std::istream& in, const std::string& source = "<report>");
// Human-readable summary.
void print_report(std::ostream& out, const EvalReport& report);

struct VariabilityRow {
  std::string label;
  double ratio = 0.0;
  bool truncated = false;
  std::optional<double> delta;  // accuracy_a - accuracy_b
};

struct VariabilityInput {
  std::string label;
  const Corpus* corpus = nullptr;
  std::optional<std::pair<double, double>> accuracies;  // (a, b)
};

// Rows sorted by ascending ratio (label breaks ties).
std::vector<VariabilityRow> lexical_variability_table(const std::vector<VariabilityInput>& inputs,
                                                      std::size_t window = kDefaultTtrWindow);
void write_variability_table(std::ostream& out, const std::vector<VariabilityRow>& rows);

}  // namespace lexmemm
