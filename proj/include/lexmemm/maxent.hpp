#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexmemm/corpus.hpp"
#include "lexmemm/features.hpp"
#include "lexmemm/lexicon.hpp"

namespace lexmemm {

using PredicateId = std::uint32_t;

// Predicate string <-> contiguous id. Once frozen, unseen predicates are
// reported absent and never added.
class PredicateIndex {
 public:
  // Returns the id, adding the predicate unless frozen.
  std::optional<PredicateId> intern(const std::string& predicate);
  std::optional<PredicateId> find(std::string_view predicate) const;
  const std::string& name(PredicateId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const PredicateIndex& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, PredicateId> ids_;
  bool frozen_ = false;
};

// Dense row-major weights, one row per predicate, one column per tag.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t predicates, std::size_t tags) : rows_(predicates), cols_(tags), data_(predicates * tags, 0.0) {}

  std::size_t predicates() const { return rows_; }
  std::size_t tags() const { return cols_; }
  double& at(std::size_t p, std::size_t t) { return data_[p * cols_ + t]; }
  double at(std::size_t p, std::size_t t) const { return data_[p * cols_ + t]; }
  std::span<double> row(std::size_t p) { return {data_.data() + p * cols_, cols_}; }
  std::span<const double> row(std::size_t p) const { return {data_.data() + p * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  bool all_finite() const;

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TrainingEvent {
  std::vector<PredicateId> predicates;  // sorted, unique
  TagId gold = 0;
};

struct EventSet {
  PredicateIndex index;  // frozen
  std::vector<TrainingEvent> events;
};

// One event per token, conditioned on gold previous tags. Predicates seen
// fewer than `cutoff` times are dropped. Ids follow first occurrence.
EventSet build_events(const Corpus& corpus, const Lexicon& lexicon, const FeatureConfig& cfg, int cutoff = 1);

// Sum of weight rows for the active predicates.
std::vector<double> tag_scores(const WeightMatrix& weights, std::span<const PredicateId> predicates);
// In-place max-shifted log-softmax.
void log_normalize(std::vector<double>& scores);

// p(tag | predicates), max-shifted softmax.
std::vector<double> prob_dist(const WeightMatrix& weights, std::span<const PredicateId> predicates);

struct ObjectiveValue {
  double value = 0.0;
  WeightMatrix gradient;
};

// Negative log-likelihood plus sum(w^2)/(2 sigma2); sigma2 = +inf disables the prior.
ObjectiveValue nll_and_gradient(const WeightMatrix& weights, std::span<const TrainingEvent> events, double sigma2);

struct TrainConfig {
  double sigma2 = 1.0;
  int cutoff = 1;
  double tolerance = 1e-5;  // max-norm of the gradient
  int max_iterations = 200;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct TrainStats {
  int iterations = 0;
  bool converged = false;  // gradient tolerance reached (false: iteration budget or stalled line search)
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double gradient_max_norm = 0.0;

  bool operator==(const TrainStats&) const = default;
};

struct TrainResult {
  WeightMatrix weights;
  TrainStats stats;
};

// Minimizes the regularized objective from zero weights with L-BFGS.
TrainResult train(std::span<const TrainingEvent> events, const PredicateIndex& index, const TagSet& tagset,
                  const TrainConfig& config);

}  // namespace lexmemm
