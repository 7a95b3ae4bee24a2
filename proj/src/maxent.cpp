#include "lexmemm/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lexmemm/error.hpp"
#include "lexmemm/lbfgs.hpp"

namespace lexmemm {

std::optional<PredicateId> PredicateIndex::intern(const std::string& predicate) {
  if (auto id = find(predicate)) return id;
  if (frozen_) return std::nullopt;
  const auto id = static_cast<PredicateId>(names_.size());
  names_.push_back(predicate);
  ids_.emplace(predicate, id);
  return id;
}

std::optional<PredicateId> PredicateIndex::find(std::string_view predicate) const {
  auto it = ids_.find(std::string(predicate));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool WeightMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double w) { return std::isfinite(w); });
}

EventSet build_events(const Corpus& corpus, const Lexicon& lexicon, const FeatureConfig& cfg, int cutoff) {
  cfg.validate();
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
  if (!corpus.has_gold_tags()) throw ConfigError("training corpus lacks gold tags");

  // First pass: provisional ids for every predicate, with occurrence counts.
  PredicateIndex provisional;
  std::vector<std::size_t> counts;
  std::vector<TrainingEvent> events;
  events.reserve(corpus.token_count());
  std::vector<std::string> history;
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 1; i <= sentence.size(); ++i) {
      const auto prev = i >= 2 ? std::string_view(corpus.tagset.name(*sentence.tokens[i - 2].gold_tag))
                               : TagSet::kBoundaryTag;
      const auto prevprev = i >= 3 ? std::string_view(corpus.tagset.name(*sentence.tokens[i - 3].gold_tag))
                                   : TagSet::kBoundaryTag;
      PositionFeatures pf(sentence, i, lexicon, cfg);
      history.clear();
      pf.history_predicates(prev, prevprev, history);
      TrainingEvent ev;
      ev.gold = *sentence.tokens[i - 1].gold_tag;
      const auto add = [&](const std::string& p) {
        const auto id = *provisional.intern(p);
        if (id == counts.size()) counts.push_back(0);
        ev.predicates.push_back(id);
      };
      for (const auto& p : pf.static_predicates()) add(p);
      for (const auto& p : history) add(p);
      std::sort(ev.predicates.begin(), ev.predicates.end());
      ev.predicates.erase(std::unique(ev.predicates.begin(), ev.predicates.end()), ev.predicates.end());
      for (auto id : ev.predicates) ++counts[id];
      events.push_back(std::move(ev));
    }
  }

  EventSet out;
  constexpr auto kDropped = std::numeric_limits<PredicateId>::max();
  std::vector<PredicateId> remap(provisional.size(), kDropped);
  for (PredicateId id = 0; id < provisional.size(); ++id) {
    if (counts[id] >= static_cast<std::size_t>(cutoff)) remap[id] = *out.index.intern(provisional.name(id));
  }
  out.index.freeze();
  for (auto& ev : events) {
    std::vector<PredicateId> kept;
    kept.reserve(ev.predicates.size());
    for (auto id : ev.predicates) {
      if (remap[id] != kDropped) kept.push_back(remap[id]);
    }
    std::sort(kept.begin(), kept.end());
    ev.predicates = std::move(kept);
  }
  out.events = std::move(events);
  return out;
}

std::vector<double> tag_scores(const WeightMatrix& weights, std::span<const PredicateId> predicates) {
  std::vector<double> scores(weights.tags(), 0.0);
  for (auto p : predicates) {
    const auto row = weights.row(p);
    for (std::size_t t = 0; t < scores.size(); ++t) scores[t] += row[t];
  }
  return scores;
}

void log_normalize(std::vector<double>& scores) {
  if (scores.empty()) return;
  const double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max);
  const double log_z = max + std::log(sum);
  for (double& s : scores) s -= log_z;
}

std::vector<double> prob_dist(const WeightMatrix& weights, std::span<const PredicateId> predicates) {
  auto probs = tag_scores(weights, predicates);
  if (probs.empty()) return probs;
  const double max = *std::max_element(probs.begin(), probs.end());
  double sum = 0.0;
  for (double& s : probs) {
    s = std::exp(s - max);
    sum += s;
  }
  for (double& s : probs) s /= sum;
  return probs;
}

ObjectiveValue nll_and_gradient(const WeightMatrix& weights, std::span<const TrainingEvent> events, double sigma2) {
  ObjectiveValue out{0.0, WeightMatrix(weights.predicates(), weights.tags())};
  auto& grad = out.gradient;
  const std::size_t tags = weights.tags();
  std::vector<double> probs(tags);
  for (const auto& ev : events) {
    auto scores = tag_scores(weights, ev.predicates);
    const double max = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (std::size_t t = 0; t < tags; ++t) {
      probs[t] = std::exp(scores[t] - max);
      sum += probs[t];
    }
    const double log_z = max + std::log(sum);
    out.value -= scores[static_cast<std::size_t>(ev.gold)] - log_z;
    for (std::size_t t = 0; t < tags; ++t) probs[t] /= sum;
    probs[static_cast<std::size_t>(ev.gold)] -= 1.0;
    for (auto p : ev.predicates) {
      auto row = grad.row(p);
      for (std::size_t t = 0; t < tags; ++t) row[t] += probs[t];
    }
  }
  if (std::isfinite(sigma2)) {
    const auto& w = weights.data();
    auto& g = grad.data();
    double penalty = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      penalty += w[k] * w[k];
      g[k] += w[k] / sigma2;
    }
    out.value += penalty / (2.0 * sigma2);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
}

TrainResult train(std::span<const TrainingEvent> events, const PredicateIndex& index, const TagSet& tagset,
                  const TrainConfig& config) {
  config.validate();
  if (events.empty()) throw ConfigError("no training events");
  if (tagset.empty()) throw ConfigError("empty tagset");
  for (const auto& ev : events) {
    if (ev.gold < 0 || static_cast<std::size_t>(ev.gold) >= tagset.size()) throw ConfigError("event tag out of range");
    for (auto p : ev.predicates) {
      if (p >= index.size()) throw ConfigError("event predicate out of range");
    }
  }

  WeightMatrix weights(index.size(), tagset.size());
  const optim::Objective objective = [&](std::span<const double> x, std::span<double> g) {
    std::copy(x.begin(), x.end(), weights.data().begin());
    auto r = nll_and_gradient(weights, events, config.sigma2);
    std::copy(r.gradient.data().begin(), r.gradient.data().end(), g.begin());
    return r.value;
  };
  optim::LbfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tolerance = config.tolerance;

  std::vector<double> x(index.size() * tagset.size(), 0.0);
  const auto res = optim::minimize(objective, x, opts);

  TrainResult out;
  out.weights = WeightMatrix(index.size(), tagset.size());
  out.weights.data() = std::move(x);
  out.stats.iterations = res.iterations;
  out.stats.converged = res.status == optim::LbfgsStatus::kConverged;
  out.stats.initial_objective = res.initial_value;
  out.stats.final_objective = res.value;
  out.stats.gradient_max_norm = res.gradient_max_norm;
  return out;
}

}  // namespace lexmemm
