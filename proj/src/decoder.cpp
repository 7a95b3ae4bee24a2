#include "lexmemm/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "lexmemm/error.hpp"

namespace lexmemm {

SentenceScorer::SentenceScorer(const TaggerModel& model, const Sentence& sentence)
    : model_(model), tags_(model.tagset.size()) {
  positions_.reserve(sentence.size());
  std::vector<PredicateId> ids;
  for (std::size_t i = 1; i <= sentence.size(); ++i) {
    PositionFeatures pf(sentence, i, *model.lexicon, model.features);
    ids.clear();
    for (const auto& p : pf.static_predicates()) {
      if (auto id = model.index.find(p)) ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto base = tag_scores(model.weights, ids);
    positions_.push_back(Position{std::move(pf), std::move(base)});
  }
  cache_.resize(positions_.size() * (tags_ + 1) * (tags_ + 1));
}

const std::vector<double>& SentenceScorer::log_probs(std::size_t position, TagId prev, TagId prevprev) {
  const std::size_t states = tags_ + 1;
  const std::size_t slot = ((position - 1) * states + static_cast<std::size_t>(prev + 1)) * states +
                           static_cast<std::size_t>(prevprev + 1);
  auto& cached = cache_[slot];
  if (!cached.empty()) return cached;

  const auto& pos = positions_[position - 1];
  const auto name = [&](TagId t) -> std::string_view {
    return t == kBoundaryTagId ? TagSet::kBoundaryTag : std::string_view(model_.tagset.name(t));
  };
  scratch_.clear();
  pos.features.history_predicates(name(prev), name(prevprev), scratch_);
  std::vector<double> scores = pos.base_scores;
  for (const auto& p : scratch_) {
    if (auto id = model_.index.find(p)) {
      const auto row = model_.weights.row(*id);
      for (std::size_t t = 0; t < tags_; ++t) scores[t] += row[t];
    }
  }
  log_normalize(scores);
  cached = std::move(scores);
  return cached;
}

double sequence_log_prob(SentenceScorer& scorer, const TagSequence& tags) {
  double lp = 0.0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const TagId prev = i >= 1 ? tags[i - 1] : kBoundaryTagId;
    const TagId prevprev = i >= 2 ? tags[i - 2] : kBoundaryTagId;
    lp += scorer.log_probs(i + 1, prev, prevprev)[static_cast<std::size_t>(tags[i])];
  }
  return lp;
}

namespace {

bool better(const DecodeResult& a, const DecodeResult& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.tags < b.tags;
}

}  // namespace

DecodeResult beam_decode(const TaggerModel& model, const Sentence& sentence, const DecodeConfig& config) {
  config.validate();
  if (sentence.size() == 0) return {};
  SentenceScorer scorer(model, sentence);
  const std::size_t tags = model.tagset.size();

  std::vector<DecodeResult> beam{DecodeResult{}};
  std::vector<DecodeResult> candidates;
  for (std::size_t i = 1; i <= sentence.size(); ++i) {
    candidates.clear();
    for (const auto& hyp : beam) {
      const TagId prev = hyp.tags.empty() ? kBoundaryTagId : hyp.tags.back();
      const TagId prevprev = hyp.tags.size() >= 2 ? hyp.tags[hyp.tags.size() - 2] : kBoundaryTagId;
      const auto& lp = scorer.log_probs(i, prev, prevprev);
      for (std::size_t t = 0; t < tags; ++t) {
        DecodeResult ext{hyp.tags, hyp.log_prob + lp[t]};
        ext.tags.push_back(static_cast<TagId>(t));
        candidates.push_back(std::move(ext));
      }
    }
    if (config.merge_states) {
      // Best hypothesis per (t-1, t) state, i.e. the context of the next decision.
      std::map<std::pair<TagId, TagId>, std::size_t> best;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& tg = candidates[c].tags;
        const std::pair<TagId, TagId> key{tg.back(), tg.size() >= 2 ? tg[tg.size() - 2] : kBoundaryTagId};
        auto [it, inserted] = best.emplace(key, c);
        if (!inserted && better(candidates[c], candidates[it->second])) it->second = c;
      }
      std::vector<DecodeResult> merged;
      merged.reserve(best.size());
      for (const auto& [key, c] : best) merged.push_back(std::move(candidates[c]));
      candidates.swap(merged);
    }
    const auto keep = std::min(candidates.size(), static_cast<std::size_t>(config.beam_width));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      better);
    candidates.resize(keep);
    beam.swap(candidates);
  }
  return beam.front();
}

TagSequence tag_sentence(const TaggerModel& model, const Sentence& sentence) {
  return beam_decode(model, sentence, model.decode).tags;
}

DecodeResult exact_decode(const TaggerModel& model, const Sentence& sentence) {
  const std::size_t n = sentence.size();
  if (n == 0) return {};
  SentenceScorer scorer(model, sentence);
  const std::size_t tags = model.tagset.size();
  const std::size_t prev_states = tags + 1;  // slot 0 is the boundary

  // table[prev_slot * tags + cur] = best hypothesis ending in (prev, cur).
  std::vector<std::optional<DecodeResult>> table(prev_states * tags);
  const auto& first = scorer.log_probs(1, kBoundaryTagId, kBoundaryTagId);
  for (std::size_t t = 0; t < tags; ++t) {
    table[t] = DecodeResult{{static_cast<TagId>(t)}, first[t]};
  }
  for (std::size_t i = 2; i <= n; ++i) {
    std::vector<std::optional<DecodeResult>> next(prev_states * tags);
    for (std::size_t pslot = 0; pslot < prev_states; ++pslot) {
      for (std::size_t cur = 0; cur < tags; ++cur) {
        const auto& entry = table[pslot * tags + cur];
        if (!entry) continue;
        const TagId prevprev = pslot == 0 ? kBoundaryTagId : static_cast<TagId>(pslot - 1);
        const auto& lp = scorer.log_probs(i, static_cast<TagId>(cur), prevprev);
        for (std::size_t t = 0; t < tags; ++t) {
          DecodeResult ext{entry->tags, entry->log_prob + lp[t]};
          ext.tags.push_back(static_cast<TagId>(t));
          auto& slot = next[(cur + 1) * tags + t];
          if (!slot || better(ext, *slot)) slot = std::move(ext);
        }
      }
    }
    table.swap(next);
  }
  const DecodeResult* best = nullptr;
  for (const auto& entry : table) {
    if (entry && (!best || better(*entry, *best))) best = &*entry;
  }
  return *best;
}

DecodeResult brute_force_decode(const TaggerModel& model, const Sentence& sentence) {
  const std::size_t n = sentence.size();
  const std::size_t tags = model.tagset.size();
  if (std::pow(static_cast<double>(tags), static_cast<double>(n)) > kBruteForceLimit) {
    throw CapacityError("brute-force decoding refused: " + std::to_string(tags) + "^" + std::to_string(n) +
                        " sequences exceed the limit");
  }
  if (n == 0) return {};
  SentenceScorer scorer(model, sentence);
  TagSequence seq(n, 0);
  DecodeResult best{seq, sequence_log_prob(scorer, seq)};
  // Odometer over all sequences in lexicographic order; only strict
  // improvements replace the incumbent, so ties keep the smaller sequence.
  while (true) {
    std::size_t k = n;
    while (k > 0 && static_cast<std::size_t>(seq[k - 1]) + 1 == tags) {
      seq[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
    ++seq[k - 1];
    const double lp = sequence_log_prob(scorer, seq);
    if (lp > best.log_prob) best = DecodeResult{seq, lp};
  }
  return best;
}

std::vector<TagSequence> tag_corpus(const TaggerModel& model, const Corpus& corpus, const DecodeConfig& config,
                                    unsigned threads) {
  config.validate();
  const std::size_t n = corpus.sentences.size();
  std::vector<TagSequence> out(n);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t s = 0; s < n; ++s) out[s] = beam_decode(model, corpus.sentences[s], config).tags;
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t s = begin; s < end; ++s) out[s] = beam_decode(model, corpus.sentences[s], config).tags;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace lexmemm
