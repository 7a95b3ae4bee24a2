#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "lexmemm/decoder.hpp"
#include "lexmemm/error.hpp"
#include "random_models.hpp"

using namespace lexmemm;
using lexmemm::testing::random_instance;
using lexmemm::testing::RandomInstance;

TEST_CASE("single-tag model repeats its tag") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, 5, 1);
    for (int beam : {1, 3}) {
      const auto out = beam_decode(inst.model, inst.sentence, {beam, true}).tags;
      CHECK(out == TagSequence(inst.sentence.size(), 0));
    }
  }
}

TEST_CASE("zero-weight model: all-lowest-id sequence with uniform log-probs") {
  std::mt19937_64 rng(2);
  auto inst = random_instance(rng, 5, 4);
  for (auto& w : inst.model.weights.data()) w = 0.0;
  const auto n = inst.sentence.size();
  const double expected = -static_cast<double>(n) * std::log(static_cast<double>(inst.model.tagset.size()));
  for (const auto& r : {beam_decode(inst.model, inst.sentence, {3, true}), beam_decode(inst.model, inst.sentence, {2, false}),
                        exact_decode(inst.model, inst.sentence), brute_force_decode(inst.model, inst.sentence)}) {
    CHECK(r.tags == TagSequence(n, 0));
    CHECK(r.log_prob == doctest::Approx(expected));
  }
}

TEST_CASE("n=1 decodes the argmax of the single distribution") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_instance(rng, 1, 4);
    SentenceScorer scorer(inst.model, inst.sentence);
    const auto& lp = scorer.log_probs(1, kBoundaryTagId, kBoundaryTagId);
    const auto best = static_cast<TagId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    CHECK(exact_decode(inst.model, inst.sentence).tags == TagSequence{best});
  }
}

TEST_CASE("a dominant tag yields a constant sequence") {
  std::mt19937_64 rng(4);
  RandomInstance inst;
  do {
    inst = random_instance(rng, 5, 4);
  } while (inst.model.tagset.size() < 3);
  for (std::size_t p = 0; p < inst.model.weights.predicates(); ++p) inst.model.weights.at(p, 2) += 50.0;
  const auto out = exact_decode(inst.model, inst.sentence);
  CHECK(out.tags == TagSequence(inst.sentence.size(), 2));
}

TEST_CASE("brute force on n=2, 2 tags enumerates 4 sequences") {
  std::mt19937_64 rng(5);
  RandomInstance inst;
  do {
    inst = random_instance(rng, 2, 2);
  } while (inst.sentence.size() != 2 || inst.model.tagset.size() != 2);
  SentenceScorer scorer(inst.model, inst.sentence);
  TagSequence best;
  double best_lp = -1e300;
  for (TagId a = 0; a < 2; ++a) {
    for (TagId b = 0; b < 2; ++b) {
      const double lp = sequence_log_prob(scorer, {a, b});
      if (lp > best_lp) {
        best_lp = lp;
        best = {a, b};
      }
    }
  }
  const auto r = brute_force_decode(inst.model, inst.sentence);
  CHECK(r.tags == best);
  CHECK(r.log_prob == best_lp);
}

TEST_CASE("brute force refuses oversized instances") {
  TaggerModel m;
  std::vector<std::string> tags;
  for (int t = 0; t < 17; ++t) tags.push_back("T" + std::to_string(t));
  m.tagset = TagSet(tags);
  m.weights = WeightMatrix(0, 17);
  Sentence s;
  for (int i = 0; i < 30; ++i) s.tokens.push_back(Token{"w", std::nullopt});
  CHECK_THROWS_AS(brute_force_decode(m, s), CapacityError);
}

TEST_CASE("property: exact == brute force, wide merged beam == exact") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_instance(rng, 5, 4);
    const auto exact = exact_decode(inst.model, inst.sentence);
    const auto brute = brute_force_decode(inst.model, inst.sentence);
    CHECK(exact.tags == brute.tags);
    CHECK(exact.log_prob == brute.log_prob);
    const int width = static_cast<int>(inst.model.tagset.size() * inst.model.tagset.size());
    const auto beam = beam_decode(inst.model, inst.sentence, {width, true});
    CHECK(beam.tags == exact.tags);
  }
}

TEST_CASE("property: beam result never beats the exact optimum; width >= |T|^2 is exact") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_instance(rng, 5, 4);
    const auto exact = exact_decode(inst.model, inst.sentence);
    const int t = static_cast<int>(inst.model.tagset.size());
    for (int width = 1; width <= t * t; ++width) {
      const auto r = beam_decode(inst.model, inst.sentence, {width, true});
      CHECK(r.log_prob <= exact.log_prob);
    }
    CHECK(beam_decode(inst.model, inst.sentence, {t * t, true}).log_prob == exact.log_prob);
  }
}

TEST_CASE("decoding is invariant under per-predicate softmax shifts") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = random_instance(rng, 5, 4);
    const auto before = beam_decode(inst.model, inst.sentence, {3, true}).tags;
    const auto before_exact = exact_decode(inst.model, inst.sentence).tags;
    for (std::size_t p = 0; p < inst.model.weights.predicates(); ++p) {
      const double c = lexmemm::testing::uniform(rng, -5, 5);
      for (auto& w : inst.model.weights.row(p)) w += c;
    }
    CHECK(beam_decode(inst.model, inst.sentence, {3, true}).tags == before);
    CHECK(exact_decode(inst.model, inst.sentence).tags == before_exact);
  }
}

TEST_CASE("tag_corpus output does not depend on thread count") {
  std::mt19937_64 rng(9);
  auto inst = random_instance(rng, 5, 4);
  Corpus corpus;
  for (int s = 0; s < 37; ++s) {
    Sentence sent;
    const auto n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) sent.tokens.push_back(inst.sentence.tokens[rng() % inst.sentence.size()]);
    corpus.sentences.push_back(sent);
  }
  const auto one = tag_corpus(inst.model, corpus, {3, true}, 1);
  CHECK(one == tag_corpus(inst.model, corpus, {3, true}, 8));
  CHECK(one == tag_corpus(inst.model, corpus, {3, true}, 3));
}
