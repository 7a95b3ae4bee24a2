#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lexmemm/error.hpp"
#include "lexmemm/maxent.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace lexmemm;
using lexmemm::testing::finite_difference_gradient;
using lexmemm::testing::random_events;
using lexmemm::testing::reference_objective;

namespace {

double max_relative_error(const WeightMatrix& a, const WeightMatrix& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    const double x = a.data()[k], y = b.data()[k];
    worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y))));
  }
  return worst;
}

Corpus parse(const std::string& s) {
  std::istringstream in(s);
  return parse_conllu(in);
}

}  // namespace

TEST_CASE("predicate index freezes") {
  PredicateIndex idx;
  CHECK(*idx.intern("a") == 0);
  CHECK(*idx.intern("b") == 1);
  CHECK(*idx.intern("a") == 0);
  idx.freeze();
  CHECK_FALSE(idx.intern("c"));
  CHECK(idx.size() == 2);
  CHECK_FALSE(idx.find("c"));
}

TEST_CASE("prob_dist closed forms") {
  WeightMatrix zero(3, 4);
  const std::vector<PredicateId> preds{0, 2};
  for (double p : prob_dist(zero, preds)) CHECK(p == doctest::Approx(0.25));
  for (double p : prob_dist(zero, {})) CHECK(p == doctest::Approx(0.25));

  WeightMatrix w(1, 2);
  w.at(0, 0) = std::log(2.0);
  const auto p = prob_dist(w, std::vector<PredicateId>{0});
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  WeightMatrix big(1, 3);
  big.at(0, 0) = 800.0;
  big.at(0, 1) = 799.0;
  const auto q = prob_dist(big, std::vector<PredicateId>{0});
  CHECK(std::isfinite(q[0]));
  CHECK(q[0] + q[1] + q[2] == doctest::Approx(1.0));
}

TEST_CASE("property: prob_dist shift invariance per predicate row") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    WeightMatrix w(5, 3);
    for (auto& x : w.data()) x = lexmemm::testing::uniform(rng, -3, 3);
    const std::vector<PredicateId> preds{0, 1, 3};
    const auto before = prob_dist(w, preds);
    const double c = lexmemm::testing::uniform(rng, -10, 10);
    for (auto& x : w.row(1)) x += c;
    const auto after = prob_dist(w, preds);
    for (std::size_t t = 0; t < 3; ++t) CHECK(after[t] == doctest::Approx(before[t]).epsilon(1e-12));
  }
}

TEST_CASE("nll at zero weights, one event, two tags is ln 2") {
  WeightMatrix w(2, 2);
  const std::vector<TrainingEvent> ev{{{0, 1}, 1}};
  const auto r = nll_and_gradient(w, ev, 1.0);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(r.gradient.at(0, 0) == doctest::Approx(0.5));
  CHECK(r.gradient.at(0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t preds = 1 + lexmemm::testing::uniform_index(rng, 20);
    const std::size_t tags = 2 + lexmemm::testing::uniform_index(rng, 2);
    const auto events = random_events(rng, preds, tags, 1 + lexmemm::testing::uniform_index(rng, 30));
    WeightMatrix w(preds, tags);
    for (auto& x : w.data()) x = lexmemm::testing::uniform(rng, -1, 1);
    const double sigma2 = lexmemm::testing::uniform(rng, 0.5, 5.0);
    const auto r = nll_and_gradient(w, events, sigma2);
    CHECK(r.value == doctest::Approx(reference_objective(w, events, sigma2)).epsilon(1e-12));
    CHECK(max_relative_error(r.gradient, finite_difference_gradient(w, events, sigma2)) < 1e-4);
  }
}

TEST_CASE("infinite sigma2 gives the pure likelihood gradient") {
  std::mt19937_64 rng(31);
  const auto events = random_events(rng, 6, 3, 10);
  WeightMatrix w(6, 3);
  for (auto& x : w.data()) x = lexmemm::testing::uniform(rng, -1, 1);
  const auto inf = nll_and_gradient(w, events, std::numeric_limits<double>::infinity());
  const auto huge = nll_and_gradient(w, events, 1e12);
  CHECK(max_relative_error(inf.gradient, huge.gradient) < 1e-9);
  CHECK(inf.value == doctest::Approx(reference_objective(w, events, std::numeric_limits<double>::infinity())));
}

TEST_CASE("build_events: one event per token, cutoff drops rare predicates") {
  const auto corpus = parse(
      "1\tfoo\t_\tA\t_\t_\t_\t_\t_\t_\n2\tbar\t_\tB\t_\t_\t_\t_\t_\t_\n3\tbar\t_\tB\t_\t_\t_\t_\t_\t_\n\n");
  const auto all = build_events(corpus, Lexicon{}, FeatureConfig{}, 1);
  CHECK(all.events.size() == 3);
  CHECK(all.index.frozen());
  CHECK(all.index.find("wd=foo"));
  const auto cut = build_events(corpus, Lexicon{}, FeatureConfig{}, 2);
  CHECK_FALSE(cut.index.find("wd=foo"));
  CHECK(cut.index.find("wd=bar"));
  for (const auto& ev : cut.events) {
    for (auto p : ev.predicates) CHECK(p < cut.index.size());
  }
  // first event conditions on the boundary tag, third on gold B
  CHECK(std::find(all.events[2].predicates.begin(), all.events[2].predicates.end(), *all.index.find("ptag-1=B")) !=
        all.events[2].predicates.end());

  auto untagged = parse("1\tfoo\t_\t_\t_\t_\t_\t_\t_\t_\n");
  CHECK_THROWS_AS(build_events(untagged, Lexicon{}, FeatureConfig{}), ConfigError);
}

TEST_CASE("lexical events differ from standard ones only by lexical predicates") {
  const auto corpus = parse(
      "1\tLe\t_\tDET\t_\t_\t_\t_\t_\t_\n2\tchat\t_\tNOUN\t_\t_\t_\t_\t_\t_\n3\tdort\t_\tVERB\t_\t_\t_\t_\t_\t_\n\n");
  Lexicon lex;
  lex.add("le", "det");
  lex.add("chat", "nc");
  FeatureConfig lexical;
  lexical.lexical = true;
  const auto a = build_events(corpus, lex, FeatureConfig{});
  const auto b = build_events(corpus, lex, lexical);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t e = 0; e < a.events.size(); ++e) {
    std::set<std::string> sa, sb;
    for (auto p : a.events[e].predicates) sa.insert(a.index.name(p));
    for (auto p : b.events[e].predicates) sb.insert(b.index.name(p));
    for (const auto& p : sa) CHECK(sb.count(p));
    for (const auto& p : sb) {
      if (sa.count(p)) continue;
      CHECK((p.rfind("lex", 0) == 0 || p.rfind("ptag-1.lex+1=", 0) == 0));
    }
  }
}

TEST_CASE("training separates a separable toy problem") {
  TagSet tags(std::vector<std::string>{"A", "B"});
  PredicateIndex idx;
  idx.intern("x");
  idx.intern("y");
  idx.freeze();
  const std::vector<TrainingEvent> events{{{0}, 0}, {{1}, 1}, {{0}, 0}, {{1}, 1}};
  TrainConfig cfg;
  const auto r = train(events, idx, tags, cfg);
  CHECK(r.stats.converged);
  for (const auto& ev : events) {
    const auto p = prob_dist(r.weights, ev.predicates);
    CHECK(p[static_cast<std::size_t>(ev.gold)] > 0.5);
  }
  CHECK(r.stats.final_objective <= r.stats.initial_objective);
  CHECK(r.stats.initial_objective == doctest::Approx(4 * std::log(2.0)));
}

TEST_CASE("duplicated events with halved sigma2 reach the same optimum") {
  std::mt19937_64 rng(37);
  const auto events = random_events(rng, 8, 3, 25);
  auto doubled = events;
  doubled.insert(doubled.end(), events.begin(), events.end());
  PredicateIndex idx;
  for (int p = 0; p < 8; ++p) idx.intern("p" + std::to_string(p));
  idx.freeze();
  TagSet tags(std::vector<std::string>{"A", "B", "C"});

  // Objective-scaling oracle: 2 * F(w; E, s2) == F(w; E+E, s2 / 2) at any w.
  WeightMatrix probe(8, 3);
  for (auto& x : probe.data()) x = lexmemm::testing::uniform(rng, -1, 1);
  CHECK(2 * reference_objective(probe, events, 1.0) ==
        doctest::Approx(reference_objective(probe, doubled, 0.5)).epsilon(1e-12));

  TrainConfig a;
  a.tolerance = 1e-8;
  a.max_iterations = 1000;
  TrainConfig b = a;
  b.sigma2 = 0.5;
  const auto ra = train(events, idx, tags, a);
  const auto rb = train(doubled, idx, tags, b);
  CHECK(ra.stats.converged);
  CHECK(rb.stats.converged);
  for (std::size_t k = 0; k < ra.weights.data().size(); ++k) {
    CHECK(ra.weights.data()[k] == doctest::Approx(rb.weights.data()[k]).epsilon(1e-5));
  }
}

TEST_CASE("training is deterministic and descends") {
  std::mt19937_64 rng(41);
  const auto events = random_events(rng, 12, 3, 40);
  PredicateIndex idx;
  for (int p = 0; p < 12; ++p) idx.intern("p" + std::to_string(p));
  idx.freeze();
  TagSet tags(std::vector<std::string>{"A", "B", "C"});
  const auto r1 = train(events, idx, tags, TrainConfig{});
  const auto r2 = train(events, idx, tags, TrainConfig{});
  CHECK(r1.weights == r2.weights);
  CHECK(r1.stats == r2.stats);
  CHECK(r1.stats.initial_objective == doctest::Approx(40 * std::log(3.0)));
  CHECK(r1.stats.final_objective <= r1.stats.initial_objective);
}

TEST_CASE("tiny corpus: final NLL below N ln|tags|") {
  std::string text;
  const char* rows[][2] = {{"the", "DET"}, {"cat", "NOUN"}, {"runs", "VERB"}};
  for (int s = 0; s < 10; ++s) {
    for (int i = 0; i < 3; ++i) text += std::to_string(i + 1) + "\t" + rows[(i + s) % 3][0] + "\t_\t" + rows[(i + s) % 3][1] + "\t_\t_\t_\t_\t_\t_\n";
    text += "\n";
  }
  const auto corpus = parse(text);
  const auto ev = build_events(corpus, Lexicon{}, FeatureConfig{});
  const auto r = train(ev.events, ev.index, corpus.tagset, TrainConfig{});
  CHECK(r.stats.initial_objective == doctest::Approx(30 * std::log(3.0)));
  CHECK(r.stats.final_objective < r.stats.initial_objective);
}

TEST_CASE("train rejects bad input") {
  PredicateIndex idx;
  idx.intern("a");
  TagSet tags(std::vector<std::string>{"A"});
  CHECK_THROWS_AS(train({}, idx, tags, TrainConfig{}), ConfigError);
  TrainConfig bad;
  bad.sigma2 = 0;
  const std::vector<TrainingEvent> ev{{{0}, 0}};
  CHECK_THROWS_AS(train(ev, idx, tags, bad), ConfigError);
  const std::vector<TrainingEvent> out_of_range{{{5}, 0}};
  CHECK_THROWS_AS(train(out_of_range, idx, tags, TrainConfig{}), ConfigError);
}
