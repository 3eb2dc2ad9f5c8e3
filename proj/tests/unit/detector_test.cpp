#include "btx/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "btx/errors.hpp"
#include "btx/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace btx;

namespace {

Document doc(std::string id, std::string body, Group group) {
  Document d;
  d.id = std::move(id);
  d.body = std::move(body);
  d.group = group;
  d.dataset = "unit";
  if (group == Group::BackTranslated) d.intermediate_language = "PT";
  d.word_count = tokenize_words(d.body).size();
  return d;
}

EntityCounts entity(std::string name, std::size_t h, std::size_t a, std::size_t b) {
  EntityCounts c;
  c.entity = std::move(name);
  c.by_group = {h, a, b};
  c.n_total = h + a + b;
  return c;
}

CorpusStats stats_with(std::size_t total) {
  CorpusStats s;
  s.total_entity_occurrences = total;
  s.doc_counts = {1, 1, 1};
  return s;
}

// A corpus where one AI marker washes out in back-translation ("delve"
// becomes "dig") and another survives it ("tapestry").
std::vector<Document> marker_corpus() {
  std::vector<Document> corpus;
  for (int i = 0; i < 4; ++i) {
    const std::string n = std::to_string(i);
    corpus.push_back(doc("h" + n, "The cozy cat sat on a warm mat today. It purred and slept.", Group::Human));
    corpus.push_back(doc("a" + n, "We delve into a rich tapestry of ideas. The tapestry shows patterns.", Group::AI));
    corpus.push_back(
        doc("b" + n, "We dig into a rich tapestry of ideas. The tapestry shows patterns.", Group::BackTranslated));
  }
  return corpus;
}

}  // namespace

TEST_CASE("entity counting splits occurrences by group") {
  std::vector<Document> corpus = {
      doc("h1", "apple banana apple.", Group::Human),
      doc("a1", "banana cherry.", Group::AI),
      doc("b1", "cherry cherry apple.", Group::BackTranslated),
  };
  auto [counts, stats] = count_entities(corpus, EntityOrder::Unigram);

  REQUIRE(counts.size() == 3);
  CHECK(counts[0].entity == "apple");
  CHECK(counts[1].entity == "banana");
  CHECK(counts[2].entity == "cherry");

  CHECK(counts[0].group_count(Group::Human) == 2);
  CHECK(counts[0].group_count(Group::AI) == 0);
  CHECK(counts[0].group_count(Group::BackTranslated) == 1);
  CHECK(counts[0].n_total == 3);
  CHECK(counts[1].n_total == 2);
  CHECK(counts[2].n_total == 3);

  CHECK(stats.total_entity_occurrences == 8);
  CHECK(stats.vocabulary_size == 3);
  CHECK(stats.docs(Group::Human) == 1);
  CHECK(stats.docs(Group::AI) == 1);
  CHECK(stats.docs(Group::BackTranslated) == 1);
}

TEST_CASE("entity counting matches a map-based recount") {
  auto corpus = marker_corpus();
  auto [counts, stats] = count_entities(corpus, EntityOrder::Bigram);

  std::map<std::string, std::array<std::size_t, 3>> expected;
  std::size_t total = 0;
  for (const auto& d : corpus) {
    for (const auto& e : extract_entities(d.body, EntityOrder::Bigram)) {
      ++expected[e][EntityCounts::group_slot(d.group)];
      ++total;
    }
  }
  REQUIRE(counts.size() == expected.size());
  std::size_t i = 0;
  for (const auto& [name, by_group] : expected) {
    CAPTURE(name);
    CHECK(counts[i].entity == name);
    CHECK(counts[i].by_group == by_group);
    ++i;
  }
  CHECK(stats.total_entity_occurrences == total);
}

TEST_CASE("bigram counting never crosses sentences") {
  std::vector<Document> corpus = {doc("h1", "One two. Three four.", Group::Human)};
  auto [counts, stats] = count_entities(corpus, EntityOrder::Bigram);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0].entity == std::string("one") + std::string(kBigramSeparator) + "two");
  CHECK(counts[1].entity == std::string("three") + std::string(kBigramSeparator) + "four");
  CHECK(stats.total_entity_occurrences == 2);
}

TEST_CASE("entity counting rejects bad corpora") {
  CHECK_THROWS_AS(count_entities({}, EntityOrder::Unigram), EmptyCorpus);
  Document manipulated = doc("m1", "some words here.", Group::Human);
  manipulated.group = Group::Manipulated;
  CHECK_THROWS_AS(count_entities({manipulated}, EntityOrder::Unigram), DomainError);
}

TEST_CASE("entropy score reproduces the worked example") {
  // 10 occurrences, 8 of them AI, out of 1000 total corpus occurrences.
  const auto c = entity("word", 2, 8, 0);
  const double e = esas_score(c, {Group::AI}, {Group::Human}, stats_with(1000));
  CHECK(e == doctest::Approx(0.002780719051126378).epsilon(1e-12));
  CHECK(e == doctest::Approx(oracle::entity_score(10, 8, 1000)).epsilon(1e-12));
}

TEST_CASE("entropy score extremes") {
  const auto balanced = entity("w", 5, 5, 0);
  CHECK(esas_score(balanced, {Group::Human}, {Group::AI}, stats_with(100)) == 0.0);

  const auto exclusive = entity("w", 0, 7, 0);
  CHECK(esas_score(exclusive, {Group::AI}, {Group::Human}, stats_with(100)) == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(esas_score(exclusive, {Group::Human}, {Group::AI}, stats_with(100)) == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("entropy score is symmetric and restricted to participating groups") {
  btx::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t h = rng.below(20);
    const std::size_t a = rng.below(20);
    const std::size_t b = rng.below(20);
    if (h + a == 0) continue;
    const auto c = entity("w", h, a, b);
    const std::size_t total = h + a + b + 1 + rng.below(500);
    CorpusStats stats = stats_with(total);

    const double fwd = esas_score(c, {Group::AI}, {Group::Human}, stats);
    const double rev = esas_score(c, {Group::Human}, {Group::AI}, stats);
    CHECK(std::abs(fwd - rev) < 1e-12);
    // The BackTranslated occurrences must not leak into an H-vs-A score.
    CHECK(std::abs(fwd - oracle::entity_score(h + a, a, total)) < 1e-12);
    CHECK(fwd >= -1e-12);
    CHECK(fwd <= static_cast<double>(h + a) / static_cast<double>(total) + 1e-12);
  }
}

TEST_CASE("entropy score input validation") {
  const auto c = entity("w", 0, 0, 3);
  CHECK_THROWS_AS(esas_score(c, {Group::AI}, {Group::Human}, stats_with(100)), ZeroFrequency);
  const auto ok = entity("w", 1, 1, 0);
  CHECK_THROWS_AS(esas_score(ok, {}, {Group::Human}, stats_with(100)), DomainError);
  CHECK_THROWS_AS(esas_score(ok, {Group::AI}, {Group::AI}, stats_with(100)), DomainError);
}

TEST_CASE("multi-scenario score reproduces the frozen fixture") {
  // Entity seen 6 times in human text, 3 in AI text, 1 in back-translations,
  // inside a corpus of 100 total occurrences.
  const auto c = entity("w", 6, 3, 1);
  const CorpusStats stats = stats_with(100);

  CHECK(esas_score(c, {Group::Human}, {Group::AI}, stats) == doctest::Approx(0.007353374935095936).epsilon(1e-12));
  CHECK(esas_score(c, {Group::Human}, {Group::BackTranslated}, stats) ==
        doctest::Approx(0.028582905499237076).epsilon(1e-12));
  CHECK(esas_score(c, {Group::Human}, {Group::AI, Group::BackTranslated}, stats) ==
        doctest::Approx(0.0029049405545331423).epsilon(1e-12));
  CHECK(esas_score(c, {Group::AI}, {Group::BackTranslated}, stats) ==
        doctest::Approx(0.007548875021634688).epsilon(1e-12));
  CHECK(esas_score(c, {Group::AI}, {Group::BackTranslated, Group::Human}, stats) ==
        doctest::Approx(0.011870910076930726).epsilon(1e-12));
  CHECK(esas_score(c, {Group::BackTranslated}, {Group::AI, Group::Human}, stats) ==
        doctest::Approx(0.05310044064107188).epsilon(1e-12));

  CHECK(mesas_score(c, MesasConfig{}, stats) == doctest::Approx(-0.01683950237538557).epsilon(1e-12));
}

TEST_CASE("multi-scenario score matches a scenario-by-scenario recount") {
  btx::Rng rng(77);
  const CorpusStats stats = stats_with(1000);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = rng.below(12);
    const std::size_t a = rng.below(12);
    const std::size_t b = rng.below(12);
    if (h + a + b == 0) continue;
    const auto c = entity("w", h, a, b);

    const std::array<std::pair<std::size_t, std::size_t>, 6> split = {{
        {h + a, h},
        {h + b, h},
        {h + a + b, h},
        {a + b, a},
        {a + b + h, a},
        {b + a + h, b},
    }};
    MesasConfig cfg;
    double expected = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
      expected += cfg.alphas[k] * oracle::entity_score(split[k].first, split[k].second, 1000);
    CHECK(std::abs(mesas_score(c, cfg, stats) - expected) < 1e-12);
  }
}

TEST_CASE("multi-scenario score skips empty scenarios and custom weights apply") {
  const CorpusStats stats = stats_with(50);
  // Human-only entity: the AI-vs-BackTranslated scenario has no occurrences
  // and must contribute zero rather than throw.
  const auto human_only = entity("w", 5, 0, 0);
  MesasConfig cfg;
  double expected = cfg.alphas[0] * oracle::entity_score(5, 5, 50) + cfg.alphas[1] * oracle::entity_score(5, 5, 50) +
                    cfg.alphas[2] * oracle::entity_score(5, 5, 50) + cfg.alphas[4] * oracle::entity_score(5, 0, 50) +
                    cfg.alphas[5] * oracle::entity_score(5, 0, 50);
  CHECK(std::abs(mesas_score(human_only, cfg, stats) - expected) < 1e-12);

  MesasConfig heavy;
  heavy.alphas = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const auto c = entity("w", 6, 3, 1);
  CHECK(mesas_score(c, heavy, stats) == doctest::Approx(esas_score(c, {Group::Human}, {Group::AI}, stats)).epsilon(1e-12));
}

TEST_CASE("vocabulary-size scaling rescales scores without reordering them") {
  auto corpus = marker_corpus();
  auto [counts, stats] = count_entities(corpus, EntityOrder::Unigram);
  REQUIRE(stats.vocabulary_size > 0);
  REQUIRE(stats.total_entity_occurrences != stats.vocabulary_size);
  const double ratio =
      static_cast<double>(stats.total_entity_occurrences) / static_cast<double>(stats.vocabulary_size);

  std::vector<std::pair<std::string, double>> occ, vocab;
  MesasConfig by_vocab;
  by_vocab.scale = EsasScale::VocabularyShare;
  for (const auto& c : counts) {
    occ.emplace_back(c.entity, mesas_score(c, MesasConfig{}, stats));
    vocab.emplace_back(c.entity, mesas_score(c, by_vocab, stats));
    CHECK(std::abs(vocab.back().second - occ.back().second * ratio) < 1e-12);
  }
  const auto top_occ = rank_entities(occ, 5);
  const auto top_vocab = rank_entities(vocab, 5);
  for (std::size_t i = 0; i < top_occ.size(); ++i) CHECK(top_occ[i].first == top_vocab[i].first);

  CHECK(esas_scale_from_string("occurrence_share") == EsasScale::OccurrenceShare);
  CHECK(esas_scale_from_string("vocabulary_share") == EsasScale::VocabularyShare);
  CHECK_THROWS_AS(esas_scale_from_string("tf"), ConfigError);
}

TEST_CASE("multi-scenario score requires all three groups") {
  CorpusStats stats = stats_with(50);
  stats.doc_counts = {2, 2, 0};
  CHECK_THROWS_AS(mesas_score(entity("w", 1, 1, 0), MesasConfig{}, stats), MissingGroup);
}

TEST_CASE("ranking keeps the top q with lexicographic ties") {
  std::vector<std::pair<std::string, double>> scores = {
      {"delta", 0.5}, {"alpha", 0.5}, {"echo", 0.9}, {"bravo", 0.1}, {"charlie", 0.5}};
  auto top = rank_entities(scores, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].first == "echo");
  CHECK(top[1].first == "alpha");
  CHECK(top[2].first == "charlie");

  auto all = rank_entities(scores, 100);
  CHECK(all.size() == 5);
  CHECK(all.back().first == "bravo");

  CHECK_THROWS_AS(rank_entities(scores, 0), ConfigError);
}

TEST_CASE("ranking agrees with a full stable sort") {
  btx::Rng rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, double>> scores;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i)
      scores.emplace_back("e" + std::to_string(rng.below(30)), static_cast<double>(rng.below(5)) / 4.0);
    auto expected = scores;
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    const std::size_t q = 1 + rng.below(n);
    expected.resize(std::min(q, expected.size()));
    CHECK(rank_entities(scores, q) == expected);
  }
}

TEST_CASE("idf matches the reference formula") {
  std::vector<std::vector<std::string>> docs = {
      {"apple", "banana", "apple"}, {"banana"}, {"cherry", "banana"}, {"apple"}};
  const std::vector<std::string> vocab = {"apple", "banana", "cherry", "durian"};
  const auto idf = compute_idf(docs, vocab);
  REQUIRE(idf.size() == 4);
  CHECK(idf[0] == doctest::Approx(oracle::idf_value(4, 2)).epsilon(1e-12));
  CHECK(idf[1] == doctest::Approx(oracle::idf_value(4, 3)).epsilon(1e-12));
  CHECK(idf[2] == doctest::Approx(oracle::idf_value(4, 1)).epsilon(1e-12));
  CHECK(idf[3] == doctest::Approx(oracle::idf_value(4, 0)).epsilon(1e-12));
  // Repeats inside one document must not inflate document frequency.
  CHECK(idf[0] > idf[1]);
}

TEST_CASE("tfidf features match the reference row") {
  DetectorModel model;
  model.order = EntityOrder::Unigram;
  model.vocabulary = {"apple", "banana", "cherry"};
  model.scores = {0.3, 0.2, 0.1};
  model.idf = {1.5, 1.0, 2.0};
  model.weights = {0.0, 0.0, 0.0};
  model.rebuild_index();

  const auto d = doc("x", "apple banana apple durian.", Group::Human);
  const auto row = tfidf_featurize(d, model);
  const auto expected = oracle::tfidf_row({"apple", "banana", "apple", "durian"}, model.vocabulary, model.idf);
  REQUIRE(row.size() == 3);
  for (std::size_t i = 0; i < row.size(); ++i) CHECK(std::abs(row[i] - expected[i]) < 1e-12);

  double norm = 0.0;
  for (double v : row) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

  const auto zero = tfidf_featurize(doc("y", "durian only here.", Group::Human), model);
  CHECK(zero == std::vector<double>(3, 0.0));

  DetectorModel unfitted;
  CHECK_THROWS_AS(tfidf_featurize(d, unfitted), UnfittedModel);
}

TEST_CASE("logistic loss gradient agrees with finite differences") {
  btx::Rng rng(99);
  const std::size_t n = 12, dims = 5;
  std::vector<std::vector<double>> features(n, std::vector<double>(dims));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dims; ++j) features[i][j] = rng.uniform() * 2.0 - 1.0;
    labels[i] = i % 2 == 0 ? 1 : 0;
  }
  const double l2 = 1e-4;

  auto loss_at = [&](const std::vector<double>& params) {
    std::vector<double> w(params.begin(), params.end() - 1);
    return lr_loss(features, labels, w, params.back(), l2);
  };

  for (int point = 0; point < 5; ++point) {
    std::vector<double> params(dims + 1);
    for (auto& p : params) p = rng.uniform() * 4.0 - 2.0;
    const std::vector<double> w(params.begin(), params.end() - 1);
    const double bias = params.back();

    // Analytic gradient of the loss the trainer descends.
    std::vector<double> analytic(dims + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = bias;
      for (std::size_t j = 0; j < dims; ++j) z += w[j] * features[i][j];
      const double err = 1.0 / (1.0 + std::exp(-z)) - labels[i];
      for (std::size_t j = 0; j < dims; ++j) analytic[j] += err * features[i][j];
      analytic[dims] += err;
    }
    for (std::size_t j = 0; j < dims; ++j) analytic[j] = analytic[j] / n + l2 * w[j];
    analytic[dims] /= n;

    const auto numeric = oracle::finite_difference_gradient(loss_at, params);
    for (std::size_t j = 0; j <= dims; ++j) {
      CAPTURE(point);
      CAPTURE(j);
      const double scale = std::max({std::abs(analytic[j]), std::abs(numeric[j]), 1e-8});
      CHECK(std::abs(analytic[j] - numeric[j]) / scale < 1e-4);
    }
  }
}

TEST_CASE("training separates a separable set and drives the loss down") {
  const std::vector<std::vector<double>> features = {{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {0.1, 0.9}};
  const std::vector<int> labels = {1, 1, 0, 0};

  LrHyper hyper;
  const auto fit = train_lr(features, labels, hyper);
  CHECK(fit.epochs_run > 10);
  CHECK(fit.weights[0] > 0.0);
  CHECK(fit.weights[1] < 0.0);

  const double initial = lr_loss(features, labels, {0.0, 0.0}, 0.0, hyper.l2);
  CHECK(fit.final_loss < initial);

  double prev = initial;
  for (std::size_t epochs : {1u, 5u, 25u, 125u, 625u}) {
    LrHyper partial = hyper;
    partial.epochs = epochs;
    const auto f = train_lr(features, labels, partial);
    CHECK(f.final_loss <= prev + 1e-12);
    prev = f.final_loss;
  }

  auto prob = [&](const std::vector<double>& x) {
    double z = fit.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += fit.weights[j] * x[j];
    return 1.0 / (1.0 + std::exp(-z));
  };
  CHECK(prob({1.0, 0.0}) > 0.9);
  CHECK(prob({0.0, 1.0}) < 0.1);
}

TEST_CASE("training edge cases") {
  // Indistinguishable feature rows with balanced labels: the gradient is zero
  // at the start, so training stops immediately at the 0.5 prior.
  const std::vector<std::vector<double>> same = {{0.5, 0.5}, {0.5, 0.5}};
  const auto fit = train_lr(same, {1, 0}, LrHyper{});
  CHECK(fit.epochs_run == 0);
  CHECK(fit.weights == std::vector<double>{0.0, 0.0});
  CHECK(fit.bias == 0.0);

  CHECK_THROWS_AS(train_lr({{1.0}, {2.0}}, {1, 1}, LrHyper{}), DegenerateLabels);
  CHECK_THROWS_AS(train_lr({}, {}, LrHyper{}), DomainError);
  CHECK_THROWS_AS(train_lr({{1.0}, {1.0, 2.0}}, {1, 0}, LrHyper{}), DomainError);
}

TEST_CASE("training is deterministic") {
  btx::Rng rng(31337);
  std::vector<std::vector<double>> features(20, std::vector<double>(8));
  std::vector<int> labels(20);
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (auto& v : features[i]) v = rng.uniform();
    labels[i] = i < 10 ? 1 : 0;
  }
  const auto a = train_lr(features, labels, LrHyper{});
  const auto b = train_lr(features, labels, LrHyper{});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.epochs_run == b.epochs_run);
}

TEST_CASE("fitting in plain entropy mode ignores back-translations") {
  auto corpus = marker_corpus();
  TrainOptions options;
  options.mode = ScoringMode::Esas;
  options.mesas.q = 8;

  const auto model = fit_detector(corpus, EntityOrder::Unigram, options);
  REQUIRE(model.fitted());
  CHECK(model.mode == ScoringMode::Esas);
  CHECK(model.vocabulary.size() == 8);

  // "dig" never occurs in a human or AI document, so it cannot enter an
  // H-vs-A vocabulary.
  CHECK(model.index().count("dig") == 0);
  // Both markers are AI-exclusive; "tapestry" occurs twice per document and
  // so carries more of the corpus mass.
  REQUIRE(model.index().count("delve") == 1);
  REQUIRE(model.index().count("tapestry") == 1);
  const auto& idx = model.index();
  CHECK(model.scores[idx.at("tapestry")] > model.scores[idx.at("delve")]);

  std::vector<Document> no_bt;
  for (const auto& d : corpus)
    if (d.group != Group::BackTranslated) no_bt.push_back(d);
  const auto model2 = fit_detector(no_bt, EntityOrder::Unigram, options);
  CHECK(model_to_json(model2) == model_to_json(model));
}

TEST_CASE("fitting in multi-scenario mode penalizes washable markers") {
  auto corpus = marker_corpus();
  TrainOptions options;
  options.mode = ScoringMode::Mesas;
  options.mesas.q = 8;

  const auto model = fit_detector(corpus, EntityOrder::Unigram, options);
  CHECK(model.mode == ScoringMode::Mesas);
  const auto& idx = model.index();
  REQUIRE(idx.count("tapestry") == 1);

  // "delve" vanishes under back-translation, which the negative scenario
  // weights punish; "tapestry" survives and must outrank it.
  auto [counts, stats] = count_entities(corpus, EntityOrder::Unigram);
  double delve = 0.0, tapestry = 0.0;
  for (const auto& c : counts) {
    if (c.entity == "delve") delve = mesas_score(c, options.mesas, stats);
    if (c.entity == "tapestry") tapestry = mesas_score(c, options.mesas, stats);
  }
  CHECK(tapestry > delve);
  CHECK(model.scores[idx.at("tapestry")] == doctest::Approx(tapestry).epsilon(1e-12));

  std::vector<Document> no_bt;
  for (const auto& d : corpus)
    if (d.group != Group::BackTranslated) no_bt.push_back(d);
  CHECK_THROWS_AS(fit_detector(no_bt, EntityOrder::Unigram, options), MissingGroup);
}

TEST_CASE("fitted detectors separate the training groups") {
  auto corpus = marker_corpus();
  TrainOptions options;
  options.mesas.q = 32;

  const auto ensemble = fit_ensemble(corpus, options);
  CHECK(ensemble.uni.order == EntityOrder::Unigram);
  CHECK(ensemble.bi.order == EntityOrder::Bigram);

  const auto human = doc("h9", "The cozy cat sat on a warm mat today. It purred and slept.", Group::Human);
  const auto ai = doc("a9", "We delve into a rich tapestry of ideas. The tapestry shows patterns.", Group::AI);
  CHECK(predict(human, ensemble.uni) < 0.5);
  CHECK(predict(ai, ensemble.uni) > 0.5);
  CHECK(ensemble_predict(ai, ensemble) ==
        doctest::Approx(0.5 * (predict(ai, ensemble.uni) + predict(ai, ensemble.bi))).epsilon(1e-15));
  CHECK(ensemble_predict(ai, ensemble) > ensemble_predict(human, ensemble));
}

TEST_CASE("fitting is deterministic") {
  auto corpus = marker_corpus();
  TrainOptions options;
  options.mesas.q = 16;
  CHECK(model_to_json(fit_detector(corpus, EntityOrder::Unigram, options)) ==
        model_to_json(fit_detector(corpus, EntityOrder::Unigram, options)));
}

TEST_CASE("model serialization round-trips bit-exactly") {
  auto corpus = marker_corpus();
  TrainOptions options;
  options.mesas.q = 24;
  options.hyper.epochs = 400;
  const auto model = fit_detector(corpus, EntityOrder::Unigram, options);

  const std::string json = model_to_json(model);
  const auto restored = model_from_json(json);
  CHECK(model_to_json(restored) == json);
  CHECK(restored.order == model.order);
  CHECK(restored.mode == model.mode);
  CHECK(restored.hyper.epochs == 400);

  const auto probe = doc("p", "A rich tapestry of cozy patterns. We delve in today.", Group::AI);
  CHECK(predict(probe, restored) == predict(probe, model));

  const auto ensemble = fit_ensemble(corpus, options);
  const std::string ejson = ensemble_to_json(ensemble);
  const auto erestored = ensemble_from_json(ejson);
  CHECK(ensemble_to_json(erestored) == ejson);
  CHECK(ensemble_predict(probe, erestored) == ensemble_predict(probe, ensemble));
}

TEST_CASE("model deserialization rejects malformed input") {
  CHECK_THROWS_AS(model_from_json("not json"), SchemaViolation);
  CHECK_THROWS_AS(model_from_json("{}"), SchemaViolation);
  CHECK_THROWS_AS(model_from_json(R"({"version":2,"order":"unigram"})"), SchemaViolation);
  CHECK_THROWS_AS(model_from_json(R"({"version":1,"order":"trigram","vocabulary":[],"scores":[],"idf":[],)"
                                  R"("weights":[],"bias":0.0})"),
                  SchemaViolation);
  CHECK_THROWS_AS(model_from_json(R"({"version":1,"order":"unigram","vocabulary":["a"],"scores":[],"idf":[1.0],)"
                                  R"("weights":[0.1],"bias":0.0})"),
                  SchemaViolation);
  CHECK_THROWS_AS(ensemble_from_json(R"({"version":1,"uni":{}})"), SchemaViolation);

  CHECK(scoring_mode_from_string("esas") == ScoringMode::Esas);
  CHECK(scoring_mode_from_string("mesas") == ScoringMode::Mesas);
  CHECK_THROWS_AS(scoring_mode_from_string("both"), ConfigError);
}
