#include "btx/detector.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "btx/errors.hpp"
#include "json.hpp"

namespace btx {

namespace {

double plog2(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::size_t EntityCounts::group_slot(Group g) {
  switch (g) {
    case Group::Human:
      return 0;
    case Group::AI:
      return 1;
    case Group::BackTranslated:
      return 2;
    case Group::Manipulated:
      break;
  }
  throw DomainError("manipulated documents do not participate in entity counting");
}

std::pair<std::vector<EntityCounts>, CorpusStats> count_entities(const std::vector<Document>& corpus,
                                                                 EntityOrder order, const AbbreviationSet& abbrev) {
  if (corpus.empty()) throw EmptyCorpus("count_entities: empty corpus");
  std::unordered_map<std::string, std::array<std::size_t, 3>> table;
  CorpusStats stats;
  for (const auto& doc : corpus) {
    const std::size_t slot = EntityCounts::group_slot(doc.group);
    ++stats.doc_counts[slot];
    for (auto& entity : extract_entities(doc.body, order, abbrev)) {
      ++table[std::move(entity)][slot];
      ++stats.total_entity_occurrences;
    }
  }
  std::vector<EntityCounts> counts;
  counts.reserve(table.size());
  for (auto& [entity, by_group] : table) {
    EntityCounts c;
    c.entity = entity;
    c.by_group = by_group;
    c.n_total = by_group[0] + by_group[1] + by_group[2];
    counts.push_back(std::move(c));
  }
  std::sort(counts.begin(), counts.end(),
            [](const EntityCounts& a, const EntityCounts& b) { return a.entity < b.entity; });
  stats.vocabulary_size = counts.size();
  return {std::move(counts), stats};
}

EsasScale esas_scale_from_string(const std::string& name) {
  if (name == "occurrence_share") return EsasScale::OccurrenceShare;
  if (name == "vocabulary_share") return EsasScale::VocabularyShare;
  throw ConfigError("unknown entropy scale: " + name + " (use occurrence_share or vocabulary_share)");
}

const char* to_string(EsasScale scale) {
  return scale == EsasScale::OccurrenceShare ? "occurrence_share" : "vocabulary_share";
}

double esas_score(const EntityCounts& counts, const std::vector<Group>& positive_groups,
                  const std::vector<Group>& negative_groups, const CorpusStats& stats, EsasScale scale) {
  if (positive_groups.empty() || negative_groups.empty())
    throw DomainError("esas_score: group sets must be non-empty");
  for (const Group g : positive_groups)
    for (const Group h : negative_groups)
      if (g == h) throw DomainError("esas_score: group sets must be disjoint");
  const std::size_t denom =
      scale == EsasScale::OccurrenceShare ? stats.total_entity_occurrences : stats.vocabulary_size;
  if (denom == 0) throw EmptyCorpus("esas_score: corpus has no entities");

  std::size_t n_pos = 0, n_neg = 0;
  for (const Group g : positive_groups) n_pos += counts.group_count(g);
  for (const Group g : negative_groups) n_neg += counts.group_count(g);
  const std::size_t n = n_pos + n_neg;
  if (n == 0) throw ZeroFrequency("esas_score: entity '" + counts.entity + "' absent from participating groups");

  const double p = static_cast<double>(n_pos) / static_cast<double>(n);
  const double share = static_cast<double>(n) / static_cast<double>(denom);
  return share * (1.0 + plog2(p) + plog2(1.0 - p));
}

double mesas_score(const EntityCounts& counts, const MesasConfig& cfg, const CorpusStats& stats) {
  for (const Group g : {Group::Human, Group::AI, Group::BackTranslated})
    if (stats.docs(g) == 0)
      throw MissingGroup(std::string("mesas_score: corpus lacks ") + to_string(g) + " documents");

  static const std::array<std::pair<std::vector<Group>, std::vector<Group>>, 6> scenarios = {{
      {{Group::Human}, {Group::AI}},
      {{Group::Human}, {Group::BackTranslated}},
      {{Group::Human}, {Group::AI, Group::BackTranslated}},
      {{Group::AI}, {Group::BackTranslated}},
      {{Group::AI}, {Group::BackTranslated, Group::Human}},
      {{Group::BackTranslated}, {Group::AI, Group::Human}},
  }};

  double sum = 0.0;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    std::size_t n = 0;
    for (const Group g : scenarios[k].first) n += counts.group_count(g);
    for (const Group g : scenarios[k].second) n += counts.group_count(g);
    if (n == 0) continue;  // no occurrences, no information
    sum += cfg.alphas[k] * esas_score(counts, scenarios[k].first, scenarios[k].second, stats, cfg.scale);
  }
  return sum;
}

std::vector<std::pair<std::string, double>> rank_entities(std::vector<std::pair<std::string, double>> scores,
                                                          std::size_t q) {
  if (q < 1) throw ConfigError("rank_entities: q must be at least 1");
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (scores.size() > q) scores.resize(q);
  return scores;
}

ScoringMode scoring_mode_from_string(const std::string& name) {
  if (name == "esas") return ScoringMode::Esas;
  if (name == "mesas") return ScoringMode::Mesas;
  throw ConfigError("unknown scoring mode: " + name + " (use esas or mesas)");
}

const char* to_string(ScoringMode mode) { return mode == ScoringMode::Esas ? "esas" : "mesas"; }

void DetectorModel::rebuild_index() {
  index_.clear();
  index_.reserve(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index_.emplace(vocabulary[i], i);
}

std::vector<double> compute_idf(const std::vector<std::vector<std::string>>& doc_entities,
                                const std::vector<std::string>& vocabulary) {
  std::unordered_map<std::string, std::size_t> df;
  df.reserve(vocabulary.size());
  for (const auto& entities : doc_entities) {
    std::unordered_set<std::string> seen(entities.begin(), entities.end());
    for (const auto& e : seen) ++df[e];
  }
  const double d = static_cast<double>(doc_entities.size());
  std::vector<double> idf(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    const auto it = df.find(vocabulary[i]);
    const double freq = it == df.end() ? 0.0 : static_cast<double>(it->second);
    idf[i] = std::log((1.0 + d) / (1.0 + freq)) + 1.0;
  }
  return idf;
}

namespace {

std::vector<double> featurize_entities(const std::vector<std::string>& entities, const DetectorModel& model) {
  std::vector<double> row(model.vocabulary.size(), 0.0);
  const auto& index = model.index();
  if (index.size() == model.vocabulary.size()) {
    for (const auto& e : entities) {
      const auto it = index.find(e);
      if (it != index.end()) row[it->second] += 1.0;
    }
  } else {  // hand-assembled model without a rebuilt index
    std::unordered_map<std::string, std::size_t> local;
    local.reserve(model.vocabulary.size());
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i) local.emplace(model.vocabulary[i], i);
    for (const auto& e : entities) {
      const auto it = local.find(e);
      if (it != local.end()) row[it->second] += 1.0;
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] *= model.idf[i];
    norm += row[i] * row[i];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& v : row) v /= norm;
  return row;
}

}  // namespace

std::vector<double> tfidf_featurize(const Document& doc, const DetectorModel& model, const AbbreviationSet& abbrev) {
  if (!model.fitted()) throw UnfittedModel("tfidf_featurize: model is not fitted");
  return featurize_entities(extract_entities(doc.body, model.order, abbrev), model);
}

double lr_loss(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
               const std::vector<double>& weights, double bias, double l2) {
  const double n = static_cast<double>(features.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double p = std::clamp(sigmoid(dot(weights, features[i]) + bias), 1e-15, 1.0 - 1e-15);
    loss += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  loss /= n;
  double reg = 0.0;
  for (const double w : weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

LrFit train_lr(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
               const LrHyper& hyper) {
  if (features.empty() || features.size() != labels.size())
    throw DomainError("train_lr: features and labels must be non-empty and aligned");
  const std::size_t d = features[0].size();
  for (const auto& row : features)
    if (row.size() != d) throw DomainError("train_lr: ragged feature matrix");
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!has_pos || !has_neg) throw DegenerateLabels("train_lr: need at least one example of each class");

  const double n = static_cast<double>(features.size());
  LrFit fit;
  fit.weights.assign(d, 0.0);
  std::vector<double> grad(d);
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double err = sigmoid(dot(fit.weights, features[i]) + fit.bias) - static_cast<double>(labels[i]);
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * features[i][j];
      grad_bias += err;
    }
    grad_bias /= n;
    double max_norm = std::abs(grad_bias);
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = grad[j] / n + hyper.l2 * fit.weights[j];
      max_norm = std::max(max_norm, std::abs(grad[j]));
    }
    if (max_norm < 1e-6) break;
    for (std::size_t j = 0; j < d; ++j) fit.weights[j] -= hyper.learning_rate * grad[j];
    fit.bias -= hyper.learning_rate * grad_bias;
    fit.epochs_run = epoch + 1;
  }
  fit.final_loss = lr_loss(features, labels, fit.weights, fit.bias, hyper.l2);
  return fit;
}

double predict(const Document& doc, const DetectorModel& model, const AbbreviationSet& abbrev) {
  if (!model.fitted()) throw UnfittedModel("predict: model is not fitted");
  const auto x = tfidf_featurize(doc, model, abbrev);
  return sigmoid(dot(model.weights, x) + model.bias);
}

double ensemble_predict(const Document& doc, const EnsembleModel& ensemble, const AbbreviationSet& abbrev) {
  if (ensemble.uni.order != EntityOrder::Unigram || ensemble.bi.order != EntityOrder::Bigram)
    throw DomainError("ensemble_predict: sub-model orders are wrong");
  return 0.5 * (predict(doc, ensemble.uni, abbrev) + predict(doc, ensemble.bi, abbrev));
}

DetectorModel fit_detector(const std::vector<Document>& corpus, EntityOrder order, const TrainOptions& options,
                           const AbbreviationSet& abbrev) {
  std::vector<Document> counting;
  counting.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (options.mode == ScoringMode::Esas && doc.group == Group::BackTranslated) continue;
    counting.push_back(doc);
  }
  const auto [counts, stats] = count_entities(counting, order, abbrev);

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(counts.size());
  for (const auto& c : counts) {
    const double s = options.mode == ScoringMode::Esas
                         ? esas_score(c, {Group::AI}, {Group::Human}, stats, options.mesas.scale)
                         : mesas_score(c, options.mesas, stats);
    scored.emplace_back(c.entity, s);
  }
  auto top = rank_entities(std::move(scored), options.mesas.q);

  DetectorModel model;
  model.order = order;
  model.mode = options.mode;
  model.hyper = options.hyper;
  model.vocabulary.reserve(top.size());
  model.scores.reserve(top.size());
  for (auto& [entity, score] : top) {
    model.vocabulary.push_back(std::move(entity));
    model.scores.push_back(score);
  }

  // The regression always learns human vs AI; back-translations only shape
  // the vocabulary above.
  std::vector<std::vector<std::string>> train_entities;
  std::vector<int> labels;
  for (const auto& doc : corpus) {
    if (doc.group == Group::Human || doc.group == Group::AI) {
      train_entities.push_back(extract_entities(doc.body, order, abbrev));
      labels.push_back(doc.group == Group::AI ? 1 : 0);
    }
  }
  model.idf = compute_idf(train_entities, model.vocabulary);
  model.rebuild_index();

  std::vector<std::vector<double>> features;
  features.reserve(train_entities.size());
  for (const auto& entities : train_entities) features.push_back(featurize_entities(entities, model));
  LrFit fit = train_lr(features, labels, options.hyper);
  model.weights = std::move(fit.weights);
  model.bias = fit.bias;
  return model;
}

EnsembleModel fit_ensemble(const std::vector<Document>& corpus, const TrainOptions& options,
                           const AbbreviationSet& abbrev) {
  EnsembleModel ensemble;
  ensemble.uni = fit_detector(corpus, EntityOrder::Unigram, options, abbrev);
  ensemble.bi = fit_detector(corpus, EntityOrder::Bigram, options, abbrev);
  return ensemble;
}

namespace {

nlohmann::ordered_json model_json(const DetectorModel& m) {
  return nlohmann::ordered_json{
      {"version", m.version},
      {"order", m.order == EntityOrder::Unigram ? "unigram" : "bigram"},
      {"vocabulary", m.vocabulary},
      {"scores", m.scores},
      {"idf", m.idf},
      {"weights", m.weights},
      {"bias", m.bias},
      {"hyper",
       nlohmann::ordered_json{{"mode", to_string(m.mode)},
                              {"learning_rate", m.hyper.learning_rate},
                              {"epochs", m.hyper.epochs},
                              {"l2", m.hyper.l2},
                              {"seed", m.hyper.seed}}},
  };
}

DetectorModel model_from(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) throw SchemaViolation(0, "version", "model file lacks a version");
  if (j["version"].get<int>() != 1)
    throw SchemaViolation(0, "version", "unsupported model version " + j["version"].dump());
  DetectorModel m;
  const std::string order = j.at("order").get<std::string>();
  if (order == "unigram")
    m.order = EntityOrder::Unigram;
  else if (order == "bigram")
    m.order = EntityOrder::Bigram;
  else
    throw SchemaViolation(0, "order", "unknown order '" + order + "'");
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.scores = j.at("scores").get<std::vector<double>>();
  m.idf = j.at("idf").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  if (j.contains("hyper")) {
    const auto& h = j["hyper"];
    if (h.contains("mode")) m.mode = scoring_mode_from_string(h["mode"].get<std::string>());
    if (h.contains("learning_rate")) m.hyper.learning_rate = h["learning_rate"].get<double>();
    if (h.contains("epochs")) m.hyper.epochs = h["epochs"].get<std::size_t>();
    if (h.contains("l2")) m.hyper.l2 = h["l2"].get<double>();
    if (h.contains("seed")) m.hyper.seed = h["seed"].get<std::uint64_t>();
  }
  if (m.scores.size() != m.vocabulary.size() || m.idf.size() != m.vocabulary.size() ||
      m.weights.size() != m.vocabulary.size())
    throw SchemaViolation(0, "vocabulary", "model arrays are not index-aligned");
  m.rebuild_index();
  return m;
}

}  // namespace

std::string model_to_json(const DetectorModel& model) { return model_json(model).dump(2) + "\n"; }

DetectorModel model_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded()) throw SchemaViolation(0, "model", "model file is not valid JSON");
  return model_from(j);
}

std::string ensemble_to_json(const EnsembleModel& ensemble) {
  nlohmann::ordered_json j{{"version", 1}, {"uni", model_json(ensemble.uni)}, {"bi", model_json(ensemble.bi)}};
  return j.dump(2) + "\n";
}

EnsembleModel ensemble_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("uni") || !j.contains("bi"))
    throw SchemaViolation(0, "ensemble", "ensemble file must hold uni and bi models");
  EnsembleModel e;
  e.uni = model_from(j["uni"]);
  e.bi = model_from(j["bi"]);
  if (e.uni.order != EntityOrder::Unigram || e.bi.order != EntityOrder::Bigram)
    throw SchemaViolation(0, "order", "ensemble sub-model orders are swapped");
  return e;
}

}  // namespace btx
