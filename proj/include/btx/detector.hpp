#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "btx/document.hpp"
#include "btx/text.hpp"

namespace btx {

// Occurrence counts of one entity, split by authorship group. Only Human,
// AI, and BackTranslated documents participate in counting.
struct EntityCounts {
  std::string entity;
  std::size_t n_total = 0;
  std::array<std::size_t, 3> by_group{};  // Human, AI, BackTranslated

  static std::size_t group_slot(Group g);
  std::size_t group_count(Group g) const { return by_group[group_slot(g)]; }
};

struct CorpusStats {
  std::size_t total_entity_occurrences = 0;  // N: all occurrences of all entities
  std::size_t vocabulary_size = 0;           // distinct entities
  std::array<std::size_t, 3> doc_counts{};   // documents per group

  std::size_t docs(Group g) const { return doc_counts[EntityCounts::group_slot(g)]; }
};

// Multiset entity occurrences per group, aggregated over the corpus.
// Entities come back lexicographically sorted. Throws EmptyCorpus; a
// document outside the three counting groups is a DomainError.
std::pair<std::vector<EntityCounts>, CorpusStats> count_entities(const std::vector<Document>& corpus,
                                                                 EntityOrder order,
                                                                 const AbbreviationSet& abbrev = AbbreviationSet::builtin());

// Global denominator N for the entropy score. The occurrence-total reading
// is the default; the vocabulary-size reading rescales every score by the
// same positive constant, so rankings are identical either way.
enum class EsasScale { OccurrenceShare, VocabularyShare };
EsasScale esas_scale_from_string(const std::string& name);
const char* to_string(EsasScale scale);

// Entropy-gap score of one entity for positive vs negative group sets:
// (n/N) * (1 + p*log2(p) + (1-p)*log2(1-p)), where n is the entity count
// restricted to the participating groups, p the positive share of n, and
// N the corpus-wide occurrence total (or vocabulary size, per scale).
// 0*log2(0) == 0. Score lies in [0, n/N]: 0 when balanced, n/N when
// exclusive to one side. Throws ZeroFrequency when n == 0.
double esas_score(const EntityCounts& counts, const std::vector<Group>& positive_groups,
                  const std::vector<Group>& negative_groups, const CorpusStats& stats,
                  EsasScale scale = EsasScale::OccurrenceShare);

// Weights and cutoff for the six-scenario weighted sum. The scenarios are
// fixed: {H}v{A}, {H}v{B}, {H}v{A,B}, {A}v{B}, {A}v{B,H}, {B}v{A,H}.
struct MesasConfig {
  std::array<double, 6> alphas{0.5, 0.5, 0.5, -0.5, -0.5, -0.5};
  std::size_t q = 4000;
  EsasScale scale = EsasScale::OccurrenceShare;
};

// Sum over the six scenarios of alpha_k * esas_score(scenario_k). A
// scenario whose restricted count is zero contributes exactly 0. Throws
// MissingGroup unless all of H, A, and B have documents in the corpus.
double mesas_score(const EntityCounts& counts, const MesasConfig& cfg, const CorpusStats& stats);

// Top-q by score descending, ties broken lexicographically; returns all
// entities when fewer than q exist. q must be >= 1.
std::vector<std::pair<std::string, double>> rank_entities(std::vector<std::pair<std::string, double>> scores,
                                                          std::size_t q);

struct LrHyper {
  double learning_rate = 0.1;
  std::size_t epochs = 2000;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

enum class ScoringMode { Esas, Mesas };
ScoringMode scoring_mode_from_string(const std::string& name);
const char* to_string(ScoringMode mode);

// A fitted single-order detector: scored vocabulary, per-entity idf, and
// logistic-regression weights, all index-aligned.
struct DetectorModel {
  int version = 1;
  EntityOrder order = EntityOrder::Unigram;
  ScoringMode mode = ScoringMode::Mesas;
  std::vector<std::string> vocabulary;
  std::vector<double> scores;
  std::vector<double> idf;
  std::vector<double> weights;
  double bias = 0.0;
  LrHyper hyper;

  bool fitted() const {
    return !vocabulary.empty() && idf.size() == vocabulary.size() && weights.size() == vocabulary.size();
  }
  // Rebuilds the entity -> column lookup; called by fit/deserialize. Models
  // assembled by hand must call it before featurizing.
  void rebuild_index();
  const std::unordered_map<std::string, std::size_t>& index() const { return index_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

struct EnsembleModel {
  DetectorModel uni;  // order = Unigram
  DetectorModel bi;   // order = Bigram
};

// Raw term count times idf per vocabulary entity, L2-normalized (norm is 1
// or 0). Entities outside the vocabulary are ignored. Throws UnfittedModel.
std::vector<double> tfidf_featurize(const Document& doc, const DetectorModel& model,
                                    const AbbreviationSet& abbrev = AbbreviationSet::builtin());

// idf(e) = ln((1+D)/(1+df(e))) + 1 over the D training documents.
std::vector<double> compute_idf(const std::vector<std::vector<std::string>>& doc_entities,
                                const std::vector<std::string>& vocabulary);

struct LrFit {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t epochs_run = 0;
  double final_loss = 0.0;
};

// L2-regularized logistic loss (mean cross-entropy + l2/2 * |w|^2; the bias
// is not regularized).
double lr_loss(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
               const std::vector<double>& weights, double bias, double l2);

// Full-batch gradient descent from zero initialization; deterministic.
// Stops early once the gradient max-norm drops below 1e-6. Labels are
// 0 = human, 1 = AI; throws DegenerateLabels when one class is missing.
LrFit train_lr(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
               const LrHyper& hyper);

// sigmoid(w.x + b) on the document's TF-IDF vector; near 0 means human,
// near 1 means AI-generated. Throws UnfittedModel.
double predict(const Document& doc, const DetectorModel& model,
               const AbbreviationSet& abbrev = AbbreviationSet::builtin());

// Mean of the unigram and bigram probabilities.
double ensemble_predict(const Document& doc, const EnsembleModel& ensemble,
                        const AbbreviationSet& abbrev = AbbreviationSet::builtin());

struct TrainOptions {
  ScoringMode mode = ScoringMode::Mesas;
  MesasConfig mesas;  // alphas and the top-q cutoff (q applies to both modes)
  LrHyper hyper;
};

// End-to-end fit: count entities, score them (ESAS scores H-vs-A over H/A
// documents only; MESAS additionally requires B), keep the top q as the
// vocabulary, compute idf over the H/A training documents, and train the
// regression on H (label 0) vs A (label 1). BackTranslated documents shape
// the vocabulary in MESAS mode but are never regression examples.
DetectorModel fit_detector(const std::vector<Document>& corpus, EntityOrder order, const TrainOptions& options,
                           const AbbreviationSet& abbrev = AbbreviationSet::builtin());

EnsembleModel fit_ensemble(const std::vector<Document>& corpus, const TrainOptions& options,
                           const AbbreviationSet& abbrev = AbbreviationSet::builtin());

// Versioned JSON with shortest round-trip floats; deserialization restores
// a model that predicts bit-identically.
std::string model_to_json(const DetectorModel& model);
DetectorModel model_from_json(std::string_view json);
std::string ensemble_to_json(const EnsembleModel& ensemble);
EnsembleModel ensemble_from_json(std::string_view json);

}  // namespace btx
