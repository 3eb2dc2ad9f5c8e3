#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "btx/combiner.hpp"
#include "btx/document.hpp"
#include "btx/similarity.hpp"
#include "btx/translation.hpp"

namespace btx {

// Detector scores for one evaluation condition.
struct ScoreSet {
  std::vector<double> human_scores;
  std::vector<double> ai_scores;
  std::string condition;
  std::string dataset;
};

struct EvaluationReport {
  std::string condition;
  std::string dataset;
  std::size_t n_human = 0;
  std::size_t n_ai = 0;
  double threshold = 0.0;
  double target_fpr = 0.0;
  double achieved_fpr = 0.0;
  double tpr = 0.0;
};

// Smallest observed human score t such that the fraction of human scores
// strictly greater than t is <= target_fpr; classification is score > t.
// The achieved rate is reported exactly, even when the sample is too small
// to stay under the target. Throws EmptyScores; target must lie in (0, 1).
std::pair<double, double> calibrate_threshold(const std::vector<double>& human_scores, double target_fpr);

// Calibrates on the human scores, then reports the fraction of AI scores
// above the threshold.
EvaluationReport tpr_at_fpr(const ScoreSet& scores, double target_fpr);

// The detector seen as a plain score oracle, so ESAS, MESAS, or anything
// external plugs into the harnesses uniformly.
using ScoreFn = std::function<double(const Document&)>;

// Scores documents with a bounded worker pool; output order matches input
// order regardless of jobs. jobs == 0 picks the hardware parallelism.
std::vector<double> score_documents(const std::vector<Document>& docs, const ScoreFn& score, std::size_t jobs = 1);

// Shared inputs for the ablation harnesses: held-out human scores, one
// back-translation set per AI document, and the score oracle. The threshold
// is calibrated once from the human scores and reused across conditions.
struct AblationContext {
  std::vector<double> human_scores;
  std::vector<Document> ai_docs;              // originals, pre-manipulation
  std::vector<BackTranslationSet> ai_sets;    // aligned with ai_docs
  ScoreFn score;
  SimilarityScorer* scorer = nullptr;         // sentence alignment; required
  CombineStrategy strategy = CombineStrategy::wer_max();
  std::uint64_t random_seed = 0;              // seed for the random-pick row
  double target_fpr = 0.01;
  std::string dataset;
  std::size_t jobs = 1;
};

struct AblationRow {
  EvaluationReport report;
  double delta_tpr = 0.0;  // report.tpr minus the baseline row's tpr
};

// Baseline with every language, then one row per excluded language with the
// combination re-run on the remaining m-1. Requires m >= 2.
std::vector<AblationRow> leave_one_out(const AblationContext& context);

// Removes order[0..k) for k = 0..m-1 and reports TPR minus the k=0
// baseline. The order must be distinct registered languages present in the
// sets.
std::vector<AblationRow> sequential_removal(const AblationContext& context, const std::vector<std::string>& order);

// Four rows on identical inputs and one shared threshold: the original AI
// documents, then random / wer_min / wer_max combinations.
std::vector<AblationRow> combiner_comparison(const AblationContext& context);

// CSV with header condition,dataset,n_human,n_ai,threshold,target_fpr,
// achieved_fpr,tpr. Doubles print in shortest round-trip form.
std::string reports_to_csv(const std::vector<EvaluationReport>& reports);
std::string reports_to_json(const std::vector<EvaluationReport>& reports);

std::string ablation_to_csv(const std::vector<AblationRow>& rows);
std::string ablation_to_json(const std::vector<AblationRow>& rows);

}  // namespace btx
