#include "btx/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

#include "btx/errors.hpp"
#include "json.hpp"

namespace btx {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
// failure after everyone joins.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double fraction_above(const std::vector<double>& sorted_scores, double threshold) {
  const auto it = std::upper_bound(sorted_scores.begin(), sorted_scores.end(), threshold);
  return static_cast<double>(sorted_scores.end() - it) / static_cast<double>(sorted_scores.size());
}

}  // namespace

std::pair<double, double> calibrate_threshold(const std::vector<double>& human_scores, double target_fpr) {
  if (human_scores.empty()) throw EmptyScores("calibrate_threshold: no human scores");
  if (!(target_fpr > 0.0 && target_fpr < 1.0))
    throw ConfigError("calibrate_threshold: target FPR must lie in (0, 1)");

  std::vector<double> sorted = human_scores;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> candidates = sorted;
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double t : candidates) {
    const double fpr = fraction_above(sorted, t);
    if (fpr <= target_fpr) return {t, fpr};
  }
  // Unreachable: the largest observed value always achieves an FPR of 0.
  return {candidates.back(), 0.0};
}

EvaluationReport tpr_at_fpr(const ScoreSet& scores, double target_fpr) {
  if (scores.ai_scores.empty()) throw EmptyScores("tpr_at_fpr: no AI scores");
  const auto [threshold, achieved] = calibrate_threshold(scores.human_scores, target_fpr);

  std::size_t hits = 0;
  for (double s : scores.ai_scores)
    if (s > threshold) ++hits;

  EvaluationReport report;
  report.condition = scores.condition;
  report.dataset = scores.dataset;
  report.n_human = scores.human_scores.size();
  report.n_ai = scores.ai_scores.size();
  report.threshold = threshold;
  report.target_fpr = target_fpr;
  report.achieved_fpr = achieved;
  report.tpr = static_cast<double>(hits) / static_cast<double>(scores.ai_scores.size());
  return report;
}

std::vector<double> score_documents(const std::vector<Document>& docs, const ScoreFn& score, std::size_t jobs) {
  if (!score) throw ConfigError("score_documents: no score function");
  std::vector<double> out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = score(docs[i]); });
  return out;
}

namespace {

void validate_context(const AblationContext& context) {
  if (!context.score) throw ConfigError("ablation: no score function");
  if (context.scorer == nullptr) throw ConfigError("ablation: no similarity scorer");
  if (context.ai_sets.empty()) throw EmptyScores("ablation: no AI documents");
  if (context.ai_docs.size() != context.ai_sets.size())
    throw DomainError("ablation: ai_docs and ai_sets must be aligned");
}

// Languages present in the precomputed sets, in their stored (registry)
// order.
std::vector<std::string> context_languages(const AblationContext& context) {
  std::vector<std::string> langs;
  for (const auto& [lang, bt] : context.ai_sets.front().entries) langs.push_back(lang);
  return langs;
}

template <typename Keep>
double manipulated_tpr(const AblationContext& context, const CombineStrategy& strategy, double threshold,
                       Keep&& keep) {
  std::vector<double> scores(context.ai_sets.size());
  parallel_for(context.ai_sets.size(), context.jobs, [&](std::size_t i) {
    const auto& full = context.ai_sets[i];
    BackTranslationSet filtered;
    filtered.original = full.original;
    for (const auto& entry : full.entries)
      if (keep(entry.first)) filtered.entries.push_back(entry);
    const auto manipulated = combine(filtered, strategy, *context.scorer);
    scores[i] = context.score(manipulated.doc);
  });
  std::size_t hits = 0;
  for (double s : scores)
    if (s > threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

EvaluationReport row_report(const AblationContext& context, std::string condition, double threshold,
                            double achieved, double tpr) {
  EvaluationReport report;
  report.condition = std::move(condition);
  report.dataset = context.dataset;
  report.n_human = context.human_scores.size();
  report.n_ai = context.ai_sets.size();
  report.threshold = threshold;
  report.target_fpr = context.target_fpr;
  report.achieved_fpr = achieved;
  report.tpr = tpr;
  return report;
}

}  // namespace

std::vector<AblationRow> leave_one_out(const AblationContext& context) {
  validate_context(context);
  const auto langs = context_languages(context);
  if (langs.size() < 2) throw DomainError("leave_one_out: need at least two languages");
  const auto [threshold, achieved] = calibrate_threshold(context.human_scores, context.target_fpr);

  std::vector<AblationRow> rows;
  const double baseline =
      manipulated_tpr(context, context.strategy, threshold, [](const std::string&) { return true; });
  rows.push_back({row_report(context, "baseline", threshold, achieved, baseline), 0.0});

  for (const auto& excluded : langs) {
    const double tpr = manipulated_tpr(context, context.strategy, threshold,
                                       [&](const std::string& lang) { return lang != excluded; });
    rows.push_back({row_report(context, "excluded=" + excluded, threshold, achieved, tpr), tpr - baseline});
  }
  return rows;
}

std::vector<AblationRow> sequential_removal(const AblationContext& context, const std::vector<std::string>& order) {
  validate_context(context);
  const auto langs = context_languages(context);
  std::vector<std::string> removal;
  for (const auto& raw : order) {
    const auto code = normalize_language(raw);
    if (std::find(langs.begin(), langs.end(), code) == langs.end())
      throw ConfigError("sequential_removal: language " + code + " is not in the back-translation sets");
    if (std::find(removal.begin(), removal.end(), code) != removal.end())
      throw ConfigError("sequential_removal: duplicate language " + code);
    removal.push_back(code);
  }
  if (removal.empty()) throw ConfigError("sequential_removal: empty removal order");

  const auto [threshold, achieved] = calibrate_threshold(context.human_scores, context.target_fpr);
  // Keep at least one language in play.
  const std::size_t max_removed = std::min(removal.size(), langs.size() - 1);

  std::vector<AblationRow> rows;
  double baseline = 0.0;
  for (std::size_t k = 0; k <= max_removed; ++k) {
    const double tpr = manipulated_tpr(context, context.strategy, threshold, [&](const std::string& lang) {
      return std::find(removal.begin(), removal.begin() + k, lang) == removal.begin() + k;
    });
    if (k == 0) baseline = tpr;
    rows.push_back({row_report(context, "removed=" + std::to_string(k), threshold, achieved, tpr), tpr - baseline});
  }
  return rows;
}

std::vector<AblationRow> combiner_comparison(const AblationContext& context) {
  validate_context(context);
  if (context.ai_docs.empty()) throw EmptyScores("combiner_comparison: no pre-manipulation documents");
  const auto [threshold, achieved] = calibrate_threshold(context.human_scores, context.target_fpr);

  const auto before_scores = score_documents(context.ai_docs, context.score, context.jobs);
  std::size_t hits = 0;
  for (double s : before_scores)
    if (s > threshold) ++hits;
  const double before = static_cast<double>(hits) / static_cast<double>(before_scores.size());

  const auto keep_all = [](const std::string&) { return true; };
  std::vector<AblationRow> rows;
  rows.push_back({row_report(context, "before", threshold, achieved, before), 0.0});
  for (const auto& [name, strategy] :
       {std::pair<const char*, CombineStrategy>{"random", CombineStrategy::random(context.random_seed)},
        {"wer_min", CombineStrategy::wer_min()},
        {"wer_max", CombineStrategy::wer_max()}}) {
    const double tpr = manipulated_tpr(context, strategy, threshold, keep_all);
    rows.push_back({row_report(context, name, threshold, achieved, tpr), tpr - before});
  }
  return rows;
}

namespace {

void append_csv_row(std::string& out, const EvaluationReport& r) {
  out += csv_field(r.condition);
  out += ',';
  out += csv_field(r.dataset);
  out += ',';
  out += std::to_string(r.n_human);
  out += ',';
  out += std::to_string(r.n_ai);
  out += ',';
  out += format_double(r.threshold);
  out += ',';
  out += format_double(r.target_fpr);
  out += ',';
  out += format_double(r.achieved_fpr);
  out += ',';
  out += format_double(r.tpr);
}

nlohmann::ordered_json report_json(const EvaluationReport& r) {
  return nlohmann::ordered_json{{"condition", r.condition},     {"dataset", r.dataset},
                                {"n_human", r.n_human},         {"n_ai", r.n_ai},
                                {"threshold", r.threshold},     {"target_fpr", r.target_fpr},
                                {"achieved_fpr", r.achieved_fpr}, {"tpr", r.tpr}};
}

}  // namespace

std::string reports_to_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "condition,dataset,n_human,n_ai,threshold,target_fpr,achieved_fpr,tpr\n";
  for (const auto& r : reports) {
    append_csv_row(out, r);
    out += '\n';
  }
  return out;
}

std::string reports_to_json(const std::vector<EvaluationReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::string out = "condition,dataset,n_human,n_ai,threshold,target_fpr,achieved_fpr,tpr,delta_tpr\n";
  for (const auto& row : rows) {
    append_csv_row(out, row.report);
    out += ',';
    out += format_double(row.delta_tpr);
    out += '\n';
  }
  return out;
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    auto j = report_json(row.report);
    j["delta_tpr"] = row.delta_tpr;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

}  // namespace btx
