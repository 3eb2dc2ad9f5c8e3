#include "btx/combiner.hpp"

#include <algorithm>

#include "btx/errors.hpp"
#include "btx/rng.hpp"
#include "json.hpp"

namespace btx {

CombineStrategy strategy_from_string(const std::string& name, std::uint64_t seed) {
  if (name == "wer_max") return CombineStrategy::wer_max();
  if (name == "wer_min") return CombineStrategy::wer_min();
  if (name == "random") return CombineStrategy::random(seed);
  throw ConfigError("unknown combine strategy: " + name + " (use wer_max, wer_min, or random)");
}

std::string to_string(const CombineStrategy& strategy) {
  switch (strategy.kind) {
    case CombineStrategy::Kind::WerMax:
      return "wer_max";
    case CombineStrategy::Kind::WerMin:
      return "wer_min";
    case CombineStrategy::Kind::Random:
      return "random";
  }
  return "unknown";
}

std::pair<std::size_t, double> align_sentence(std::string_view orig, const SentenceList& candidates,
                                              SimilarityScorer& scorer) {
  if (candidates.empty()) throw EmptyCandidateList("align_sentence: no candidate sentences");
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = scorer.score(orig, candidates.sentences[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return {best + 1, best_score};
}

ManipulatedDocument combine(const BackTranslationSet& set, const CombineStrategy& strategy,
                            SimilarityScorer& scorer) {
  if (set.entries.empty()) throw EmptyCandidateList("combine: back-translation set has no languages");
  const SentenceList originals = segment_sentences(set.original.body, AbbreviationSet::builtin(), set.original.id);

  // Registry order regardless of how the set was assembled; this is the
  // WER tie-break order.
  std::vector<std::size_t> order(set.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = registry_rank(set.entries[a].first), rb = registry_rank(set.entries[b].first);
    return ra != rb ? ra < rb : set.entries[a].first < set.entries[b].first;
  });

  ManipulatedDocument result;
  std::string body;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const std::string& orig_sentence = originals.sentences[i];
    const std::vector<std::string> orig_tokens = tokenize_words(orig_sentence);

    struct Candidate {
      std::size_t entry;
      std::size_t bt_index;
      double similarity;
      double wer;
    };
    std::vector<Candidate> candidates;
    for (const std::size_t e : order) {
      const auto& [lang, bt] = set.entries[e];
      if (bt.sentences.empty()) continue;
      const auto [idx, sim] = align_sentence(orig_sentence, bt.sentences, scorer);
      const std::vector<std::string> hyp_tokens = tokenize_words(bt.sentences.sentences[idx - 1]);
      const double wer =
          orig_tokens.empty() ? 0.0 : word_error_rate(orig_tokens, hyp_tokens);
      candidates.push_back({e, idx, sim, wer});
    }
    if (candidates.empty())
      throw EmptyCandidateList("combine: no candidates for sentence " + std::to_string(i + 1) + " of '" +
                               set.original.id + "'");

    std::size_t pick = 0;
    switch (strategy.kind) {
      case CombineStrategy::Kind::WerMax:
        for (std::size_t c = 1; c < candidates.size(); ++c)
          if (candidates[c].wer > candidates[pick].wer) pick = c;
        break;
      case CombineStrategy::Kind::WerMin:
        for (std::size_t c = 1; c < candidates.size(); ++c)
          if (candidates[c].wer < candidates[pick].wer) pick = c;
        break;
      case CombineStrategy::Kind::Random: {
        Rng rng(mix_seed(mix_seed(strategy.seed, set.original.id), static_cast<std::uint64_t>(i)));
        pick = static_cast<std::size_t>(rng.below(candidates.size()));
        break;
      }
    }

    const Candidate& chosen = candidates[pick];
    const auto& [lang, bt] = set.entries[chosen.entry];
    if (!body.empty()) body.push_back(' ');
    body += bt.sentences.sentences[chosen.bt_index - 1];
    result.provenance.push_back({i + 1, lang, chosen.bt_index, chosen.similarity, chosen.wer});
  }

  Document doc = set.original;
  doc.id = set.original.id + ":manipulated";
  doc.body = std::move(body);
  doc.group = Group::Manipulated;
  doc.intermediate_language.clear();
  doc.parent_id = set.original.id;
  doc.word_count = tokenize_words(doc.body).size();
  validate_document(doc);
  result.doc = std::move(doc);
  return result;
}

std::string provenance_to_jsonl(const ManipulatedDocument& result) {
  std::string out;
  for (const auto& cell : result.provenance) {
    const nlohmann::ordered_json rec = {
        {"doc_id", result.doc.id},       {"orig_index", cell.orig_index}, {"language", cell.language},
        {"bt_index", cell.bt_index},     {"wer", cell.wer},               {"similarity", cell.similarity},
    };
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace btx
