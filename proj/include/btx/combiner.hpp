#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "btx/document.hpp"
#include "btx/similarity.hpp"
#include "btx/text.hpp"
#include "btx/translation.hpp"

namespace btx {

// Per-output-sentence record of what was chosen and why. Indices are
// 1-based: orig_index over the original's sentences, bt_index over the
// chosen language's sentences.
struct AlignmentCell {
  std::size_t orig_index = 0;
  std::string language;
  std::size_t bt_index = 0;
  double similarity = 0.0;
  double wer = 0.0;
};

// How to pick among the per-language aligned sentences. WerMax keeps the
// most-rewritten candidate (the attack setting), WerMin the closest one,
// Random a seeded uniform choice.
struct CombineStrategy {
  enum class Kind { WerMax, WerMin, Random };
  Kind kind = Kind::WerMax;
  std::uint64_t seed = 0;

  static CombineStrategy wer_max() { return {Kind::WerMax, 0}; }
  static CombineStrategy wer_min() { return {Kind::WerMin, 0}; }
  static CombineStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

CombineStrategy strategy_from_string(const std::string& name, std::uint64_t seed);
std::string to_string(const CombineStrategy& strategy);

struct ManipulatedDocument {
  Document doc;  // group = Manipulated, parent_id = original id
  std::vector<AlignmentCell> provenance;
};

// Index (1-based) and similarity of the candidate sentence most similar to
// orig; ties go to the lowest index. Throws EmptyCandidateList.
std::pair<std::size_t, double> align_sentence(std::string_view orig, const SentenceList& candidates,
                                              SimilarityScorer& scorer);

// For each original sentence: align one sentence per language, compute its
// word error rate against the original, pick per the strategy (ties in WER
// break by registry language order), and concatenate the picks with single
// spaces. Languages with no sentences are skipped per-sentence; if every
// language is empty, throws EmptyCandidateList.
ManipulatedDocument combine(const BackTranslationSet& set, const CombineStrategy& strategy, SimilarityScorer& scorer);

// One JSONL line per provenance cell:
// {doc_id, orig_index, language, bt_index, wer, similarity}.
std::string provenance_to_jsonl(const ManipulatedDocument& result);

}  // namespace btx
