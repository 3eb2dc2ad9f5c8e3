#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "btx/document.hpp"

namespace btx {

// Semantic similarity in [0,1]; 1 means meaning fully preserved.
class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual std::string name() const = 0;
  virtual double score(std::string_view a, std::string_view b) = 0;
};

// Cosine over term-frequency unigram vectors. Needs no corpus statistics,
// so it can align sentences before any corpus exists. Empty-vs-anything
// scores 0.
double lexical_cosine(std::string_view a, std::string_view b);

class TfCosineScorer final : public SimilarityScorer {
 public:
  std::string name() const override { return "tf_cosine"; }
  double score(std::string_view a, std::string_view b) override { return lexical_cosine(a, b); }
};

// Threshold profile for the semantic-preservation gate. The two named
// profiles carry the corpus-derived operating points of the paraphrase
// encoder (0.76) and the universal sentence encoder (0.69).
struct GateConfig {
  std::string scorer = "tf_cosine";
  double threshold = 0.76;

  static GateConfig psp_style() { return {"tf_cosine", 0.76}; }
  static GateConfig usee_style() { return {"tf_cosine", 0.69}; }
};

struct GateResult {
  double score = 0.0;
  bool pass = false;
};

// pass = (score >= threshold). Both bodies must be non-empty.
GateResult semantic_gate(const Document& original, const Document& candidate, const GateConfig& cfg,
                         SimilarityScorer& scorer);

// Client for a remote embedding endpoint: POST {"texts": [...]} returning
// {"vectors": [[...]]}. Scores are cosines of the returned embeddings,
// clamped to [0,1]. Embeddings are cached by text hash, in memory and
// optionally appended to a JSONL file. Plain-http endpoints only.
// Throws ServiceUnavailable when the endpoint cannot be reached or errors,
// MalformedResponse when the reply does not match the contract.
class EmbeddingServiceScorer final : public SimilarityScorer {
 public:
  explicit EmbeddingServiceScorer(std::string endpoint, std::string cache_path = "");

  std::string name() const override { return "embedding_service"; }
  double score(std::string_view a, std::string_view b) override;

  // Exposed for cache warm-up and tests.
  std::vector<double> embed(std::string_view text);

 private:
  std::vector<double> fetch(const std::string& text);

  std::string endpoint_;
  std::string cache_path_;
  std::mutex mutex_;
  std::map<std::string, std::vector<double>> cache_;  // sha256(text) -> embedding
};

std::unique_ptr<SimilarityScorer> make_scorer(const std::string& name, const std::string& endpoint = "",
                                              const std::string& cache_path = "");

}  // namespace btx
