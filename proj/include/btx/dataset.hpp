#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "btx/document.hpp"

namespace btx {

// A validated, ordered view of one JSONL corpus file.
struct CorpusManifest {
  std::vector<Document> records;
};

struct LoadOptions {
  // When nonzero, bodies are cut at the first sentence boundary at or past
  // this many words (the corpus normalization pass).
  std::size_t truncate_words = 0;
  // Verify cross-record links: back-translations resolve to a parent, AI
  // records share a pair_id with some human record. Disable when loading a
  // partial artifact (a back-translation or manipulation file on its own).
  bool check_links = true;
};

// Reads a JSONL corpus; gzip-compressed files are detected and accepted.
// Record schema: {id, pair_id, dataset, group, generator?, language?,
// parent_id?, text}. Back-translated records require language and
// parent_id. Throws SchemaViolation with the offending line and field, or
// DanglingParent for an unresolvable parent reference.
CorpusManifest load_corpus(const std::string& path, const LoadOptions& options = {});

// Same validation over an in-memory JSONL buffer.
CorpusManifest corpus_from_jsonl(std::string_view text, const LoadOptions& options = {});

// Inverse of loading: one JSON line per record with a fixed key order, so
// load-then-serialize is byte-stable.
std::string corpus_to_jsonl(const CorpusManifest& manifest);

struct ValidationIssue {
  std::size_t line = 0;
  std::string field;
  std::string message;
};

// Streaming validation that collects every problem instead of stopping at
// the first; records are not retained.
std::vector<ValidationIssue> validate_corpus(const std::string& path);

struct SplitSpec {
  double train_fraction = 0.8;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Deterministic split by hashed pair_id: a pair's human text, AI text, and
// all their back-translations land in the same fold. Fractions are honored
// within one pair.
std::pair<CorpusManifest, CorpusManifest> split_corpus(const CorpusManifest& manifest, const SplitSpec& spec);

// Which back-translations form the B group: only those whose parent is an
// AI record (default), or every back-translation.
enum class BGroupPolicy { AiParentsOnly, AllBackTranslations };
BGroupPolicy b_policy_from_string(const std::string& name);
const char* to_string(BGroupPolicy policy);

struct GroupedCorpora {
  std::vector<Document> human;
  std::vector<Document> ai;
  std::vector<Document> backtranslated;
};

// Partitions records into the three detector corpora. Manipulated records
// are not part of any training group and are skipped. Throws MissingGroup
// when human or AI documents are absent, or when require_backtranslated is
// set and B comes up empty.
GroupedCorpora group_corpora(const CorpusManifest& manifest, BGroupPolicy policy = BGroupPolicy::AiParentsOnly,
                             bool require_backtranslated = true);

}  // namespace btx
