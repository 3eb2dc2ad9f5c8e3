#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace btx {

// Sentences of one document, in order, trimmed, never empty. Joining them
// with single spaces and normalizing whitespace reproduces the normalized
// source text.
struct SentenceList {
  std::vector<std::string> sentences;
  std::string source_doc;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Abbreviations that suppress a sentence break after their trailing period,
// stored lowercase without the final dot ("dr", "e.g", "u.s").
class AbbreviationSet {
 public:
  static const AbbreviationSet& builtin();
  // One lowercase abbreviation per line, UTF-8, '#' comments allowed.
  static AbbreviationSet load(const std::string& path);
  static AbbreviationSet parse(std::string_view content);

  bool contains(std::string_view word_lower) const;
  std::size_t size() const { return entries_.size(); }
  const std::set<std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::set<std::string, std::less<>> entries_;
};

// Rule-based segmentation: a sentence ends at a [.?!]+ run (plus trailing
// closing quotes) followed by whitespace and an uppercase/digit/quote opener,
// unless the preceding word is a listed abbreviation or a single initial.
// Throws EmptyInput on empty or whitespace-only text.
SentenceList segment_sentences(std::string_view text, const AbbreviationSet& abbrev = AbbreviationSet::builtin(),
                               std::string source_doc = "");

// Maximal runs of letters/digits/apostrophes, lowercased; hyphens split,
// punctuation drops out, U+2019 is normalized to '. Empty input is fine.
std::vector<std::string> tokenize_words(std::string_view text);

// (substitutions + deletions + insertions) / |reference| under a minimal
// word-level edit alignment with unit costs. Throws EmptyReference.
double word_error_rate(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

// Minimal edit cost itself (the numerator above).
std::size_t word_edit_distance(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

enum class EntityOrder { Unigram, Bigram };

// Separator between the two tokens of a bigram entity; a non-printing
// sentinel so joined entities cannot collide with real tokens.
inline constexpr std::string_view kBigramSeparator = "␟";

// Unigram: all word tokens. Bigram: adjacent in-sentence token pairs joined
// with kBigramSeparator; pairs never span sentence boundaries. Duplicates
// are kept (multiset semantics).
std::vector<std::string> extract_entities(std::string_view text, EntityOrder order,
                                          const AbbreviationSet& abbrev = AbbreviationSet::builtin());

// Shortest whole-sentence prefix whose cumulative word count reaches
// min_words; the full text unchanged when it is shorter than that.
// Throws EmptyInput on empty text.
std::string truncate_at_sentence(std::string_view text, std::size_t min_words,
                                 const AbbreviationSet& abbrev = AbbreviationSet::builtin());

}  // namespace btx
