#include "btx/text.hpp"

#include <string>
#include <vector>

#include "btx/errors.hpp"
#include "btx/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace btx;
using Words = std::vector<std::string>;

TEST_CASE("segmentation matches the hand-labeled corpus") {
  const auto cases = fixtures::load_segmentation_cases(std::string(BTX_FIXTURE_DIR) + "/segmentation_cases.txt");
  REQUIRE(cases.size() >= 40);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const SentenceList got = segment_sentences(c.input);
    CHECK(got.sentences == c.expected);
  }
}

TEST_CASE("segmentation rejects empty input") {
  CHECK_THROWS_AS(segment_sentences(""), EmptyInput);
  CHECK_THROWS_AS(segment_sentences("  \n\t "), EmptyInput);
}

TEST_CASE("segmentation carries the source document id") {
  const auto s = segment_sentences("One. Two.", AbbreviationSet::builtin(), "doc-9");
  CHECK(s.source_doc == "doc-9");
  CHECK(s.size() == 2);
}

TEST_CASE("tokenization lowercases and splits on punctuation") {
  CHECK(tokenize_words("Hello, world!") == Words{"hello", "world"});
  CHECK(tokenize_words("don't stop") == Words{"don't", "stop"});
  CHECK(tokenize_words("state-of-the-art") == Words{"state", "of", "the", "art"});
  CHECK(tokenize_words("it’s") == Words{"it's"});  // curly apostrophe folds to ascii
  CHECK(tokenize_words("3.14") == Words{"3", "14"});
  CHECK(tokenize_words("café Über") == Words{"café", "über"});
  CHECK(tokenize_words("a  b\tc\nd") == Words{"a", "b", "c", "d"});
  CHECK(tokenize_words("") == Words{});
  CHECK(tokenize_words("...!?") == Words{});
}

TEST_CASE("bare apostrophe runs are not tokens") {
  CHECK(tokenize_words("'' '' ''") == Words{});
  CHECK(tokenize_words("rock 'n' roll") == Words{"rock", "'n'", "roll"});
}

TEST_CASE("edit distance hand cases") {
  CHECK(word_edit_distance({"a", "b", "c"}, {"a", "b", "c"}) == 0);
  CHECK(word_edit_distance({"a", "b", "c"}, {}) == 3);
  CHECK(word_edit_distance({}, {"x", "y"}) == 2);
  CHECK(word_edit_distance({"a", "b", "c"}, {"a", "x", "c"}) == 1);
  CHECK(word_edit_distance({"a", "b"}, {"b", "a"}) == 2);
  CHECK(word_edit_distance({"the", "quick", "fox"}, {"the", "fox"}) == 1);
  CHECK(word_edit_distance({"the", "fox"}, {"the", "quick", "brown", "fox"}) == 2);
}

TEST_CASE("edit distance agrees with the recursive reference on random pairs") {
  const Words vocab{"a", "b", "c", "d"};
  Rng rng(424242);
  for (int trial = 0; trial < 10000; ++trial) {
    Words ref(rng.below(9)), hyp(rng.below(9));
    for (auto& w : ref) w = vocab[rng.below(vocab.size())];
    for (auto& w : hyp) w = vocab[rng.below(vocab.size())];
    const auto fast = word_edit_distance(ref, hyp);
    const auto slow = oracle::edit_distance(ref, hyp);
    REQUIRE(fast == slow);
  }
}

TEST_CASE("word error rate is the edit cost over the reference length") {
  CHECK(word_error_rate({"a", "b", "c"}, {"a", "x", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(word_error_rate({"a", "b"}, {"a", "b"}) == 0.0);
  CHECK(word_error_rate({"a"}, {"x", "y", "z"}) == doctest::Approx(3.0));  // can exceed 1
  CHECK_THROWS_AS(word_error_rate({}, {"a"}), EmptyReference);
}

TEST_CASE("unigram entities are the word tokens") {
  CHECK(extract_entities("Hello world. Hello again.", EntityOrder::Unigram) ==
        Words{"hello", "world", "hello", "again"});
  CHECK(extract_entities("", EntityOrder::Unigram).empty());
}

TEST_CASE("bigram entities never span sentence boundaries") {
  const std::string sep{kBigramSeparator};
  CHECK(extract_entities("Hello world. Hello again.", EntityOrder::Bigram) ==
        Words{"hello" + sep + "world", "hello" + sep + "again"});
  CHECK(extract_entities("One. Two. Three.", EntityOrder::Bigram).empty());
  CHECK(extract_entities("a b c", EntityOrder::Bigram) == Words{"a" + sep + "b", "b" + sep + "c"});
  CHECK(extract_entities("", EntityOrder::Bigram).empty());
}

TEST_CASE("bigram entities keep duplicates") {
  const std::string sep{kBigramSeparator};
  CHECK(extract_entities("go go go", EntityOrder::Bigram) == Words{"go" + sep + "go", "go" + sep + "go"});
}

namespace {

// count words per sentence: 30 28 29 27 30 26 28 29 27 26 24 16 (total 320);
// the running total passes 300 inside sentence 11.
std::string sentence_of(std::size_t words, std::size_t index) {
  static const char* filler[] = {"alpha", "beta", "gamma", "delta", "omega"};
  std::string s = "Item";
  s += " " + std::to_string(index);
  for (std::size_t i = 2; i < words; ++i) {
    s += " ";
    s += filler[i % 5];
  }
  s += ".";
  return s;
}

}  // namespace

TEST_CASE("truncation keeps the shortest sentence prefix reaching the word floor") {
  const std::size_t counts[] = {30, 28, 29, 27, 30, 26, 28, 29, 27, 26, 24, 16};
  std::string text;
  std::vector<std::string> sentences;
  for (std::size_t i = 0; i < 12; ++i) {
    sentences.push_back(sentence_of(counts[i], i));
    if (i) text += " ";
    text += sentences.back();
  }

  const std::string out = truncate_at_sentence(text, 300);
  std::string expected;
  for (std::size_t i = 0; i < 11; ++i) {  // cumulative count reaches 304 here
    if (i) expected += " ";
    expected += sentences[i];
  }
  CHECK(out == expected);
  CHECK(tokenize_words(out).size() == 304);
}

TEST_CASE("truncation returns short text unchanged") {
  const std::string text = "Tiny first. Tiny second.";
  CHECK(truncate_at_sentence(text, 300) == text);
  CHECK(truncate_at_sentence("One two three.", 3) == "One two three.");
}

TEST_CASE("truncation boundary is inclusive") {
  CHECK(truncate_at_sentence("One two three. Four five six.", 3) == "One two three.");
  CHECK(truncate_at_sentence("One two three. Four five six.", 4) == "One two three. Four five six.");
}

TEST_CASE("truncation rejects empty text") { CHECK_THROWS_AS(truncate_at_sentence("", 300), EmptyInput); }

TEST_CASE("builtin abbreviations include common forms") {
  const auto& set = AbbreviationSet::builtin();
  for (const char* w : {"dr", "mr", "e.g", "i.e", "u.s", "etc", "fig", "no"}) CHECK(set.contains(w));
  CHECK_FALSE(set.contains("hello"));
  CHECK_FALSE(set.contains("dr."));  // stored without the dot
}

TEST_CASE("abbreviation parsing handles comments blanks and case") {
  const auto set = AbbreviationSet::parse("# comment\nDr.\n MRS. \n\nxyz # trailing\n");
  CHECK(set.size() == 3);
  CHECK(set.contains("dr"));
  CHECK(set.contains("mrs"));
  CHECK(set.contains("xyz"));
}

TEST_CASE("shipped abbreviation file matches the builtin set") {
  const auto file = AbbreviationSet::load(std::string(BTX_DATA_DIR) + "/abbreviations.txt");
  CHECK(file.entries() == AbbreviationSet::builtin().entries());
}

TEST_CASE("custom abbreviation sets change segmentation") {
  const auto none = AbbreviationSet::parse("");
  const auto got = segment_sentences("Dr. Smith arrived.", none);
  CHECK(got.sentences == Words{"Dr.", "Smith arrived."});
}
