#include "btx/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "btx/errors.hpp"
#include "btx/utf8.hpp"

namespace btx {

namespace {

const char* kBuiltinAbbreviations =
    "mr mrs ms dr prof sr jr st mt ft no vs etc e.g i.e cf al ca approx dept univ "
    "inc ltd co corp fig figs ref refs eq eqs sec ch vol vols pp ed eds rev est "
    "min max misc a.m p.m u.s u.k u.n d.c b.c a.d ph.d m.d b.a m.a b.sc m.sc "
    "jan feb mar apr jun jul aug sept oct nov dec mon tue wed thu fri sat sun";

bool is_terminator(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

bool is_closing_quote(char32_t cp) {
  switch (cp) {
    case U'"':
    case U'\'':
    case U')':
    case U']':
    case 0x2019:  // ’
    case 0x201D:  // ”
    case 0xBB:    // »
      return true;
    default:
      return false;
  }
}

bool is_opening_quote(char32_t cp) {
  switch (cp) {
    case U'"':
    case U'\'':
    case U'(':
    case U'[':
    case 0x2018:  // ‘
    case 0x201C:  // “
    case 0xAB:    // «
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t cp) { return utf8::is_upper(cp) || utf8::is_digit(cp) || is_opening_quote(cp); }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e) {
    char32_t cp;
    const std::size_t n = utf8::decode(s, b, cp);
    if (!utf8::is_space(cp)) break;
    b += n;
  }
  // Trailing trim only needs ASCII whitespace plus two-/three-byte spaces,
  // so walk forward from b and remember the last non-space end.
  std::size_t last_end = b;
  std::size_t i = b;
  while (i < e) {
    char32_t cp;
    const std::size_t n = utf8::decode(s, i, cp);
    if (!utf8::is_space(cp)) last_end = i + n;
    i += n;
  }
  return std::string(s.substr(b, last_end - b));
}

// The word immediately before byte position pos (exclusive), lowercased.
// Includes interior dots so "U.S." checks as "u.s".
std::string word_before(std::string_view text, std::size_t pos) {
  std::size_t b = pos;
  while (b > 0) {
    // Walk back one codepoint (ASCII fast path; multibyte via scan).
    std::size_t p = b - 1;
    while (p > 0 && (static_cast<unsigned char>(text[p]) & 0xC0) == 0x80) --p;
    char32_t cp;
    utf8::decode(text, p, cp);
    const bool word_char = utf8::is_letter(cp) || utf8::is_digit(cp) || utf8::is_apostrophe(cp) || cp == U'.';
    if (!word_char) break;
    b = p;
  }
  std::string out;
  std::size_t i = b;
  while (i < pos) {
    char32_t cp;
    const std::size_t n = utf8::decode(text, i, cp);
    utf8::append(out, utf8::to_lower(cp));
    i += n;
  }
  // Strip leading dots picked up from an ellipsis.
  const std::size_t keep = out.find_first_not_of('.');
  return keep == std::string::npos ? std::string() : out.substr(keep);
}

bool is_single_initial(const std::string& word_lower, std::string_view raw, std::size_t pos) {
  if (word_lower.size() != 1 || !utf8::is_letter(static_cast<unsigned char>(word_lower[0]))) return false;
  // Only an uppercase original counts as an initial ("J. Smith").
  std::size_t p = pos >= 1 ? pos - 1 : 0;
  while (p > 0 && (static_cast<unsigned char>(raw[p]) & 0xC0) == 0x80) --p;
  char32_t cp;
  utf8::decode(raw, p, cp);
  return utf8::is_upper(cp);
}

}  // namespace

const AbbreviationSet& AbbreviationSet::builtin() {
  static const AbbreviationSet set = [] {
    AbbreviationSet s;
    std::istringstream in(kBuiltinAbbreviations);
    std::string word;
    while (in >> word) s.entries_.insert(word);
    return s;
  }();
  return set;
}

AbbreviationSet AbbreviationSet::parse(std::string_view content) {
  AbbreviationSet set;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string line = trim(content.substr(start, end - start));
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (!line.empty()) {
      std::string lower;
      std::size_t i = 0;
      while (i < line.size()) {
        char32_t cp;
        const std::size_t n = utf8::decode(line, i, cp);
        utf8::append(lower, utf8::to_lower(cp));
        i += n;
      }
      while (!lower.empty() && lower.back() == '.') lower.pop_back();
      if (!lower.empty()) set.entries_.insert(std::move(lower));
    }
    if (end == content.size()) break;
    start = end + 1;
  }
  return set;
}

AbbreviationSet AbbreviationSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open abbreviation list: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool AbbreviationSet::contains(std::string_view word_lower) const { return entries_.count(word_lower) > 0; }

SentenceList segment_sentences(std::string_view text, const AbbreviationSet& abbrev, std::string source_doc) {
  SentenceList result;
  result.source_doc = std::move(source_doc);

  std::size_t sent_start = 0;
  std::size_t i = 0;
  char32_t prev_cp = 0;
  while (i < text.size()) {
    char32_t cp;
    const std::size_t n = utf8::decode(text, i, cp);
    if (!is_terminator(cp) || is_terminator(prev_cp)) {
      prev_cp = cp;
      i += n;
      continue;
    }
    // Extend over the whole [.?!]+ run, then trailing closing quotes.
    const std::size_t run_start = i;
    std::size_t j = i;
    char32_t c;
    while (j < text.size()) {
      const std::size_t m = utf8::decode(text, j, c);
      if (!is_terminator(c)) break;
      j += m;
    }
    std::size_t k = j;
    while (k < text.size()) {
      const std::size_t m = utf8::decode(text, k, c);
      if (!is_closing_quote(c)) break;
      k += m;
    }
    // Boundary requires whitespace then an opener.
    std::size_t w = k;
    bool saw_space = false;
    while (w < text.size()) {
      const std::size_t m = utf8::decode(text, w, c);
      if (!utf8::is_space(c)) break;
      saw_space = true;
      w += m;
    }
    bool boundary = saw_space && w < text.size();
    if (boundary) {
      utf8::decode(text, w, c);
      boundary = is_opener(c);
    }
    if (boundary && j - run_start == 1 && text[run_start] == '.') {
      const std::string word = word_before(text, run_start);
      if (abbrev.contains(word) || is_single_initial(word, text, run_start)) boundary = false;
    }
    if (boundary) {
      std::string sentence = trim(text.substr(sent_start, k - sent_start));
      if (!sentence.empty()) result.sentences.push_back(std::move(sentence));
      sent_start = w;
      prev_cp = 0;
      i = w;
    } else {
      prev_cp = cp;
      i += n;
    }
  }
  std::string tail = trim(text.substr(sent_start));
  if (!tail.empty()) result.sentences.push_back(std::move(tail));

  if (result.sentences.empty()) throw EmptyInput("segment_sentences: empty or whitespace-only text");
  return result;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool has_alnum = false;
  auto flush = [&] {
    if (has_alnum) tokens.push_back(current);
    current.clear();
    has_alnum = false;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp;
    const std::size_t n = utf8::decode(text, i, cp);
    if (utf8::is_letter(cp) || utf8::is_digit(cp)) {
      utf8::append(current, utf8::to_lower(cp));
      has_alnum = true;
    } else if (utf8::is_apostrophe(cp)) {
      current.push_back('\'');
    } else {
      flush();
    }
    i += n;
  }
  flush();
  return tokens;
}

std::size_t word_edit_distance(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
  const std::size_t r = reference.size();
  const std::size_t h = hypothesis.size();
  std::vector<std::size_t> prev(h + 1);
  std::vector<std::size_t> curr(h + 1);
  for (std::size_t j = 0; j <= h; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= r; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= h; ++j) {
      const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      curr[j] = std::min({sub, prev[j] + 1, curr[j - 1] + 1});
    }
    std::swap(prev, curr);
  }
  return prev[h];
}

double word_error_rate(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
  if (reference.empty()) throw EmptyReference("word_error_rate: empty reference");
  return static_cast<double>(word_edit_distance(reference, hypothesis)) / static_cast<double>(reference.size());
}

std::vector<std::string> extract_entities(std::string_view text, EntityOrder order, const AbbreviationSet& abbrev) {
  std::vector<std::string> entities;
  if (order == EntityOrder::Unigram) return tokenize_words(text);
  if (utf8::normalize_whitespace(text).empty()) return entities;
  const SentenceList sentences = segment_sentences(text, abbrev);
  for (const auto& sentence : sentences.sentences) {
    const auto tokens = tokenize_words(sentence);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      std::string entity = tokens[i];
      entity += kBigramSeparator;
      entity += tokens[i + 1];
      entities.push_back(std::move(entity));
    }
  }
  return entities;
}

std::string truncate_at_sentence(std::string_view text, std::size_t min_words, const AbbreviationSet& abbrev) {
  if (utf8::normalize_whitespace(text).empty()) throw EmptyInput("truncate_at_sentence: empty text");
  const SentenceList sentences = segment_sentences(text, abbrev);
  std::size_t cumulative = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    cumulative += tokenize_words(sentences.sentences[i]).size();
    if (cumulative >= min_words) {
      std::string out;
      for (std::size_t j = 0; j <= i; ++j) {
        if (j > 0) out.push_back(' ');
        out += sentences.sentences[j];
      }
      return out;
    }
  }
  return std::string(text);
}

}  // namespace btx
