#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "btx/errors.hpp"
#include "btx/ioutil.hpp"
#include "btx/rng.hpp"
#include "btx/translation.hpp"
#include "btx/utf8.hpp"

namespace btx {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_word_char(char32_t cp) { return utf8::is_letter(cp) || utf8::is_digit(cp) || utf8::is_apostrophe(cp); }

// prefix punctuation | core | suffix punctuation
struct TokenParts {
  std::string_view prefix, core, suffix;
};

TokenParts split_token(std::string_view token) {
  std::size_t core_begin = token.size(), core_end = 0;
  std::size_t i = 0;
  while (i < token.size()) {
    char32_t cp;
    const std::size_t n = utf8::decode(token, i, cp);
    if (is_word_char(cp)) {
      core_begin = std::min(core_begin, i);
      core_end = i + n;
    }
    i += n;
  }
  if (core_begin >= core_end) return {token, {}, {}};
  return {token.substr(0, core_begin), token.substr(core_begin, core_end - core_begin), token.substr(core_end)};
}

bool starts_upper(std::string_view s) {
  if (s.empty()) return false;
  char32_t cp;
  utf8::decode(s, 0, cp);
  return utf8::is_upper(cp);
}

std::string match_capitalization(std::string_view replacement, std::string_view original) {
  std::string out(replacement);
  if (starts_upper(original) && !out.empty() && out[0] >= 'a' && out[0] <= 'z')
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

const std::array<std::string_view, 9> kDeletable = {"the",  "a",    "an",     "very", "quite",
                                                    "really", "just", "rather", "simply"};
const std::array<std::string_view, 7> kFillers = {"also", "perhaps", "indeed", "rather", "quite", "truly", "really"};

bool deletable(std::string_view core_lower) {
  return std::find(kDeletable.begin(), kDeletable.end(), core_lower) != kDeletable.end();
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp;
    const std::size_t n = utf8::decode(s, i, cp);
    if (utf8::is_space(cp)) {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.append(s.substr(i, n));
    }
    i += n;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// "A managed B." -> "B, a managed" + original tail. Only fires when both
// clauses carry at least two words.
std::string reorder_clauses(const std::string& sentence) {
  const auto comma = sentence.find(", ");
  if (comma == std::string::npos) return sentence;
  std::string left = sentence.substr(0, comma);
  std::string right = sentence.substr(comma + 2);
  std::string tail;
  while (!right.empty()) {
    const char c = right.back();
    if (c == '.' || c == '!' || c == '?' || c == '"' || c == '\'') {
      tail.insert(tail.begin(), c);
      right.pop_back();
    } else {
      break;
    }
  }
  if (split_whitespace(left).size() < 2 || split_whitespace(right).size() < 2) return sentence;
  if (!right.empty() && right[0] >= 'a' && right[0] <= 'z') right[0] = static_cast<char>(right[0] - 'a' + 'A');
  if (left.size() >= 2 && left[0] >= 'A' && left[0] <= 'Z' && left[1] >= 'a' && left[1] <= 'z')
    left[0] = static_cast<char>(left[0] - 'A' + 'a');
  return right + ", " + left + tail;
}

}  // namespace

Thesaurus Thesaurus::load(const std::string& path) { return parse(read_file(path)); }

Thesaurus Thesaurus::parse(std::string_view content) {
  Thesaurus t;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    std::string line(content.substr(start, end - start));
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = utf8::normalize_whitespace(line);
    if (!stripped.empty()) {
      const auto colon = stripped.find(':');
      if (colon == std::string::npos)
        throw ConfigError("thesaurus line " + std::to_string(line_no) + " has no ':': " + stripped);
      const std::string word = lower_ascii(utf8::normalize_whitespace(stripped.substr(0, colon)));
      std::vector<std::string> syns;
      std::size_t pos = colon + 1;
      while (pos <= stripped.size()) {
        auto comma = stripped.find(',', pos);
        if (comma == std::string::npos) comma = stripped.size();
        const std::string syn = utf8::normalize_whitespace(stripped.substr(pos, comma - pos));
        if (!syn.empty()) syns.push_back(lower_ascii(syn));
        pos = comma + 1;
      }
      if (word.empty() || syns.empty())
        throw ConfigError("thesaurus line " + std::to_string(line_no) + " is incomplete: " + stripped);
      t.entries_[word] = std::move(syns);
    }
    if (end == content.size()) break;
    start = end + 1;
  }
  return t;
}

const std::vector<std::string>* Thesaurus::synonyms(std::string_view word_lower) const {
  const auto it = entries_.find(word_lower);
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<std::string, double> SimulatorConfig::default_language_multipliers() {
  return {{"PT", 0.75}, {"ES", 0.8},  {"FR", 0.85}, {"IT", 0.9},  {"ZH", 1.15},
          {"NL", 0.95}, {"DA", 1.0},  {"JA", 1.3},  {"DE", 1.05}, {"KO", 1.2}};
}

SimulatorProvider::SimulatorProvider(std::uint64_t seed, Thesaurus thesaurus, SimulatorConfig config)
    : seed_(seed), thesaurus_(std::move(thesaurus)), config_(std::move(config)) {}

bool SimulatorProvider::supports(std::string_view src, std::string_view dst) const {
  const std::string s = lower_ascii(src), d = lower_ascii(dst);
  if (s == d) return false;
  return (s == "en" && !d.empty()) || (d == "en" && !s.empty());
}

std::string SimulatorProvider::translate(std::string_view text, std::string_view src, std::string_view dst) {
  if (!supports(src, dst)) throw UnsupportedPair("simulator: unsupported pair");
  // The outbound leg is a no-op; all drift happens on the way back to
  // English, once per round trip.
  if (lower_ascii(src) == "en") return std::string(text);
  return perturb(text, lower_ascii(src));
}

std::string SimulatorProvider::perturb(std::string_view text, std::string_view lang) const {
  if (utf8::normalize_whitespace(text).empty()) return std::string(text);

  const std::string code = [&] {
    std::string c(lang);
    for (char& ch : c)
      if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    return c;
  }();
  double agg = 1.0;
  if (const auto it = config_.multipliers.find(code); it != config_.multipliers.end()) agg = it->second;
  const double syn_rate = std::clamp(config_.synonym_rate * agg, 0.0, 0.95);
  const double ins_rate = std::clamp(config_.insert_rate * agg, 0.0, 0.5);
  const double del_rate = std::clamp(config_.delete_rate * agg, 0.0, 0.5);
  const double reorder_rate = std::clamp(config_.reorder_rate * agg, 0.0, 0.95);

  Rng rng(mix_seed(mix_seed(seed_, code), text));
  const SentenceList sentences = segment_sentences(text);

  std::string result;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::string sentence = sentences.sentences[s];
    if (rng.chance(reorder_rate)) sentence = reorder_clauses(sentence);

    const std::vector<std::string> tokens = split_whitespace(sentence);
    std::vector<std::string> out_tokens;
    out_tokens.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const TokenParts parts = split_token(tokens[t]);
      std::string core(parts.core);

      if (rng.chance(syn_rate) && !core.empty()) {
        if (const auto* syns = thesaurus_.synonyms(lower_ascii(core)))
          core = match_capitalization((*syns)[rng.below(syns->size())], core);
      }
      const bool drop = rng.chance(del_rate) && t > 0 && deletable(lower_ascii(core)) && parts.prefix.empty() &&
                        parts.suffix.empty();
      if (rng.chance(ins_rate) && t > 0) out_tokens.emplace_back(kFillers[rng.below(kFillers.size())]);
      if (!drop) {
        std::string token(parts.prefix);
        token += core;
        token += parts.suffix;
        out_tokens.push_back(std::move(token));
      }
    }

    std::string rebuilt;
    for (std::size_t t = 0; t < out_tokens.size(); ++t) {
      if (t) rebuilt.push_back(' ');
      rebuilt += out_tokens[t];
    }
    if (!rebuilt.empty()) {
      if (!result.empty()) result.push_back(' ');
      result += rebuilt;
    }
  }
  return result.empty() ? std::string(text) : result;
}

}  // namespace btx
