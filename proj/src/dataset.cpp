#include "btx/dataset.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <zlib.h>

#include "btx/errors.hpp"
#include "btx/rng.hpp"
#include "btx/text.hpp"
#include "btx/translation.hpp"
#include "json.hpp"

namespace btx {

namespace {

// Line-by-line reader over a possibly gzip-compressed file. zlib detects
// the magic bytes, so plain files pass through unchanged.
class GzLineReader {
 public:
  explicit GzLineReader(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw ConfigError("cannot open corpus file: " + path);
  }
  ~GzLineReader() { gzclose(file_); }
  GzLineReader(const GzLineReader&) = delete;
  GzLineReader& operator=(const GzLineReader&) = delete;

  bool next(std::string& line) {
    line.clear();
    while (true) {
      if (pos_ == len_) {
        len_ = gzread(file_, buf_, sizeof(buf_));
        if (len_ < 0) {
          int errnum = 0;
          const char* msg = gzerror(file_, &errnum);
          throw ConfigError(std::string("corpus read failed: ") + (msg != nullptr ? msg : "unknown zlib error"));
        }
        pos_ = 0;
        if (len_ == 0) return !line.empty();
      }
      while (pos_ < len_) {
        const char c = buf_[pos_++];
        if (c == '\n') return true;
        line += c;
      }
    }
  }

 private:
  gzFile file_;
  char buf_[1 << 16];
  int pos_ = 0;
  int len_ = 0;
};

std::string need_string(const nlohmann::json& j, std::size_t line, const char* field) {
  if (!j.contains(field)) throw SchemaViolation(line, field, "missing required field");
  const auto& v = j.at(field);
  if (!v.is_string() || v.get_ref<const std::string&>().empty())
    throw SchemaViolation(line, field, "must be a non-empty string");
  return v.get<std::string>();
}

std::string optional_string(const nlohmann::json& j, std::size_t line, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return "";
  if (!j.at(field).is_string()) throw SchemaViolation(line, field, "must be a string");
  return j.at(field).get<std::string>();
}

Document parse_record(const std::string& text, std::size_t line, const LoadOptions& options) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaViolation(line, "json", "line is not valid JSON");
  if (!j.is_object()) throw SchemaViolation(line, "json", "line is not a JSON object");

  Document d;
  d.id = need_string(j, line, "id");
  d.pair_id = need_string(j, line, "pair_id");
  d.dataset = need_string(j, line, "dataset");
  const std::string group = need_string(j, line, "group");
  try {
    d.group = group_from_string(group);
  } catch (const DomainError&) {
    throw SchemaViolation(line, "group", "unknown group '" + group + "'");
  }
  d.body = need_string(j, line, "text");
  d.generator = optional_string(j, line, "generator");
  d.parent_id = optional_string(j, line, "parent_id");

  const std::string language = optional_string(j, line, "language");
  if (d.group == Group::BackTranslated) {
    if (language.empty()) throw SchemaViolation(line, "language", "back-translated record needs a language");
    try {
      d.intermediate_language = normalize_language(language);
    } catch (const ConfigError& e) {
      throw SchemaViolation(line, "language", e.what());
    }
    if (d.parent_id.empty()) throw SchemaViolation(line, "parent_id", "back-translated record needs a parent");
  } else if (!language.empty()) {
    throw SchemaViolation(line, "language", "only back-translated records carry a language");
  }

  if (options.truncate_words > 0) d.body = truncate_at_sentence(d.body, options.truncate_words);
  d.word_count = tokenize_words(d.body).size();
  return d;
}

struct LinkState {
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> human_pairs;
  // Records whose links need a second pass: (line, id, parent_id) and the
  // AI rows' (line, pair_id).
  std::vector<std::tuple<std::size_t, std::string, std::string>> parent_refs;
  std::vector<std::pair<std::size_t, std::string>> ai_pairs;

  void add(const Document& d, std::size_t line) {
    if (!ids.insert(d.id).second) throw SchemaViolation(line, "id", "duplicate id '" + d.id + "'");
    if (d.group == Group::Human) human_pairs.insert(d.pair_id);
    if (d.group == Group::AI) ai_pairs.emplace_back(line, d.pair_id);
    if (!d.parent_id.empty()) parent_refs.emplace_back(line, d.id, d.parent_id);
  }

  // Throws on the first problem, or appends every problem when collecting.
  void check(std::vector<ValidationIssue>* issues = nullptr) const {
    for (const auto& [line, id, parent] : parent_refs) {
      if (ids.count(parent) != 0) continue;
      const std::string msg = "record '" + id + "' references missing parent '" + parent + "'";
      if (issues == nullptr) throw DanglingParent("line " + std::to_string(line) + ": " + msg);
      issues->push_back({line, "parent_id", msg});
    }
    for (const auto& [line, pair] : ai_pairs) {
      if (human_pairs.count(pair) != 0) continue;
      const std::string msg = "AI record has no human counterpart in pair '" + pair + "'";
      if (issues == nullptr) throw SchemaViolation(line, "pair_id", msg);
      issues->push_back({line, "pair_id", msg});
    }
  }
};

template <typename LineSource>
CorpusManifest load_from_lines(LineSource&& source, const LoadOptions& options) {
  CorpusManifest manifest;
  LinkState links;
  std::string line;
  std::size_t line_no = 0;
  while (source(line)) {
    ++line_no;
    if (line.empty()) continue;
    Document d = parse_record(line, line_no, options);
    links.add(d, line_no);
    manifest.records.push_back(std::move(d));
  }
  if (options.check_links) links.check();
  return manifest;
}

}  // namespace

CorpusManifest load_corpus(const std::string& path, const LoadOptions& options) {
  GzLineReader reader(path);
  return load_from_lines([&reader](std::string& line) { return reader.next(line); }, options);
}

CorpusManifest corpus_from_jsonl(std::string_view text, const LoadOptions& options) {
  std::size_t pos = 0;
  return load_from_lines(
      [&](std::string& line) {
        if (pos >= text.size()) return false;
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        line.assign(text.substr(pos, end - pos));
        pos = end + (nl == std::string_view::npos ? 0 : 1);
        return true;
      },
      options);
}

std::string corpus_to_jsonl(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& d : manifest.records) {
    nlohmann::ordered_json j{{"id", d.id}, {"pair_id", d.pair_id}, {"dataset", d.dataset}, {"group", to_string(d.group)}};
    if (!d.generator.empty()) j["generator"] = d.generator;
    if (!d.intermediate_language.empty()) j["language"] = d.intermediate_language;
    if (!d.parent_id.empty()) j["parent_id"] = d.parent_id;
    j["text"] = d.body;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ValidationIssue> validate_corpus(const std::string& path) {
  GzLineReader reader(path);
  std::vector<ValidationIssue> issues;
  LinkState links;
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Document d = parse_record(line, line_no, LoadOptions{});
      links.add(d, line_no);
    } catch (const SchemaViolation& e) {
      issues.push_back({e.line(), e.field(), e.what()});
    }
  }
  links.check(&issues);
  return issues;
}

std::pair<CorpusManifest, CorpusManifest> split_corpus(const CorpusManifest& manifest, const SplitSpec& spec) {
  if (spec.train_fraction < 0.0 || spec.test_fraction < 0.0 ||
      std::abs(spec.train_fraction + spec.test_fraction - 1.0) > 1e-9)
    throw ConfigError("split fractions must be non-negative and sum to 1");

  std::vector<std::string> pairs;
  std::unordered_set<std::string> seen;
  for (const auto& d : manifest.records)
    if (seen.insert(d.pair_id).second) pairs.push_back(d.pair_id);

  // Rank pairs by seeded hash so fractions land within one pair exactly.
  std::sort(pairs.begin(), pairs.end(), [&](const std::string& a, const std::string& b) {
    const auto ha = splitmix64(mix_seed(spec.seed, a));
    const auto hb = splitmix64(mix_seed(spec.seed, b));
    return ha != hb ? ha < hb : a < b;
  });
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(pairs.size())));
  std::unordered_set<std::string> train_pairs(pairs.begin(), pairs.begin() + std::min(n_train, pairs.size()));

  std::pair<CorpusManifest, CorpusManifest> out;
  for (const auto& d : manifest.records)
    (train_pairs.count(d.pair_id) != 0 ? out.first : out.second).records.push_back(d);
  return out;
}

BGroupPolicy b_policy_from_string(const std::string& name) {
  if (name == "ai_only") return BGroupPolicy::AiParentsOnly;
  if (name == "all") return BGroupPolicy::AllBackTranslations;
  throw ConfigError("unknown B-group policy: " + name + " (use ai_only or all)");
}

const char* to_string(BGroupPolicy policy) {
  return policy == BGroupPolicy::AiParentsOnly ? "ai_only" : "all";
}

GroupedCorpora group_corpora(const CorpusManifest& manifest, BGroupPolicy policy, bool require_backtranslated) {
  std::unordered_map<std::string, Group> group_of;
  for (const auto& d : manifest.records) group_of.emplace(d.id, d.group);

  GroupedCorpora out;
  for (const auto& d : manifest.records) {
    switch (d.group) {
      case Group::Human:
        out.human.push_back(d);
        break;
      case Group::AI:
        out.ai.push_back(d);
        break;
      case Group::BackTranslated: {
        const auto parent = group_of.find(d.parent_id);
        if (parent == group_of.end())
          throw DanglingParent("record '" + d.id + "' references missing parent '" + d.parent_id + "'");
        if (policy == BGroupPolicy::AllBackTranslations || parent->second == Group::AI)
          out.backtranslated.push_back(d);
        break;
      }
      case Group::Manipulated:
        break;  // evaluation input, never a training group
    }
  }
  if (out.human.empty()) throw MissingGroup("corpus has no human documents");
  if (out.ai.empty()) throw MissingGroup("corpus has no AI documents");
  if (require_backtranslated && out.backtranslated.empty())
    throw MissingGroup("corpus has no back-translated documents for the B group");
  return out;
}

}  // namespace btx
