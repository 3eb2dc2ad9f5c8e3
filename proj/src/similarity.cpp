#include "btx/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "btx/errors.hpp"
#include "btx/sha256.hpp"
#include "btx/text.hpp"
#include "btx/utf8.hpp"
#include "httplib.h"
#include "json.hpp"

namespace btx {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("bad endpoint url: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace

double lexical_cosine(std::string_view a, std::string_view b) {
  const auto ta = tokenize_words(a);
  const auto tb = tokenize_words(b);
  if (ta.empty() || tb.empty()) return 0.0;
  std::map<std::string, double> ca, cb;
  for (const auto& t : ta) ca[t] += 1.0;
  for (const auto& t : tb) cb[t] += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [word, count] : ca) {
    na += count * count;
    if (const auto it = cb.find(word); it != cb.end()) dot += count * it->second;
  }
  for (const auto& [word, count] : cb) nb += count * count;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

GateResult semantic_gate(const Document& original, const Document& candidate, const GateConfig& cfg,
                         SimilarityScorer& scorer) {
  validate_document(original);
  validate_document(candidate);
  GateResult r;
  r.score = scorer.score(original.body, candidate.body);
  r.pass = r.score >= cfg.threshold;
  return r;
}

EmbeddingServiceScorer::EmbeddingServiceScorer(std::string endpoint, std::string cache_path)
    : endpoint_(std::move(endpoint)), cache_path_(std::move(cache_path)) {
  if (cache_path_.empty()) return;
  std::ifstream in(cache_path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("hash") || !rec.contains("vector")) continue;
    cache_[rec["hash"].get<std::string>()] = rec["vector"].get<std::vector<double>>();
  }
}

std::vector<double> EmbeddingServiceScorer::fetch(const std::string& text) {
  const ParsedUrl url = parse_url(endpoint_);
  httplib::Client client(url.base);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  const nlohmann::json body = {{"texts", {text}}};
  const auto res = client.Post(url.path, body.dump(), "application/json");
  if (!res) throw ServiceUnavailable("embedding endpoint unreachable: " + endpoint_);
  if (res->status != 200)
    throw ServiceUnavailable("embedding endpoint returned status " + std::to_string(res->status));
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("vectors") || !reply["vectors"].is_array() ||
      reply["vectors"].size() != 1 || !reply["vectors"][0].is_array() || reply["vectors"][0].empty())
    throw MalformedResponse("embedding endpoint reply does not match {vectors: [[...]]}");
  std::vector<double> vec;
  for (const auto& v : reply["vectors"][0]) {
    if (!v.is_number()) throw MalformedResponse("embedding vector holds a non-number");
    vec.push_back(v.get<double>());
  }
  return vec;
}

std::vector<double> EmbeddingServiceScorer::embed(std::string_view text) {
  const std::string key = sha256_hex(text);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const std::vector<double> vec = fetch(std::string(text));
  std::lock_guard<std::mutex> lock(mutex_);
  const auto [it, inserted] = cache_.emplace(key, vec);
  if (inserted && !cache_path_.empty()) {
    std::ofstream out(cache_path_, std::ios::app);
    out << nlohmann::json{{"hash", key}, {"vector", vec}}.dump() << "\n";
  }
  return it->second;
}

double EmbeddingServiceScorer::score(std::string_view a, std::string_view b) {
  if (utf8::normalize_whitespace(a).empty() || utf8::normalize_whitespace(b).empty()) return 0.0;
  if (a == b) return 1.0;
  return cosine(embed(a), embed(b));
}

std::unique_ptr<SimilarityScorer> make_scorer(const std::string& name, const std::string& endpoint,
                                              const std::string& cache_path) {
  if (name == "tf_cosine") return std::make_unique<TfCosineScorer>();
  if (name == "embedding_service") {
    if (endpoint.empty()) throw ConfigError("embedding_service scorer needs an endpoint");
    return std::make_unique<EmbeddingServiceScorer>(endpoint, cache_path);
  }
  throw ConfigError("unknown similarity scorer: " + name);
}

}  // namespace btx
