#include "btx/translation.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <semaphore>
#include <thread>

#include "btx/errors.hpp"
#include "btx/ioutil.hpp"
#include "btx/sha256.hpp"
#include "btx/utf8.hpp"
#include "json.hpp"

namespace btx {

namespace {

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace

const std::vector<std::string>& registry_languages() {
  static const std::vector<std::string> langs = {"PT", "ES", "FR", "IT", "ZH", "NL", "DA", "JA", "DE", "KO"};
  return langs;
}

bool is_registered_language(std::string_view code) {
  const auto& langs = registry_languages();
  return std::find(langs.begin(), langs.end(), ascii_upper(code)) != langs.end();
}

std::size_t registry_rank(std::string_view code) {
  const auto& langs = registry_languages();
  const std::string upper = ascii_upper(code);
  for (std::size_t i = 0; i < langs.size(); ++i)
    if (langs[i] == upper) return i;
  return langs.size();
}

std::string normalize_language(std::string_view code) {
  const std::string upper = ascii_upper(code);
  if (upper.empty()) throw ConfigError("empty language code");
  if (upper == "EN") throw ConfigError("EN is the pivot, not an intermediate language");
  return upper;
}

void SystemClock::sleep_until(std::chrono::steady_clock::time_point tp) { std::this_thread::sleep_until(tp); }

SystemClock& SystemClock::instance() {
  static SystemClock clock;
  return clock;
}

RateLimiter::RateLimiter(std::size_t per_second, Clock& clock) : per_second_(per_second), clock_(clock) {
  if (per_second_ == 0) throw ConfigError("rate limit must be positive");
}

void RateLimiter::acquire() {
  using namespace std::chrono_literals;
  std::lock_guard<std::mutex> lock(mutex_);
  for (;;) {
    const auto now = clock_.now();
    while (!window_.empty() && window_.front() <= now - 1s) window_.pop_front();
    if (window_.size() < per_second_) {
      window_.push_back(now);
      return;
    }
    clock_.sleep_until(window_.front() + 1s);
  }
}

TranslationCache::TranslationCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.contains("key") || !rec.contains("output_text")) continue;
    entries_[rec["key"].get<std::string>()] = rec["output_text"].get<std::string>();
  }
}

std::string TranslationCache::make_key(std::string_view provider, std::string_view src, std::string_view dst,
                                       std::string_view text) {
  std::string material;
  material.append(provider).push_back('|');
  material.append(ascii_upper(src)).push_back('|');
  material.append(ascii_upper(dst)).push_back('|');
  material.append(utf8::normalize_whitespace(text));
  return sha256_hex(material);
}

std::optional<std::string> TranslationCache::lookup(std::string_view provider, std::string_view src,
                                                    std::string_view dst, std::string_view text) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = entries_.find(make_key(provider, src, dst, text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::store(std::string_view provider, std::string_view src, std::string_view dst,
                             std::string_view text, std::string_view output) {
  const std::string key = make_key(provider, src, dst, text);
  std::lock_guard<std::mutex> lock(mutex_);
  const auto [it, inserted] = entries_.emplace(key, std::string(output));
  if (!inserted || path_.empty()) return;
  const nlohmann::ordered_json rec = {
      {"key", key},
      {"provider", std::string(provider)},
      {"src", ascii_upper(src)},
      {"dst", ascii_upper(dst)},
      {"input_sha", sha256_hex(utf8::normalize_whitespace(text))},
      {"output_text", std::string(output)},
      {"timestamp", iso8601_utc_now()},
  };
  std::ofstream out(path_, std::ios::app);
  out << rec.dump() << "\n";
}

std::size_t TranslationCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

CachingProvider::CachingProvider(TranslationCache& cache, TranslationProvider& inner)
    : cache_(cache), inner_(&inner) {}

CachingProvider::CachingProvider(TranslationCache& cache, std::string offline_name)
    : cache_(cache), offline_name_(std::move(offline_name)) {
  if (offline_name_.empty()) throw ConfigError("offline cache provider needs the recorded provider name");
}

std::string CachingProvider::name() const { return inner_ ? inner_->name() : offline_name_; }

bool CachingProvider::supports(std::string_view src, std::string_view dst) const {
  if (inner_) return inner_->supports(src, dst);
  const std::string s = ascii_upper(src), d = ascii_upper(dst);
  if (s == d) return false;
  return (s == "EN" && is_registered_language(d)) || (d == "EN" && is_registered_language(s));
}

std::string CachingProvider::translate(std::string_view text, std::string_view src, std::string_view dst) {
  if (const auto hit = cache_.lookup(name(), src, dst, text)) return *hit;
  if (!inner_)
    throw ProviderFailure("translation not in cache for " + ascii_upper(src) + "->" + ascii_upper(dst) +
                          " (offline replay)");
  std::string out = inner_->translate(text, src, dst);
  cache_.store(name(), src, dst, text, out);
  return out;
}

const BackTranslation* BackTranslationSet::find(std::string_view lang) const {
  const std::string upper = ascii_upper(lang);
  for (const auto& [code, bt] : entries)
    if (code == upper) return &bt;
  return nullptr;
}

Document round_trip(const Document& doc, const std::string& lang, TranslationProvider& provider,
                    const RoundTripOptions& options) {
  validate_document(doc);
  const std::string code = normalize_language(lang);
  if (!provider.supports("EN", code) || !provider.supports(code, "EN"))
    throw UnsupportedPair("provider '" + provider.name() + "' does not support EN<->" + code);

  Clock& clock = options.clock ? *options.clock : SystemClock::instance();
  const int attempts = std::max(1, options.retries);
  for (int attempt = 1;; ++attempt) {
    try {
      if (options.limiter) options.limiter->acquire();
      const std::string forward = provider.translate(doc.body, "EN", code);
      if (options.limiter) options.limiter->acquire();
      const std::string back = provider.translate(forward, code, "EN");
      if (utf8::normalize_whitespace(back).empty()) throw ProviderFailure("provider returned empty text");

      Document out = doc;
      out.id = doc.id + ":bt:" + ascii_lower(code);
      out.body = back;
      out.group = Group::BackTranslated;
      out.intermediate_language = code;
      out.parent_id = doc.id;
      out.word_count = tokenize_words(back).size();
      return out;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      if (attempt >= attempts)
        throw ProviderFailure("round trip EN<->" + code + " failed after " + std::to_string(attempts) +
                              " attempts: " + e.what());
      clock.sleep_until(clock.now() + options.backoff * (1LL << (attempt - 1)));
    }
  }
}

BackTranslationSet back_translate_all(const Document& doc, const std::vector<std::string>& langs,
                                      TranslationProvider& provider, const RoundTripOptions& options) {
  if (langs.empty()) throw ConfigError("no intermediate languages requested");
  std::vector<std::string> codes;
  for (const auto& lang : langs) {
    const std::string code = normalize_language(lang);
    if (std::find(codes.begin(), codes.end(), code) != codes.end())
      throw ConfigError("duplicate language requested: " + code);
    codes.push_back(code);
  }
  std::sort(codes.begin(), codes.end(), [](const std::string& a, const std::string& b) {
    const auto ra = registry_rank(a), rb = registry_rank(b);
    return ra != rb ? ra < rb : a < b;
  });

  struct Slot {
    std::optional<BackTranslation> bt;
    std::string error;
  };
  std::vector<Slot> slots(codes.size());
  auto work = [&](std::size_t i) {
    try {
      Document bt = round_trip(doc, codes[i], provider, options);
      SentenceList sentences = segment_sentences(bt.body, AbbreviationSet::builtin(), bt.id);
      slots[i].bt = BackTranslation{std::move(bt), std::move(sentences)};
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(options.max_in_flight, 1), codes.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < codes.size(); ++i) work(i);
  } else {
    std::counting_semaphore<64> gate(static_cast<std::ptrdiff_t>(workers));
    std::vector<std::thread> threads;
    threads.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i)
      threads.emplace_back([&, i] {
        gate.acquire();
        work(i);
        gate.release();
      });
    for (auto& t : threads) t.join();
  }

  BackTranslationSet set;
  set.original = doc;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (slots[i].bt) {
      set.entries.emplace_back(codes[i], std::move(*slots[i].bt));
    } else {
      const std::string msg = codes[i] + " omitted: " + slots[i].error;
      set.warnings.push_back(msg);
      if (options.warn) options.warn(msg);
    }
  }
  if (set.entries.empty()) {
    std::string detail;
    for (const auto& w : set.warnings) detail += "\n  " + w;
    throw AllLanguagesFailed("every language failed for document '" + doc.id + "':" + detail);
  }
  return set;
}

}  // namespace btx
