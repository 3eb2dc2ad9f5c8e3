#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "btx/document.hpp"
#include "btx/text.hpp"

namespace btx {

// Intermediate-language registry, in canonical order. English is always the
// pivot and is deliberately not listed. The order doubles as the tie-break
// order wherever per-language results compete.
const std::vector<std::string>& registry_languages();
bool is_registered_language(std::string_view code);
// Position in the registry; unregistered codes sort after all registered
// ones, alphabetically.
std::size_t registry_rank(std::string_view code);
std::string normalize_language(std::string_view code);  // uppercases, validates non-EN

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string name() const = 0;
  virtual bool supports(std::string_view src, std::string_view dst) const = 0;
  // Total for supported pairs; non-empty output for non-empty input.
  virtual std::string translate(std::string_view text, std::string_view src, std::string_view dst) = 0;
};

// Injectable time source so backoff and rate limiting are testable without
// real waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::steady_clock::time_point now() = 0;
  virtual void sleep_until(std::chrono::steady_clock::time_point tp) = 0;
};

class SystemClock final : public Clock {
 public:
  std::chrono::steady_clock::time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_until(std::chrono::steady_clock::time_point tp) override;
  static SystemClock& instance();
};

// Sliding-window limiter: at most `per_second` acquisitions in any one-second
// window. acquire() blocks (via the clock) until a slot frees up.
class RateLimiter {
 public:
  RateLimiter(std::size_t per_second, Clock& clock);
  void acquire();

 private:
  std::size_t per_second_;
  Clock& clock_;
  std::mutex mutex_;
  std::deque<std::chrono::steady_clock::time_point> window_;
};

// Append-only JSONL store of provider outputs keyed by
// sha256(provider|src|dst|normalized input). Safe for concurrent lookups and
// serialized stores.
class TranslationCache {
 public:
  TranslationCache() = default;
  explicit TranslationCache(std::string path);  // loads existing records

  static std::string make_key(std::string_view provider, std::string_view src, std::string_view dst,
                              std::string_view text);

  std::optional<std::string> lookup(std::string_view provider, std::string_view src, std::string_view dst,
                                    std::string_view text) const;
  void store(std::string_view provider, std::string_view src, std::string_view dst, std::string_view text,
             std::string_view output);
  std::size_t size() const;

 private:
  std::string path_;  // empty = memory only
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

// Serves translations from the cache; on a miss, consults the wrapped
// provider and records the result, or fails when running offline (no inner
// provider). The cache key uses the inner provider's name so recorded
// sessions replay under the same identity.
class CachingProvider final : public TranslationProvider {
 public:
  CachingProvider(TranslationCache& cache, TranslationProvider& inner);
  CachingProvider(TranslationCache& cache, std::string offline_name);

  std::string name() const override;
  bool supports(std::string_view src, std::string_view dst) const override;
  std::string translate(std::string_view text, std::string_view src, std::string_view dst) override;

 private:
  TranslationCache& cache_;
  TranslationProvider* inner_ = nullptr;
  std::string offline_name_;
};

// Client for a generic translation REST endpoint:
// POST {"text","source","target","model"} -> {"translation": "..."}.
// Plain http; the API key travels as a bearer token when present.
class HttpTranslationProvider final : public TranslationProvider {
 public:
  HttpTranslationProvider(std::string endpoint, std::string api_key = "", std::string model = "");

  std::string name() const override { return "http"; }
  bool supports(std::string_view src, std::string_view dst) const override;
  std::string translate(std::string_view text, std::string_view src, std::string_view dst) override;

 private:
  std::string endpoint_;
  std::string api_key_;
  std::string model_;
};

// Synonym table for the simulator: "word: alt1, alt2" lines, '#' comments.
class Thesaurus {
 public:
  static Thesaurus load(const std::string& path);
  static Thesaurus parse(std::string_view content);

  const std::vector<std::string>* synonyms(std::string_view word_lower) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Knobs for the offline round-trip simulator. Rates are per-token (or
// per-sentence for reordering) probabilities before the per-language
// multiplier; languages missing from `multipliers` use 1.0.
struct SimulatorConfig {
  double synonym_rate = 0.2;
  double insert_rate = 0.03;
  double delete_rate = 0.03;
  double reorder_rate = 0.15;
  std::map<std::string, double> multipliers = default_language_multipliers();

  static std::map<std::string, double> default_language_multipliers();
};

// Deterministic stand-in for a real translation service. The outbound
// English -> L leg returns its input untouched; the return leg applies
// seeded synonym substitution, light function-word churn, and occasional
// clause reordering, scaled by the language multiplier. Identical
// (seed, text, lang) triples always produce identical output.
class SimulatorProvider final : public TranslationProvider {
 public:
  SimulatorProvider(std::uint64_t seed, Thesaurus thesaurus, SimulatorConfig config = {});

  std::string name() const override { return "simulator"; }
  bool supports(std::string_view src, std::string_view dst) const override;
  std::string translate(std::string_view text, std::string_view src, std::string_view dst) override;

 private:
  std::string perturb(std::string_view text, std::string_view lang) const;

  std::uint64_t seed_;
  Thesaurus thesaurus_;
  SimulatorConfig config_;
};

struct BackTranslation {
  Document doc;
  SentenceList sentences;
};

// One original with its per-language round trips, ordered by the registry.
struct BackTranslationSet {
  Document original;
  std::vector<std::pair<std::string, BackTranslation>> entries;
  std::vector<std::string> warnings;  // languages omitted after retry exhaustion

  std::size_t m() const { return entries.size(); }
  const BackTranslation* find(std::string_view lang) const;
};

struct RoundTripOptions {
  int retries = 3;  // total attempts per round trip
  std::chrono::milliseconds backoff{100};
  RateLimiter* limiter = nullptr;
  Clock* clock = nullptr;  // backoff sleeps; defaults to the system clock
  std::size_t max_in_flight = 4;
  std::function<void(const std::string&)> warn;
};

// One English -> lang -> English trip. Retries transient provider failures
// with exponential backoff; throws ProviderFailure once attempts run out,
// UnsupportedPair immediately.
Document round_trip(const Document& doc, const std::string& lang, TranslationProvider& provider,
                    const RoundTripOptions& options = {});

// Round trips for every requested language, concurrently up to
// max_in_flight. Failed languages are omitted with a warning; throws
// AllLanguagesFailed when nothing survives.
BackTranslationSet back_translate_all(const Document& doc, const std::vector<std::string>& langs,
                                      TranslationProvider& provider, const RoundTripOptions& options = {});

}  // namespace btx
