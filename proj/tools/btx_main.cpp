#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "btx/combiner.hpp"
#include "btx/config.hpp"
#include "btx/dataset.hpp"
#include "btx/detector.hpp"
#include "btx/errors.hpp"
#include "btx/evaluation.hpp"
#include "btx/ioutil.hpp"
#include "btx/similarity.hpp"
#include "btx/text.hpp"
#include "btx/translation.hpp"

namespace {

using namespace btx;
using ordered_json = nlohmann::ordered_json;

std::string fmt(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split_csv(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Options shared by every subcommand. The manifest defaults next to the first
// output file; --jobs 0 means hardware parallelism.

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string manifest_path;
  std::size_t jobs = 0;
  CLI::Option* jobs_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "INI-style config file");
  cmd->add_option("--set", opts.overrides, "Override one config value (section.key=value); repeatable")
      ->type_name("KEY=VALUE");
  cmd->add_option("--manifest", opts.manifest_path, "Run-manifest path (default: <first output>.manifest.json)");
  opts.jobs_opt = cmd->add_option("--jobs", opts.jobs, "Worker threads (0 = available parallelism)");
}

Config make_config(const CommonOpts& opts) {
  Config cfg = opts.config_path.empty() ? Config() : Config::load(opts.config_path);
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects section.key=value, got '" + item + "'");
    cfg.set_dotted(item.substr(0, eq), item.substr(eq + 1));
  }
  return cfg;
}

// Readers that write the resolved value back, so the manifest echo shows
// exactly what the run used, defaults included.
std::string use_string(Config& cfg, const std::string& sec, const std::string& key, std::string fallback) {
  std::string v = cfg.get_string(sec, key, std::move(fallback));
  cfg.set(sec, key, v);
  return v;
}

double use_double(Config& cfg, const std::string& sec, const std::string& key, double fallback) {
  const double v = cfg.get_double(sec, key, fallback);
  cfg.set(sec, key, fmt(v));
  return v;
}

std::uint64_t use_u64(Config& cfg, const std::string& sec, const std::string& key, std::uint64_t fallback) {
  const std::uint64_t v = cfg.get_u64(sec, key, fallback);
  cfg.set(sec, key, std::to_string(v));
  return v;
}

std::size_t use_size(Config& cfg, const std::string& sec, const std::string& key, std::size_t fallback) {
  const std::size_t v = cfg.get_size(sec, key, fallback);
  cfg.set(sec, key, std::to_string(v));
  return v;
}

bool use_bool(Config& cfg, const std::string& sec, const std::string& key, bool fallback) {
  const bool v = cfg.get_bool(sec, key, fallback);
  cfg.set(sec, key, v ? "true" : "false");
  return v;
}

std::array<double, 6> use_alphas(Config& cfg) {
  const auto v = cfg.get_alphas("detector", "alphas", MesasConfig{}.alphas);
  std::vector<std::string> parts;
  for (double a : v) parts.push_back(fmt(a));
  cfg.set("detector", "alphas", join(parts));
  return v;
}

std::vector<std::string> use_languages(Config& cfg) {
  std::vector<std::string> raw = cfg.get_list("translation", "languages");
  if (raw.empty()) raw = registry_languages();
  std::vector<std::string> codes;
  for (const auto& lang : raw) codes.push_back(normalize_language(lang));
  cfg.set("translation", "languages", join(codes));
  return codes;
}

void emit_manifest(const std::string& command, const Config& cfg, const CommonOpts& opts,
                   const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  std::string path = opts.manifest_path;
  if (path.empty()) {
    if (outputs.empty()) return;
    path = outputs.front() + ".manifest.json";
  }
  write_file(path, run_manifest(command, cfg, inputs, outputs));
}

LoadOptions corpus_options(Config& cfg, bool default_check_links) {
  LoadOptions options;
  options.truncate_words = use_size(cfg, "corpus", "truncate_words", 0);
  options.check_links = use_bool(cfg, "corpus", "check_links", default_check_links);
  return options;
}

// Derived artifacts (back-translation, manipulation, and score files) are
// loaded on their own, so their parent links point outside the file.
LoadOptions partial_options() {
  LoadOptions options;
  options.check_links = false;
  return options;
}

CorpusManifest apply_split(Config& cfg, CorpusManifest manifest) {
  const std::string fold = use_string(cfg, "corpus", "split", "all");
  if (fold == "all") return manifest;
  if (fold != "train" && fold != "test") throw ConfigError("corpus split must be all, train, or test; got '" + fold + "'");
  SplitSpec spec;
  spec.train_fraction = use_double(cfg, "corpus", "train_fraction", spec.train_fraction);
  spec.test_fraction = use_double(cfg, "corpus", "test_fraction", spec.test_fraction);
  spec.seed = use_u64(cfg, "corpus", "split_seed", spec.seed);
  auto [train, test] = split_corpus(manifest, spec);
  return fold == "train" ? std::move(train) : std::move(test);
}

// ---------------------------------------------------------------------------
// Provider wiring.

// Passes text through untouched in both directions. Useful for pipeline
// plumbing tests: round trips reproduce their input exactly.
class IdentityProvider final : public TranslationProvider {
 public:
  std::string name() const override { return "identity"; }
  bool supports(std::string_view src, std::string_view dst) const override {
    return (src == "EN" && is_registered_language(dst)) || (is_registered_language(src) && dst == "EN");
  }
  std::string translate(std::string_view text, std::string_view, std::string_view) override {
    return std::string(text);
  }
};

struct TranslationStack {
  std::vector<std::string> languages;
  std::unique_ptr<TranslationCache> cache;
  std::unique_ptr<TranslationProvider> inner;
  std::unique_ptr<CachingProvider> cached;
  std::unique_ptr<RateLimiter> limiter;
  RoundTripOptions options;

  TranslationProvider& provider() { return cached ? static_cast<TranslationProvider&>(*cached) : *inner; }
};

TranslationStack make_translation_stack(Config& cfg) {
  TranslationStack stack;
  stack.languages = use_languages(cfg);
  const std::string name = use_string(cfg, "translation", "provider", "simulator");
  const std::string cache_path = use_string(cfg, "translation", "cache_path", "");
  if (name == "simulator") {
    const std::uint64_t seed = use_u64(cfg, "translation", "seed", 0);
    const std::string thesaurus_path = use_string(cfg, "translation", "thesaurus", "");
    SimulatorConfig sim;
    sim.synonym_rate = use_double(cfg, "translation", "synonym_rate", sim.synonym_rate);
    sim.insert_rate = use_double(cfg, "translation", "insert_rate", sim.insert_rate);
    sim.delete_rate = use_double(cfg, "translation", "delete_rate", sim.delete_rate);
    sim.reorder_rate = use_double(cfg, "translation", "reorder_rate", sim.reorder_rate);
    Thesaurus table = thesaurus_path.empty() ? Thesaurus::parse("") : Thesaurus::load(thesaurus_path);
    stack.inner = std::make_unique<SimulatorProvider>(seed, std::move(table), sim);
  } else if (name == "identity") {
    stack.inner = std::make_unique<IdentityProvider>();
  } else if (name == "http") {
    const std::string endpoint = use_string(cfg, "translation", "endpoint", "");
    if (endpoint.empty()) throw ConfigError("[translation] endpoint is required for the http provider");
    const std::string key_env = use_string(cfg, "translation", "api_key_env", "");
    std::string api_key;
    if (!key_env.empty()) {
      const char* value = std::getenv(key_env.c_str());
      if (value == nullptr || *value == '\0')
        throw ConfigError("environment variable '" + key_env + "' named by [translation] api_key_env is not set");
      api_key = value;
    }
    const std::string model = use_string(cfg, "translation", "model", "");
    stack.inner = std::make_unique<HttpTranslationProvider>(endpoint, api_key, model);
  } else if (name == "cache_only") {
    if (cache_path.empty()) throw ConfigError("[translation] cache_path is required for the cache_only provider");
    const std::string replay = use_string(cfg, "translation", "replay_provider", "http");
    stack.cache = std::make_unique<TranslationCache>(cache_path);
    stack.cached = std::make_unique<CachingProvider>(*stack.cache, replay);
  } else {
    throw ConfigError("[translation] provider must be simulator, identity, http, or cache_only; got '" + name + "'");
  }
  if (stack.inner && !cache_path.empty()) {
    stack.cache = std::make_unique<TranslationCache>(cache_path);
    stack.cached = std::make_unique<CachingProvider>(*stack.cache, *stack.inner);
  }
  const std::size_t rate = use_size(cfg, "translation", "rate_limit_per_s", 0);
  if (rate > 0) {
    stack.limiter = std::make_unique<RateLimiter>(rate, SystemClock::instance());
    stack.options.limiter = stack.limiter.get();
  }
  stack.options.retries = static_cast<int>(use_size(cfg, "translation", "retries", 3));
  stack.options.backoff = std::chrono::milliseconds(use_u64(cfg, "translation", "backoff_ms", 100));
  stack.options.max_in_flight = use_size(cfg, "translation", "max_in_flight", 4);
  return stack;
}

std::unique_ptr<SimilarityScorer> make_similarity(Config& cfg) {
  const std::string name = use_string(cfg, "similarity", "scorer", "tf_cosine");
  const std::string endpoint = use_string(cfg, "similarity", "endpoint", "");
  const std::string cache_path = use_string(cfg, "similarity", "cache_path", "");
  return make_scorer(name, endpoint, cache_path);
}

CombineStrategy resolve_strategy(Config& cfg, bool require_seed_for_random) {
  const std::string name = use_string(cfg, "combine", "strategy", "wer_max");
  std::uint64_t seed = 0;
  if (name == "random") {
    if (require_seed_for_random && !cfg.has("combine", "seed"))
      throw ConfigError("strategy 'random' needs an explicit seed (--seed or [combine] seed)");
    seed = use_u64(cfg, "combine", "seed", 0);
  }
  return strategy_from_string(name, seed);
}

// ---------------------------------------------------------------------------
// Model plumbing shared by score / evaluate / ablate.

struct LoadedModel {
  bool is_ensemble = false;
  DetectorModel single;
  EnsembleModel ensemble;

  ScoreFn score_fn() const {
    if (is_ensemble) {
      const EnsembleModel* m = &ensemble;
      return [m](const Document& doc) { return ensemble_predict(doc, *m); };
    }
    const DetectorModel* m = &single;
    return [m](const Document& doc) { return predict(doc, *m); };
  }
};

LoadedModel load_model_file(const std::string& path) {
  const std::string text = read_file(path);
  LoadedModel model;
  const auto probe = nlohmann::json::parse(text, nullptr, false);
  if (probe.is_object() && probe.contains("uni") && probe.contains("bi")) {
    model.is_ensemble = true;
    model.ensemble = ensemble_from_json(text);
  } else {
    model.single = model_from_json(text);
  }
  return model;
}

std::string dataset_label(const std::vector<Document>& records) {
  std::string label;
  for (const auto& doc : records) {
    if (label.empty()) {
      label = doc.dataset;
    } else if (label != doc.dataset) {
      return "mixed";
    }
  }
  return label;
}

void split_groups(const CorpusManifest& manifest, std::vector<Document>& humans, std::vector<Document>& ais) {
  for (const auto& doc : manifest.records) {
    if (doc.group == Group::Human) humans.push_back(doc);
    if (doc.group == Group::AI) ais.push_back(doc);
  }
  if (humans.empty()) throw MissingGroup("evaluation corpus has no human documents");
  if (ais.empty()) throw MissingGroup("evaluation corpus has no ai documents");
}

// Rebuilds per-original back-translation sets from a JSONL artifact, keyed by
// parent_id. Entries come back in registry language order.
std::unordered_map<std::string, std::vector<std::pair<std::string, BackTranslation>>> index_backtranslations(
    const CorpusManifest& manifest) {
  std::unordered_map<std::string, std::vector<std::pair<std::string, BackTranslation>>> by_parent;
  for (const auto& rec : manifest.records) {
    if (rec.group != Group::BackTranslated)
      throw DomainError("record '" + rec.id + "' in the back-translation file has group '" +
                        std::string(to_string(rec.group)) + "'");
    BackTranslation bt;
    bt.doc = rec;
    bt.sentences = segment_sentences(rec.body, AbbreviationSet::builtin(), rec.id);
    by_parent[rec.parent_id].emplace_back(rec.intermediate_language, std::move(bt));
  }
  for (auto& [parent, entries] : by_parent) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      const auto ra = registry_rank(a.first), rb = registry_rank(b.first);
      return ra != rb ? ra < rb : a.first < b.first;
    });
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].first == entries[i - 1].first)
        throw DomainError("duplicate back-translation for parent '" + parent + "' language " + entries[i].first);
  }
  return by_parent;
}

// ---------------------------------------------------------------------------
// backtranslate

struct BacktranslateCmd {
  CommonOpts common;
  std::string corpus, out;
  std::string groups = "ai";
  std::string languages, provider;
  std::uint64_t seed = 0;
  CLI::Option* languages_opt = nullptr;
  CLI::Option* provider_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (languages_opt->count()) cfg.set("translation", "languages", languages);
    if (provider_opt->count()) cfg.set("translation", "provider", provider);
    if (seed_opt->count()) cfg.set("translation", "seed", std::to_string(seed));
    cfg.set("translation", "groups", groups);

    std::vector<Group> wanted;
    for (const auto& name : split_csv(groups)) {
      Group g;
      try {
        g = group_from_string(name);
      } catch (const DomainError&) {
        throw ConfigError("--groups: unknown group '" + name + "'");
      }
      if (g != Group::Human && g != Group::AI)
        throw ConfigError("--groups: only human and ai documents can be round-tripped");
      wanted.push_back(g);
    }
    if (wanted.empty()) throw ConfigError("--groups: at least one group is required");

    TranslationStack stack = make_translation_stack(cfg);
    if (common.jobs_opt->count()) stack.options.max_in_flight = std::max<std::size_t>(1, common.jobs);

    const CorpusManifest input = load_corpus(corpus, corpus_options(cfg, true));
    CorpusManifest output;
    std::size_t sources = 0;
    for (const auto& doc : input.records) {
      if (std::find(wanted.begin(), wanted.end(), doc.group) == wanted.end()) continue;
      ++sources;
      BackTranslationSet set = back_translate_all(doc, stack.languages, stack.provider(), stack.options);
      for (const auto& warning : set.warnings) std::cerr << "warning: " << doc.id << ": " << warning << "\n";
      for (auto& [lang, bt] : set.entries) output.records.push_back(std::move(bt.doc));
    }
    if (sources == 0) throw DomainError("corpus has no documents in the requested groups (" + groups + ")");

    write_file(out, corpus_to_jsonl(output));
    std::cout << "back-translated " << sources << " documents into " << output.records.size() << " round trips\n";
    emit_manifest("backtranslate", cfg, common, {corpus}, {out});
  }
};

// ---------------------------------------------------------------------------
// combine

std::string default_provenance_path(const std::string& out) {
  const std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + ".provenance" + p.extension().string())).string();
}

struct CombineCmd {
  CommonOpts common;
  std::string corpus, backtranslations, out, provenance;
  std::string strategy;
  std::uint64_t seed = 0;
  CLI::Option* strategy_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (strategy_opt->count()) cfg.set("combine", "strategy", strategy);
    if (seed_opt->count()) cfg.set("combine", "seed", std::to_string(seed));
    const CombineStrategy strat = resolve_strategy(cfg, true);
    auto scorer = make_similarity(cfg);

    const CorpusManifest originals = load_corpus(corpus, corpus_options(cfg, true));
    auto by_parent = index_backtranslations(load_corpus(backtranslations, partial_options()));

    CorpusManifest output;
    std::string provenance_lines;
    std::unordered_set<std::string> matched;
    for (const auto& doc : originals.records) {
      auto it = by_parent.find(doc.id);
      if (it == by_parent.end()) continue;
      matched.insert(doc.id);
      BackTranslationSet set;
      set.original = doc;
      set.entries = std::move(it->second);
      ManipulatedDocument result = combine(set, strat, *scorer);
      provenance_lines += provenance_to_jsonl(result);
      output.records.push_back(std::move(result.doc));
    }
    if (matched.size() != by_parent.size()) {
      std::string missing;
      for (const auto& [parent, entries] : by_parent)
        if (!matched.count(parent) && (missing.empty() || parent < missing)) missing = parent;
      throw DanglingParent("back-translations reference parent '" + missing + "' absent from the corpus");
    }
    if (output.records.empty()) throw DomainError("no original document has back-translations to combine");

    const std::string provenance_path = provenance.empty() ? default_provenance_path(out) : provenance;
    write_file(out, corpus_to_jsonl(output));
    write_file(provenance_path, provenance_lines);
    std::cout << "combined " << output.records.size() << " documents (" << to_string(strat) << ")\n";
    emit_manifest("combine", cfg, common, {corpus, backtranslations}, {out, provenance_path});
  }
};

// ---------------------------------------------------------------------------
// gate

struct GateCmd {
  CommonOpts common;
  std::string corpus, candidates, out;
  std::string profile;
  double threshold = 0.0;
  CLI::Option* profile_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (profile_opt->count()) cfg.set("similarity", "profile", profile);
    if (threshold_opt->count()) cfg.set("similarity", "threshold", fmt(threshold));

    auto scorer = make_similarity(cfg);
    const std::string profile_name = use_string(cfg, "similarity", "profile", "psp");
    GateConfig gate_cfg;
    if (profile_name == "psp") {
      gate_cfg = GateConfig::psp_style();
    } else if (profile_name == "usee") {
      gate_cfg = GateConfig::usee_style();
    } else {
      throw ConfigError("similarity profile must be psp or usee; got '" + profile_name + "'");
    }
    gate_cfg.scorer = scorer->name();
    gate_cfg.threshold = use_double(cfg, "similarity", "threshold", gate_cfg.threshold);

    const CorpusManifest originals = load_corpus(corpus, corpus_options(cfg, true));
    const CorpusManifest cands = load_corpus(candidates, partial_options());
    if (cands.records.empty()) throw DomainError("candidate file has no documents");

    std::unordered_map<std::string, const Document*> by_id;
    for (const auto& doc : originals.records) by_id[doc.id] = &doc;

    std::string lines;
    std::size_t passed = 0;
    for (const auto& cand : cands.records) {
      if (cand.parent_id.empty()) throw DomainError("candidate '" + cand.id + "' has no parent_id");
      const auto it = by_id.find(cand.parent_id);
      if (it == by_id.end())
        throw DanglingParent("candidate '" + cand.id + "' references parent '" + cand.parent_id +
                             "' absent from the corpus");
      const GateResult result = semantic_gate(*it->second, cand, gate_cfg, *scorer);
      passed += result.pass ? 1 : 0;
      ordered_json line{{"id", cand.id}, {"parent_id", cand.parent_id}, {"score", result.score}, {"pass", result.pass}};
      lines += line.dump() + "\n";
    }

    write_file(out, lines);
    std::cout << "gate: " << passed << "/" << cands.records.size() << " passed (rate "
              << fmt(static_cast<double>(passed) / static_cast<double>(cands.records.size())) << ", threshold "
              << fmt(gate_cfg.threshold) << ")\n";
    emit_manifest("gate", cfg, common, {corpus, candidates}, {out});
  }
};

// ---------------------------------------------------------------------------
// train

struct TrainCmd {
  CommonOpts common;
  std::string corpus, out;
  std::string mode, split;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* split_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (mode_opt->count()) cfg.set("detector", "mode", mode);
    if (split_opt->count()) cfg.set("corpus", "split", split);

    const std::string mode_name = use_string(cfg, "detector", "mode", "mesas-unibi");
    if (mode_name != "esas" && mode_name != "mesas-uni" && mode_name != "mesas-unibi")
      throw ConfigError("detector mode must be esas, mesas-uni, or mesas-unibi; got '" + mode_name + "'");

    TrainOptions options;
    options.mode = mode_name == "esas" ? ScoringMode::Esas : ScoringMode::Mesas;
    options.mesas.q = use_size(cfg, "detector", "q", options.mesas.q);
    options.mesas.alphas = use_alphas(cfg);
    options.mesas.scale = esas_scale_from_string(use_string(cfg, "detector", "esas_scale", "occurrence_share"));
    options.hyper.learning_rate = use_double(cfg, "detector", "learning_rate", options.hyper.learning_rate);
    options.hyper.epochs = use_size(cfg, "detector", "epochs", options.hyper.epochs);
    options.hyper.l2 = use_double(cfg, "detector", "l2", options.hyper.l2);
    options.hyper.seed = use_u64(cfg, "detector", "seed", options.hyper.seed);
    const BGroupPolicy policy = b_policy_from_string(use_string(cfg, "detector", "b_group", "ai_only"));

    CorpusManifest manifest = apply_split(cfg, load_corpus(corpus, corpus_options(cfg, true)));
    const GroupedCorpora grouped = group_corpora(manifest, policy, options.mode == ScoringMode::Mesas);
    std::vector<Document> docs;
    docs.reserve(grouped.human.size() + grouped.ai.size() + grouped.backtranslated.size());
    docs.insert(docs.end(), grouped.human.begin(), grouped.human.end());
    docs.insert(docs.end(), grouped.ai.begin(), grouped.ai.end());
    docs.insert(docs.end(), grouped.backtranslated.begin(), grouped.backtranslated.end());

    if (mode_name == "mesas-unibi") {
      const EnsembleModel model = fit_ensemble(docs, options);
      write_file(out, ensemble_to_json(model));
      std::cout << "trained " << mode_name << ": unigram vocabulary " << model.uni.vocabulary.size()
                << ", bigram vocabulary " << model.bi.vocabulary.size() << "\n";
    } else {
      const EntityOrder order = EntityOrder::Unigram;
      const DetectorModel model = fit_detector(docs, order, options);
      write_file(out, model_to_json(model));
      std::cout << "trained " << mode_name << ": vocabulary " << model.vocabulary.size() << "\n";
    }
    emit_manifest("train", cfg, common, {corpus}, {out});
  }
};

// ---------------------------------------------------------------------------
// score

struct ScoreCmd {
  CommonOpts common;
  std::string model_path, corpus, out;
  std::string split;
  CLI::Option* split_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (split_opt->count()) cfg.set("corpus", "split", split);
    const LoadedModel model = load_model_file(model_path);
    const CorpusManifest manifest = apply_split(cfg, load_corpus(corpus, corpus_options(cfg, false)));
    const std::vector<double> scores = score_documents(manifest.records, model.score_fn(), common.jobs);

    std::string lines;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const Document& doc = manifest.records[i];
      ordered_json line{{"id", doc.id}, {"group", to_string(doc.group)}, {"score", scores[i]}};
      lines += line.dump() + "\n";
    }
    write_file(out, lines);
    std::cout << "scored " << scores.size() << " documents\n";
    emit_manifest("score", cfg, common, {model_path, corpus}, {out});
  }
};

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateCmd {
  CommonOpts common;
  std::string model_path, corpus, manipulated, out, json_out;
  std::string split;
  CLI::Option* split_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (split_opt->count()) cfg.set("corpus", "split", split);
    const double target_fpr = use_double(cfg, "evaluation", "target_fpr", 0.01);
    const LoadedModel model = load_model_file(model_path);
    const ScoreFn fn = model.score_fn();

    const CorpusManifest manifest = apply_split(cfg, load_corpus(corpus, corpus_options(cfg, true)));
    std::vector<Document> humans, ais;
    split_groups(manifest, humans, ais);
    const std::string label = dataset_label(manifest.records);

    const std::vector<double> human_scores = score_documents(humans, fn, common.jobs);
    std::vector<EvaluationReport> reports;
    reports.push_back(tpr_at_fpr({human_scores, score_documents(ais, fn, common.jobs), "before", label}, target_fpr));

    std::vector<std::string> inputs{model_path, corpus};
    if (!manipulated.empty()) {
      const CorpusManifest manip = load_corpus(manipulated, partial_options());
      if (manip.records.empty()) throw DomainError("manipulated file has no documents");
      reports.push_back(
          tpr_at_fpr({human_scores, score_documents(manip.records, fn, common.jobs), "after", label}, target_fpr));
      inputs.push_back(manipulated);
    }

    write_file(out, reports_to_csv(reports));
    std::vector<std::string> outputs{out};
    if (!json_out.empty()) {
      write_file(json_out, reports_to_json(reports));
      outputs.push_back(json_out);
    }
    for (const auto& report : reports)
      std::cout << report.condition << ": tpr " << fmt(report.tpr) << " at fpr " << fmt(report.achieved_fpr)
                << " (threshold " << fmt(report.threshold) << ")\n";
    emit_manifest("evaluate", cfg, common, inputs, outputs);
  }
};

// ---------------------------------------------------------------------------
// ablate

struct AblateCmd {
  CommonOpts common;
  std::string kind, model_path, corpus, backtranslations, out, json_out;
  std::string order_csv, split;
  CLI::Option* split_opt = nullptr;

  void run() {
    Config cfg = make_config(common);
    if (split_opt->count()) cfg.set("corpus", "split", split);
    if (kind != "loo" && kind != "sequential" && kind != "combiner")
      throw ConfigError("--kind must be loo, sequential, or combiner; got '" + kind + "'");

    const LoadedModel model = load_model_file(model_path);
    const ScoreFn fn = model.score_fn();
    auto scorer = make_similarity(cfg);

    const CorpusManifest manifest = apply_split(cfg, load_corpus(corpus, corpus_options(cfg, true)));
    std::vector<Document> humans, ais;
    split_groups(manifest, humans, ais);

    AblationContext context;
    context.human_scores = score_documents(humans, fn, common.jobs);
    context.score = fn;
    context.scorer = scorer.get();
    context.strategy = resolve_strategy(cfg, false);
    context.random_seed = use_u64(cfg, "combine", "seed", 0);
    context.target_fpr = use_double(cfg, "evaluation", "target_fpr", 0.01);
    context.dataset = dataset_label(manifest.records);
    context.jobs = common.jobs;
    context.ai_docs = std::move(ais);

    std::vector<std::string> inputs{model_path, corpus};
    if (!backtranslations.empty()) {
      auto by_parent = index_backtranslations(load_corpus(backtranslations, partial_options()));
      for (const auto& doc : context.ai_docs) {
        auto it = by_parent.find(doc.id);
        if (it == by_parent.end()) throw DomainError("no back-translations for document '" + doc.id + "'");
        BackTranslationSet set;
        set.original = doc;
        set.entries = std::move(it->second);
        context.ai_sets.push_back(std::move(set));
      }
      inputs.push_back(backtranslations);
    } else {
      TranslationStack stack = make_translation_stack(cfg);
      for (const auto& doc : context.ai_docs) {
        BackTranslationSet set = back_translate_all(doc, stack.languages, stack.provider(), stack.options);
        for (const auto& warning : set.warnings) std::cerr << "warning: " << doc.id << ": " << warning << "\n";
        context.ai_sets.push_back(std::move(set));
      }
    }

    std::vector<AblationRow> rows;
    if (kind == "loo") {
      rows = leave_one_out(context);
    } else if (kind == "sequential") {
      std::vector<std::string> order;
      if (!order_csv.empty()) {
        for (const auto& lang : split_csv(order_csv)) order.push_back(normalize_language(lang));
      } else {
        for (const auto& [lang, bt] : context.ai_sets.front().entries) order.push_back(lang);
      }
      cfg.set("combine", "removal_order", join(order));
      rows = sequential_removal(context, order);
    } else {
      rows = combiner_comparison(context);
    }

    write_file(out, ablation_to_csv(rows));
    std::vector<std::string> outputs{out};
    if (!json_out.empty()) {
      write_file(json_out, ablation_to_json(rows));
      outputs.push_back(json_out);
    }
    for (const auto& row : rows)
      std::cout << row.report.condition << ": tpr " << fmt(row.report.tpr) << " (delta " << fmt(row.delta_tpr)
                << ")\n";
    emit_manifest("ablate", cfg, common, inputs, outputs);
  }
};

// ---------------------------------------------------------------------------
// validate

struct ValidateCmd {
  CommonOpts common;
  std::string corpus;

  void run() {
    Config cfg = make_config(common);
    const std::vector<ValidationIssue> issues = validate_corpus(corpus);
    for (const auto& issue : issues) {
      std::cout << "line " << issue.line;
      if (!issue.field.empty()) std::cout << " [" << issue.field << "]";
      std::cout << ": " << issue.message << "\n";
    }
    emit_manifest("validate", cfg, common, {corpus}, {});
    if (!issues.empty())
      throw DomainError("corpus failed validation with " + std::to_string(issues.size()) + " issue(s)");
    std::cout << "corpus is valid\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Back-translation manipulation and entity-entropy detection toolkit"};
  app.require_subcommand(1);

  auto bt = std::make_shared<BacktranslateCmd>();
  {
    CLI::App* cmd = app.add_subcommand("backtranslate", "Round-trip documents through intermediate languages");
    add_common(cmd, bt->common);
    cmd->add_option("--corpus", bt->corpus, "Input corpus JSONL")->required();
    cmd->add_option("--out", bt->out, "Back-translation JSONL to write")->required();
    cmd->add_option("--groups", bt->groups, "Groups to round-trip, comma-separated (default ai)");
    bt->languages_opt = cmd->add_option("--languages", bt->languages, "Intermediate languages, comma-separated");
    bt->provider_opt = cmd->add_option("--provider", bt->provider, "simulator | identity | http | cache_only");
    bt->seed_opt = cmd->add_option("--seed", bt->seed, "Simulator seed");
    cmd->callback([bt] { bt->run(); });
  }

  auto combine_cmd = std::make_shared<CombineCmd>();
  {
    CLI::App* cmd = app.add_subcommand("combine", "Build manipulated documents from back-translations");
    add_common(cmd, combine_cmd->common);
    cmd->add_option("--corpus", combine_cmd->corpus, "Original corpus JSONL")->required();
    cmd->add_option("--backtranslations", combine_cmd->backtranslations, "Back-translation JSONL")->required();
    cmd->add_option("--out", combine_cmd->out, "Manipulated JSONL to write")->required();
    cmd->add_option("--provenance", combine_cmd->provenance, "Provenance JSONL (default <out stem>.provenance)");
    combine_cmd->strategy_opt =
        cmd->add_option("--strategy", combine_cmd->strategy, "wer_max | wer_min | random (default wer_max)");
    combine_cmd->seed_opt = cmd->add_option("--seed", combine_cmd->seed, "Seed for the random strategy");
    cmd->callback([combine_cmd] { combine_cmd->run(); });
  }

  auto gate = std::make_shared<GateCmd>();
  {
    CLI::App* cmd = app.add_subcommand("gate", "Check manipulated documents against the similarity gate");
    add_common(cmd, gate->common);
    cmd->add_option("--corpus", gate->corpus, "Original corpus JSONL")->required();
    cmd->add_option("--candidates", gate->candidates, "Candidate JSONL (manipulated documents)")->required();
    cmd->add_option("--out", gate->out, "Gate results JSONL to write")->required();
    gate->profile_opt = cmd->add_option("--profile", gate->profile, "psp (0.76) | usee (0.69)");
    gate->threshold_opt = cmd->add_option("--threshold", gate->threshold, "Similarity threshold override");
    cmd->callback([gate] { gate->run(); });
  }

  auto train = std::make_shared<TrainCmd>();
  {
    CLI::App* cmd = app.add_subcommand("train", "Fit a detector model on a corpus");
    add_common(cmd, train->common);
    cmd->add_option("--corpus", train->corpus, "Training corpus JSONL")->required();
    cmd->add_option("--out", train->out, "Model JSON to write")->required();
    train->mode_opt = cmd->add_option("--mode", train->mode, "esas | mesas-uni | mesas-unibi (default mesas-unibi)");
    train->split_opt = cmd->add_option("--split", train->split, "Fold to use: all | train | test");
    cmd->callback([train] { train->run(); });
  }

  auto score = std::make_shared<ScoreCmd>();
  {
    CLI::App* cmd = app.add_subcommand("score", "Score documents with a trained model");
    add_common(cmd, score->common);
    cmd->add_option("--model", score->model_path, "Model JSON")->required();
    cmd->add_option("--corpus", score->corpus, "Documents to score (JSONL)")->required();
    cmd->add_option("--out", score->out, "Score JSONL to write")->required();
    score->split_opt = cmd->add_option("--split", score->split, "Fold to use: all | train | test");
    cmd->callback([score] { score->run(); });
  }

  auto evaluate = std::make_shared<EvaluateCmd>();
  {
    CLI::App* cmd = app.add_subcommand("evaluate", "Report TPR at a fixed FPR before/after manipulation");
    add_common(cmd, evaluate->common);
    cmd->add_option("--model", evaluate->model_path, "Model JSON")->required();
    cmd->add_option("--corpus", evaluate->corpus, "Evaluation corpus JSONL (human + ai)")->required();
    cmd->add_option("--manipulated", evaluate->manipulated, "Manipulated JSONL for the after condition");
    cmd->add_option("--out", evaluate->out, "Report CSV to write")->required();
    cmd->add_option("--json", evaluate->json_out, "Also write the report as JSON");
    evaluate->split_opt = cmd->add_option("--split", evaluate->split, "Fold to use: all | train | test");
    cmd->callback([evaluate] { evaluate->run(); });
  }

  auto ablate = std::make_shared<AblateCmd>();
  {
    CLI::App* cmd = app.add_subcommand("ablate", "Language and combiner ablation studies");
    add_common(cmd, ablate->common);
    cmd->add_option("--kind", ablate->kind, "loo | sequential | combiner")->required();
    cmd->add_option("--model", ablate->model_path, "Model JSON")->required();
    cmd->add_option("--corpus", ablate->corpus, "Evaluation corpus JSONL (human + ai)")->required();
    cmd->add_option("--backtranslations", ablate->backtranslations,
                    "Back-translation JSONL (default: run the configured provider)");
    cmd->add_option("--out", ablate->out, "Ablation CSV to write")->required();
    cmd->add_option("--json", ablate->json_out, "Also write the ablation as JSON");
    cmd->add_option("--order", ablate->order_csv, "Removal order for --kind sequential, comma-separated");
    ablate->split_opt = cmd->add_option("--split", ablate->split, "Fold to use: all | train | test");
    cmd->callback([ablate] { ablate->run(); });
  }

  auto validate = std::make_shared<ValidateCmd>();
  {
    CLI::App* cmd = app.add_subcommand("validate", "Report corpus schema problems without loading everything");
    add_common(cmd, validate->common);
    cmd->add_option("--corpus", validate->corpus, "Corpus JSONL to validate")->required();
    cmd->callback([validate] { validate->run(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const btx::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const btx::ServiceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const btx::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
