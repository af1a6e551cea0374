#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gapforge/align/align.hpp"
#include "gapforge/corpus/wiki_client.hpp"
#include "gapforge/datastore/dataset.hpp"
#include "gapforge/decompose/decompose.hpp"
#include "gapforge/enrich/enrich.hpp"
#include "gapforge/error.hpp"
#include "gapforge/gapselect/gapselect.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/pipeline/config.hpp"

namespace gapforge {

inline constexpr std::string_view kPipelineVersion = "gapforge/1";

// Providers and sources a build runs against; the caller owns them.
struct BuildServices {
  WikiClient& wiki;
  LlmProvider& decomposer;
  LlmProvider& verifier;
  LlmProvider& translator;
  EmbeddingProvider& embedder;
  const PromptLibrary& prompts;
  std::map<std::string, AbbreviationSet> abbreviations;
};

struct LanguageReport {
  std::string language_code;
  bool skipped = false;
  std::string target_title;
  std::size_t fact_count = 0;
  std::size_t gap_count = 0;
  std::size_t selected_count = 0;
  SectionCounts gap_sections;
};

struct BuildResult {
  TopicDataset dataset;
  std::filesystem::path path;
  std::vector<LanguageReport> languages;
  std::vector<std::string> warnings;
};

inline std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

template <typename Fn>
auto run_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    e.rethrow_with("stage " + std::string(stage));
  }
}

}  // namespace detail

// corpus -> decompose -> align -> gapselect -> enrich -> datastore. Target
// editions without an interlanguage link are skipped with a warning; any
// other failure aborts the build with the failing stage in the message.
inline BuildResult build_topic(const std::string& topic, const PipelineConfig& cfg,
                               BuildServices& svc,
                               const std::function<void(const std::string&)>& warn = {}) {
  cfg.validate();
  BuildResult result;
  auto note = [&](const std::string& msg) {
    result.warnings.push_back(msg);
    if (warn) warn(msg);
  };
  auto abbreviations_for = [&](const std::string& lang) {
    const auto it = svc.abbreviations.find(lang);
    return it == svc.abbreviations.end() ? AbbreviationSet{} : it->second;
  };

  const auto english = detail::run_stage("corpus", [&] { return svc.wiki.fetch_article(topic, cfg.source_lang); });
  DecomposeContext english_ctx{svc.decomposer, svc.prompts, english.title, abbreviations_for(cfg.source_lang)};
  const auto english_facts = detail::run_stage("decompose", [&] { return decompose_article(english, english_ctx); });

  std::map<std::string, Article> targets;
  std::map<std::string, GapInventory> inventories;
  std::map<std::string, std::string> provenance{
      {"pipeline.version", std::string(kPipelineVersion)},
      {"source_lang", cfg.source_lang},
      {"decompose.provider", svc.decomposer.name()},
      {"decompose.model", svc.decomposer.model()},
      {"verify.provider", svc.verifier.name()},
      {"verify.model", svc.verifier.model()},
      {"translate.provider", svc.translator.name()},
      {"translate.model", svc.translator.model()},
      {"embedding.provider", svc.embedder.name()},
      {"embedding.model", svc.embedder.model()},
      {"prompts.sha256", svc.prompts.content_hash()},
      {std::string(kCapKey), std::to_string(cfg.cap)},
      {"selection.k", std::to_string(cfg.k)},
      {"selection.method", "largest-remainder/document-order"},
      {"revision." + cfg.source_lang, english.revision_id},
  };

  for (const auto& lang : cfg.target_langs) {
    LanguageReport report;
    report.language_code = lang;
    std::string target_title;
    try {
      target_title = detail::run_stage("corpus", [&] {
        return svc.wiki.resolve_interlanguage(english.title, cfg.source_lang, lang);
      });
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoLanglink) throw;
      report.skipped = true;
      result.languages.push_back(report);
      note("skipping " + lang + ": " + e.detail());
      continue;
    }
    auto article = detail::run_stage("corpus", [&] { return svc.wiki.fetch_article(target_title, lang); });
    DecomposeContext ctx{svc.decomposer, svc.prompts, article.title, abbreviations_for(lang)};
    const auto facts = detail::run_stage("decompose", [&] { return decompose_article(article, ctx); });
    AlignContext align{svc.embedder, svc.verifier, svc.prompts, static_cast<std::size_t>(cfg.k)};
    auto classified =
        detail::run_stage("align", [&] { return classify_article_pair(english_facts, facts, align); });

    std::map<std::string, const AtomicFact*> by_id;
    for (const auto& f : facts) by_id.emplace(f.id, &f);
    std::vector<GapEntry> gaps;
    for (auto& v : classified.gaps) gaps.push_back({*by_id.at(v.target_fact_id), std::move(v.neighbor_set)});

    report.target_title = article.title;
    report.fact_count = facts.size();
    report.gap_count = gaps.size();
    provenance["revision." + lang] = article.revision_id;
    provenance["title." + lang] = article.title;
    provenance["gaps." + lang] = std::to_string(gaps.size());
    auto inventory = GapInventory::make(lang, english.title, std::move(gaps));
    report.gap_sections = inventory.section_counts;
    inventories.emplace(lang, std::move(inventory));
    targets.emplace(lang, std::move(article));
    result.languages.push_back(std::move(report));
  }

  const auto selected = detail::run_stage("gapselect", [&] { return select_for_topic(inventories, cfg.cap); });
  EnrichContext enrich{svc.translator, svc.embedder, svc.prompts};
  const EnrichInputs inputs{english, english_facts, targets};
  auto presented = detail::run_stage("enrich", [&] { return enrich_selection(selected, inputs, enrich); });

  std::vector<LanguageOutput> outputs;
  for (auto& report : result.languages) {
    if (report.skipped) continue;
    auto& facts = presented[report.language_code];
    report.selected_count = facts.size();
    outputs.push_back({report.language_code, english.title, english.revision_id, std::move(facts)});
  }
  DatasetMetadata meta;
  meta.generated_at = cfg.generated_at.empty() ? utc_timestamp_now() : cfg.generated_at;
  meta.provenance = std::move(provenance);
  meta.language_order = cfg.target_langs;
  result.dataset = detail::run_stage("datastore", [&] {
    return merge_language_outputs(english.title, english.revision_id, std::move(outputs), meta);
  });
  result.path = detail::run_stage("datastore", [&] { return write_dataset(result.dataset, cfg.output_dir); });
  return result;
}

}  // namespace gapforge
