#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "gapforge/align/embedding.hpp"
#include "gapforge/corpus/cache.hpp"
#include "gapforge/corpus/wiki_client.hpp"
#include "gapforge/corpus/wiki_source.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/pipeline/build.hpp"
#include "gapforge/pipeline/config.hpp"
#include "gapforge/util/http.hpp"

namespace gapforge {

// Owns the sources and providers a validated config asks for: fixture pages
// and mocks in mock mode, MediaWiki and HTTP providers otherwise.
class Runtime {
 public:
  explicit Runtime(const PipelineConfig& cfg)
      : prompts_(PromptLibrary::load(cfg.prompts_dir)), cache_(cfg.cache_dir) {
    cfg.validate();
    for (const auto& lang : cfg.all_languages())
      abbreviations_[lang] = AbbreviationSet::for_language(cfg.abbreviations_dir, lang);
    if (!cfg.audit_log.empty()) audit_ = std::make_unique<AuditLog>(cfg.audit_log);
    if (cfg.mock_mode) {
      source_ = std::make_unique<FixtureWikiSource>(cfg.fixtures_dir);
      llm_ = std::make_unique<MockLlmProvider>(abbreviations_);
      translator_ = std::make_unique<MockLlmProvider>(abbreviations_);
      embedder_ = std::make_unique<MockEmbeddingProvider>();
    } else {
      http_ = std::make_unique<HttplibClient>();
      source_ = std::make_unique<MediaWikiSource>(*http_, cfg.wiki_url);
      llm_ = std::make_unique<HttpChatProvider>(*http_, cfg.llm, audit_.get());
      translator_ = std::make_unique<HttpChatProvider>(*http_, cfg.translate, audit_.get());
      embedder_ = std::make_unique<HttpEmbeddingProvider>(*http_, cfg.embedding);
    }
    wiki_.emplace(*source_, cache_, CorpusOptions{cfg.all_languages(), cfg.abbreviations_dir});
    services_.emplace(BuildServices{*wiki_, *llm_, *llm_, *translator_, *embedder_, prompts_,
                                    abbreviations_});
  }

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  BuildServices& services() { return *services_; }

 private:
  PromptLibrary prompts_;
  ArticleCache cache_;
  std::map<std::string, AbbreviationSet> abbreviations_;
  std::unique_ptr<HttpClient> http_;
  std::unique_ptr<AuditLog> audit_;
  std::unique_ptr<WikiSource> source_;
  std::unique_ptr<LlmProvider> llm_;
  std::unique_ptr<LlmProvider> translator_;
  std::unique_ptr<EmbeddingProvider> embedder_;
  std::optional<WikiClient> wiki_;
  std::optional<BuildServices> services_;
};

}  // namespace gapforge
