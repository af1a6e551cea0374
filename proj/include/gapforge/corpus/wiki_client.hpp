#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapforge/corpus/article.hpp"
#include "gapforge/corpus/cache.hpp"
#include "gapforge/corpus/segment.hpp"
#include "gapforge/corpus/wiki_source.hpp"
#include "gapforge/error.hpp"

namespace gapforge {

struct CorpusOptions {
  std::vector<std::string> languages{"en", "fr", "ru", "zh"};
  // Directory of <lang>.txt abbreviation lists; empty means no guards.
  std::filesystem::path abbreviations_dir;
};

// Fetches pages through a WikiSource, segments them and keeps the results in
// an ArticleCache. A warm cache answers without touching the source.
class WikiClient {
 public:
  WikiClient(WikiSource& source, const ArticleCache& cache, CorpusOptions options = {})
      : source_(source), cache_(cache), options_(std::move(options)) {}

  Article fetch_article(std::string_view title, std::string_view language_code) {
    if (text::trim(title).empty())
      fail(ErrorCode::kNotFound, "empty title requested for " + std::string(language_code));
    require_language(language_code);
    if (auto cached = cache_.find(language_code, title)) return std::move(*cached);

    auto page = source_.fetch_page(language_code, title);
    auto article = assemble_article(std::string(language_code), std::move(page.title),
                                    std::move(page.revision_id), std::move(page.canonical_url),
                                    page.plain_text, abbreviations(language_code));
    if (article.paragraphs.empty())
      fail(ErrorCode::kParseError, std::string(language_code) + ":" + std::string(title) +
                                       " has no prose paragraphs");
    cache_.store(title, article);
    return article;
  }

  // Throws NoLanglink when the target edition lacks the topic.
  std::string resolve_interlanguage(std::string_view title, std::string_view source_lang,
                                    std::string_view target_lang) {
    if (source_lang == target_lang) return std::string(title);
    require_language(source_lang);
    require_language(target_lang);
    std::optional<std::string> link;
    if (auto cached = cache_.find_langlink(source_lang, title, target_lang)) {
      link = std::move(*cached);
    } else {
      link = source_.langlink(source_lang, title, target_lang);
      cache_.store_langlink(source_lang, title, target_lang, link);
    }
    if (!link)
      fail(ErrorCode::kNoLanglink, std::string(source_lang) + ":" + std::string(title) +
                                       " has no " + std::string(target_lang) + " edition");
    return *link;
  }

  const CorpusOptions& options() const { return options_; }

 private:
  void require_language(std::string_view lang) const {
    if (std::find(options_.languages.begin(), options_.languages.end(), lang) ==
        options_.languages.end())
      fail(ErrorCode::kInvalidArgument, "language '" + std::string(lang) + "' is not configured");
  }

  const AbbreviationSet& abbreviations(std::string_view lang) {
    std::lock_guard lock(abbreviations_mutex_);
    auto it = abbreviations_.find(std::string(lang));
    if (it == abbreviations_.end()) {
      AbbreviationSet set;
      if (!options_.abbreviations_dir.empty())
        set = AbbreviationSet::for_language(options_.abbreviations_dir, lang);
      it = abbreviations_.emplace(std::string(lang), std::move(set)).first;
    }
    return it->second;
  }

  WikiSource& source_;
  const ArticleCache& cache_;
  CorpusOptions options_;
  std::mutex abbreviations_mutex_;
  std::map<std::string, AbbreviationSet> abbreviations_;
};

}  // namespace gapforge
