#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gapforge/corpus/article.hpp"
#include "gapforge/corpus/slug.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/fs.hpp"

namespace gapforge {

namespace detail {

// Revision ids are numeric on MediaWiki; compare numerically when both are.
inline bool revision_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const bool a_num = numeric(a);
  const bool b_num = numeric(b);
  if (a_num && b_num && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace detail

// Segmented articles on disk:
//
//   <root>/<lang>/<title-slug>/<revision>.json
//   <root>/<lang>/<title-slug>/langlinks.json   (target lang -> title or null)
//
// Writes to one key are serialized; distinct keys proceed in parallel.
class ArticleCache {
 public:
  explicit ArticleCache(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path entry_dir(std::string_view lang, std::string_view title) const {
    return root_ / std::string(lang) / title_slug(title);
  }

  std::filesystem::path article_path(std::string_view lang, std::string_view title,
                                     std::string_view revision) const {
    return entry_dir(lang, title) / (std::string(revision) + ".json");
  }

  // The pinned revision if given, otherwise the newest cached revision.
  std::optional<Article> find(std::string_view lang, std::string_view title,
                              std::optional<std::string> revision = std::nullopt) const {
    const auto dir = entry_dir(lang, title);
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return std::nullopt;
    if (!revision) {
      for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".json" || e.path().filename() == "langlinks.json") continue;
        auto rev = e.path().stem().string();
        if (!revision || detail::revision_less(*revision, rev)) revision = std::move(rev);
      }
      if (!revision) return std::nullopt;
    }
    const auto path = article_path(lang, title, *revision);
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    std::lock_guard lock(key_mutex(path.string()));
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
    return article_from_json(doc);
  }

  // Stores under the title the caller asked for, which may differ from the
  // article's own title after redirects.
  void store(std::string_view requested_title, const Article& a) const {
    const auto path = article_path(a.language_code, requested_title, a.revision_id);
    std::lock_guard lock(key_mutex(path.string()));
    detail::write_file_atomic(path, to_json(a).dump(2) + "\n");
  }

  // nullopt: never looked up. Inner nullopt: looked up, edition absent.
  std::optional<std::optional<std::string>> find_langlink(std::string_view lang,
                                                          std::string_view title,
                                                          std::string_view target) const {
    const auto path = entry_dir(lang, title) / "langlinks.json";
    std::lock_guard lock(key_mutex(path.string()));
    const auto doc = load_langlinks(path);
    const auto it = doc.find(std::string(target));
    if (it == doc.end()) return std::nullopt;
    if (it->is_null()) return std::optional<std::string>{};
    return std::optional<std::string>{it->get<std::string>()};
  }

  void store_langlink(std::string_view lang, std::string_view title, std::string_view target,
                      const std::optional<std::string>& target_title) const {
    const auto path = entry_dir(lang, title) / "langlinks.json";
    std::lock_guard lock(key_mutex(path.string()));
    auto doc = load_langlinks(path);
    doc[std::string(target)] = target_title ? nlohmann::json(*target_title) : nlohmann::json();
    detail::write_file_atomic(path, doc.dump(2) + "\n");
  }

 private:
  static nlohmann::json load_langlinks(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return nlohmann::json::object();
    try {
      auto doc = nlohmann::json::parse(detail::read_file(path));
      if (doc.is_object()) return doc;
    } catch (const nlohmann::json::exception&) {
    }
    fail(ErrorCode::kParseError, path.string() + " is not a langlink map");
  }

  std::mutex& key_mutex(const std::string& key) const {
    std::lock_guard lock(registry_mutex_);
    auto& slot = key_mutexes_[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
  }

  std::filesystem::path root_;
  mutable std::mutex registry_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
};

}  // namespace gapforge
