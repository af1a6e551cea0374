#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gapforge/corpus/slug.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/http.hpp"
#include "gapforge/util/text.hpp"
#include "gapforge/util/url.hpp"

namespace gapforge {

// Raw page as delivered by a wiki: plain-text body with "== H ==" heading
// lines, pinned to one revision.
struct PageContent {
  std::string title;
  std::string revision_id;
  std::string canonical_url;
  std::string plain_text;
};

class WikiSource {
 public:
  virtual ~WikiSource() = default;

  // Throws NotFound for missing pages, NetworkError on transport failure and
  // ParseError when the page body cannot be extracted.
  virtual PageContent fetch_page(std::string_view language_code, std::string_view title) = 0;

  // Title of the same topic in `target_lang`, or nullopt when that edition
  // has no interlanguage link. Throws NotFound when the source page is absent.
  virtual std::optional<std::string> langlink(std::string_view language_code,
                                              std::string_view title,
                                              std::string_view target_lang) = 0;

  virtual std::string describe() const = 0;
};

inline std::string wiki_article_url(std::string_view host_template, std::string_view lang,
                                    std::string_view title) {
  std::string base(host_template);
  if (const auto at = base.find("{lang}"); at != std::string::npos)
    base.replace(at, 6, lang);
  return base + "/wiki/" +
         url::percent_encode(text::replace_all(title, ' ', '_'), [](unsigned char c) {
           return url::is_unreserved(c) || c == '(' || c == ')' || c == ',' || c == ':' ||
                  c == '\'' || c == '!' || c == '*';
         });
}

// MediaWiki Action API over HTTP: TextExtracts plain text for the body,
// revision ids for pinning and the langlinks table for interlanguage links.
class MediaWikiSource final : public WikiSource {
 public:
  // `host_template` is an origin such as "https://{lang}.wikipedia.org".
  MediaWikiSource(HttpClient& http, std::string host_template = "https://{lang}.wikipedia.org")
      : http_(http), host_template_(std::move(host_template)) {}

  PageContent fetch_page(std::string_view lang, std::string_view title) override {
    const auto page = query(lang, title,
                            "prop=extracts%7Crevisions%7Cinfo&explaintext=1&exsectionformat=wiki"
                            "&rvprop=ids&inprop=url");
    PageContent out;
    out.title = page.value("title", std::string(title));
    if (!page.contains("revisions") || !page["revisions"].is_array() ||
        page["revisions"].empty() || !page["revisions"][0].contains("revid"))
      fail(ErrorCode::kParseError, std::string(lang) + ":" + std::string(title) +
                                       " response has no revision id");
    const auto& revid = page["revisions"][0]["revid"];
    out.revision_id = revid.is_string() ? revid.get<std::string>() : revid.dump();
    out.canonical_url = page.value("canonicalurl", page.value("fullurl", std::string()));
    if (out.canonical_url.empty()) out.canonical_url = wiki_article_url(host_template_, lang, out.title);
    if (!page.contains("extract") || !page["extract"].is_string())
      fail(ErrorCode::kParseError,
           std::string(lang) + ":" + std::string(title) + " has no extractable body");
    out.plain_text = page["extract"].get<std::string>();
    if (text::trim(out.plain_text).empty())
      fail(ErrorCode::kParseError,
           std::string(lang) + ":" + std::string(title) + " body is empty after extraction");
    return out;
  }

  std::optional<std::string> langlink(std::string_view lang, std::string_view title,
                                      std::string_view target) override {
    const auto page =
        query(lang, title, "prop=langlinks&lllimit=1&lllang=" + url::encode_component(target));
    if (!page.contains("langlinks") || page["langlinks"].empty()) return std::nullopt;
    const auto& link = page["langlinks"][0];
    if (link.contains("title")) return link["title"].get<std::string>();
    if (link.contains("*")) return link["*"].get<std::string>();
    fail(ErrorCode::kParseError, "langlink entry without title");
  }

  std::string describe() const override { return "mediawiki:" + host_template_; }

 private:
  nlohmann::json query(std::string_view lang, std::string_view title, const std::string& props) {
    std::string origin = host_template_;
    if (const auto at = origin.find("{lang}"); at != std::string::npos)
      origin.replace(at, 6, lang);
    const std::string target = origin +
                               "/w/api.php?action=query&format=json&formatversion=2&redirects=1&" +
                               props + "&titles=" + url::encode_component(title);
    const auto res = http_.get(target);
    if (res.status == 404)
      fail(ErrorCode::kNotFound, std::string(lang) + ":" + std::string(title));
    if (res.status < 200 || res.status >= 300)
      fail(ErrorCode::kNetworkError, target + " returned HTTP " + std::to_string(res.status));
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, std::string("wiki API response is not JSON: ") + e.what());
    }
    if (!doc.contains("query") || !doc["query"].contains("pages") ||
        !doc["query"]["pages"].is_array() || doc["query"]["pages"].empty())
      fail(ErrorCode::kParseError, "wiki API response has no pages");
    auto page = doc["query"]["pages"][0];
    if (page.value("missing", false) || page.value("invalid", false))
      fail(ErrorCode::kNotFound, std::string(lang) + ":" + std::string(title));
    return page;
  }

  HttpClient& http_;
  std::string host_template_;
};

// Pages bundled on disk, one file per (language, title):
//
//   <root>/<lang>/<title-slug>.txt
//
// Each file starts with "key: value" header lines (title, revision, url,
// langlinks as "fr=Titre; ru=..."), then a line "---", then the plain-text
// body in extract form. Used for offline builds and tests.
class FixtureWikiSource final : public WikiSource {
 public:
  explicit FixtureWikiSource(std::filesystem::path root,
                             std::string host_template = "https://{lang}.wikipedia.org")
      : root_(std::move(root)), host_template_(std::move(host_template)) {}

  PageContent fetch_page(std::string_view lang, std::string_view title) override {
    auto page = load(lang, title);
    if (text::trim(page.body).empty())
      fail(ErrorCode::kParseError, std::string(lang) + ":" + std::string(title) + " is empty");
    PageContent out;
    out.title = page.header.count("title") ? page.header["title"] : std::string(title);
    out.revision_id = page.header["revision"];
    if (out.revision_id.empty())
      fail(ErrorCode::kParseError, std::string(lang) + ":" + std::string(title) +
                                       " fixture has no revision");
    out.canonical_url = page.header.count("url") ? page.header["url"]
                                                 : wiki_article_url(host_template_, lang, out.title);
    out.plain_text = std::move(page.body);
    return out;
  }

  std::optional<std::string> langlink(std::string_view lang, std::string_view title,
                                      std::string_view target) override {
    auto page = load(lang, title);
    for (auto entry : text::split(page.header["langlinks"], ';')) {
      entry = text::trim(entry);
      const auto eq = entry.find('=');
      if (eq == std::string_view::npos) continue;
      if (text::trim(entry.substr(0, eq)) == target)
        return std::string(text::trim(entry.substr(eq + 1)));
    }
    return std::nullopt;
  }

  std::string describe() const override { return "fixture:" + root_.generic_string(); }

 private:
  struct Loaded {
    std::map<std::string, std::string> header;
    std::string body;
  };

  Loaded load(std::string_view lang, std::string_view title) const {
    const auto file = root_ / std::string(lang) / (title_slug(title) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorCode::kNotFound, std::string(lang) + ":" + std::string(title));
    Loaded out;
    std::string line;
    bool in_body = false;
    std::ostringstream body;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (in_body) {
        body << line << '\n';
        continue;
      }
      if (line == "---") {
        in_body = true;
        continue;
      }
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      out.header[std::string(text::trim(std::string_view(line).substr(0, colon)))] =
          std::string(text::trim(std::string_view(line).substr(colon + 1)));
    }
    if (!in_body)
      fail(ErrorCode::kParseError, file.string() + " lacks the '---' body separator");
    out.body = body.str();
    return out;
  }

  std::filesystem::path root_;
  std::string host_template_;
};

}  // namespace gapforge
