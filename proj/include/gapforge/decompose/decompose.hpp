#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/corpus/article.hpp"
#include "gapforge/corpus/segment.hpp"
#include "gapforge/error.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/util/hash.hpp"
#include "gapforge/util/parallel.hpp"
#include "gapforge/util/text.hpp"

namespace gapforge {

// One self-contained statement decomposed from a paragraph.
struct AtomicFact {
  std::string id;
  std::string text;
  std::string language_code;
  int paragraph_index = 0;
  int section_index = 0;
  int ordinal = 0;  // position within its paragraph's decomposition
  std::optional<int> source_sentence_index;

  friend bool operator==(const AtomicFact&, const AtomicFact&) = default;
};

// "<lang>-p<paragraph>-f<ordinal>-<hash>". The readable prefix alone is
// injective over (language, paragraph, ordinal); the hash also binds the text.
inline std::string make_fact_id(std::string_view lang, int paragraph, int ordinal,
                                std::string_view text) {
  std::string key(lang);
  key += '\x1f';
  key += std::to_string(paragraph);
  key += '\x1f';
  key += std::to_string(ordinal);
  key += '\x1f';
  key += text;
  return std::string(lang) + "-p" + std::to_string(paragraph) + "-f" + std::to_string(ordinal) +
         "-" + to_hex(fnv1a64(key));
}

inline nlohmann::ordered_json to_json(const AtomicFact& f) {
  nlohmann::ordered_json j{{"id", f.id},
                           {"text", f.text},
                           {"language_code", f.language_code},
                           {"paragraph_index", f.paragraph_index},
                           {"section_index", f.section_index},
                           {"ordinal", f.ordinal}};
  if (f.source_sentence_index) j["source_sentence_index"] = *f.source_sentence_index;
  else j["source_sentence_index"] = nullptr;
  return j;
}

struct DecomposeContext {
  LlmProvider& provider;
  const PromptLibrary& prompts;
  std::string subject;  // article title, used to resolve pronouns
  AbbreviationSet abbreviations;  // for splitting multi-statement lines
};

namespace detail {

// Strips list decoration a model may add: "- ", "* ", "• ", "1. ", "2) ".
inline std::string_view strip_bullet(std::string_view line) {
  line = text::trim(line);
  for (std::string_view bullet : {"- ", "* ", "• ", "– ", "— "}) {
    if (line.substr(0, bullet.size()) == bullet) return text::trim(line.substr(bullet.size()));
  }
  std::size_t digits = 0;
  while (digits < line.size() && line[digits] >= '0' && line[digits] <= '9') ++digits;
  if (digits > 0 && digits + 1 < line.size() && (line[digits] == '.' || line[digits] == ')') &&
      line[digits + 1] == ' ')
    return text::trim(line.substr(digits + 2));
  return line;
}

}  // namespace detail

// Line-per-fact provider output to statements. Code fences and blank lines
// are dropped; a line holding several sentences becomes several statements.
// A lone "NONE" means the paragraph states no facts. Returns nullopt when
// nothing usable came back.
inline std::optional<std::vector<std::string>> parse_fact_lines(
    std::string_view output, std::string_view lang, const AbbreviationSet& abbreviations) {
  std::vector<std::string> facts;
  bool explicit_none = false;
  for (auto raw : text::split(output, '\n')) {
    const auto line = detail::strip_bullet(raw);
    if (line.empty() || line.substr(0, 3) == "```") continue;
    if (line == "NONE" || line == "None" || line == "none") {
      explicit_none = true;
      continue;
    }
    for (auto& s : split_sentences(line, lang, abbreviations))
      facts.push_back(text::normalize_whitespace(s.text));
  }
  if (facts.empty() && !explicit_none) return std::nullopt;
  return facts;
}

inline std::vector<AtomicFact> decompose_paragraph(const Paragraph& paragraph,
                                                   std::string_view language_code,
                                                   DecomposeContext& ctx) {
  if (text::trim(paragraph.text).empty()) return {};
  const auto& tmpl = ctx.prompts.get("decompose", language_code);
  const std::map<std::string, std::string> vars{{"paragraph", paragraph.text},
                                                {"subject", ctx.subject},
                                                {"language", language_name(language_code)}};
  ChatRequest request;
  request.task = LlmTask::kDecompose;
  request.language_code = std::string(language_code);
  request.input = paragraph.text;
  request.messages = {{"system", render(tmpl.system, vars)}, {"user", render(tmpl.user, vars)}};

  auto parsed = parse_fact_lines(ctx.provider.complete(request), language_code, ctx.abbreviations);
  if (!parsed) {
    request.attempt = 2;
    request.messages.push_back(
        {"user", tmpl.reminder.empty() ? "Output one fact per line and nothing else."
                                       : render(tmpl.reminder, vars)});
    parsed = parse_fact_lines(ctx.provider.complete(request), language_code, ctx.abbreviations);
  }
  if (!parsed)
    fail(ErrorCode::kFormatError, "provider output for paragraph " +
                                      std::to_string(paragraph.index) +
                                      " has no parseable facts after retry");

  std::vector<AtomicFact> facts;
  facts.reserve(parsed->size());
  for (auto& statement : *parsed) {
    AtomicFact f;
    f.ordinal = static_cast<int>(facts.size());
    f.language_code = std::string(language_code);
    f.paragraph_index = paragraph.index;
    f.section_index = paragraph.section_index;
    // Only recoverable when the statement reproduces a sentence verbatim,
    // which in practice means the mock provider.
    for (const auto& s : paragraph.sentences) {
      if (text::normalize_whitespace(s.text) == statement) {
        f.source_sentence_index = s.index;
        break;
      }
    }
    f.id = make_fact_id(f.language_code, f.paragraph_index, f.ordinal, statement);
    f.text = std::move(statement);
    facts.push_back(std::move(f));
  }
  return facts;
}

// Decomposes every paragraph, concurrently up to the provider's in-flight
// limit, and concatenates the results in paragraph order.
inline std::vector<AtomicFact> decompose_article(const Article& article, DecomposeContext& ctx) {
  auto per_paragraph = bounded_parallel_map(
      article.paragraphs.size(), ctx.provider.max_in_flight(), [&](std::size_t i) {
        try {
          return decompose_paragraph(article.paragraphs[i], article.language_code, ctx);
        } catch (const Error& e) {
          e.rethrow_with(article.language_code + ":" + article.title + " paragraph " +
                         std::to_string(i));
        }
      });
  std::vector<AtomicFact> facts;
  std::set<std::string> ids;
  for (auto& chunk : per_paragraph) {
    for (auto& f : chunk) {
      if (!ids.insert(f.id).second) fail(ErrorCode::kDuplicateFactId, f.id);
      facts.push_back(std::move(f));
    }
  }
  return facts;
}

}  // namespace gapforge
