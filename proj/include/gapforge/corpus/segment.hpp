#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gapforge/corpus/article.hpp"
#include "gapforge/error.hpp"
#include "gapforge/util/text.hpp"
#include "gapforge/util/utf8.hpp"

namespace gapforge {

// Tokens ending in '.' that must not end a sentence ("Dr.", "e.g.", "г.").
// Stored casefolded.
class AbbreviationSet {
 public:
  AbbreviationSet() = default;
  AbbreviationSet(std::initializer_list<std::string_view> items) {
    for (auto item : items) add(item);
  }

  void add(std::string_view token) {
    const auto t = text::trim(token);
    if (!t.empty()) tokens_.insert(fold(t));
  }

  bool contains(std::string_view token) const { return tokens_.count(fold(token)) > 0; }
  std::size_t size() const { return tokens_.size(); }

  // One token per line; blank lines and lines starting with '#' ignored.
  static AbbreviationSet load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::kIoError, "cannot read abbreviation list " + file.string());
    AbbreviationSet set;
    std::string line;
    while (std::getline(in, line)) {
      const auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      set.add(t);
    }
    return set;
  }

  // `<dir>/<lang>.txt`, or an empty set when the language has no list.
  static AbbreviationSet for_language(const std::filesystem::path& dir, std::string_view lang) {
    const auto file = dir / (std::string(lang) + ".txt");
    if (!std::filesystem::exists(file)) return {};
    return load(file);
  }

 private:
  static std::string fold(std::string_view s) {
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) utf8::append(out, utf8::fold_case(utf8::next(s, pos)));
    return out;
  }

  std::unordered_set<std::string> tokens_;
};

struct Segmented {
  std::vector<std::string> paragraphs;
  std::vector<std::vector<Sentence>> sentences;  // parallel to paragraphs
};

namespace detail {

inline bool uses_fullwidth_terminators(std::string_view lang) {
  return lang == "zh" || lang == "ja";
}

inline bool is_latin_terminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x2026;
}

inline bool is_cjk_terminator(char32_t cp) {
  return cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F || cp == 0xFF1B;
}

inline bool is_closer(char32_t cp) {
  switch (cp) {
    case U'"': case U'\'': case U')': case U']': case 0xBB: case 0x201D: case 0x2019:
    case 0x300D: case 0x300F: case 0xFF09: case 0x300B: case 0x3011:
      return true;
    default:
      return false;
  }
}

inline bool is_opener(char32_t cp) {
  switch (cp) {
    case U'"': case U'\'': case U'(': case U'[': case 0xAB: case 0x201C: case 0x2018:
      return true;
    default:
      return false;
  }
}

// The whitespace-delimited token ending at byte `end` (exclusive), with
// leading opening punctuation removed.
inline std::string_view token_before(std::string_view s, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0) {
    const std::size_t prev = utf8::floor_boundary(s, begin - 1);
    std::size_t pos = prev;
    if (utf8::is_space(utf8::next(s, pos))) break;
    begin = prev;
  }
  while (begin < end) {
    std::size_t pos = begin;
    if (!is_opener(utf8::next(s, pos))) break;
    begin = pos;
  }
  return s.substr(begin, end - begin);
}

// Sentence boundaries of one paragraph as cut points; each piece is later
// trimmed to produce the span.
inline std::vector<std::size_t> cut_points(std::string_view para, std::string_view lang,
                                           const AbbreviationSet& abbreviations) {
  std::vector<std::size_t> cuts;
  const bool cjk = uses_fullwidth_terminators(lang);
  std::size_t pos = 0;
  while (pos < para.size()) {
    const char32_t cp = utf8::next(para, pos);
    if (cjk) {
      if (cp == U'\n') {
        cuts.push_back(pos);
        continue;
      }
      if (!is_cjk_terminator(cp)) continue;
      while (pos < para.size()) {
        std::size_t look = pos;
        const char32_t c = utf8::next(para, look);
        if (!is_cjk_terminator(c) && !is_closer(c)) break;
        pos = look;
      }
      cuts.push_back(pos);
      continue;
    }

    if (!is_latin_terminator(cp)) continue;
    bool single_period = cp == U'.';
    while (pos < para.size()) {
      std::size_t look = pos;
      const char32_t c = utf8::next(para, look);
      if (!is_latin_terminator(c)) break;
      single_period = false;
      pos = look;
    }
    const std::size_t terminator_end = pos;
    while (pos < para.size()) {
      std::size_t look = pos;
      const char32_t c = utf8::next(para, look);
      if (is_closer(c)) {
        pos = look;
        continue;
      }
      // French typography puts a (narrow) space before a closing guillemet.
      if (c == U' ' || c == 0xA0 || c == 0x202F) {
        std::size_t after = look;
        if (after < para.size() && utf8::next(para, after) == 0xBB) {
          pos = after;
          continue;
        }
      }
      break;
    }
    if (pos < para.size()) {
      std::size_t look = pos;
      if (!utf8::is_space(utf8::next(para, look))) continue;
    }
    if (single_period && terminator_end == pos &&
        abbreviations.contains(token_before(para, terminator_end)))
      continue;
    cuts.push_back(pos);
  }
  return cuts;
}

}  // namespace detail

// Splits one paragraph's text into sentences with spans into that text.
inline std::vector<Sentence> split_sentences(std::string_view para, std::string_view lang,
                                             const AbbreviationSet& abbreviations = {}) {
  std::vector<Sentence> out;
  auto cuts = detail::cut_points(para, lang, abbreviations);
  if (cuts.empty() || cuts.back() != para.size()) cuts.push_back(para.size());
  std::size_t begin = 0;
  for (const std::size_t cut : cuts) {
    const std::string_view piece = para.substr(begin, cut - begin);
    const std::string_view trimmed = text::trim(piece);
    if (!trimmed.empty()) {
      const std::size_t offset = begin + static_cast<std::size_t>(trimmed.data() - piece.data());
      out.push_back({static_cast<int>(out.size()), std::string(trimmed),
                     {offset, offset + trimmed.size()}});
    }
    begin = cut;
  }
  return out;
}

// Paragraphs are separated by lines that are empty or whitespace-only. Each
// paragraph's text is the trimmed block between such lines.
inline std::vector<std::string> split_paragraphs(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t block_begin = std::string_view::npos;
  std::size_t block_end = 0;
  std::size_t line_begin = 0;
  auto flush = [&] {
    if (block_begin != std::string_view::npos) {
      const auto t = text::trim(raw.substr(block_begin, block_end - block_begin));
      if (!t.empty()) out.emplace_back(t);
    }
    block_begin = std::string_view::npos;
  };
  while (line_begin <= raw.size()) {
    auto nl = raw.find('\n', line_begin);
    const std::size_t line_end = nl == std::string_view::npos ? raw.size() : nl;
    const auto line = raw.substr(line_begin, line_end - line_begin);
    if (text::trim(line).empty()) {
      flush();
    } else {
      if (block_begin == std::string_view::npos) block_begin = line_begin;
      block_end = line_end;
    }
    if (nl == std::string_view::npos) break;
    line_begin = nl + 1;
  }
  flush();
  return out;
}

inline Segmented segment(std::string_view raw_text, std::string_view language_code,
                         const AbbreviationSet& abbreviations = {}) {
  Segmented result;
  result.paragraphs = split_paragraphs(raw_text);
  result.sentences.reserve(result.paragraphs.size());
  for (const auto& p : result.paragraphs)
    result.sentences.push_back(split_sentences(p, language_code, abbreviations));
  return result;
}

namespace detail {

// "== Heading ==" lines of a plain-text extract; returns level (2 for "==")
// or 0 when the line is not a heading.
inline int heading_level(std::string_view line, std::string& heading) {
  const auto t = text::trim(line);
  std::size_t lead = 0;
  while (lead < t.size() && t[lead] == '=') ++lead;
  std::size_t trail = 0;
  while (trail < t.size() - lead && t[t.size() - 1 - trail] == '=') ++trail;
  if (lead < 2 || lead != trail || t.size() <= lead + trail) return 0;
  heading = std::string(text::trim(t.substr(lead, t.size() - lead - trail)));
  if (heading.empty()) return 0;
  return static_cast<int>(lead);
}

}  // namespace detail

// Builds a segmented Article from a plain-text page extract in which section
// headings appear as "== Title ==" lines. Text before the first heading is
// the lead section (index 0, level 1).
inline Article assemble_article(std::string language_code, std::string title,
                                std::string revision_id, std::string canonical_url,
                                std::string_view plain_text,
                                const AbbreviationSet& abbreviations = {}) {
  Article a;
  a.language_code = std::move(language_code);
  a.title = std::move(title);
  a.revision_id = std::move(revision_id);
  a.canonical_url = std::move(canonical_url);
  a.sections.push_back({0, "", 1});

  std::string body;
  auto flush_body = [&] {
    for (auto& para : split_paragraphs(body)) {
      Paragraph p;
      p.index = static_cast<int>(a.paragraphs.size());
      p.section_index = static_cast<int>(a.sections.size()) - 1;
      p.sentences = split_sentences(para, a.language_code, abbreviations);
      p.text = std::move(para);
      a.paragraphs.push_back(std::move(p));
    }
    body.clear();
  };

  std::size_t line_begin = 0;
  while (line_begin <= plain_text.size()) {
    const auto nl = plain_text.find('\n', line_begin);
    const std::size_t line_end = nl == std::string_view::npos ? plain_text.size() : nl;
    const auto line = plain_text.substr(line_begin, line_end - line_begin);
    std::string heading;
    if (const int level = detail::heading_level(line, heading); level > 0) {
      flush_body();
      a.sections.push_back({static_cast<int>(a.sections.size()), std::move(heading), level});
    } else {
      body.append(line);
      body.push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    line_begin = nl + 1;
  }
  flush_body();
  return a;
}

}  // namespace gapforge
