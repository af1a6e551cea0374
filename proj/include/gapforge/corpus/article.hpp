#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/error.hpp"

namespace gapforge {

// Half-open byte range into a paragraph's text.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Sentence {
  int index = 0;
  std::string text;
  CharSpan char_span;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Paragraph {
  int index = 0;
  int section_index = 0;
  std::string text;
  std::vector<Sentence> sentences;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Section {
  int index = 0;
  std::string heading;  // empty for the lead section
  int level = 1;

  friend bool operator==(const Section&, const Section&) = default;
};

// One language edition's page. Paragraph indices are global over the article
// in document order; sections are indexed from 0 with the lead first.
struct Article {
  std::string language_code;
  std::string title;
  std::string revision_id;
  std::string canonical_url;
  std::vector<Section> sections;
  std::vector<Paragraph> paragraphs;

  std::size_t sentence_count() const {
    std::size_t n = 0;
    for (const auto& p : paragraphs) n += p.sentences.size();
    return n;
  }

  const Paragraph& paragraph(int index) const {
    if (index < 0 || static_cast<std::size_t>(index) >= paragraphs.size())
      fail(ErrorCode::kMissingParagraph, language_code + ":" + title + " has no paragraph " +
                                             std::to_string(index) + " in revision " +
                                             revision_id);
    return paragraphs[static_cast<std::size_t>(index)];
  }

  friend bool operator==(const Article&, const Article&) = default;
};

// JSON mapping. Field order is fixed so cached files are canonical.

inline nlohmann::ordered_json to_json(const Article& a) {
  nlohmann::ordered_json sections = nlohmann::ordered_json::array();
  for (const auto& s : a.sections)
    sections.push_back({{"index", s.index}, {"heading", s.heading}, {"level", s.level}});
  nlohmann::ordered_json paragraphs = nlohmann::ordered_json::array();
  for (const auto& p : a.paragraphs) {
    nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
    for (const auto& s : p.sentences)
      sentences.push_back({{"index", s.index},
                           {"text", s.text},
                           {"char_span", {s.char_span.begin, s.char_span.end}}});
    paragraphs.push_back({{"index", p.index},
                          {"section_index", p.section_index},
                          {"text", p.text},
                          {"sentences", std::move(sentences)}});
  }
  return {{"language_code", a.language_code},
          {"title", a.title},
          {"revision_id", a.revision_id},
          {"canonical_url", a.canonical_url},
          {"sections", std::move(sections)},
          {"paragraphs", std::move(paragraphs)}};
}

// Throws ParseError when the document does not describe a valid Article.
inline Article article_from_json(const nlohmann::json& j) {
  try {
    Article a;
    a.language_code = j.at("language_code").get<std::string>();
    a.title = j.at("title").get<std::string>();
    a.revision_id = j.at("revision_id").get<std::string>();
    a.canonical_url = j.at("canonical_url").get<std::string>();
    for (const auto& s : j.at("sections"))
      a.sections.push_back({s.at("index").get<int>(), s.at("heading").get<std::string>(),
                            s.at("level").get<int>()});
    for (const auto& p : j.at("paragraphs")) {
      Paragraph para;
      para.index = p.at("index").get<int>();
      para.section_index = p.at("section_index").get<int>();
      para.text = p.at("text").get<std::string>();
      for (const auto& s : p.at("sentences")) {
        const auto& span = s.at("char_span");
        para.sentences.push_back({s.at("index").get<int>(), s.at("text").get<std::string>(),
                                  {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()}});
      }
      a.paragraphs.push_back(std::move(para));
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed article record: ") + e.what());
  }
}

// Checks the structural invariants of an Article. Returns an empty string
// when valid, otherwise a description of the first violation.
inline std::string validate_article(const Article& a) {
  for (std::size_t i = 0; i < a.sections.size(); ++i) {
    if (a.sections[i].index != static_cast<int>(i)) return "section indices not contiguous";
    if (a.sections[i].level < 1) return "section level below 1";
  }
  for (std::size_t i = 0; i < a.paragraphs.size(); ++i) {
    const auto& p = a.paragraphs[i];
    if (p.index != static_cast<int>(i)) return "paragraph indices not contiguous";
    if (p.section_index < 0 || static_cast<std::size_t>(p.section_index) >= a.sections.size())
      return "paragraph " + std::to_string(i) + " references missing section";
    if (!p.text.empty() && p.sentences.empty())
      return "paragraph " + std::to_string(i) + " has text but no sentences";
    std::size_t last_end = 0;
    for (std::size_t k = 0; k < p.sentences.size(); ++k) {
      const auto& s = p.sentences[k];
      if (s.index != static_cast<int>(k)) return "sentence indices not contiguous";
      if (s.char_span.begin < last_end || s.char_span.end < s.char_span.begin ||
          s.char_span.end > p.text.size())
        return "sentence spans overlap or are out of range";
      if (p.text.compare(s.char_span.begin, s.char_span.size(), s.text) != 0)
        return "sentence text differs from its span";
      last_end = s.char_span.end;
    }
  }
  return {};
}

}  // namespace gapforge
