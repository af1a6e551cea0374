#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gapforge/align/align.hpp"
#include "gapforge/align/embedding.hpp"
#include "gapforge/corpus/article.hpp"
#include "gapforge/decompose/decompose.hpp"
#include "gapforge/enrich/link.hpp"
#include "gapforge/error.hpp"
#include "gapforge/gapselect/gapselect.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/util/parallel.hpp"

namespace gapforge {

// A selected gap fact ready for display next to the English article.
struct PresentedFact {
  std::string id;
  std::string language_code;
  std::string text_en;
  std::string text_src;
  std::string source_title;
  std::string source_link_url;
  std::string anchor_sentence_en;
  int anchor_paragraph_index = 0;
  double similarity = 0.0;
  int section_index = 0;

  friend bool operator==(const PresentedFact&, const PresentedFact&) = default;
};

inline std::string translate(std::string_view text, std::string_view source_lang,
                             LlmProvider& provider, const PromptLibrary& prompts) {
  if (text::trim(text).empty()) fail(ErrorCode::kInvalidArgument, "cannot translate empty text");
  const auto& tmpl = prompts.get("translate", source_lang);
  const std::map<std::string, std::string> vars{{"text", std::string(text)},
                                                {"language", language_name(source_lang)}};
  ChatRequest request;
  request.task = LlmTask::kTranslate;
  request.language_code = std::string(source_lang);
  request.input = std::string(text);
  request.messages = {{"system", render(tmpl.system, vars)}, {"user", render(tmpl.user, vars)}};
  auto out = text::normalize_whitespace(provider.complete(request));
  if (out.empty()) {
    request.attempt = 2;
    request.messages.push_back(
        {"user", tmpl.reminder.empty() ? "Reply with the English translation only."
                                       : render(tmpl.reminder, vars)});
    out = text::normalize_whitespace(provider.complete(request));
  }
  if (out.empty()) fail(ErrorCode::kFormatError, "empty translation after retry");
  return out;
}

namespace detail {

// Index of the sentence most similar to `probe` (ties to the earlier one).
inline std::size_t most_similar_sentence(std::string_view probe, const Paragraph& p,
                                         EmbeddingProvider& embedder) {
  if (p.sentences.size() == 1) return 0;
  std::vector<std::string> texts{std::string(probe)};
  for (const auto& s : p.sentences) texts.push_back(s.text);
  const auto vecs = embedder.embed(texts);
  std::size_t best = 0;
  double best_cos = -2.0;
  for (std::size_t i = 1; i < vecs.size(); ++i) {
    const double c = cosine(vecs[0], vecs[i]);
    if (c > best_cos) {
      best_cos = c;
      best = i - 1;
    }
  }
  return best;
}

}  // namespace detail

struct Anchor {
  std::string sentence;
  int paragraph_index = 0;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

// English sentence that a gap is pinned to: within the paragraph of the
// rank-1 English neighbor, the sentence closest to the gap fact. Without
// neighbors, the first sentence of the lead.
inline Anchor anchor_for(const GapEntry& gap, const Article& english,
                         const std::vector<AtomicFact>& english_facts,
                         EmbeddingProvider& embedder) {
  if (gap.neighbors.neighbors.empty()) {
    for (const auto& p : english.paragraphs)
      if (!p.sentences.empty()) return {p.sentences.front().text, p.index};
    fail(ErrorCode::kMissingParagraph, english.title + " has no sentences to anchor to");
  }
  const auto& best_id = gap.neighbors.neighbors.front().source_fact_id;
  const AtomicFact* best = nullptr;
  for (const auto& f : english_facts)
    if (f.id == best_id) best = &f;
  if (!best) fail(ErrorCode::kMissingParagraph, "neighbor fact " + best_id + " is not in the English facts");
  const auto& paragraph = english.paragraph(best->paragraph_index);
  if (paragraph.sentences.empty())
    fail(ErrorCode::kMissingParagraph, "English paragraph " + std::to_string(paragraph.index) +
                                           " has no sentences");
  const auto idx = detail::most_similar_sentence(gap.fact.text, paragraph, embedder);
  return {paragraph.sentences[idx].text, paragraph.index};
}

// Sentence of the target article a gap fact came from: the recorded source
// sentence when the decomposer reported one, otherwise the closest sentence
// of the fact's paragraph.
inline const Sentence& source_sentence_for(const AtomicFact& fact, const Article& target,
                                           EmbeddingProvider& embedder) {
  const auto& paragraph = target.paragraph(fact.paragraph_index);
  if (paragraph.sentences.empty())
    fail(ErrorCode::kMissingParagraph, target.language_code + " paragraph " +
                                           std::to_string(paragraph.index) + " has no sentences");
  if (fact.source_sentence_index && *fact.source_sentence_index >= 0 &&
      static_cast<std::size_t>(*fact.source_sentence_index) < paragraph.sentences.size())
    return paragraph.sentences[static_cast<std::size_t>(*fact.source_sentence_index)];
  return paragraph.sentences[detail::most_similar_sentence(fact.text, paragraph, embedder)];
}

struct EnrichContext {
  LlmProvider& translator;
  EmbeddingProvider& embedder;
  const PromptLibrary& prompts;
};

struct EnrichInputs {
  const Article& english;
  const std::vector<AtomicFact>& english_facts;
  const std::map<std::string, Article>& targets;  // by language code
};

inline double round_similarity(double c) { return std::round(c * 1e6) / 1e6; }

inline PresentedFact present(const GapEntry& gap, const Article& target, const EnrichInputs& in,
                             EnrichContext& ctx) {
  try {
    PresentedFact p;
    p.id = gap.fact.id;
    p.language_code = gap.fact.language_code;
    p.text_src = gap.fact.text;
    p.text_en = translate(gap.fact.text, gap.fact.language_code, ctx.translator, ctx.prompts);
    p.source_title = target.title;
    p.source_link_url = build_highlight_link(
        target.canonical_url, source_sentence_for(gap.fact, target, ctx.embedder).text);
    const auto anchor = anchor_for(gap, in.english, in.english_facts, ctx.embedder);
    p.anchor_sentence_en = anchor.sentence;
    p.anchor_paragraph_index = anchor.paragraph_index;
    p.similarity =
        gap.neighbors.neighbors.empty() ? 0.0 : round_similarity(gap.neighbors.neighbors.front().cosine);
    p.section_index = gap.fact.section_index;
    return p;
  } catch (const Error& e) {
    e.rethrow_with("fact " + gap.fact.id);
  }
}

// One PresentedFact per selected gap, order preserved. Translation calls run
// concurrently up to the translator's limit.
inline std::map<std::string, std::vector<PresentedFact>> enrich_selection(
    const std::map<std::string, std::vector<GapEntry>>& selected, const EnrichInputs& in,
    EnrichContext& ctx) {
  std::map<std::string, std::vector<PresentedFact>> out;
  for (const auto& [lang, gaps] : selected) {
    const auto target = in.targets.find(lang);
    if (target == in.targets.end())
      fail(ErrorCode::kInvalidArgument, "no " + lang + " article supplied for enrichment");
    out[lang] = bounded_parallel_map(gaps.size(), ctx.translator.max_in_flight(),
                                     [&](std::size_t i) {
                                       return present(gaps[i], target->second, in, ctx);
                                     });
  }
  return out;
}

}  // namespace gapforge
