#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapforge/align/embedding.hpp"
#include "gapforge/align/neighbors.hpp"
#include "gapforge/decompose/decompose.hpp"
#include "gapforge/error.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/util/parallel.hpp"
#include "gapforge/util/text.hpp"

namespace gapforge {

struct NeighborEntry {
  std::string source_fact_id;
  double cosine = 0.0;

  friend bool operator==(const NeighborEntry&, const NeighborEntry&) = default;
};

// Retrieved source-language neighbors of one target fact, best first.
struct NeighborSet {
  std::string target_fact_id;
  std::vector<NeighborEntry> neighbors;

  bool contains(std::string_view id) const {
    for (const auto& n : neighbors)
      if (n.source_fact_id == id) return true;
    return false;
  }

  friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

struct AlignmentVerdict {
  std::string target_fact_id;
  std::optional<std::string> aligned_with;  // empty means Gap
  NeighborSet neighbor_set;

  bool is_gap() const { return !aligned_with.has_value(); }
  friend bool operator==(const AlignmentVerdict&, const AlignmentVerdict&) = default;
};

inline nlohmann::ordered_json to_json(const NeighborSet& n) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& e : n.neighbors) list.push_back({{"source_fact_id", e.source_fact_id}, {"cosine", e.cosine}});
  return {{"target_fact_id", n.target_fact_id}, {"neighbors", std::move(list)}};
}

namespace detail {

// One verdict token per neighbor: "yes"/"no" (a few localized spellings are
// accepted), optionally numbered, separated by newlines, commas or
// semicolons.
inline std::optional<std::vector<bool>> parse_verdicts(std::string_view output,
                                                       std::size_t expected) {
  std::vector<bool> verdicts;
  std::string normalized(output);
  for (char& c : normalized)
    if (c == ',' || c == ';') c = '\n';
  for (auto raw : text::split(normalized, '\n')) {
    auto token = text::trim(raw);
    if (token.empty()) continue;
    std::size_t skip = 0;
    while (skip < token.size() && (token[skip] == '(' || (token[skip] >= '0' && token[skip] <= '9')))
      ++skip;
    if (skip > 0 && skip < token.size() && (token[skip] == '.' || token[skip] == ':' || token[skip] == ')'))
      token = text::trim(token.substr(skip + 1));
    auto word = text::fold_for_matching(token);
    if (const auto sp = word.find(' '); sp != std::string::npos) word.resize(sp);
    if (word == "yes" || word == "oui" || word == "да" || word == "是") {
      verdicts.push_back(true);
    } else if (word == "no" || word == "non" || word == "нет" || word == "否") {
      verdicts.push_back(false);
    } else {
      return std::nullopt;
    }
  }
  if (verdicts.size() != expected) return std::nullopt;
  return verdicts;
}

inline std::string numbered_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  return std::string(text::trim(out));
}

}  // namespace detail

struct VerifyContext {
  LlmProvider& provider;
  const PromptLibrary& prompts;
};

// Asks whether `target` is inferable from each neighbor, all neighbors in a
// single prompt. The first neighbor judged inferable (in rank order) is the
// alignment; none means a gap. No neighbors means a gap without a call.
inline AlignmentVerdict verify_alignment(const AtomicFact& target, const NeighborSet& neighbors,
                                         const std::vector<const AtomicFact*>& neighbor_facts,
                                         VerifyContext& ctx) {
  if (neighbor_facts.size() != neighbors.neighbors.size())
    fail(ErrorCode::kInvalidArgument, "neighbor facts do not match the neighbor set");
  AlignmentVerdict verdict{target.id, std::nullopt, neighbors};
  if (neighbor_facts.empty()) return verdict;

  std::vector<std::string> texts;
  for (const auto* f : neighbor_facts) texts.push_back(f->text);
  const auto& tmpl = ctx.prompts.get("verify", target.language_code);
  const std::map<std::string, std::string> vars{{"fact", target.text},
                                                {"neighbors", detail::numbered_list(texts)},
                                                {"count", std::to_string(texts.size())},
                                                {"language", language_name(target.language_code)}};
  ChatRequest request;
  request.task = LlmTask::kVerify;
  request.language_code = target.language_code;
  request.input = target.text;
  request.candidates = texts;
  request.messages = {{"system", render(tmpl.system, vars)}, {"user", render(tmpl.user, vars)}};

  auto parsed = detail::parse_verdicts(ctx.provider.complete(request), texts.size());
  if (!parsed) {
    request.attempt = 2;
    request.messages.push_back(
        {"user", tmpl.reminder.empty()
                     ? "Answer with exactly " + std::to_string(texts.size()) +
                           " lines, each \"yes\" or \"no\"."
                     : render(tmpl.reminder, vars)});
    parsed = detail::parse_verdicts(ctx.provider.complete(request), texts.size());
  }
  if (!parsed)
    fail(ErrorCode::kFormatError, "unparseable verification answer for fact " + target.id);
  for (std::size_t i = 0; i < parsed->size(); ++i) {
    if ((*parsed)[i]) {
      verdict.aligned_with = neighbor_facts[i]->id;
      break;
    }
  }
  return verdict;
}

struct AlignContext {
  EmbeddingProvider& embedder;
  LlmProvider& verifier;
  const PromptLibrary& prompts;
  std::size_t k = 3;
};

struct ClassifiedFacts {
  std::vector<AlignmentVerdict> aligned;
  std::vector<AlignmentVerdict> gaps;  // each keeps its neighbor set
};

inline std::vector<std::string> fact_texts(const std::vector<AtomicFact>& facts) {
  std::vector<std::string> out;
  out.reserve(facts.size());
  for (const auto& f : facts) out.push_back(f.text);
  return out;
}

// Retrieves neighbors for every target fact (exact top-k over cosine).
inline std::vector<NeighborSet> retrieve_neighbors(const std::vector<AtomicFact>& source_facts,
                                                   const std::vector<AtomicFact>& target_facts,
                                                   EmbeddingProvider& embedder, std::size_t k) {
  std::vector<NeighborSet> out;
  out.reserve(target_facts.size());
  if (target_facts.empty()) return out;
  std::vector<std::vector<Neighbor>> ranked(target_facts.size());
  if (!source_facts.empty()) {
    const auto source_vecs = embedder.embed(fact_texts(source_facts));
    const auto target_vecs = embedder.embed(fact_texts(target_facts));
    ranked = top_k_neighbors(target_vecs, source_vecs, k);
  } else if (k == 0) {
    fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  }
  for (std::size_t t = 0; t < target_facts.size(); ++t) {
    NeighborSet set{target_facts[t].id, {}};
    for (const auto& n : ranked[t])
      set.neighbors.push_back({source_facts[n.source_index].id, n.cosine});
    out.push_back(std::move(set));
  }
  return out;
}

// Partitions the target facts into aligned facts and gaps, both in target
// order. Verification calls run concurrently up to the verifier's limit.
inline ClassifiedFacts classify_article_pair(const std::vector<AtomicFact>& source_facts,
                                             const std::vector<AtomicFact>& target_facts,
                                             AlignContext& ctx) {
  const auto neighbor_sets = retrieve_neighbors(source_facts, target_facts, ctx.embedder, ctx.k);
  std::map<std::string, const AtomicFact*> by_id;
  for (const auto& f : source_facts) by_id.emplace(f.id, &f);

  VerifyContext verify{ctx.verifier, ctx.prompts};
  auto verdicts = bounded_parallel_map(
      target_facts.size(), ctx.verifier.max_in_flight(), [&](std::size_t i) {
        std::vector<const AtomicFact*> neighbors;
        for (const auto& n : neighbor_sets[i].neighbors) neighbors.push_back(by_id.at(n.source_fact_id));
        return verify_alignment(target_facts[i], neighbor_sets[i], neighbors, verify);
      });

  ClassifiedFacts out;
  for (auto& v : verdicts) (v.is_gap() ? out.gaps : out.aligned).push_back(std::move(v));
  return out;
}

}  // namespace gapforge
