#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "gapforge/align/embedding.hpp"
#include "gapforge/error.hpp"

namespace gapforge {

struct Neighbor {
  std::size_t source_index = 0;
  double cosine = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact top-k by full scan. Neighbors are ordered by descending cosine, ties
// by ascending source index, and each list has min(k, |sources|) entries.
inline std::vector<std::vector<Neighbor>> top_k_neighbors(
    const std::vector<EmbeddingVector>& targets, const std::vector<EmbeddingVector>& sources,
    std::size_t k = 3) {
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  const std::size_t take = std::min(k, sources.size());
  std::vector<std::vector<Neighbor>> out;
  out.reserve(targets.size());
  std::vector<Neighbor> scored(sources.size());
  for (const auto& t : targets) {
    for (std::size_t s = 0; s < sources.size(); ++s) scored[s] = {s, cosine(t, sources[s])};
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), [](const Neighbor& a, const Neighbor& b) {
                        if (a.cosine != b.cosine) return a.cosine > b.cosine;
                        return a.source_index < b.source_index;
                      });
    out.emplace_back(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

}  // namespace gapforge
