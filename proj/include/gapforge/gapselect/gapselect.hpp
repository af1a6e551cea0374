#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "gapforge/align/align.hpp"
#include "gapforge/decompose/decompose.hpp"
#include "gapforge/error.hpp"

namespace gapforge {

struct GapEntry {
  AtomicFact fact;
  NeighborSet neighbors;

  friend bool operator==(const GapEntry&, const GapEntry&) = default;
};

using SectionCounts = std::map<int, int>;

inline SectionCounts count_gaps_by_section(const std::vector<GapEntry>& gaps) {
  SectionCounts counts;
  for (const auto& g : gaps) {
    if (g.fact.section_index < 0)
      fail(ErrorCode::kInvalidArgument, "gap " + g.fact.id + " has a negative section index");
    ++counts[g.fact.section_index];
  }
  return counts;
}

// Gap facts of one target-language article, keyed to that article's sections.
struct GapInventory {
  std::string language_code;
  std::string topic;
  std::vector<GapEntry> gaps;
  SectionCounts section_counts;

  static GapInventory make(std::string language_code, std::string topic,
                           std::vector<GapEntry> gaps) {
    GapInventory inv{std::move(language_code), std::move(topic), std::move(gaps), {}};
    inv.section_counts = count_gaps_by_section(inv.gaps);
    return inv;
  }
};

struct QuotaPlan {
  int cap = 10;
  std::map<int, int> per_section;

  int total() const {
    int sum = 0;
    for (const auto& [s, q] : per_section) sum += q;
    return sum;
  }
  friend bool operator==(const QuotaPlan&, const QuotaPlan&) = default;
};

// Largest-remainder (Hamilton) apportionment of `cap` over the section
// counts. When the counts total at most `cap`, every gap is taken. Leftover
// seats go to the largest fractional remainders, ties to the larger count,
// then to the lower section index. Exact integer arithmetic throughout.
inline QuotaPlan allocate_quota(const SectionCounts& counts, int cap) {
  if (cap < 0) fail(ErrorCode::kInvalidArgument, "cap must be non-negative");
  QuotaPlan plan{cap, {}};
  std::int64_t total = 0;
  for (const auto& [section, count] : counts) {
    if (count < 0) fail(ErrorCode::kInvalidArgument, "negative gap count");
    total += count;
  }
  if (total <= cap) {
    plan.per_section = counts;
    return plan;
  }

  struct Seat {
    int section;
    int count;
    std::int64_t remainder;  // numerator over `total`
  };
  std::vector<Seat> seats;
  std::int64_t assigned = 0;
  for (const auto& [section, count] : counts) {
    const std::int64_t scaled = static_cast<std::int64_t>(count) * cap;
    const auto floor_quota = static_cast<int>(scaled / total);
    plan.per_section[section] = floor_quota;
    assigned += floor_quota;
    seats.push_back({section, count, scaled % total});
  }
  std::sort(seats.begin(), seats.end(), [](const Seat& a, const Seat& b) {
    return std::tie(b.remainder, b.count, a.section) < std::tie(a.remainder, a.count, b.section);
  });
  for (std::int64_t i = 0; i < cap - assigned; ++i) ++plan.per_section[seats[static_cast<std::size_t>(i)].section];
  return plan;
}

namespace detail {

inline std::string plan_violation(const GapInventory& inv, const QuotaPlan& plan) {
  if (plan.cap < 0) return "negative cap";
  int total = 0;
  for (const auto& [section, count] : inv.section_counts) total += count;
  for (const auto& [section, quota] : plan.per_section) {
    const auto it = inv.section_counts.find(section);
    if (it == inv.section_counts.end())
      return "plan names section " + std::to_string(section) + " which has no gaps";
    if (quota < 0 || quota > it->second)
      return "quota " + std::to_string(quota) + " for section " + std::to_string(section) +
             " outside [0, " + std::to_string(it->second) + "]";
  }
  if (plan.total() != std::min(plan.cap, total))
    return "quotas sum to " + std::to_string(plan.total()) + ", expected " +
           std::to_string(std::min(plan.cap, total));
  return {};
}

inline bool document_order(const GapEntry& a, const GapEntry& b) {
  return std::tie(a.fact.paragraph_index, a.fact.ordinal) <
         std::tie(b.fact.paragraph_index, b.fact.ordinal);
}

}  // namespace detail

// Within each section takes the first quota-many gaps in document order
// (paragraph, then decomposition ordinal). Output is in document order.
inline std::vector<GapEntry> select_facts(const GapInventory& inventory, const QuotaPlan& plan) {
  if (count_gaps_by_section(inventory.gaps) != inventory.section_counts)
    fail(ErrorCode::kPlanMismatch, "inventory section counts are stale");
  if (const auto why = detail::plan_violation(inventory, plan); !why.empty())
    fail(ErrorCode::kPlanMismatch, inventory.language_code + ": " + why);

  std::vector<GapEntry> ordered = inventory.gaps;
  std::stable_sort(ordered.begin(), ordered.end(), detail::document_order);
  std::map<int, int> taken;
  std::vector<GapEntry> out;
  for (auto& g : ordered) {
    const auto it = plan.per_section.find(g.fact.section_index);
    const int quota = it == plan.per_section.end() ? 0 : it->second;
    if (taken[g.fact.section_index] < quota) {
      ++taken[g.fact.section_index];
      out.push_back(std::move(g));
    }
  }
  return out;
}

// Independent per-language selection; all inventories must share one topic.
inline std::map<std::string, std::vector<GapEntry>> select_for_topic(
    const std::map<std::string, GapInventory>& inventories, int cap) {
  std::map<std::string, std::vector<GapEntry>> out;
  if (inventories.empty()) return out;
  const auto& topic = inventories.begin()->second.topic;
  for (const auto& [lang, inv] : inventories)
    if (inv.topic != topic)
      fail(ErrorCode::kTopicMismatch, lang + " inventory is for '" + inv.topic + "', expected '" +
                                          topic + "'");
  for (const auto& [lang, inv] : inventories)
    out.emplace(lang, select_facts(inv, allocate_quota(inv.section_counts, cap)));
  return out;
}

}  // namespace gapforge
