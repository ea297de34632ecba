#include "rca/redundancy_filter.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace rca {

double jaccard(std::span<const TraceIndex> a, std::span<const TraceIndex> b) {
  if (a.empty() && b.empty()) throw std::invalid_argument("jaccard: both sets empty");
  std::size_t inter = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else { ++inter; ++i; ++j; }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

namespace {

class Bitset {
 public:
  Bitset(std::span<const TraceIndex> ids, std::size_t universe)
      : words_((universe + 63) / 64, 0), count_(ids.size()) {
    for (TraceIndex i : ids) words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::size_t count() const { return count_; }
  std::size_t intersect(std::span<const TraceIndex> ids) const {
    std::size_t n = 0;
    for (TraceIndex i : ids) n += (words_[i / 64] >> (i % 64)) & 1u;
    return n;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t count_;
};

}  // namespace

DedupeResult dedupe(std::span<const PatternStats> ranked, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("dedupe: similarity threshold must be in [0, 1]");

  std::size_t universe = 0;
  for (const auto& row : ranked)
    if (!row.test_ids.empty()) universe = std::max<std::size_t>(universe, row.test_ids.back() + 1);

  DedupeResult result;
  result.threshold = threshold;
  std::vector<Bitset> leaders;

  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& ids = ranked[i].test_ids;
    bool placed = false;
    for (std::size_t c = 0; c < result.clusters.size() && !placed; ++c) {
      const Bitset& leader = leaders[c];
      const std::size_t lo = std::min(leader.count(), ids.size());
      const std::size_t hi = std::max(leader.count(), ids.size());
      // Jaccard is bounded by min/max of the set sizes.
      if (hi > 0 && static_cast<double>(lo) / static_cast<double>(hi) < threshold) continue;
      const std::size_t inter = leader.intersect(ids);
      const std::size_t uni = leader.count() + ids.size() - inter;
      const double sim = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
      if (sim >= threshold) {
        result.clusters[c].members.push_back(i);
        placed = true;
      }
    }
    if (!placed) {
      result.clusters.push_back({i, {i}});
      leaders.emplace_back(ids, universe);
    }
  }

  // Leaders are the earliest-ranked members, so each holds its cluster's maximum F1.
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const PatternCluster& a, const PatternCluster& b) { return a.representative < b.representative; });
  for (const auto& cluster : result.clusters) result.kept.push_back(ranked[cluster.representative]);
  return result;
}

}  // namespace rca
