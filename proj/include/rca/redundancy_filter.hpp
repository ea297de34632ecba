#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rca/rca_ranker.hpp"

namespace rca {

inline constexpr double kDefaultSimilarityThreshold = 0.9;

/// |a ∩ b| / |a ∪ b| over ascending id lists. Throws when both are empty.
double jaccard(std::span<const TraceIndex> a, std::span<const TraceIndex> b);

/// Indices refer to positions in the ranked input. The representative is also a member.
struct PatternCluster {
  std::size_t representative = 0;
  std::vector<std::size_t> members;
};

struct DedupeResult {
  std::vector<PatternStats> kept;  // representatives, in rank order
  std::vector<PatternCluster> clusters;
  double threshold = kDefaultSimilarityThreshold;
};

/// Greedy leader clustering in rank order over test-group supporting ids:
/// each pattern joins the first cluster whose representative is at least
/// `threshold`-similar, otherwise it founds a new cluster.
DedupeResult dedupe(std::span<const PatternStats> ranked, double threshold = kDefaultSimilarityThreshold);

}  // namespace rca
