#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rca {

struct AnalysisResult;

inline constexpr double kDefaultLinkThreshold = 0.1;

/// A pattern as event labels, so patterns from differently-interned runs compare equal.
using LabeledPattern = std::vector<std::string>;

/// Shorter first, then lexicographic by label.
bool labeled_canonical_less(const LabeledPattern& a, const LabeledPattern& b);

struct PatternScore {
  LabeledPattern pattern;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RegressionAnalysis {
  std::string regression_id;
  std::vector<PatternScore> scores;
};

/// Labels and scores of every ranked row.
RegressionAnalysis to_regression(std::string regression_id, const AnalysisResult& result);

class GlobalPatternIndex {
 public:
  GlobalPatternIndex() = default;
  explicit GlobalPatternIndex(std::vector<LabeledPattern> patterns);

  const std::vector<LabeledPattern>& patterns() const { return patterns_; }
  std::size_t dimension() const { return 3 * patterns_.size(); }
  /// 1-based position i of the pattern (its triplet occupies 3i-2..3i); throws if absent.
  std::size_t position(const LabeledPattern& pattern) const;

 private:
  std::vector<LabeledPattern> patterns_;
  std::map<LabeledPattern, std::size_t> lookup_;
};

/// Union of all patterns across analyses in canonical order. Throws on empty input.
GlobalPatternIndex build_index(std::span<const RegressionAnalysis> analyses);

/// Sparse vector; coordinates are 1-based and sorted ascending.
struct RegressionVector {
  std::string regression_id;
  std::size_t dimension = 0;
  std::vector<std::pair<std::size_t, double>> coords;

  bool is_zero() const;
  double norm() const;
  /// Value at 1-based coordinate `index` (zero when absent).
  double at(std::size_t index) const;
};

/// Writes (precision, recall, F1) of pattern p_i to coordinates (3i-2, 3i-1, 3i).
RegressionVector encode_regression(const RegressionAnalysis& analysis, const GlobalPatternIndex& index);

/// 1 - cos(a, b), clamped to [0, 2]. Throws on zero vectors or mismatched dimensions.
double cosine_distance(const RegressionVector& a, const RegressionVector& b);

/// Row-major n x n distance matrix, computed with OpenMP over rows.
std::vector<double> pairwise_distances(std::span<const RegressionVector> vectors, int workers = 0);

/// Serial reference for pairwise_distances.
std::vector<double> pairwise_distances_reference(std::span<const RegressionVector> vectors);

struct RegressionCluster {
  std::vector<std::string> members;  // sorted
  double diameter = 0.0;             // largest pairwise distance inside the cluster
};

struct LinkReport {
  double threshold = kDefaultLinkThreshold;
  std::vector<RegressionCluster> clusters;  // ordered by smallest member id
  std::vector<std::string> excluded_zero_vectors;
};

/// Connected components of the graph with an edge wherever distance <= threshold.
/// Zero vectors are excluded and listed separately.
LinkReport link_regressions(std::span<const RegressionVector> vectors,
                            double distance_threshold = kDefaultLinkThreshold, int workers = 0);

nlohmann::ordered_json to_json(const LinkReport& report);

}  // namespace rca
