#include "rca/regression_linker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "rca/rca_ranker.hpp"

namespace rca {

bool labeled_canonical_less(const LabeledPattern& a, const LabeledPattern& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

RegressionAnalysis to_regression(std::string regression_id, const AnalysisResult& result) {
  RegressionAnalysis out;
  out.regression_id = std::move(regression_id);
  out.scores.reserve(result.rows.size());
  for (const auto& row : result.rows)
    out.scores.push_back({pattern_labels(row.pattern, *result.vocab), row.precision, row.recall, row.f1});
  return out;
}

GlobalPatternIndex::GlobalPatternIndex(std::vector<LabeledPattern> patterns) : patterns_(std::move(patterns)) {
  std::sort(patterns_.begin(), patterns_.end(), labeled_canonical_less);
  patterns_.erase(std::unique(patterns_.begin(), patterns_.end()), patterns_.end());
  for (std::size_t i = 0; i < patterns_.size(); ++i) lookup_.emplace(patterns_[i], i + 1);
}

std::size_t GlobalPatternIndex::position(const LabeledPattern& pattern) const {
  auto it = lookup_.find(pattern);
  if (it == lookup_.end()) throw std::out_of_range("pattern missing from index (stale index)");
  return it->second;
}

GlobalPatternIndex build_index(std::span<const RegressionAnalysis> analyses) {
  if (analyses.empty()) throw std::invalid_argument("build_index: no analyses");
  std::vector<LabeledPattern> all;
  for (const auto& a : analyses)
    for (const auto& s : a.scores) all.push_back(s.pattern);
  return GlobalPatternIndex(std::move(all));
}

bool RegressionVector::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const auto& c) { return c.second == 0.0; });
}

double RegressionVector::norm() const {
  double sum = 0.0;
  for (const auto& [i, v] : coords) sum += v * v;
  return std::sqrt(sum);
}

double RegressionVector::at(std::size_t index) const {
  auto it = std::lower_bound(coords.begin(), coords.end(), index,
                             [](const auto& c, std::size_t i) { return c.first < i; });
  return it != coords.end() && it->first == index ? it->second : 0.0;
}

RegressionVector encode_regression(const RegressionAnalysis& analysis, const GlobalPatternIndex& index) {
  RegressionVector v;
  v.regression_id = analysis.regression_id;
  v.dimension = index.dimension();
  v.coords.reserve(3 * analysis.scores.size());
  for (const auto& s : analysis.scores) {
    const std::size_t j = 3 * index.position(s.pattern);
    v.coords.emplace_back(j - 2, s.precision);
    v.coords.emplace_back(j - 1, s.recall);
    v.coords.emplace_back(j, s.f1);
  }
  std::sort(v.coords.begin(), v.coords.end());
  return v;
}

double cosine_distance(const RegressionVector& a, const RegressionVector& b) {
  if (a.dimension != b.dimension) throw std::invalid_argument("cosine_distance: dimension mismatch");
  double na2 = 0.0, nb2 = 0.0;
  for (const auto& c : a.coords) na2 += c.second * c.second;
  for (const auto& c : b.coords) nb2 += c.second * c.second;
  if (na2 == 0.0 || nb2 == 0.0) throw std::invalid_argument("cosine_distance: zero vector");
  double dot = 0.0;
  for (std::size_t i = 0, j = 0; i < a.coords.size() && j < b.coords.size();) {
    if (a.coords[i].first < b.coords[j].first) ++i;
    else if (b.coords[j].first < a.coords[i].first) ++j;
    else dot += a.coords[i++].second * b.coords[j++].second;
  }
  return std::clamp(1.0 - dot / std::sqrt(na2 * nb2), 0.0, 2.0);
}

std::vector<double> pairwise_distances(std::span<const RegressionVector> vectors, int workers) {
  const auto n = static_cast<std::ptrdiff_t>(vectors.size());
  std::vector<double> d(vectors.size() * vectors.size(), 0.0);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      const double dist = cosine_distance(vectors[i], vectors[j]);
      d[i * n + j] = dist;
      d[j * n + i] = dist;
    }
  }
  return d;
}

std::vector<double> pairwise_distances_reference(std::span<const RegressionVector> vectors) {
  const std::size_t n = vectors.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i * n + j] = cosine_distance(vectors[i], vectors[j]);
  return d;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

LinkReport link_regressions(std::span<const RegressionVector> vectors, double distance_threshold,
                            int workers) {
  if (!(distance_threshold >= 0.0)) throw std::invalid_argument("link threshold must be non-negative");
  LinkReport report;
  report.threshold = distance_threshold;

  std::vector<RegressionVector> live;
  for (const auto& v : vectors) {
    if (v.is_zero()) report.excluded_zero_vectors.push_back(v.regression_id);
    else live.push_back(v);
  }
  std::sort(report.excluded_zero_vectors.begin(), report.excluded_zero_vectors.end());

  const std::size_t n = live.size();
  const std::vector<double> d = pairwise_distances(live, workers);
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[i * n + j] <= distance_threshold) sets.unite(i, j);

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[sets.find(i)].push_back(i);
  for (const auto& [root, idx] : components) {
    RegressionCluster c;
    for (std::size_t a : idx) {
      c.members.push_back(live[a].regression_id);
      for (std::size_t b : idx) c.diameter = std::max(c.diameter, d[a * n + b]);
    }
    std::sort(c.members.begin(), c.members.end());
    report.clusters.push_back(std::move(c));
  }
  std::sort(report.clusters.begin(), report.clusters.end(),
            [](const RegressionCluster& a, const RegressionCluster& b) { return a.members.front() < b.members.front(); });
  return report;
}

nlohmann::ordered_json to_json(const LinkReport& report) {
  nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
  for (const auto& c : report.clusters)
    clusters.push_back({{"members", c.members}, {"diameter", c.diameter}});
  nlohmann::ordered_json j;
  j["threshold"] = report.threshold;
  j["clusters"] = clusters;
  j["excluded_zero_vectors"] = report.excluded_zero_vectors;
  return j;
}

}  // namespace rca
