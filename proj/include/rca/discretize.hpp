#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rca {

enum class BinStrategy { equal_proportion, equal_width, kbins };

struct BinRule {
  enum class Kind { explicit_count, sturges, freedman_diaconis };
  Kind kind = Kind::sturges;
  std::size_t count = 0;  // only for explicit_count

  static BinRule explicit_bins(std::size_t n) { return {Kind::explicit_count, n}; }
  static BinRule sturges() { return {Kind::sturges, 0}; }
  static BinRule freedman_diaconis() { return {Kind::freedman_diaconis, 0}; }
};

std::string_view to_string(BinStrategy strategy);
BinStrategy parse_bin_strategy(std::string_view text);
std::string to_string(const BinRule& rule);
/// Accepts "sturges", "fd"/"freedman_diaconis", or a positive integer.
BinRule parse_bin_rule(std::string_view text);

/// Endpoints partitioning [lo, hi] into [lo,x1], (x1,x2], ..., (xn,hi].
struct BinningSpec {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> endpoints;
  BinStrategy strategy = BinStrategy::equal_proportion;
  BinRule rule = BinRule::sturges();
  std::size_t requested_bins = 1;
  bool fallback_applied = false;

  std::size_t realized_bins() const { return endpoints.size() + 1; }
};

/// Number of bins produced by Sturges' rule: ceil(log2 N) + 1.
std::size_t sturges_bins(std::size_t n);

/// Freedman-Diaconis bin count, clamped to [1, N]. Returns 0 when IQR is zero.
std::size_t freedman_diaconis_bins(std::span<const double> sorted_values);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted_values, double q);

/// 1-D k-means with quantile-seeded centers; returns sorted distinct final centers.
std::vector<double> kmeans_centers_1d(std::span<const double> sorted_values, std::size_t k);

BinningSpec compute_bins(std::span<const double> values, BinStrategy strategy, BinRule rule,
                         std::string feature = {});

/// Index of the bin holding `value`; out-of-range values clamp to the end bins.
std::size_t bin_index(double value, const BinningSpec& spec);

/// Interval text for bin `index`, e.g. "(25,50]" or "[1,25]".
std::string bin_interval(std::size_t index, const BinningSpec& spec);

/// Event label "feature∈(xi,xi+1]" for `value`. Throws on non-finite input.
std::string apply_binning(double value, const BinningSpec& spec);

/// Shortest round-trip decimal rendering used in bin labels.
std::string format_number(double value);

nlohmann::ordered_json to_json(const BinningSpec& spec);
BinningSpec binning_spec_from_json(const nlohmann::ordered_json& j);

}  // namespace rca
