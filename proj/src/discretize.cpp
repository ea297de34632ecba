#include "rca/discretize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rca {

namespace {

constexpr int kKMeansMaxIterations = 100;
constexpr double kKMeansTolerance = 1e-6;

void validate_values(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("compute_bins: no values");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("compute_bins: non-finite value");
}

// Keeps strictly increasing cut points strictly inside (lo, hi).
std::vector<double> clean_endpoints(std::vector<double> cuts, double lo, double hi) {
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> out;
  for (double c : cuts) {
    if (!(c > lo && c < hi)) continue;
    if (!out.empty() && !(c > out.back())) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<double> equal_proportion_cuts(std::span<const double> sorted, std::size_t n_bins) {
  const std::size_t n = sorted.size();
  std::vector<double> cuts;
  for (std::size_t k = 1; k < n_bins; ++k) {
    // 1-based rank ceil(k * N / n_bins)
    std::size_t rank = (k * n + n_bins - 1) / n_bins;
    rank = std::clamp<std::size_t>(rank, 1, n);
    cuts.push_back(sorted[rank - 1]);
  }
  return cuts;
}

std::vector<double> equal_width_cuts(double lo, double hi, std::size_t n_bins) {
  std::vector<double> cuts;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t k = 1; k < n_bins; ++k) cuts.push_back(lo + width * static_cast<double>(k));
  return cuts;
}

}  // namespace

std::vector<double> kmeans_centers_1d(std::span<const double> sorted, std::size_t n_bins) {
  if (sorted.empty() || n_bins == 0) return {};
  std::vector<double> centers;
  for (std::size_t k = 0; k < n_bins; ++k) {
    double q = (static_cast<double>(k) + 0.5) / static_cast<double>(n_bins);
    centers.push_back(quantile_sorted(sorted, q));
  }
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

  std::vector<double> sums(centers.size());
  std::vector<std::size_t> counts(centers.size());
  for (int iter = 0; iter < kKMeansMaxIterations; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    // Centers stay sorted, so assignment is a sweep over midpoints.
    std::size_t c = 0;
    for (double v : sorted) {
      while (c + 1 < centers.size() && v > 0.5 * (centers[c] + centers[c + 1])) ++c;
      sums[c] += v;
      ++counts[c];
    }
    double shift = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (counts[k] == 0) continue;
      double next = sums[k] / static_cast<double>(counts[k]);
      shift = std::max(shift, std::abs(next - centers[k]));
      centers[k] = next;
    }
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    sums.resize(centers.size());
    counts.resize(centers.size());
    if (shift < kKMeansTolerance) break;
  }
  return centers;
}

namespace {

std::vector<double> kmeans_cuts(std::span<const double> sorted, std::size_t n_bins) {
  const std::vector<double> centers = kmeans_centers_1d(sorted, n_bins);
  std::vector<double> cuts;
  for (std::size_t k = 0; k + 1 < centers.size(); ++k)
    cuts.push_back(0.5 * (centers[k] + centers[k + 1]));
  return cuts;
}

}  // namespace

std::string_view to_string(BinStrategy strategy) {
  switch (strategy) {
    case BinStrategy::equal_proportion: return "equal_proportion";
    case BinStrategy::equal_width: return "equal_width";
    case BinStrategy::kbins: return "kbins";
  }
  return "?";
}

BinStrategy parse_bin_strategy(std::string_view text) {
  if (text == "equal_proportion") return BinStrategy::equal_proportion;
  if (text == "equal_width") return BinStrategy::equal_width;
  if (text == "kbins") return BinStrategy::kbins;
  throw std::invalid_argument("unknown binning strategy: " + std::string(text));
}

std::string to_string(const BinRule& rule) {
  switch (rule.kind) {
    case BinRule::Kind::explicit_count: return std::to_string(rule.count);
    case BinRule::Kind::sturges: return "sturges";
    case BinRule::Kind::freedman_diaconis: return "freedman_diaconis";
  }
  return "?";
}

BinRule parse_bin_rule(std::string_view text) {
  if (text == "sturges") return BinRule::sturges();
  if (text == "fd" || text == "freedman_diaconis") return BinRule::freedman_diaconis();
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || ptr != text.data() + text.size() || n == 0)
    throw std::invalid_argument("invalid bin rule: " + std::string(text));
  return BinRule::explicit_bins(n);
}

std::size_t sturges_bins(std::size_t n) {
  if (n <= 1) return 1;
  // ceil(log2 n) computed exactly on integers
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits + 1;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const std::size_t above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

std::size_t freedman_diaconis_bins(std::span<const double> sorted) {
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (!(iqr > 0.0)) return 0;
  const double n = static_cast<double>(sorted.size());
  const double width = 2.0 * iqr * std::pow(n, -1.0 / 3.0);
  const double bins = std::ceil((sorted.back() - sorted.front()) / width);
  return static_cast<std::size_t>(std::clamp(bins, 1.0, n));
}

BinningSpec compute_bins(std::span<const double> values, BinStrategy strategy, BinRule rule,
                         std::string feature) {
  validate_values(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BinningSpec spec;
  spec.feature = std::move(feature);
  spec.lo = sorted.front();
  spec.hi = sorted.back();
  spec.strategy = strategy;
  spec.rule = rule;

  switch (rule.kind) {
    case BinRule::Kind::explicit_count:
      if (rule.count == 0) throw std::invalid_argument("explicit bin count must be positive");
      spec.requested_bins = rule.count;
      break;
    case BinRule::Kind::sturges:
      spec.requested_bins = sturges_bins(sorted.size());
      break;
    case BinRule::Kind::freedman_diaconis:
      spec.requested_bins = freedman_diaconis_bins(sorted);
      if (spec.requested_bins == 0) {
        spec.fallback_applied = true;
        spec.requested_bins = sturges_bins(sorted.size());
      }
      break;
  }

  if (spec.lo == spec.hi || spec.requested_bins <= 1) return spec;

  std::vector<double> cuts;
  switch (strategy) {
    case BinStrategy::equal_proportion:
      cuts = equal_proportion_cuts(sorted, spec.requested_bins);
      break;
    case BinStrategy::equal_width:
      cuts = equal_width_cuts(spec.lo, spec.hi, spec.requested_bins);
      break;
    case BinStrategy::kbins:
      cuts = kmeans_cuts(sorted, spec.requested_bins);
      break;
  }
  spec.endpoints = clean_endpoints(std::move(cuts), spec.lo, spec.hi);
  return spec;
}

std::size_t bin_index(double value, const BinningSpec& spec) {
  // first endpoint >= value: bins are right-closed
  auto it = std::lower_bound(spec.endpoints.begin(), spec.endpoints.end(), value);
  return static_cast<std::size_t>(it - spec.endpoints.begin());
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

std::string bin_interval(std::size_t index, const BinningSpec& spec) {
  const std::size_t n = spec.endpoints.size();
  if (index > n) throw std::out_of_range("bin index out of range");
  const double left = index == 0 ? spec.lo : spec.endpoints[index - 1];
  const double right = index == n ? spec.hi : spec.endpoints[index];
  return (index == 0 ? "[" : "(") + format_number(left) + "," + format_number(right) + "]";
}

std::string apply_binning(double value, const BinningSpec& spec) {
  if (!std::isfinite(value)) throw std::invalid_argument("apply_binning: non-finite value");
  return spec.feature + "\xE2\x88\x88" + bin_interval(bin_index(value, spec), spec);
}

nlohmann::ordered_json to_json(const BinningSpec& spec) {
  return {
      {"feature", spec.feature},
      {"lo", spec.lo},
      {"hi", spec.hi},
      {"endpoints", spec.endpoints},
      {"strategy", std::string(to_string(spec.strategy))},
      {"bin_rule", to_string(spec.rule)},
      {"requested_bins", spec.requested_bins},
      {"realized_bins", spec.realized_bins()},
      {"fallback_applied", spec.fallback_applied},
  };
}

BinningSpec binning_spec_from_json(const nlohmann::ordered_json& j) {
  BinningSpec spec;
  spec.feature = j.at("feature").get<std::string>();
  spec.lo = j.at("lo").get<double>();
  spec.hi = j.at("hi").get<double>();
  spec.endpoints = j.at("endpoints").get<std::vector<double>>();
  spec.strategy = parse_bin_strategy(j.at("strategy").get<std::string>());
  spec.rule = parse_bin_rule(j.at("bin_rule").get<std::string>());
  spec.requested_bins = j.value("requested_bins", spec.endpoints.size() + 1);
  spec.fallback_applied = j.value("fallback_applied", false);
  for (std::size_t i = 0; i < spec.endpoints.size(); ++i) {
    const double prev = i == 0 ? spec.lo : spec.endpoints[i - 1];
    if (!(spec.endpoints[i] > prev) || !(spec.endpoints[i] < spec.hi))
      throw std::invalid_argument("binning spec endpoints not strictly increasing inside (lo, hi)");
  }
  return spec;
}

}  // namespace rca
