#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "rca/discretize.hpp"

using namespace rca;

namespace {

std::vector<double> one_to(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

std::vector<std::size_t> bin_counts(const std::vector<double>& values, const BinningSpec& spec) {
  std::vector<std::size_t> counts(spec.realized_bins());
  for (double v : values) ++counts[bin_index(v, spec)];
  return counts;
}

// Bins matching v by direct interval test, independent of bin_index.
std::size_t matching_bins(double v, const BinningSpec& spec) {
  std::size_t hits = 0;
  const std::size_t n = spec.endpoints.size();
  for (std::size_t i = 0; i <= n; ++i) {
    const double left = i == 0 ? spec.lo : spec.endpoints[i - 1];
    const double right = i == n ? spec.hi : spec.endpoints[i];
    const bool in = i == 0 ? (v >= left && v <= right) : (v > left && v <= right);
    hits += in;
  }
  return hits;
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, bool with_ties) {
  std::vector<double> v(n);
  std::normal_distribution<double> normal(50.0, 20.0);
  std::uniform_int_distribution<int> small(0, 9);
  for (auto& x : v) x = with_ties ? small(rng) : normal(rng);
  return v;
}

const BinStrategy kStrategies[] = {BinStrategy::equal_proportion, BinStrategy::equal_width, BinStrategy::kbins};

}  // namespace

TEST_CASE("constant input gives a single bin with no endpoints") {
  std::vector<double> v(10, 5.0);
  for (auto s : kStrategies) {
    for (auto rule : {BinRule::sturges(), BinRule::explicit_bins(4), BinRule::freedman_diaconis()}) {
      BinningSpec spec = compute_bins(v, s, rule);
      CHECK(spec.lo == 5.0);
      CHECK(spec.hi == 5.0);
      CHECK(spec.endpoints.empty());
      CHECK(spec.realized_bins() == 1);
    }
  }
}

TEST_CASE("equal proportion on 1..100 with four bins") {
  const auto v = one_to(100);
  BinningSpec spec = compute_bins(v, BinStrategy::equal_proportion, BinRule::explicit_bins(4), "x");
  CHECK(spec.endpoints == std::vector<double>{25, 50, 75});
  CHECK(bin_counts(v, spec) == std::vector<std::size_t>{25, 25, 25, 25});
  CHECK(spec.requested_bins == 4);
  CHECK(spec.realized_bins() == 4);
}

TEST_CASE("Sturges bin counts") {
  CHECK(sturges_bins(64) == 7);
  CHECK(sturges_bins(65) == 8);
  CHECK(sturges_bins(100) == 8);
  CHECK(sturges_bins(1) == 1);
  CHECK(sturges_bins(2) == 2);
  BinningSpec spec = compute_bins(one_to(64), BinStrategy::equal_width, BinRule::sturges());
  CHECK(spec.requested_bins == 7);
  CHECK(spec.realized_bins() == 7);
}

TEST_CASE("Freedman-Diaconis bin count") {
  // 1..64: IQR = 48.25 - 16.75 = 31.5, width = 63 / 4 = 15.75, range 63 -> 4 bins
  const auto v = one_to(64);
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(16.75));
  CHECK(quantile_sorted(v, 0.75) == doctest::Approx(48.25));
  CHECK(freedman_diaconis_bins(v) == 4);
  BinningSpec spec = compute_bins(v, BinStrategy::equal_width, BinRule::freedman_diaconis());
  CHECK_FALSE(spec.fallback_applied);
  CHECK(spec.requested_bins == 4);
}

TEST_CASE("Freedman-Diaconis falls back to Sturges when IQR is zero") {
  std::vector<double> v(40, 3.0);
  v.push_back(0.0);
  v.push_back(9.0);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(freedman_diaconis_bins(sorted) == 0);
  BinningSpec spec = compute_bins(v, BinStrategy::equal_width, BinRule::freedman_diaconis());
  CHECK(spec.fallback_applied);
  CHECK(spec.requested_bins == sturges_bins(v.size()));
  CHECK(to_json(spec)["fallback_applied"] == true);
}

TEST_CASE("apply_binning labels") {
  BinningSpec spec;
  spec.feature = "x";
  spec.lo = 1;
  spec.hi = 100;
  spec.endpoints = {25, 50, 75};
  CHECK(apply_binning(50, spec) == "x∈(25,50]");
  CHECK(apply_binning(1, spec) == "x∈[1,25]");
  CHECK(apply_binning(25, spec) == "x∈[1,25]");
  CHECK(apply_binning(25.5, spec) == "x∈(25,50]");
  CHECK(apply_binning(100, spec) == "x∈(75,100]");
  CHECK(apply_binning(-7, spec) == "x∈[1,25]");
  CHECK(apply_binning(1e9, spec) == "x∈(75,100]");
  CHECK_THROWS_AS(apply_binning(std::nan(""), spec), std::invalid_argument);
  CHECK_THROWS_AS(apply_binning(INFINITY, spec), std::invalid_argument);
}

TEST_CASE("compute_bins rejects empty and non-finite input") {
  CHECK_THROWS_AS(compute_bins(std::vector<double>{}, BinStrategy::equal_width, BinRule::sturges()),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_bins(std::vector<double>{1, NAN}, BinStrategy::equal_width, BinRule::sturges()),
                  std::invalid_argument);
}

TEST_CASE("partition and monotonicity hold for every strategy and rule") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 60; ++round) {
    const bool ties = round % 3 == 0;
    const auto values = random_values(rng, 20 + round * 7, ties);
    for (auto s : kStrategies) {
      for (auto rule : {BinRule::sturges(), BinRule::freedman_diaconis(), BinRule::explicit_bins(1 + round % 9)}) {
        const BinningSpec spec = compute_bins(values, s, rule);
        for (std::size_t i = 0; i < spec.endpoints.size(); ++i) {
          CHECK(spec.endpoints[i] > (i == 0 ? spec.lo : spec.endpoints[i - 1]));
          CHECK(spec.endpoints[i] < spec.hi);
        }
        CHECK(spec.realized_bins() <= spec.requested_bins);
        std::vector<double> probes = values;
        probes.insert(probes.end(), spec.endpoints.begin(), spec.endpoints.end());
        probes.push_back(spec.lo);
        probes.push_back(spec.hi);
        std::sort(probes.begin(), probes.end());
        for (std::size_t i = 0; i < probes.size(); ++i) {
          CHECK(matching_bins(probes[i], spec) == 1);
          if (i > 0) CHECK(bin_index(probes[i - 1], spec) <= bin_index(probes[i], spec));
        }
      }
    }
  }
}

TEST_CASE("equal proportion gives exact counts when the bin count divides N") {
  std::mt19937_64 rng(5);
  for (std::size_t n_bins : {2u, 4u, 5u, 8u}) {
    auto values = random_values(rng, n_bins * 25, false);
    const BinningSpec spec = compute_bins(values, BinStrategy::equal_proportion, BinRule::explicit_bins(n_bins));
    REQUIRE(spec.realized_bins() == n_bins);
    for (auto c : bin_counts(values, spec)) CHECK(c == 25);
  }
}

TEST_CASE("equal proportion with ties deviates by at most the boundary multiplicity") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 30; ++round) {
    auto values = random_values(rng, 120, true);
    const std::size_t n_bins = 4;
    const BinningSpec spec = compute_bins(values, BinStrategy::equal_proportion, BinRule::explicit_bins(n_bins));
    const auto counts = bin_counts(values, spec);
    std::vector<double> boundaries = spec.endpoints;
    boundaries.push_back(spec.lo);
    boundaries.push_back(spec.hi);
    std::size_t max_mult = 0;
    for (double e : boundaries)
      max_mult = std::max<std::size_t>(max_mult, std::count(values.begin(), values.end(), e));
    CHECK(std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == values.size());
    for (auto c : counts) CHECK(std::abs(static_cast<double>(c) - 30.0) <= static_cast<double>(max_mult));
  }
}

TEST_CASE("equal width interior bins have equal width") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 40; ++round) {
    auto values = random_values(rng, 200, false);
    const BinningSpec spec =
        compute_bins(values, BinStrategy::equal_width, BinRule::explicit_bins(2 + round % 10));
    REQUIRE(spec.endpoints.size() >= 1);
    const double width = (spec.hi - spec.lo) / static_cast<double>(spec.requested_bins);
    CHECK(spec.endpoints.front() - spec.lo == doctest::Approx(width).epsilon(1e-9));
    for (std::size_t i = 1; i < spec.endpoints.size(); ++i)
      CHECK(spec.endpoints[i] - spec.endpoints[i - 1] == doctest::Approx(width).epsilon(1e-9));
    CHECK(spec.hi - spec.endpoints.back() == doctest::Approx(width).epsilon(1e-9));
  }
}

TEST_CASE("k-bins assignment is a Voronoi partition of the final centers") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 40; ++round) {
    auto values = random_values(rng, 150, round % 4 == 0);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = 2 + round % 7;
    const BinningSpec spec = compute_bins(values, BinStrategy::kbins, BinRule::explicit_bins(k));
    const auto centers = kmeans_centers_1d(sorted, k);
    REQUIRE(spec.realized_bins() == centers.size());
    for (double v : values) {
      const std::size_t own = bin_index(v, spec);
      for (std::size_t j = 0; j < centers.size(); ++j) {
        const double d_own = std::abs(v - centers[own]);
        const double d_other = std::abs(v - centers[j]);
        if (j < own) CHECK(d_own < d_other + 1e-12);   // ties go to the lower bin
        if (j > own) CHECK(d_own <= d_other + 1e-12);
      }
    }
  }
}

TEST_CASE("k-means on well separated clusters finds their means") {
  std::vector<double> v = {1, 2, 3, 101, 102, 103, 1001, 1002, 1003};
  const auto centers = kmeans_centers_1d(v, 3);
  REQUIRE(centers.size() == 3);
  CHECK(centers[0] == doctest::Approx(2));
  CHECK(centers[1] == doctest::Approx(102));
  CHECK(centers[2] == doctest::Approx(1002));
}

TEST_CASE("binning spec JSON round trip") {
  const BinningSpec spec = compute_bins(one_to(100), BinStrategy::equal_proportion, BinRule::explicit_bins(4), "cpu");
  const auto j = to_json(spec);
  CHECK(j["feature"] == "cpu");
  CHECK(j["realized_bins"] == 4);
  CHECK(j["bin_rule"] == "4");
  const BinningSpec back = binning_spec_from_json(j);
  CHECK(back.endpoints == spec.endpoints);
  CHECK(back.lo == spec.lo);
  CHECK(back.hi == spec.hi);
  CHECK(back.strategy == spec.strategy);
  auto broken = j;
  broken["endpoints"] = {50, 25};
  CHECK_THROWS(binning_spec_from_json(broken));
}

TEST_CASE("bin rules and strategies parse") {
  CHECK(parse_bin_rule("fd").kind == BinRule::Kind::freedman_diaconis);
  CHECK(parse_bin_rule("7").count == 7);
  CHECK_THROWS(parse_bin_rule("0"));
  CHECK_THROWS(parse_bin_rule("seven"));
  CHECK(parse_bin_strategy("kbins") == BinStrategy::kbins);
  CHECK_THROWS(parse_bin_strategy("log"));
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(256) == "256");
}
