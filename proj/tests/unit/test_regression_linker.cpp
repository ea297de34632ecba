#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <map>
#include <set>

#include <doctest.h>

#include "rca/rca_ranker.hpp"
#include "rca/regression_linker.hpp"
#include "unit/fixtures.hpp"

using namespace rca;

namespace {

RegressionAnalysis analysis(std::string id, std::vector<PatternScore> scores) {
  return {std::move(id), std::move(scores)};
}

RegressionVector vec(std::string id, std::size_t dim, std::vector<std::pair<std::size_t, double>> coords) {
  return {std::move(id), dim, std::move(coords)};
}

std::vector<RegressionVector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> value(0.05, 1.0);
  std::bernoulli_distribution present(0.3);
  std::vector<RegressionVector> out;
  // a few base vectors plus noisy copies so some pairs fall under the threshold
  std::vector<std::vector<double>> bases(4, std::vector<double>(dim));
  for (auto& b : bases)
    for (auto& x : b) x = present(rng) ? value(rng) : 0.0;
  std::uniform_int_distribution<std::size_t> pick(0, bases.size() - 1);
  std::normal_distribution<double> jitter(0.0, 0.15);
  for (std::size_t i = 0; i < n; ++i) {
    RegressionVector v;
    v.regression_id = "r" + std::to_string(100 + i);
    v.dimension = dim;
    const auto& base = bases[pick(rng)];
    for (std::size_t k = 0; k < dim; ++k) {
      double x = base[k] > 0 ? std::max(0.0, base[k] + jitter(rng)) : (present(rng) && present(rng) ? value(rng) : 0);
      if (x > 0) v.coords.emplace_back(k + 1, x);
    }
    if (v.coords.empty()) v.coords.emplace_back(1, 0.5);
    out.push_back(std::move(v));
  }
  return out;
}

// Union-find over a dense matrix written independently of the library.
std::set<std::set<std::string>> oracle_components(const std::vector<RegressionVector>& vs, double threshold) {
  const std::size_t n = vs.size();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  auto root = [&](std::size_t x) {
    while (label[x] != x) x = label[x];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> a(vs[i].dimension + 1), b(vs[j].dimension + 1);
      for (auto [k, x] : vs[i].coords) a[k] = x;
      for (auto [k, x] : vs[j].coords) b[k] = x;
      const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
      const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
      const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
      if (1.0 - dot / (na * nb) <= threshold + 1e-12) label[root(i)] = root(j);
    }
  }
  std::map<std::size_t, std::set<std::string>> comps;
  for (std::size_t i = 0; i < n; ++i) comps[root(i)].insert(vs[i].regression_id);
  std::set<std::set<std::string>> out;
  for (auto& [r, c] : comps) out.insert(c);
  return out;
}

std::set<std::set<std::string>> as_sets(const LinkReport& r) {
  std::set<std::set<std::string>> out;
  for (const auto& c : r.clusters) out.insert({c.members.begin(), c.members.end()});
  return out;
}

}  // namespace

TEST_CASE("index is the canonical union of all patterns") {
  const LabeledPattern A{"a"}, B{"b"}, C{"a", "c"};
  std::vector<RegressionAnalysis> as{analysis("r1", {{C, 1, 1, 1}, {A, 1, 1, 1}}),
                                     analysis("r2", {{B, 1, 1, 1}, {C, 1, 1, 1}})};
  const auto index = build_index(as);
  CHECK(index.patterns() == std::vector<LabeledPattern>{A, B, C});
  CHECK(index.dimension() == 9);
  CHECK(index.position(A) == 1);
  CHECK(index.position(C) == 3);
  CHECK_THROWS_AS(index.position({"zzz"}), std::out_of_range);
  CHECK_THROWS_AS(build_index(std::vector<RegressionAnalysis>{}), std::invalid_argument);
}

TEST_CASE("one regression with n patterns has dimension 3n; duplicates collapse") {
  std::vector<RegressionAnalysis> one{analysis("r", {{{"a"}, 1, 1, 1}, {{"b"}, 1, 1, 1}, {{"c"}, 1, 1, 1}})};
  CHECK(build_index(one).dimension() == 9);
  std::vector<RegressionAnalysis> five;
  for (int i = 0; i < 5; ++i) five.push_back(analysis("r" + std::to_string(i), {{{"x", "y"}, 1, 0.5, 0.6}}));
  CHECK(build_index(five).patterns().size() == 1);
}

TEST_CASE("encoding writes triplets at 1-based positions") {
  const LabeledPattern p1{"e2", "e3"}, p2{"e5", "e7"};
  const GlobalPatternIndex index({p1, p2});
  const auto v = encode_regression(analysis("r", {{p1, 1.0, 0.6, 0.75}}), index);
  CHECK(v.dimension == 6);
  CHECK(v.at(1) == 1.0);
  CHECK(v.at(2) == 0.6);
  CHECK(v.at(3) == 0.75);
  for (std::size_t k = 4; k <= 6; ++k) CHECK(v.at(k) == 0.0);
  CHECK_THROWS_AS(encode_regression(analysis("s", {{{"nope"}, 1, 1, 1}}), index), std::out_of_range);
}

TEST_CASE("empty analysis encodes to a zero vector that linking excludes") {
  const GlobalPatternIndex index({{"a"}});
  const auto zero = encode_regression(analysis("empty", {}), index);
  CHECK(zero.is_zero());
  const auto live = encode_regression(analysis("live", {{{"a"}, 1, 1, 1}}), index);
  CHECK_THROWS_AS(cosine_distance(zero, live), std::invalid_argument);
  const auto r = link_regressions(std::vector<RegressionVector>{zero, live});
  CHECK(r.excluded_zero_vectors == std::vector<std::string>{"empty"});
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].members == std::vector<std::string>{"live"});
}

TEST_CASE("identical analyses give identical vectors at distance zero") {
  rca_test::ExampleGroups ex;
  MiningParams params;
  params.min_support = MinSupport::absolute(2);
  const auto result = analyze(ex.test, ex.control, params);
  std::vector<RegressionAnalysis> as{to_regression("a", result), to_regression("b", result)};
  const auto index = build_index(as);
  const auto va = encode_regression(as[0], index), vb = encode_regression(as[1], index);
  CHECK(va.coords == vb.coords);
  CHECK(cosine_distance(va, vb) == 0.0);
}

TEST_CASE("cosine distance examples") {
  const auto a = vec("a", 6, {{1, 1.0}, {2, 0.6}, {3, 0.75}});
  const auto b = vec("b", 6, {{4, 1.0}, {5, 0.4}, {6, 0.57}});
  CHECK(cosine_distance(a, a) == 0.0);
  CHECK(cosine_distance(a, b) == 1.0);
  CHECK(cosine_distance(vec("x", 3, {{1, 0.5}}), vec("y", 3, {{1, 1.0}})) == 0.0);
  CHECK_THROWS_AS(cosine_distance(a, vec("c", 9, {{1, 1.0}})), std::invalid_argument);
}

TEST_CASE("cosine distance is symmetric and scale invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  const auto vs = random_vectors(rng, 30, 24);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto scaled = vs[i];
    const double c = scale(rng);
    for (auto& [k, x] : scaled.coords) x *= c;
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const double d = cosine_distance(vs[i], vs[j]);
      CHECK(std::abs(d - cosine_distance(vs[j], vs[i])) <= 1e-12);
      CHECK(std::abs(d - cosine_distance(scaled, vs[j])) <= 1e-9);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
    }
  }
}

TEST_CASE("three identical vectors form one cluster; orthogonal ones stay apart") {
  const auto a = vec("a", 6, {{1, 1.0}, {2, 0.6}, {3, 0.75}});
  auto b = a, c = a;
  b.regression_id = "b";
  c.regression_id = "c";
  const auto r = link_regressions(std::vector<RegressionVector>{c, a, b}, 0.1);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].members == std::vector<std::string>{"a", "b", "c"});
  CHECK(r.clusters[0].diameter == 0.0);
  const auto o = link_regressions(std::vector<RegressionVector>{a, vec("d", 6, {{5, 1.0}})}, 0.1);
  CHECK(o.clusters.size() == 2);
}

TEST_CASE("linking matches a union-find oracle and only merges as the threshold grows") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 30; ++round) {
    const auto vs = random_vectors(rng, 20, 30);
    CHECK(pairwise_distances(vs, 3) == pairwise_distances_reference(vs));
    std::set<std::set<std::string>> previous;
    for (double threshold : {0.0, 0.05, 0.1, 0.3, 0.6, 1.0}) {
      const auto r = link_regressions(vs, threshold, 2);
      const auto comps = as_sets(r);
      if (threshold == 0.3) CHECK(comps == oracle_components(vs, threshold));
      std::size_t total = 0;
      for (const auto& c : comps) total += c.size();
      CHECK(total == vs.size());
      for (const auto& old : previous) {
        bool inside = false;
        for (const auto& c : comps) inside |= std::includes(c.begin(), c.end(), old.begin(), old.end());
        CHECK(inside);
      }
      for (std::size_t c = 1; c < r.clusters.size(); ++c)
        CHECK(r.clusters[c - 1].members.front() < r.clusters[c].members.front());
      previous = comps;
    }
  }
}

TEST_CASE("link report JSON layout") {
  const auto a = vec("a", 3, {{1, 1.0}});
  const auto j = to_json(link_regressions(std::vector<RegressionVector>{a}, 0.1));
  CHECK(j.dump() == R"({"threshold":0.1,"clusters":[{"members":["a"],"diameter":0.0}],"excluded_zero_vectors":[]})");
}
