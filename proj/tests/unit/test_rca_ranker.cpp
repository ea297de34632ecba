#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "rca/rca_ranker.hpp"
#include "unit/fixtures.hpp"

using namespace rca;
using rca_test::ExampleGroups;

namespace {

struct Golden {
  std::vector<std::string> pattern;
  std::size_t ts, cs;
  double precision, recall, f1;
};

const Golden kTop5[] = {
    {{"e2", "e3"}, 3, 0, 1.0, 0.6, 0.75},
    {{"e2"}, 3, 1, 0.75, 0.6, 0.67},
    {{"e3"}, 3, 2, 0.6, 0.6, 0.6},
    {{"e1", "e2", "e3"}, 2, 0, 1.0, 0.4, 0.57},
    {{"e5", "e7"}, 2, 0, 1.0, 0.4, 0.57},
};

AnalysisResult example_result(ControlMode mode = ControlMode::exact) {
  ExampleGroups ex;
  MiningParams params;
  params.min_support = MinSupport::absolute(2);
  return analyze(ex.test, ex.control, params, mode);
}

}  // namespace

TEST_CASE("precision examples") {
  CHECK(precision(3, 1) == 0.75);
  CHECK(precision(3, 0) == 1.0);
  for (std::size_t k = 1; k < 10; ++k) CHECK(precision(k, k) == 0.5);
  CHECK_THROWS_AS(precision(0, 3), std::domain_error);
}

TEST_CASE("recall examples") {
  CHECK(recall(3, 5) == 0.6);
  CHECK(recall(2, 5) == 0.4);
  CHECK(recall(7, 7) == 1.0);
  CHECK_THROWS_AS(recall(1, 0), std::domain_error);
  CHECK_THROWS_AS(recall(6, 5), std::domain_error);
}

TEST_CASE("f1 examples") {
  CHECK(f1(1.0, 0.6) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(f1(0.75, 0.6) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  for (double x : {0.1, 0.37, 1.0}) CHECK(f1(x, x) == doctest::Approx(x).epsilon(1e-12));
  CHECK(f1_from_counts(3, 0, 5) == 0.75);
  CHECK(f1_from_counts(3, 1, 5) == doctest::Approx(f1(precision(3, 1), recall(3, 5))).epsilon(1e-15));
}

TEST_CASE("example groups reproduce the top-5 table") {
  const AnalysisResult r = example_result();
  REQUIRE(r.rows.size() >= 5);
  CHECK(r.resolved_min_support == 2);
  CHECK(r.test_size == 5);
  CHECK(r.control_size == 5);
  CHECK(r.warnings.empty());
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& row = r.rows[i];
    CAPTURE(i);
    CHECK(pattern_labels(row.pattern, *r.vocab) == kTop5[i].pattern);
    CHECK(row.test_support() == kTop5[i].ts);
    CHECK(row.control_support() == kTop5[i].cs);
    CHECK(row.precision == doctest::Approx(kTop5[i].precision).epsilon(0.005));
    CHECK(row.recall == doctest::Approx(kTop5[i].recall).epsilon(0.005));
    CHECK(std::abs(row.f1 - kTop5[i].f1) <= 0.005);
  }
}

TEST_CASE("identical groups give precision one half") {
  rca_test::Labeled control;
  for (const auto& [id, events] : rca_test::kExampleTest) control.emplace_back("c" + id, events);
  auto vocab = std::make_shared<Vocabulary>();
  auto t = make_group(GroupRole::test, vocab, rca_test::kExampleTest);
  auto c = make_group(GroupRole::control, vocab, control);
  const auto r = analyze(t, c, MiningParams{});
  REQUIRE_FALSE(r.rows.empty());
  for (const auto& row : r.rows) CHECK(row.precision == 0.5);
}

TEST_CASE("empty test group is an error, empty control group a warning") {
  ExampleGroups ex;
  TraceGroup empty;
  empty.vocab = ex.vocab;
  CHECK_THROWS(analyze(empty, ex.control, MiningParams{}));
  const auto r = analyze(ex.test, empty, MiningParams{});
  CHECK_FALSE(r.warnings.empty());
  for (const auto& row : r.rows) CHECK(row.precision == 1.0);
}

TEST_CASE("groups must share a vocabulary") {
  ExampleGroups a, b;
  CHECK_THROWS(analyze(a.test, b.control, MiningParams{}));
}

TEST_CASE("rows are recomputable from raw counts and correctly ordered") {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 40; ++round) {
    auto vocab = std::make_shared<Vocabulary>();
    auto t = rca_test::random_group(rng, vocab, 5, 20, 10);
    if (t.empty()) continue;
    auto c = rca_test::random_group(rng, vocab, 5, 20, 10, GroupRole::control);
    MiningParams params;
    const double f = 0.1 + 0.05 * (round % 5);
    params.min_support = MinSupport::fraction(f);
    params.max_len = 3;
    const auto exact = analyze(t, c, params);
    const auto faithful = analyze(t, c, params, ControlMode::algorithm_faithful);
    REQUIRE(exact.rows.size() == faithful.rows.size());
    const std::size_t control_threshold = faithful.resolved_min_support_control;

    std::map<Pattern, const PatternStats*> faithful_by_pattern;
    for (const auto& row : faithful.rows) faithful_by_pattern[row.pattern] = &row;

    for (std::size_t i = 0; i < exact.rows.size(); ++i) {
      const auto& row = exact.rows[i];
      const double ts = static_cast<double>(support_of(row.pattern, t).count);
      const auto cs_direct = support_of(row.pattern, c);
      const double cs = static_cast<double>(cs_direct.count);
      const double n = static_cast<double>(t.size());
      CHECK(row.control_ids == cs_direct.traces);
      CHECK(row.precision == doctest::Approx(ts / (ts + cs)).epsilon(1e-12));
      CHECK(row.recall == doctest::Approx(ts / n).epsilon(1e-12));
      CHECK(row.f1 == doctest::Approx(2 * ts / (n + ts + cs)).epsilon(1e-12));
      CHECK(row.recall >= f - 1e-12);
      if (i > 0) {
        const auto& prev = exact.rows[i - 1];
        CHECK(prev.f1 >= row.f1);
        if (prev.f1 == row.f1) CHECK(prev.precision >= row.precision);
      }
      const auto* fr = faithful_by_pattern.at(row.pattern);
      CHECK(fr->control_support() <= row.control_support());
      const std::size_t expected_cs = cs_direct.count >= control_threshold ? cs_direct.count : 0;
      CHECK(fr->control_support() == expected_cs);
    }
  }
}

TEST_CASE("faithful mode on the example reports no control support below threshold") {
  const AnalysisResult r = example_result(ControlMode::algorithm_faithful);
  CHECK(r.control_mode == ControlMode::algorithm_faithful);
  for (const auto& row : r.rows) {
    if (pattern_labels(row.pattern, *r.vocab) == std::vector<std::string>{"e2"}) {
      // (e2) occurs once in the control group, below the threshold of 2
      CHECK(row.control_support() == 0);
      CHECK(row.precision == 1.0);
    }
  }
}

TEST_CASE("separate control threshold in faithful mode") {
  ExampleGroups ex;
  MiningParams params;
  params.min_support = MinSupport::absolute(2);
  const auto r = analyze(ex.test, ex.control, params, ControlMode::algorithm_faithful, MinSupport::absolute(1));
  CHECK(r.resolved_min_support_control == 1);
  for (const auto& row : r.rows) CHECK(row.control_ids == support_of(row.pattern, ex.control).traces);
}

TEST_CASE("analysis is independent of the worker count") {
  std::mt19937_64 rng(5);
  auto vocab = std::make_shared<Vocabulary>();
  auto t = rca_test::random_group(rng, vocab, 8, 300, 20);
  auto c = rca_test::random_group(rng, vocab, 8, 300, 20, GroupRole::control);
  MiningParams params;
  params.min_support = MinSupport::fraction(0.1);
  params.workers = 1;
  const auto a = analyze(t, c, params);
  params.workers = 4;
  const auto b = analyze(t, c, params);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].pattern == b.rows[i].pattern);
    CHECK(a.rows[i].test_ids == b.rows[i].test_ids);
    CHECK(a.rows[i].control_ids == b.rows[i].control_ids);
    CHECK(a.rows[i].f1 == b.rows[i].f1);
  }
}

TEST_CASE("control modes parse") {
  CHECK(parse_control_mode("exact") == ControlMode::exact);
  CHECK(parse_control_mode("algorithm_faithful") == ControlMode::algorithm_faithful);
  CHECK(to_string(ControlMode::algorithm_faithful) == "algorithm_faithful");
  CHECK_THROWS(parse_control_mode("fast"));
}
