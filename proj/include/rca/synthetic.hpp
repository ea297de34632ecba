#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rca/trace_store.hpp"

namespace rca {

/// Parameters of a synthetic test/control corpus: uniform noise events with
/// signal patterns planted into a fraction of test traces.
struct CorpusSpec {
  std::size_t traces_per_group = 1000;
  std::size_t median_length = 20;
  std::size_t vocab_size = 200;
  std::size_t signal_patterns = 3;
  std::size_t signal_length = 3;
  double test_plant_fraction = 0.3;
  double control_plant_fraction = 0.02;
  std::string noise_prefix = "ev";
  std::string signal_prefix = "sig";
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<TraceRecord> test;
  std::vector<TraceRecord> control;
  std::vector<std::vector<std::string>> signals;
};

/// Trace lengths are uniform on [median/2, 3*median/2], so the median is `median_length`.
SyntheticCorpus generate_corpus(const CorpusSpec& spec);

struct BenchPreset {
  std::string name;
  std::size_t traces_per_group;
  std::size_t median_length;
  double min_support;
  std::size_t vocab_size = 200;
  std::size_t max_len = 5;
};

/// "easy" (3000 traces, length 20, support 0.05) or "medium" (10000, 40, 0.0275).
BenchPreset bench_preset(std::string_view name);

/// One synthetic regression: its own test and control groups.
struct SyntheticRegression {
  std::string id;
  std::size_t planted_group = 0;
  SyntheticCorpus corpus;
};

struct RegressionSuiteSpec {
  std::size_t groups = 10;
  std::size_t per_group = 3;
  std::size_t traces_per_group = 200;
  std::size_t median_length = 20;
  std::size_t noise_vocab = 200;
  double planted_support = 0.85;
  std::uint64_t seed = 7;
};

/// Regressions in the same planted group share one dominant signal pattern;
/// noise is drawn independently per regression.
std::vector<SyntheticRegression> generate_regression_suite(const RegressionSuiteSpec& spec);

}  // namespace rca
