#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rca/pattern_miner.hpp"

namespace rca {

/// Statistics of one test-group pattern. Id vectors index into the test and
/// control groups respectively.
struct PatternStats {
  Pattern pattern;
  std::vector<TraceIndex> test_ids;
  std::vector<TraceIndex> control_ids;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  std::size_t test_support() const { return test_ids.size(); }
  std::size_t control_support() const { return control_ids.size(); }
};

/// |ts| / (|ts| + |cs|). Throws when ts_count is zero.
double precision(std::size_t ts_count, std::size_t cs_count);
/// ts_count / test_size. Throws when test_size is zero or ts_count is out of range.
double recall(std::size_t ts_count, std::size_t test_size);
/// Harmonic mean of precision and recall.
double f1(double precision, double recall);
/// Same value as f1(precision, recall) but rounded once: 2·ts / (|T| + ts + cs).
double f1_from_counts(std::size_t ts_count, std::size_t cs_count, std::size_t test_size);

enum class ControlMode {
  exact,               // control support recounted directly over C
  algorithm_faithful,  // control support joined from patterns mined in C
};

std::string_view to_string(ControlMode mode);
ControlMode parse_control_mode(std::string_view text);

/// Wall time per stage, in milliseconds. Not part of any canonical output.
struct StageTimings {
  double mine_ms = 0.0;
  double control_ms = 0.0;
  double score_ms = 0.0;
};

struct AnalysisResult {
  std::vector<PatternStats> rows;  // ranked
  ControlMode control_mode = ControlMode::exact;
  std::size_t resolved_min_support = 0;          // test group
  std::size_t resolved_min_support_control = 0;  // control group
  std::size_t test_size = 0;
  std::size_t control_size = 0;
  std::vector<std::string> warnings;
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<std::string> test_trace_ids;
  std::vector<std::string> control_trace_ids;
  StageTimings timings;
};

/// Ranking order: F1 descending, then precision descending, then longer
/// pattern, then canonical pattern order. F1 and precision compare exactly
/// on their integer counts.
bool rank_before(const PatternStats& a, const PatternStats& b, std::size_t test_size);

/// Mines the test group, scores each pattern against the control group, and ranks by F1.
/// `control_min_support` overrides the threshold used when mining the control
/// group in algorithm_faithful mode. Throws on an empty test group.
AnalysisResult analyze(const TraceGroup& test, const TraceGroup& control, const MiningParams& params,
                       ControlMode control_mode = ControlMode::exact,
                       std::optional<MinSupport> control_min_support = std::nullopt);

}  // namespace rca
