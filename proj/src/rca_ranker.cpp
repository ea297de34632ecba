#include "rca/rca_ranker.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace rca {

double precision(std::size_t ts_count, std::size_t cs_count) {
  if (ts_count == 0) throw std::domain_error("precision undefined for a pattern absent from the test group");
  return static_cast<double>(ts_count) / static_cast<double>(ts_count + cs_count);
}

double recall(std::size_t ts_count, std::size_t test_size) {
  if (test_size == 0) throw std::domain_error("recall undefined for an empty test group");
  if (ts_count == 0 || ts_count > test_size) throw std::domain_error("recall: test support out of range");
  return static_cast<double>(ts_count) / static_cast<double>(test_size);
}

double f1(double precision, double recall) {
  return 2.0 * precision * recall / (precision + recall);
}

double f1_from_counts(std::size_t ts_count, std::size_t cs_count, std::size_t test_size) {
  if (ts_count == 0) throw std::domain_error("f1 undefined for a pattern absent from the test group");
  return 2.0 * static_cast<double>(ts_count) / static_cast<double>(test_size + ts_count + cs_count);
}

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::exact ? "exact" : "algorithm_faithful";
}

ControlMode parse_control_mode(std::string_view text) {
  if (text == "exact") return ControlMode::exact;
  if (text == "algorithm_faithful" || text == "faithful") return ControlMode::algorithm_faithful;
  throw std::invalid_argument("unknown control mode: " + std::string(text));
}

bool rank_before(const PatternStats& a, const PatternStats& b, std::size_t test_size) {
  using u128 = unsigned __int128;
  const u128 ta = a.test_support(), ca = a.control_support();
  const u128 tb = b.test_support(), cb = b.control_support();
  const u128 n = test_size;
  // F1 = 2|ts| / (|T| + |ts| + |cs|)
  const u128 f1_a = ta * (n + tb + cb), f1_b = tb * (n + ta + ca);
  if (f1_a != f1_b) return f1_a > f1_b;
  const u128 p_a = ta * (tb + cb), p_b = tb * (ta + ca);
  if (p_a != p_b) return p_a > p_b;
  if (a.pattern.size() != b.pattern.size()) return a.pattern.size() > b.pattern.size();
  return a.pattern < b.pattern;
}

namespace {

std::vector<std::vector<TraceIndex>> faithful_control_ids(const std::vector<MinedPattern>& mined,
                                                          const TraceGroup& control,
                                                          const MiningParams& params) {
  std::map<Pattern, std::vector<TraceIndex>> in_control;
  for (auto& mp : extract_patterns(control, params)) in_control.emplace(mp.pattern, std::move(mp.supporting));
  std::vector<std::vector<TraceIndex>> out(mined.size());
  for (std::size_t i = 0; i < mined.size(); ++i)
    if (auto it = in_control.find(mined[i].pattern); it != in_control.end()) out[i] = it->second;
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

AnalysisResult analyze(const TraceGroup& test, const TraceGroup& control, const MiningParams& params,
                       ControlMode control_mode, std::optional<MinSupport> control_min_support) {
  if (test.empty()) throw std::invalid_argument("analyze: empty test group");
  if (test.vocab && control.vocab && test.vocab != control.vocab)
    throw std::invalid_argument("analyze: test and control groups must share one vocabulary");

  AnalysisResult result;
  result.control_mode = control_mode;
  result.test_size = test.size();
  result.control_size = control.size();
  result.resolved_min_support = params.min_support.resolve(test.size());
  MiningParams control_params = params;
  if (control_min_support) control_params.min_support = *control_min_support;
  result.resolved_min_support_control = control_params.min_support.resolve(control.size());
  result.vocab = test.vocab;
  for (const auto& t : test.traces) result.test_trace_ids.push_back(t.trace_id);
  for (const auto& t : control.traces) result.control_trace_ids.push_back(t.trace_id);
  if (control.empty())
    result.warnings.push_back("control group is empty: every precision is 1.0");

  auto clock = std::chrono::steady_clock::now();
  std::vector<MinedPattern> mined = extract_patterns(test, params);
  result.timings.mine_ms = elapsed_ms(clock);
  clock = std::chrono::steady_clock::now();

  std::vector<std::vector<TraceIndex>> control_ids;
  if (control_mode == ControlMode::exact) {
    std::vector<Pattern> patterns;
    patterns.reserve(mined.size());
    for (const auto& mp : mined) patterns.push_back(mp.pattern);
    control_ids = count_supports(patterns, control, params.workers);
  } else {
    control_ids = faithful_control_ids(mined, control, control_params);
  }

  result.timings.control_ms = elapsed_ms(clock);
  clock = std::chrono::steady_clock::now();

  result.rows.reserve(mined.size());
  for (std::size_t i = 0; i < mined.size(); ++i) {
    PatternStats row;
    row.pattern = std::move(mined[i].pattern);
    row.test_ids = std::move(mined[i].supporting);
    row.control_ids = std::move(control_ids[i]);
    row.precision = precision(row.test_support(), row.control_support());
    row.recall = recall(row.test_support(), test.size());
    row.f1 = f1_from_counts(row.test_support(), row.control_support(), test.size());
    result.rows.push_back(std::move(row));
  }
  const std::size_t n = test.size();
  std::sort(result.rows.begin(), result.rows.end(),
            [n](const PatternStats& a, const PatternStats& b) { return rank_before(a, b, n); });
  result.timings.score_ms = elapsed_ms(clock);
  return result;
}

}  // namespace rca
