#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rca/discretize.hpp"
#include "rca/rca_ranker.hpp"
#include "rca/redundancy_filter.hpp"
#include "rca/report.hpp"
#include "rca/synthetic.hpp"

namespace rca {

enum class ReportFormat { json, table };

struct RunConfig {
  std::string test_path;
  std::string control_path;
  double min_support = 0.05;
  std::optional<double> control_min_support;
  std::size_t max_len = kDefaultMaxLen;
  double similarity_threshold = kDefaultSimilarityThreshold;
  ControlMode control_mode = ControlMode::exact;
  BinStrategy binning = BinStrategy::equal_proportion;
  BinRule bins = BinRule::sturges();
  std::string output_path;
  ReportFormat format = ReportFormat::json;
  int workers = 0;
  std::size_t top_k = 10;
};

/// Throws std::invalid_argument when a parameter is out of range.
void validate(const RunConfig& config);

/// The echo of user-visible parameters embedded in every report.
Json config_json(const RunConfig& config);

struct LoadedGroups {
  TraceGroup test;
  TraceGroup control;
  std::vector<BinningSpec> binning;
};

/// Parses both groups, bins each numeric feature over the union of their
/// values, and interns everything into one shared vocabulary.
LoadedGroups load_groups(const std::vector<TraceRecord>& test, const std::vector<TraceRecord>& control,
                         BinStrategy strategy, BinRule rule);

struct PipelineOutput {
  AnalysisResult result;
  DedupeResult deduped;
  Json report;
  double dedupe_ms = 0.0;
};

PipelineOutput run_pipeline(const LoadedGroups& groups, const RunConfig& config);

/// Exit codes shared by the command entry points.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitEmptyTest = 2;

/// Analyze two JSON Lines files and write the report. Prints the top rows to `out`.
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Link analysis reports by cosine distance and write the cluster report.
int cmd_link(const std::vector<std::string>& report_paths, double threshold, const std::string& output_path,
             std::ostream& out, std::ostream& err, int workers = 0);

struct BenchConfig {
  std::string preset = "easy";
  std::optional<std::size_t> traces;
  std::optional<std::size_t> median_length;
  std::optional<double> min_support;
  std::optional<std::size_t> vocab;
  std::size_t max_len = kDefaultMaxLen;
  int workers = 0;
  std::uint64_t seed = 1;
  double budget_seconds = 180.0;
  /// Sweep one dimension: "traces", "length" or "support"; values replace the preset's.
  std::string sweep;
  std::vector<double> sweep_values;
};

struct BenchRow {
  std::string preset;
  std::size_t traces = 0;
  std::size_t median_length = 0;
  std::size_t vocab = 0;
  double min_support = 0.0;
  std::size_t max_len = 0;
  int workers = 0;
  std::size_t patterns = 0;
  std::size_t kept = 0;
  double generate_ms = 0.0;
  double ingest_ms = 0.0;
  double mine_ms = 0.0;
  double control_ms = 0.0;
  double score_ms = 0.0;
  double dedupe_ms = 0.0;
  double total_ms = 0.0;
  std::string status = "ok";
  Json report;
};

/// Generates one synthetic corpus and runs the whole pipeline on it.
BenchRow run_bench_case(const BenchPreset& preset, int workers, std::uint64_t seed, double budget_seconds);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

/// Runs the preset (or a sweep) and writes CSV to `out`.
int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rca
